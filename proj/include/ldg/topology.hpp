#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ldg/domain.hpp"

namespace ldg {

// Signed biaxiality per node. Exterior and isotropic nodes are not defined.
struct BiaxField {
    std::shared_ptr<const Grid> grid;
    std::vector<double> beta;          // NaN where undefined
    std::vector<std::uint8_t> masked;  // 1 where |Q| < iso_tol on a non-Exterior node
    double iso_tol = kIsoTol;
    double beta_bar = 1.0;  // min over Boundary nodes
    double beta_0 = 1.0;    // max over Boundary nodes

    bool defined(std::size_t i) const { return grid->kind[i] != NodeKind::Exterior && !masked[i]; }
};

BiaxField biaxiality_field(const TensorField& field, double iso_tol = kIsoTol);

struct MeshComponent {
    int vertices = 0;
    int edges = 0;
    int faces = 0;
    int euler = 0;
    bool closed = false;        // every edge has two faces and no vertex was capped
    std::optional<int> genus;   // (2 - euler)/2 for closed components
    double area = 0.0;
    Vec3 box_min{}, box_max{};
};

// Triangle mesh of a level set. Vertices sit on grid edges (node a to node b at
// parameter w) so fields can be interpolated onto them. Triangles are oriented
// so their normals point out of the extracted sublevel region.
struct LevelSetMesh {
    double level = 0.0;
    std::vector<Vec3> vertices;
    std::vector<std::array<std::size_t, 2>> vertex_edge;  // grid nodes a, b
    std::vector<double> vertex_weight;                    // position = (1-w) x_a + w x_b
    std::vector<std::uint8_t> vertex_capped;              // edge ends on an undefined node
    std::vector<std::array<std::uint32_t, 3>> triangles;
    std::vector<int> triangle_component;
    std::vector<MeshComponent> components;

    std::vector<int> genera() const;  // genus of each closed component
    int max_genus() const;            // -1 when no component is closed
};

// Boundary of {f <= t} inside the grid by marching tetrahedra on the six-tetrahedron
// (Kuhn) split of each cell. Nodes with defined[i] == 0 count as outside the
// region; edges to them are capped at the midpoint and mark the component open.
LevelSetMesh extract_surface(const Grid& grid, const std::vector<double>& f, const std::vector<std::uint8_t>& defined,
                             double t);

// Level set {beta = t} as the boundary of {beta <= t}. Throws EmptyLevelSet.
LevelSetMesh extract_level_set(const BiaxField& biax, double t);

// Surface {phi = -offset} just inside the domain boundary, one component per
// boundary sphere, oriented along the outward normal of the domain. The
// default offset 1.25 h keeps every cut edge between non-Exterior nodes.
LevelSetMesh boundary_mesh(const Grid& grid, double offset = -1.0);

// Q interpolated linearly along each vertex's grid edge.
std::vector<QTensor> interpolate_on_mesh(const TensorField& field, const LevelSetMesh& mesh);

// Leading eigenvector with a sign chosen consistently along mesh edges.
struct Lifting {
    std::vector<Vec3> director;             // zero vector at excluded vertices
    std::vector<std::size_t> excluded;      // vertices with lambda_max - lambda_mid < gap_tol |Q|
    double min_edge_dot = 1.0;              // smallest v(a).v(b) over kept mesh edges
};

// Breadth-first sign propagation per component. The seed of each component is
// oriented along the mesh normal. Throws EigenvalueGapTooSmall when every vertex
// is excluded, LiftingObstructed when propagation is inconsistent around a cycle.
Lifting lift_eigenvector(const TensorField& field, const LevelSetMesh& mesh, double gap_tol = 0.05);
Lifting lift_eigenvector(const std::vector<QTensor>& values, const LevelSetMesh& mesh, double gap_tol = 0.05);

struct DegreeResult {
    int degree = 0;
    double raw = 0.0;       // sum of signed solid angles / 4 pi
    double residual = 0.0;  // |raw - degree|
};

// Degree of a vertex map into S^2 over the triangles of one component (or all
// components when component < 0). Throws DegreeUnresolved when the residual
// reaches 0.1 or a triangle touches an undefined vertex.
DegreeResult degree(const std::vector<Vec3>& v, const LevelSetMesh& mesh, int component = -1);

struct RegionReport {
    double t1 = 0.0, t2 = 0.0;
    std::size_t low_nodes = 0;     // {beta <= t1}
    std::size_t high_nodes = 0;    // {beta >= t2}
    std::size_t middle_nodes = 0;  // {t1 < beta < t2}
    std::size_t masked_nodes = 0;
    bool low_empty = true, high_empty = true;
    int low_components = 0, high_components = 0;  // connected node sets
    std::vector<int> low_genera, high_genera;     // genus of each closed boundary surface
    bool surrogate_linked = false;
    std::string note;
};

// Both regions nonempty and each bounded by a closed surface of positive genus.
RegionReport region_report(const BiaxField& biax, double t1, double t2);

struct AttainmentReport {
    double min_beta = 1.0, max_beta = -1.0;
    Vec3 argmin{};
    std::vector<double> levels;
    std::vector<bool> attained;
    double beta_bar = 1.0;
    bool hp1 = true;                 // beta_bar > -1
    std::optional<int> boundary_degree;
    std::optional<bool> hp3;         // boundary degree odd
};

AttainmentReport attainment_check(const BiaxField& biax, std::optional<int> boundary_degree = std::nullopt,
                                  const std::vector<double>& levels = {-0.99, -0.9, 0.0, 0.9, 0.99});

// Genus lists of {beta = t + d} for d in {-0.02, 0, 0.02}; empty lists for empty levels.
std::array<std::vector<int>, 3> level_sensitivity(const BiaxField& biax, double t);

void write_obj(std::ostream& out, const LevelSetMesh& mesh);
void write_components_csv(std::ostream& out, const LevelSetMesh& mesh);
// JSON object with keys t1, t2, region_genus_lists, surrogate_linked, attainment.
std::string region_report_json(const RegionReport& region, const AttainmentReport& attainment);

// Synthetic icosphere of radius 1 with the given number of 4:1 subdivisions.
LevelSetMesh icosphere(int subdivisions);

}  // namespace ldg
