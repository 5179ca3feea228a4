#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "ldg/qtensor.hpp"

namespace ldg {

struct Hole {
    Vec3 center{};
    double radius = 0.0;
};

// Outer ball of radius outer_radius centred at the origin, with disjoint ball-shaped holes.
struct DomainSpec {
    double outer_radius = 1.0;
    std::vector<Hole> holes;

    int boundary_components() const { return 1 + static_cast<int>(holes.size()); }
    bool odd_boundary_components() const { return boundary_components() % 2 == 1; }

    // Negative inside the domain.
    double signed_distance(const Vec3& x) const;

    // Boundary component nearest to x: 0 for the outer sphere, k for hole k-1.
    int nearest_component(const Vec3& x) const;

    // Outward radial direction of the nearest boundary component (the hedgehog director).
    Vec3 radial_director(const Vec3& x) const;
};

enum class NodeKind : std::uint8_t { Interior = 0, Boundary = 1, Exterior = 2 };

using SignedDistance = std::function<double(const Vec3&)>;

// Axis-aligned cubic node grid. Interior nodes lie strictly inside the domain;
// Boundary nodes are the one-cell band just outside that carries Dirichlet data.
class Grid {
public:
    int n = 0;
    double h = 0.0;
    Vec3 origin{};
    std::vector<NodeKind> kind;
    std::vector<double> phi;     // signed distance per node
    std::vector<double> weight;  // dual-cell volume inside the domain
    std::vector<std::size_t> interior;
    // Per interior node: neighbour indices in order -x,+x,-y,+y,-z,+z and the
    // fraction of each connecting edge that lies inside the domain.
    std::vector<std::array<std::size_t, 6>> neighbors;
    std::vector<std::array<double, 6>> edge_fraction;
    std::optional<DomainSpec> spec;
    SignedDistance sdf;

    std::size_t size() const { return kind.size(); }
    std::size_t index(int i, int j, int k) const {
        return static_cast<std::size_t>(i) +
               static_cast<std::size_t>(n) * (static_cast<std::size_t>(j) +
                                              static_cast<std::size_t>(n) * static_cast<std::size_t>(k));
    }
    std::array<int, 3> ijk(std::size_t idx) const {
        const auto nn = static_cast<std::size_t>(n);
        return {static_cast<int>(idx % nn), static_cast<int>((idx / nn) % nn),
                static_cast<int>(idx / (nn * nn))};
    }
    Vec3 position(int i, int j, int k) const {
        return {origin[0] + h * i, origin[1] + h * j, origin[2] + h * k};
    }
    Vec3 position(std::size_t idx) const {
        const auto c = ijk(idx);
        return position(c[0], c[1], c[2]);
    }
    bool in_domain(std::size_t idx) const { return kind[idx] != NodeKind::Exterior; }
    int boundary_components() const { return spec ? spec->boundary_components() : 1; }
    bool hp3_hint() const { return spec && spec->odd_boundary_components(); }

    // Sum of weights over non-Exterior nodes.
    double volume() const;
};

// Padding factor of the bounding cube relative to the outer radius.
inline constexpr double kGridPadding = 1.0625;

// Throws ResolutionTooCoarse / InvalidDomain.
std::shared_ptr<const Grid> build_grid(const DomainSpec& spec, int n);

// Grid over [-half_extent, half_extent]^3 for an arbitrary signed distance function.
std::shared_ptr<const Grid> build_grid_from_sdf(SignedDistance sdf, double half_extent, int n);

// Quadrature weight per node: volume of the node's dual cell inside the domain.
std::vector<double> cell_volume_weights(const Grid& grid);

// Fraction of the dual cell of node idx where inside(x) holds, by m^3 subsampling.
double dual_cell_fraction(const Grid& grid, std::size_t idx, const std::function<bool(const Vec3&)>& inside,
                          int m = 6);

struct TensorField {
    std::shared_ptr<const Grid> grid;
    std::vector<QTensor> values;

    TensorField() = default;
    explicit TensorField(std::shared_ptr<const Grid> g)
        : grid(std::move(g)), values(grid ? grid->size() : 0) {}

    const QTensor& operator[](std::size_t i) const { return values[i]; }
    QTensor& operator[](std::size_t i) { return values[i]; }
    bool frozen(std::size_t i) const { return grid->kind[i] != NodeKind::Interior; }
};

// Radial anchoring on every boundary component. Boundary and Exterior nodes are
// filled (Exterior with the extended value for diagnostics); Interior nodes are zero.
std::vector<QTensor> boundary_hedgehog(const Grid& grid);

// Positive uniaxial data sqrt(3/2)(v⊗v - I/3) from a per-node director array.
// Throws NotUnit when a Boundary node carries a non-unit director.
std::vector<QTensor> boundary_uniaxial(const Grid& grid, std::span<const Vec3> director);

// Field with the given boundary values and zero interior.
TensorField field_with_boundary(std::shared_ptr<const Grid> grid, const std::vector<QTensor>& bc);

// Field whose every node holds f(position).
TensorField sample_field(std::shared_ptr<const Grid> grid, const std::function<QTensor(const Vec3&)>& f);

// Throws GridMismatch when fields live on different grids.
void require_same_grid(const TensorField& a, const TensorField& b);

}  // namespace ldg
