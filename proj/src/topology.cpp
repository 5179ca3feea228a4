#include "ldg/topology.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <ostream>
#include <queue>
#include <unordered_map>

#include "json.hpp"

namespace ldg {

namespace {

Vec3 sub(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
double dot3(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
double len3(const Vec3& a) { return std::sqrt(dot3(a, a)); }

// Cube corners are numbered dx + 2 dy + 4 dz. Each Kuhn tetrahedron follows a
// monotone path 0 -> e_a -> e_a + e_b -> 7.
constexpr int kKuhn[6][4] = {{0, 1, 3, 7}, {0, 1, 5, 7}, {0, 2, 3, 7},
                             {0, 2, 6, 7}, {0, 4, 5, 7}, {0, 4, 6, 7}};

// The 7 positive lattice offsets that occur as Kuhn edges, and their negatives.
constexpr int kKuhnNbr[14][3] = {{1, 0, 0},  {0, 1, 0},  {0, 0, 1},  {1, 1, 0},   {1, 0, 1},
                                 {0, 1, 1},  {1, 1, 1},  {-1, 0, 0}, {0, -1, 0},  {0, 0, -1},
                                 {-1, -1, 0}, {-1, 0, -1}, {0, -1, -1}, {-1, -1, -1}};

struct UnionFind {
    std::vector<std::uint32_t> parent;
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0u); }
    std::uint32_t find(std::uint32_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(std::uint32_t a, std::uint32_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

std::uint64_t edge_key(std::uint32_t a, std::uint32_t b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | b;
}

// Labels components and fills the per-component counts.
void finalize(LevelSetMesh& m) {
    const std::size_t nv = m.vertices.size();
    if (m.vertex_capped.size() != nv) m.vertex_capped.assign(nv, 0);
    UnionFind uf(nv);
    for (const auto& t : m.triangles) {
        uf.unite(t[0], t[1]);
        uf.unite(t[1], t[2]);
    }
    std::unordered_map<std::uint32_t, int> label;
    m.triangle_component.assign(m.triangles.size(), 0);
    for (std::size_t f = 0; f < m.triangles.size(); ++f) {
        const std::uint32_t root = uf.find(m.triangles[f][0]);
        const auto [it, fresh] = label.emplace(root, static_cast<int>(label.size()));
        m.triangle_component[f] = it->second;
    }
    m.components.assign(label.size(), MeshComponent{});
    for (auto& c : m.components) {
        c.box_min = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
                     std::numeric_limits<double>::infinity()};
        c.box_max = {-c.box_min[0], -c.box_min[1], -c.box_min[2]};
    }

    std::unordered_map<std::uint64_t, int> edge_faces;
    edge_faces.reserve(m.triangles.size() * 2);
    for (std::size_t f = 0; f < m.triangles.size(); ++f) {
        const auto& t = m.triangles[f];
        MeshComponent& c = m.components[static_cast<std::size_t>(m.triangle_component[f])];
        ++c.faces;
        const Vec3 n = cross(sub(m.vertices[t[1]], m.vertices[t[0]]), sub(m.vertices[t[2]], m.vertices[t[0]]));
        c.area += 0.5 * len3(n);
        for (int e = 0; e < 3; ++e) ++edge_faces[edge_key(t[e], t[(e + 1) % 3])];
    }
    std::vector<char> closed(m.components.size(), 1);
    for (const auto& [key, count] : edge_faces) {
        const auto a = static_cast<std::uint32_t>(key >> 32);
        const int c = label.at(uf.find(a));
        ++m.components[static_cast<std::size_t>(c)].edges;
        if (count != 2) closed[static_cast<std::size_t>(c)] = 0;
    }
    std::vector<char> seen(nv, 0);
    for (const auto& t : m.triangles)
        for (std::uint32_t v : t) {
            if (seen[v]) continue;
            seen[v] = 1;
            const int c = label.at(uf.find(v));
            MeshComponent& mc = m.components[static_cast<std::size_t>(c)];
            ++mc.vertices;
            if (m.vertex_capped[v]) closed[static_cast<std::size_t>(c)] = 0;
            for (int a = 0; a < 3; ++a) {
                mc.box_min[a] = std::min(mc.box_min[a], m.vertices[v][a]);
                mc.box_max[a] = std::max(mc.box_max[a], m.vertices[v][a]);
            }
        }
    for (std::size_t c = 0; c < m.components.size(); ++c) {
        MeshComponent& mc = m.components[c];
        mc.euler = mc.vertices - mc.edges + mc.faces;
        mc.closed = closed[c] != 0;
        if (mc.closed && mc.euler % 2 == 0) mc.genus = (2 - mc.euler) / 2;
    }
}

std::vector<std::vector<std::uint32_t>> adjacency(const LevelSetMesh& m) {
    std::vector<std::vector<std::uint32_t>> adj(m.vertices.size());
    for (const auto& t : m.triangles)
        for (int e = 0; e < 3; ++e) {
            const std::uint32_t a = t[e], b = t[(e + 1) % 3];
            adj[a].push_back(b);
            adj[b].push_back(a);
        }
    for (auto& list : adj) {
        std::sort(list.begin(), list.end());
        list.erase(std::unique(list.begin(), list.end()), list.end());
    }
    return adj;
}

std::vector<Vec3> vertex_normals(const LevelSetMesh& m) {
    std::vector<Vec3> n(m.vertices.size(), Vec3{});
    for (const auto& t : m.triangles) {
        const Vec3 f = cross(sub(m.vertices[t[1]], m.vertices[t[0]]), sub(m.vertices[t[2]], m.vertices[t[0]]));
        for (std::uint32_t v : t)
            for (int a = 0; a < 3; ++a) n[v][a] += f[a];
    }
    return n;
}

// Connected components of a node set under the Kuhn edge neighbourhood.
int count_node_components(const Grid& g, const std::vector<char>& in) {
    std::vector<char> seen(g.size(), 0);
    int count = 0;
    std::vector<std::size_t> stack;
    for (std::size_t s = 0; s < g.size(); ++s) {
        if (!in[s] || seen[s]) continue;
        ++count;
        seen[s] = 1;
        stack.assign(1, s);
        while (!stack.empty()) {
            const std::size_t i = stack.back();
            stack.pop_back();
            const auto c = g.ijk(i);
            for (const auto& o : kKuhnNbr) {
                const int a = c[0] + o[0], b = c[1] + o[1], d = c[2] + o[2];
                if (a < 0 || b < 0 || d < 0 || a >= g.n || b >= g.n || d >= g.n) continue;
                const std::size_t j = g.index(a, b, d);
                if (in[j] && !seen[j]) {
                    seen[j] = 1;
                    stack.push_back(j);
                }
            }
        }
    }
    return count;
}

}  // namespace

std::vector<int> LevelSetMesh::genera() const {
    std::vector<int> out;
    for (const auto& c : components)
        if (c.genus) out.push_back(*c.genus);
    return out;
}

int LevelSetMesh::max_genus() const {
    int best = -1;
    for (const auto& c : components)
        if (c.genus) best = std::max(best, *c.genus);
    return best;
}

BiaxField biaxiality_field(const TensorField& field, double iso_tol) {
    const Grid& g = *field.grid;
    BiaxField b;
    b.grid = field.grid;
    b.iso_tol = iso_tol;
    b.beta.assign(g.size(), std::numeric_limits<double>::quiet_NaN());
    b.masked.assign(g.size(), 0);
    const auto total = static_cast<std::ptrdiff_t>(g.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t s = 0; s < total; ++s) {
        const auto i = static_cast<std::size_t>(s);
        if (g.kind[i] == NodeKind::Exterior) continue;
        if (norm(field[i]) < iso_tol) b.masked[i] = 1;
        else b.beta[i] = biaxiality(field[i], iso_tol);
    }
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (g.kind[i] != NodeKind::Boundary || b.masked[i]) continue;
        lo = std::min(lo, b.beta[i]);
        hi = std::max(hi, b.beta[i]);
    }
    if (hi >= lo) {
        b.beta_bar = lo;
        b.beta_0 = hi;
    }
    return b;
}

LevelSetMesh extract_surface(const Grid& g, const std::vector<double>& f, const std::vector<std::uint8_t>& defined,
                             double t) {
    LevelSetMesh m;
    m.level = t;
    std::unordered_map<std::uint64_t, std::uint32_t> cache;

    const auto vertex_on = [&](std::size_t node_in, std::size_t node_out) -> std::uint32_t {
        const std::size_t lo = std::min(node_in, node_out), hi = std::max(node_in, node_out);
        const auto a = g.ijk(lo), b = g.ijk(hi);
        const int code = (b[0] - a[0]) + 2 * (b[1] - a[1]) + 4 * (b[2] - a[2]) - 1;
        const std::uint64_t key = static_cast<std::uint64_t>(lo) * 7u + static_cast<std::uint64_t>(code);
        const auto it = cache.find(key);
        if (it != cache.end()) return it->second;
        double s = 0.5;  // from node_in toward node_out
        bool capped = true;
        if (defined[node_out]) {
            s = (t - f[node_in]) / (f[node_out] - f[node_in]);
            capped = false;
        }
        const double w = node_in == lo ? s : 1.0 - s;
        const Vec3 pa = g.position(lo), pb = g.position(hi);
        const auto id = static_cast<std::uint32_t>(m.vertices.size());
        m.vertices.push_back({pa[0] + w * (pb[0] - pa[0]), pa[1] + w * (pb[1] - pa[1]), pa[2] + w * (pb[2] - pa[2])});
        m.vertex_edge.push_back({lo, hi});
        m.vertex_weight.push_back(w);
        m.vertex_capped.push_back(capped ? 1 : 0);
        cache.emplace(key, id);
        return id;
    };

    for (int k = 0; k + 1 < g.n; ++k)
        for (int j = 0; j + 1 < g.n; ++j)
            for (int i = 0; i + 1 < g.n; ++i) {
                std::array<std::size_t, 8> node{};
                std::array<char, 8> in{};
                int count = 0, any_defined = 0;
                for (int c = 0; c < 8; ++c) {
                    node[c] = g.index(i + (c & 1), j + ((c >> 1) & 1), k + ((c >> 2) & 1));
                    in[c] = defined[node[c]] && f[node[c]] <= t;
                    count += in[c];
                    any_defined += defined[node[c]] != 0;
                }
                if (count == 0 || count == 8 || any_defined == 0) continue;

                for (const auto& tet : kKuhn) {
                    std::array<int, 4> ins{}, outs{};
                    int ni = 0, no = 0;
                    for (int c : tet) (in[c] ? ins[ni++] : outs[no++]) = c;
                    if (ni == 0 || no == 0) continue;

                    // Cross-section vertices in cyclic order, oriented from the
                    // midpoint geometry, which never degenerates.
                    std::array<std::pair<int, int>, 4> ring{};
                    int nr = 0;
                    if (ni == 1) ring = {{{ins[0], outs[0]}, {ins[0], outs[1]}, {ins[0], outs[2]}, {0, 0}}}, nr = 3;
                    else if (ni == 3) ring = {{{ins[0], outs[0]}, {ins[1], outs[0]}, {ins[2], outs[0]}, {0, 0}}}, nr = 3;
                    else ring = {{{ins[0], outs[0]}, {ins[0], outs[1]}, {ins[1], outs[1]}, {ins[1], outs[0]}}}, nr = 4;

                    const auto corner = [&](int c) { return g.position(node[static_cast<std::size_t>(c)]); };
                    std::array<Vec3, 4> mid{};
                    for (int r = 0; r < nr; ++r) {
                        const Vec3 a = corner(ring[r].first), b = corner(ring[r].second);
                        mid[r] = {0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1]), 0.5 * (a[2] + b[2])};
                    }
                    Vec3 cin{}, cout{};
                    for (int q = 0; q < ni; ++q)
                        for (int a = 0; a < 3; ++a) cin[a] += corner(ins[q])[a] / ni;
                    for (int q = 0; q < no; ++q)
                        for (int a = 0; a < 3; ++a) cout[a] += corner(outs[q])[a] / no;
                    const Vec3 normal = cross(sub(mid[1], mid[0]), sub(mid[2], mid[0]));
                    const bool flip = dot3(normal, sub(cout, cin)) < 0.0;

                    std::array<std::uint32_t, 4> v{};
                    for (int r = 0; r < nr; ++r)
                        v[r] = vertex_on(node[static_cast<std::size_t>(ring[r].first)],
                                         node[static_cast<std::size_t>(ring[r].second)]);
                    const auto emit = [&](std::uint32_t a, std::uint32_t b, std::uint32_t c) {
                        m.triangles.push_back(flip ? std::array<std::uint32_t, 3>{a, c, b}
                                                   : std::array<std::uint32_t, 3>{a, b, c});
                    };
                    emit(v[0], v[1], v[2]);
                    if (nr == 4) emit(v[0], v[2], v[3]);
                }
            }
    finalize(m);
    return m;
}

LevelSetMesh extract_level_set(const BiaxField& biax, double t) {
    const Grid& g = *biax.grid;
    std::vector<std::uint8_t> def(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) def[i] = biax.defined(i) ? 1 : 0;
    LevelSetMesh m = extract_surface(g, biax.beta, def, t);
    if (m.triangles.empty()) throw Error(ErrorKind::EmptyLevelSet, "no surface at beta = " + std::to_string(t));
    return m;
}

LevelSetMesh boundary_mesh(const Grid& g, double offset) {
    // Beyond 1.155 h below the zero level every Kuhn neighbour is a grid node
    // of the domain or its boundary band.
    if (offset < 0.0) offset = 1.25 * g.h;
    const std::vector<std::uint8_t> def(g.size(), 1);
    return extract_surface(g, g.phi, def, -offset);
}

std::vector<QTensor> interpolate_on_mesh(const TensorField& field, const LevelSetMesh& mesh) {
    const Grid& g = *field.grid;
    std::vector<QTensor> out(mesh.vertices.size());
    for (std::size_t v = 0; v < out.size(); ++v) {
        const auto [a, b] = mesh.vertex_edge.at(v);
        if (!g.in_domain(a) || !g.in_domain(b))
            throw Error(ErrorKind::DomainMismatch, "mesh vertex on an edge to an exterior node");
        const double w = mesh.vertex_weight[v];
        out[v] = (1.0 - w) * field[a] + w * field[b];
    }
    return out;
}

Lifting lift_eigenvector(const TensorField& field, const LevelSetMesh& mesh, double gap_tol) {
    return lift_eigenvector(interpolate_on_mesh(field, mesh), mesh, gap_tol);
}

Lifting lift_eigenvector(const std::vector<QTensor>& values, const LevelSetMesh& mesh, double gap_tol) {
    if (values.size() != mesh.vertices.size()) throw Error(ErrorKind::BadParams, "one tensor per vertex required");
    Lifting out;
    const std::size_t nv = values.size();
    out.director.assign(nv, Vec3{});
    std::vector<char> keep(nv, 0);
    std::vector<Vec3> raw(nv);
    for (std::size_t v = 0; v < nv; ++v) {
        const double n = norm(values[v]);
        if (n < kIsoTol) {
            out.excluded.push_back(v);
            continue;
        }
        const EigenResult e = eigen(values[v]);
        if (e.values[2] - e.values[1] < gap_tol * n) {
            out.excluded.push_back(v);
            continue;
        }
        keep[v] = 1;
        raw[v] = e.vectors[2];
    }
    if (nv > 0 && out.excluded.size() == nv)
        throw Error(ErrorKind::EigenvalueGapTooSmall, "no vertex has a simple leading eigenvalue");

    const auto adj = adjacency(mesh);
    const auto normals = vertex_normals(mesh);
    std::vector<char> seen(nv, 0);
    std::queue<std::uint32_t> queue;
    for (std::size_t s = 0; s < nv; ++s) {
        if (!keep[s] || seen[s]) continue;
        Vec3 v = raw[s];
        if (dot3(v, normals[s]) < 0.0) v = {-v[0], -v[1], -v[2]};
        out.director[s] = v;
        seen[s] = 1;
        queue.push(static_cast<std::uint32_t>(s));
        while (!queue.empty()) {
            const std::uint32_t a = queue.front();
            queue.pop();
            for (std::uint32_t b : adj[a]) {
                if (!keep[b] || seen[b]) continue;
                Vec3 w = raw[b];
                if (dot3(w, out.director[a]) < 0.0) w = {-w[0], -w[1], -w[2]};
                out.director[b] = w;
                seen[b] = 1;
                queue.push(b);
            }
        }
    }
    int bad = 0;
    for (std::size_t a = 0; a < nv; ++a) {
        if (!keep[a]) continue;
        for (std::uint32_t b : adj[a]) {
            if (b <= a || !keep[b]) continue;
            const double d = dot3(out.director[a], out.director[b]);
            out.min_edge_dot = std::min(out.min_edge_dot, d);
            if (d < 0.0) ++bad;
        }
    }
    if (bad > 0)
        throw Error(ErrorKind::LiftingObstructed,
                    std::to_string(bad) + " mesh edges disagree in sign after propagation");
    return out;
}

DegreeResult degree(const std::vector<Vec3>& v, const LevelSetMesh& mesh, int component) {
    if (v.size() != mesh.vertices.size()) throw Error(ErrorKind::BadParams, "one vector per vertex required");
    double total = 0.0;
    for (std::size_t f = 0; f < mesh.triangles.size(); ++f) {
        if (component >= 0 && mesh.triangle_component[f] != component) continue;
        const auto& t = mesh.triangles[f];
        const Vec3 &a = v[t[0]], &b = v[t[1]], &c = v[t[2]];
        if (dot3(a, a) == 0.0 || dot3(b, b) == 0.0 || dot3(c, c) == 0.0)
            throw Error(ErrorKind::DegreeUnresolved, "triangle touches a vertex without a direction");
        const double num = dot3(a, cross(b, c));
        const double den = 1.0 + dot3(a, b) + dot3(b, c) + dot3(c, a);
        total += 2.0 * std::atan2(num, den);
    }
    DegreeResult r;
    r.raw = total / (4.0 * std::numbers::pi);
    r.degree = static_cast<int>(std::lround(r.raw));
    r.residual = std::abs(r.raw - r.degree);
    if (!(r.residual < 0.1))
        throw Error(ErrorKind::DegreeUnresolved, "solid-angle sum " + std::to_string(r.raw) + " is not near an integer");
    return r;
}

RegionReport region_report(const BiaxField& biax, double t1, double t2) {
    if (!(t1 < t2)) throw Error(ErrorKind::BadParams, "region levels need t1 < t2");
    const Grid& g = *biax.grid;
    RegionReport r;
    r.t1 = t1;
    r.t2 = t2;
    std::vector<char> low(g.size(), 0), high(g.size(), 0);
    std::vector<std::uint8_t> def(g.size(), 0);
    std::vector<double> neg(g.size(), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (g.kind[i] == NodeKind::Exterior) continue;
        if (biax.masked[i]) {
            ++r.masked_nodes;
            continue;
        }
        def[i] = 1;
        neg[i] = -biax.beta[i];
        if (biax.beta[i] <= t1) low[i] = 1, ++r.low_nodes;
        else if (biax.beta[i] >= t2) high[i] = 1, ++r.high_nodes;
        else ++r.middle_nodes;
    }
    r.low_empty = r.low_nodes == 0;
    r.high_empty = r.high_nodes == 0;
    if (!r.low_empty) {
        r.low_components = count_node_components(g, low);
        r.low_genera = extract_surface(g, biax.beta, def, t1).genera();
    }
    if (!r.high_empty) {
        r.high_components = count_node_components(g, high);
        r.high_genera = extract_surface(g, neg, def, -t2).genera();
    }
    const auto positive = [](const std::vector<int>& v) {
        return std::any_of(v.begin(), v.end(), [](int x) { return x > 0; });
    };
    r.surrogate_linked = !r.low_empty && !r.high_empty && positive(r.low_genera) && positive(r.high_genera);
    if (r.low_empty) r.note += "{beta <= t1} is empty. ";
    if (r.high_empty) r.note += "{beta >= t2} is empty. ";
    if (r.masked_nodes > 0) r.note += "Isotropic nodes present, so the field is not everywhere nonzero. ";
    if (!r.note.empty()) r.note.pop_back();
    return r;
}

AttainmentReport attainment_check(const BiaxField& biax, std::optional<int> boundary_degree,
                                  const std::vector<double>& levels) {
    const Grid& g = *biax.grid;
    AttainmentReport r;
    r.min_beta = std::numeric_limits<double>::infinity();
    r.max_beta = -r.min_beta;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!biax.defined(i)) continue;
        if (biax.beta[i] < r.min_beta) r.min_beta = biax.beta[i], r.argmin = g.position(i);
        r.max_beta = std::max(r.max_beta, biax.beta[i]);
    }
    r.levels = levels;
    for (double t : levels) r.attained.push_back(r.min_beta <= t && t <= r.max_beta);
    r.beta_bar = biax.beta_bar;
    r.hp1 = biax.beta_bar > -1.0;
    r.boundary_degree = boundary_degree;
    if (boundary_degree) r.hp3 = (*boundary_degree % 2) != 0;
    return r;
}

std::array<std::vector<int>, 3> level_sensitivity(const BiaxField& biax, double t) {
    std::array<std::vector<int>, 3> out;
    const double shifts[3] = {-0.02, 0.0, 0.02};
    for (int k = 0; k < 3; ++k) {
        try {
            out[k] = extract_level_set(biax, t + shifts[k]).genera();
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::EmptyLevelSet) throw;
        }
    }
    return out;
}

void write_obj(std::ostream& out, const LevelSetMesh& mesh) {
    const auto old = out.precision(17);
    out << "# level " << mesh.level << '\n';
    for (const Vec3& v : mesh.vertices) out << "v " << v[0] << ' ' << v[1] << ' ' << v[2] << '\n';
    for (const auto& t : mesh.triangles) out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
    out.precision(old);
}

void write_components_csv(std::ostream& out, const LevelSetMesh& mesh) {
    const auto old = out.precision(17);
    out << "id,euler,genus,closed,area,vertices,edges,faces\n";
    for (std::size_t c = 0; c < mesh.components.size(); ++c) {
        const MeshComponent& m = mesh.components[c];
        out << c << ',' << m.euler << ',';
        if (m.genus) out << *m.genus;
        out << ',' << (m.closed ? 1 : 0) << ',' << m.area << ',' << m.vertices << ',' << m.edges << ',' << m.faces
            << '\n';
    }
    out.precision(old);
}

std::string region_report_json(const RegionReport& region, const AttainmentReport& att) {
    using nlohmann::json;
    json a;
    a["min_beta"] = att.min_beta;
    a["max_beta"] = att.max_beta;
    a["argmin"] = {att.argmin[0], att.argmin[1], att.argmin[2]};
    a["levels"] = att.levels;
    a["attained"] = att.attained;
    a["beta_bar"] = att.beta_bar;
    a["hp1"] = att.hp1;
    a["boundary_degree"] = att.boundary_degree ? json(*att.boundary_degree) : json(nullptr);
    a["hp3"] = att.hp3 ? json(*att.hp3) : json(nullptr);
    json j;
    j["t1"] = region.t1;
    j["t2"] = region.t2;
    j["region_genus_lists"] = {{"low", region.low_genera}, {"high", region.high_genera}};
    j["surrogate_linked"] = region.surrogate_linked;
    j["attainment"] = a;
    return j.dump(2);
}

LevelSetMesh icosphere(int subdivisions) {
    if (subdivisions < 0 || subdivisions > 8) throw Error(ErrorKind::BadParams, "subdivisions must lie in [0, 8]");
    const double p = (1.0 + std::sqrt(5.0)) / 2.0;
    LevelSetMesh m;
    m.vertices = {{-1, p, 0}, {1, p, 0}, {-1, -p, 0}, {1, -p, 0}, {0, -1, p}, {0, 1, p},
                  {0, -1, -p}, {0, 1, -p}, {p, 0, -1}, {p, 0, 1}, {-p, 0, -1}, {-p, 0, 1}};
    m.triangles = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
                   {11, 10, 2}, {10, 7, 6}, {7, 1, 8},   {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
                   {3, 8, 9},  {4, 9, 5},  {2, 4, 11},  {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
    const auto unit = [](Vec3 v) {
        const double l = len3(v);
        return Vec3{v[0] / l, v[1] / l, v[2] / l};
    };
    for (Vec3& v : m.vertices) v = unit(v);
    for (int s = 0; s < subdivisions; ++s) {
        std::unordered_map<std::uint64_t, std::uint32_t> mid;
        const auto midpoint = [&](std::uint32_t a, std::uint32_t b) {
            const auto [it, fresh] = mid.emplace(edge_key(a, b), static_cast<std::uint32_t>(m.vertices.size()));
            if (fresh) {
                const Vec3 &x = m.vertices[a], &y = m.vertices[b];
                m.vertices.push_back(unit({x[0] + y[0], x[1] + y[1], x[2] + y[2]}));
            }
            return it->second;
        };
        std::vector<std::array<std::uint32_t, 3>> next;
        next.reserve(m.triangles.size() * 4);
        for (const auto& t : m.triangles) {
            const std::uint32_t ab = midpoint(t[0], t[1]), bc = midpoint(t[1], t[2]), ca = midpoint(t[2], t[0]);
            next.push_back({t[0], ab, ca});
            next.push_back({t[1], bc, ab});
            next.push_back({t[2], ca, bc});
            next.push_back({ab, bc, ca});
        }
        m.triangles.swap(next);
    }
    finalize(m);
    return m;
}

}  // namespace ldg
