#include "ldg/domain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace ldg {

namespace {

double length(const Vec3& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }
Vec3 sub(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }

}  // namespace

double DomainSpec::signed_distance(const Vec3& x) const {
    double d = length(x) - outer_radius;
    for (const Hole& hole : holes) d = std::max(d, hole.radius - length(sub(x, hole.center)));
    return d;
}

int DomainSpec::nearest_component(const Vec3& x) const {
    int best = 0;
    double best_d = std::abs(outer_radius - length(x));
    for (std::size_t k = 0; k < holes.size(); ++k) {
        const double d = std::abs(length(sub(x, holes[k].center)) - holes[k].radius);
        if (d < best_d) {
            best_d = d;
            best = static_cast<int>(k) + 1;
        }
    }
    return best;
}

Vec3 DomainSpec::radial_director(const Vec3& x) const {
    const int c = nearest_component(x);
    Vec3 r = c == 0 ? x : sub(x, holes[static_cast<std::size_t>(c - 1)].center);
    const double len = length(r);
    if (len == 0.0) return {0.0, 0.0, 1.0};
    return {r[0] / len, r[1] / len, r[2] / len};
}

double Grid::volume() const {
    double v = 0.0;
    for (std::size_t i = 0; i < size(); ++i)
        if (in_domain(i)) v += weight[i];
    return v;
}

double dual_cell_fraction(const Grid& grid, std::size_t idx, const std::function<bool(const Vec3&)>& inside,
                          int m) {
    const Vec3 c = grid.position(idx);
    const double step = grid.h / m;
    int count = 0;
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
            for (int d = 0; d < m; ++d) {
                const Vec3 x{c[0] - 0.5 * grid.h + (a + 0.5) * step, c[1] - 0.5 * grid.h + (b + 0.5) * step,
                             c[2] - 0.5 * grid.h + (d + 0.5) * step};
                if (inside(x)) ++count;
            }
    return static_cast<double>(count) / (m * m * m);
}

std::vector<double> cell_volume_weights(const Grid& grid) {
    const double cell = grid.h * grid.h * grid.h;
    const double reach = 0.5 * std::sqrt(3.0) * grid.h;
    std::vector<double> w(grid.size(), 0.0);
    const auto inside = [&grid](const Vec3& x) { return grid.sdf(x) < 0.0; };
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid.kind[i] == NodeKind::Exterior) continue;
        if (grid.phi[i] < -reach) {
            w[i] = cell;
        } else if (grid.phi[i] > reach) {
            w[i] = 0.0;
        } else {
            w[i] = cell * dual_cell_fraction(grid, i, inside);
        }
    }
    return w;
}

std::shared_ptr<const Grid> build_grid_from_sdf(SignedDistance sdf, double half_extent, int n) {
    if (n < 16) throw Error(ErrorKind::ResolutionTooCoarse, "grid needs at least 16 nodes per axis");
    auto g = std::make_shared<Grid>();
    g->n = n;
    g->h = 2.0 * half_extent / (n - 1);
    g->origin = {-half_extent, -half_extent, -half_extent};
    g->sdf = std::move(sdf);
    const std::size_t total = static_cast<std::size_t>(n) * n * n;
    g->phi.resize(total);
    g->kind.assign(total, NodeKind::Exterior);
    for (std::size_t i = 0; i < total; ++i) g->phi[i] = g->sdf(g->position(i));

    constexpr int kOff[6][3] = {{-1, 0, 0}, {1, 0, 0}, {0, -1, 0}, {0, 1, 0}, {0, 0, -1}, {0, 0, 1}};
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                const std::size_t idx = g->index(i, j, k);
                if (g->phi[idx] < 0.0) {
                    if (i == 0 || j == 0 || k == 0 || i == n - 1 || j == n - 1 || k == n - 1)
                        throw Error(ErrorKind::InvalidDomain, "domain touches the grid edge");
                    g->kind[idx] = NodeKind::Interior;
                    continue;
                }
                for (const auto& o : kOff) {
                    const int a = i + o[0], b = j + o[1], c = k + o[2];
                    if (a < 0 || b < 0 || c < 0 || a >= n || b >= n || c >= n) continue;
                    if (g->phi[g->index(a, b, c)] < 0.0) {
                        g->kind[idx] = NodeKind::Boundary;
                        break;
                    }
                }
            }

    for (std::size_t idx = 0; idx < total; ++idx) {
        if (g->kind[idx] != NodeKind::Interior) continue;
        const auto c = g->ijk(idx);
        std::array<std::size_t, 6> nb{};
        std::array<double, 6> frac{};
        for (std::size_t d = 0; d < 6; ++d) {
            const std::size_t j = g->index(c[0] + kOff[d][0], c[1] + kOff[d][1], c[2] + kOff[d][2]);
            nb[d] = j;
            const double pi = g->phi[idx], pj = g->phi[j];
            frac[d] = pj < 0.0 ? 1.0 : -pi / (pj - pi);
        }
        g->interior.push_back(idx);
        g->neighbors.push_back(nb);
        g->edge_fraction.push_back(frac);
    }
    g->weight = cell_volume_weights(*g);
    return g;
}

std::shared_ptr<const Grid> build_grid(const DomainSpec& spec, int n) {
    if (!(spec.outer_radius > 0.0)) throw Error(ErrorKind::InvalidDomain, "outer radius must be positive");
    if (n < 16) throw Error(ErrorKind::ResolutionTooCoarse, "grid needs at least 16 nodes per axis");
    const double half = kGridPadding * spec.outer_radius;
    const double h = 2.0 * half / (n - 1);
    for (std::size_t a = 0; a < spec.holes.size(); ++a) {
        const Hole& ha = spec.holes[a];
        if (!(ha.radius > 0.0)) throw Error(ErrorKind::InvalidDomain, "hole radius must be positive");
        if (length(ha.center) + ha.radius + 2.0 * h > spec.outer_radius)
            throw Error(ErrorKind::InvalidDomain, "hole " + std::to_string(a) + " is not strictly inside");
        for (std::size_t b = a + 1; b < spec.holes.size(); ++b) {
            const Hole& hb = spec.holes[b];
            if (length(sub(ha.center, hb.center)) < ha.radius + hb.radius + 2.0 * h)
                throw Error(ErrorKind::InvalidDomain,
                            "holes " + std::to_string(a) + " and " + std::to_string(b) + " overlap");
        }
        if (2.0 * ha.radius / h < 4.0)
            throw Error(ErrorKind::ResolutionTooCoarse, "hole " + std::to_string(a) + " spans fewer than 4 cells");
    }
    auto base = build_grid_from_sdf([spec](const Vec3& x) { return spec.signed_distance(x); }, half, n);
    auto g = std::make_shared<Grid>(*base);
    g->spec = spec;
    return g;
}

std::vector<QTensor> boundary_hedgehog(const Grid& grid) {
    std::vector<QTensor> out(grid.size());
    const DomainSpec spec = grid.spec.value_or(DomainSpec{});
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid.kind[i] == NodeKind::Interior) continue;
        out[i] = uniaxial(spec.radial_director(grid.position(i)), kSqrt3Over2);
    }
    return out;
}

std::vector<QTensor> boundary_uniaxial(const Grid& grid, std::span<const Vec3> director) {
    if (director.size() != grid.size()) throw Error(ErrorKind::GridMismatch, "director array size mismatch");
    std::vector<QTensor> out(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid.kind[i] == NodeKind::Interior) continue;
        const Vec3& v = director[i];
        if (grid.kind[i] == NodeKind::Exterior && std::abs(length(v) - 1.0) > 1e-12) continue;
        out[i] = uniaxial(v, kSqrt3Over2);
    }
    return out;
}

TensorField field_with_boundary(std::shared_ptr<const Grid> grid, const std::vector<QTensor>& bc) {
    TensorField f(std::move(grid));
    for (std::size_t i = 0; i < f.values.size(); ++i)
        if (f.grid->kind[i] != NodeKind::Interior) f.values[i] = bc[i];
    return f;
}

TensorField sample_field(std::shared_ptr<const Grid> grid, const std::function<QTensor(const Vec3&)>& f) {
    TensorField out(std::move(grid));
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] = f(out.grid->position(i));
    return out;
}

void require_same_grid(const TensorField& a, const TensorField& b) {
    if (a.grid != b.grid &&
        (!a.grid || !b.grid || a.grid->n != b.grid->n || a.grid->h != b.grid->h || a.grid->kind != b.grid->kind))
        throw Error(ErrorKind::GridMismatch, "fields live on different grids");
}

}  // namespace ldg
