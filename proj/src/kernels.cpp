#include "ldg/kernels.hpp"

#include <algorithm>
#include <cstdlib>

#include "ldg/pointwise.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ldg {

namespace {

struct Parts {
    double dirichlet = 0.0, potential = 0.0, penalty = 0.0, anchor = 0.0;
    Parts& operator+=(const Parts& o) {
        dirichlet += o.dirichlet;
        potential += o.potential;
        penalty += o.penalty;
        anchor += o.anchor;
        return *this;
    }
};

// Neighbour offsets in the order -x,+x,-y,+y,-z,+z. Interior nodes never sit
// on the grid edge, so the stencil is read by offset instead of through the
// stored neighbour table; only edges reaching a Boundary node carry a
// fraction below one.
inline std::array<std::ptrdiff_t, 6> offsets(const Grid& g) {
    const auto n = static_cast<std::ptrdiff_t>(g.n);
    return {-1, 1, -n, n, -n * n, n * n};
}

inline double dirichlet_at(const Grid& g, std::span<const QTensor> q, std::size_t slot,
                           const std::array<std::ptrdiff_t, 6>& off) {
    const std::size_t i = g.interior[slot];
    const QTensor& v = q[i];
    double s = 0.0;
    for (std::size_t d = 0; d < 6; ++d) {
        const std::size_t j = i + off[d];
        // Interior-interior edges are counted once, from their lower end.
        if (g.kind[j] == NodeKind::Interior) {
            if (d & 1u) s += norm2(q[j] - v);
        } else {
            s += g.edge_fraction[slot][d] * norm2(q[j] - v);
        }
    }
    return 0.5 * g.h * s;
}

inline Parts local_at(const Grid& g, std::span<const QTensor> q, const Objective& obj, std::size_t i) {
    Parts p;
    if (g.kind[i] == NodeKind::Exterior) return p;
    const double w = g.weight[i];
    const QTensor& v = q[i];
    p.potential = w * obj.lambda * pointwise::w(v);
    if (obj.mu != 0.0) {
        const double u = 1.0 - norm2(v);
        p.penalty = w * 0.25 * obj.mu * u * u;
    }
    if (obj.anchor_weight != 0.0 && obj.anchor) {
        p.anchor = w * 0.5 * obj.anchor_weight * norm2(v - (*obj.anchor)[i]);
    }
    return p;
}

inline QTensor gradient_at(const Grid& g, std::span<const QTensor> q, const Objective& obj, std::size_t slot,
                           const std::array<std::ptrdiff_t, 6>& off) {
    const std::size_t i = g.interior[slot];
    const QTensor& v = q[i];
    QTensor out;
    for (std::size_t d = 0; d < 6; ++d) {
        const std::size_t j = i + off[d];
        const double theta = g.kind[j] == NodeKind::Interior ? 1.0 : g.edge_fraction[slot][d];
        const QTensor& nb = q[j];
        for (int c = 0; c < 5; ++c) out[c] += theta * (v[c] - nb[c]);
    }
    out *= g.h;
    const double w = g.weight[i];
    QTensor local = obj.lambda * pointwise::grad_w(v);
    if (obj.mu != 0.0) local -= (obj.mu * (1.0 - norm2(v))) * v;
    if (obj.anchor_weight != 0.0 && obj.anchor) local += obj.anchor_weight * (v - (*obj.anchor)[i]);
    for (int c = 0; c < 5; ++c) out[c] += w * local[c];
    return out;
}

inline double delta_at(const Grid& g, std::span<const QTensor> q0, std::span<const QTensor> q1,
                       const Objective& obj, std::size_t slot, const std::array<std::ptrdiff_t, 6>& off) {
    const std::size_t i = g.interior[slot];
    const QTensor dq = q1[i] - q0[i];
    double dir = 0.0;
    for (std::size_t d = 0; d < 6; ++d) {
        const std::size_t j = i + off[d];
        double theta = 1.0;
        if (g.kind[j] != NodeKind::Interior) {
            theta = g.edge_fraction[slot][d];
        } else if (!(d & 1u)) {
            continue;
        }
        const QTensor a = q1[j] - q1[i];
        const QTensor b = q0[j] - q0[i];
        dir += theta * dot(a - b, a + b);
    }
    double local = obj.lambda * pointwise::w_delta(q0[i], dq);
    const double n0 = norm2(q0[i]), n1 = norm2(q1[i]);
    if (obj.mu != 0.0) {
        const double dn = dot(dq, q1[i] + q0[i]);  // n1 - n0
        local += 0.25 * obj.mu * dn * (n0 + n1 - 2.0);
    }
    if (obj.anchor_weight != 0.0 && obj.anchor) {
        const QTensor& r = (*obj.anchor)[i];
        local += 0.5 * obj.anchor_weight * dot(dq, q1[i] + q0[i] - 2.0 * r);
    }
    return 0.5 * g.h * dir + g.weight[i] * local;
}

EnergyBreakdown finish(const Parts& p) {
    EnergyBreakdown e;
    e.dirichlet = p.dirichlet;
    e.potential = p.potential;
    e.penalty = p.penalty;
    e.gl_anchor = p.anchor;
    e.total = p.dirichlet + p.potential + p.penalty + p.anchor;
    return e;
}

std::size_t block_count(std::size_t n) { return (n + kernels::kBlock - 1) / kernels::kBlock; }

}  // namespace

namespace kernels::serial {

EnergyBreakdown energy(const Grid& grid, std::span<const QTensor> q, const Objective& obj) {
    const auto off = offsets(grid);
    Parts p;
    for (std::size_t s = 0; s < grid.interior.size(); ++s) p.dirichlet += dirichlet_at(grid, q, s, off);
    for (std::size_t i = 0; i < grid.size(); ++i) p += local_at(grid, q, obj, i);
    return finish(p);
}

void gradient(const Grid& grid, std::span<const QTensor> q, const Objective& obj, std::span<QTensor> out) {
    const auto off = offsets(grid);
    for (std::size_t s = 0; s < grid.interior.size(); ++s) out[s] = gradient_at(grid, q, obj, s, off);
}

double energy_delta(const Grid& grid, std::span<const QTensor> q_old, std::span<const QTensor> q_new,
                    const Objective& obj) {
    const auto off = offsets(grid);
    double sum = 0.0;
    for (std::size_t s = 0; s < grid.interior.size(); ++s) sum += delta_at(grid, q_old, q_new, obj, s, off);
    return sum;
}

}  // namespace kernels::serial

namespace kernels::parallel {

EnergyBreakdown energy(const Grid& grid, std::span<const QTensor> q, const Objective& obj) {
    const auto off = offsets(grid);
    const std::size_t ni = grid.interior.size();
    const std::size_t nn = grid.size();
    const std::size_t bi = block_count(ni), bn = block_count(nn);
    std::vector<Parts> partial(bi + bn);
    const auto total_blocks = static_cast<std::ptrdiff_t>(bi + bn);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t b = 0; b < total_blocks; ++b) {
        Parts p;
        const auto ub = static_cast<std::size_t>(b);
        if (ub < bi) {
            const std::size_t end = std::min(ni, (ub + 1) * kBlock);
            for (std::size_t s = ub * kBlock; s < end; ++s) p.dirichlet += dirichlet_at(grid, q, s, off);
        } else {
            const std::size_t nb = ub - bi;
            const std::size_t end = std::min(nn, (nb + 1) * kBlock);
            for (std::size_t i = nb * kBlock; i < end; ++i) p += local_at(grid, q, obj, i);
        }
        partial[ub] = p;
    }
    Parts total;
    for (const Parts& p : partial) total += p;
    return finish(total);
}

void gradient(const Grid& grid, std::span<const QTensor> q, const Objective& obj, std::span<QTensor> out) {
    const auto off = offsets(grid);
    const auto ni = static_cast<std::ptrdiff_t>(grid.interior.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t s = 0; s < ni; ++s)
        out[static_cast<std::size_t>(s)] = gradient_at(grid, q, obj, static_cast<std::size_t>(s), off);
}

double energy_delta(const Grid& grid, std::span<const QTensor> q_old, std::span<const QTensor> q_new,
                    const Objective& obj) {
    const auto off = offsets(grid);
    const std::size_t ni = grid.interior.size();
    const std::size_t nb = block_count(ni);
    std::vector<double> partial(nb, 0.0);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(nb); ++b) {
        const auto ub = static_cast<std::size_t>(b);
        const std::size_t end = std::min(ni, (ub + 1) * kBlock);
        double s = 0.0;
        for (std::size_t k = ub * kBlock; k < end; ++k) s += delta_at(grid, q_old, q_new, obj, k, off);
        partial[ub] = s;
    }
    double sum = 0.0;
    for (double v : partial) sum += v;
    return sum;
}

}  // namespace kernels::parallel

int configure_threads() {
#ifdef _OPENMP
    if (const char* env = std::getenv("LDG_THREADS")) {
        const int cap = std::atoi(env);
        if (cap > 0) omp_set_num_threads(std::min(cap, omp_get_num_procs()));
    }
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace ldg
