#pragma once

// Field builders and finite-difference checks shared by the unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <random>

#include "ldg/energy.hpp"
#include "ldg/kernels.hpp"

namespace support {

inline ldg::QTensor hedgehog_at(const ldg::Vec3& x) {
    const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
    if (r == 0.0) return {};
    return ldg::uniaxial({x[0] / r, x[1] / r, x[2] / r}, ldg::kSqrt3Over2);
}

// Smooth bump supported in the ball of radius `radius` around `c`.
inline double bump(const ldg::Vec3& x, const ldg::Vec3& c, double radius) {
    const double d2 = ((x[0] - c[0]) * (x[0] - c[0]) + (x[1] - c[1]) * (x[1] - c[1]) + (x[2] - c[2]) * (x[2] - c[2])) /
                      (radius * radius);
    return d2 < 1.0 ? std::exp(-1.0 / (1.0 - d2)) : 0.0;
}

// Smooth unit-norm field with hedgehog boundary data, perturbed in the interior.
inline ldg::TensorField wavy_unit_field(const std::shared_ptr<const ldg::Grid>& g, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    ldg::QTensor amp;
    for (int k = 0; k < 5; ++k) amp[k] = nd(rng);
    ldg::TensorField f(g);
    for (std::size_t i = 0; i < g->size(); ++i) {
        const ldg::Vec3 x = g->position(i);
        ldg::QTensor q = hedgehog_at(x);
        if (g->kind[i] == ldg::NodeKind::Interior) {
            const double s = std::sin(3.0 * x[0] + 1.0) * std::cos(2.0 * x[1] - x[2]);
            q += (0.8 * s * std::max(0.0, -g->phi[i])) * amp;
            if (ldg::norm(q) < 1e-3) q[0] += 1.0;
            q *= 1.0 / ldg::norm(q);
        }
        f[i] = q;
    }
    return f;
}

// Largest relative mismatch between the assembled residual and central
// differences of the discrete energy along random compactly supported
// perturbations (tangent and normalized for the constrained functional).
inline double el_fd_mismatch(const ldg::TensorField& field, double lambda, double mu, bool constrained, int count,
                             std::uint64_t seed) {
    const ldg::Grid& g = *field.grid;
    const ldg::Residual res = constrained ? ldg::residual_constrained(field, lambda)
                                          : ldg::residual_unconstrained(field, lambda, mu);
    const ldg::Objective obj{lambda, constrained ? 0.0 : mu, 0.0, nullptr};
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> pick(0, g.interior.size() - 1);
    const double h3 = g.h * g.h * g.h;
    double worst = 0.0;
    for (int t = 0; t < count; ++t) {
        const ldg::Vec3 c = g.position(g.interior[pick(rng)]);
        const double radius = 3.0 * g.h;
        ldg::QTensor dir;
        for (int k = 0; k < 5; ++k) dir[k] = nd(rng);
        std::vector<ldg::QTensor> phi(g.size());
        double predicted = 0.0;
        for (std::size_t s = 0; s < g.interior.size(); ++s) {
            const std::size_t i = g.interior[s];
            const double b = bump(g.position(i), c, radius);
            if (b == 0.0) continue;
            ldg::QTensor p = b * dir;
            if (constrained) p = ldg::tangent_project(field[i], p);
            phi[i] = p;
            predicted -= h3 * ldg::dot(res.values[s], p);
        }
        const double step = 1e-5;
        std::vector<ldg::QTensor> plus = field.values, minus = field.values;
        for (std::size_t i : g.interior) {
            plus[i] += step * phi[i];
            minus[i] -= step * phi[i];
            if (constrained) {
                plus[i] *= 1.0 / ldg::norm(plus[i]);
                minus[i] *= 1.0 / ldg::norm(minus[i]);
            }
        }
        const double fd = ldg::kernels::serial::energy_delta(g, minus, plus, obj) / (2.0 * step);
        worst = std::max(worst, std::abs(fd - predicted) / std::max(std::abs(predicted), 1e-300));
    }
    return worst;
}

}  // namespace support
