#pragma once

// Synthetic biaxiality fields with known level-set topology, shared by the unit
// and acceptance tests.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>

#include "ldg/topology.hpp"

namespace fixtures {

using ldg::BiaxField;
using ldg::Grid;
using ldg::NodeKind;
using ldg::Vec3;

// Biaxiality field with prescribed values, bypassing the tensor field.
inline BiaxField synthetic(const std::shared_ptr<const Grid>& g, const std::function<double(const Vec3&)>& beta) {
    BiaxField b;
    b.grid = g;
    b.beta.assign(g->size(), std::nan(""));
    b.masked.assign(g->size(), 0);
    b.beta_bar = 1.0;
    b.beta_0 = -1.0;
    for (std::size_t i = 0; i < g->size(); ++i) {
        if (g->kind[i] == NodeKind::Exterior) continue;
        b.beta[i] = beta(g->position(i));
        if (g->kind[i] == NodeKind::Boundary) {
            b.beta_bar = std::min(b.beta_bar, b.beta[i]);
            b.beta_0 = std::max(b.beta_0, b.beta[i]);
        }
    }
    return b;
}

// Smooth step that is -1 inside the zero set of d and +1 far outside.
inline double step(double d) { return std::tanh(d / 0.08); }

// Hopf-type field: |z1|^2 - |z2|^2 pulled back to R^3 by inverse stereographic
// projection, after a rotation of S^3 that moves both core circles off infinity.
// It decays like 1/|y| near the projection point, so only levels near +-0.8
// bound solid tori that fit inside the unit ball.
inline double hopf_beta(const Vec3& x, double scale) {
    const Vec3 y{x[0] / scale, x[1] / scale, x[2] / scale};
    const double r2 = y[0] * y[0] + y[1] * y[1] + y[2] * y[2];
    const double d = 1.0 + r2;
    const std::array<double, 4> u{2 * y[0] / d, 2 * y[1] / d, 2 * y[2] / d, (r2 - 1.0) / d};
    const double u1 = (u[1] - u[3]) / std::sqrt(2.0), u3 = (u[1] + u[3]) / std::sqrt(2.0);
    return u[0] * u[0] + u1 * u1 - u[2] * u[2] - u3 * u3;
}

inline double circle_distance(const Vec3& x, const Vec3& c, const Vec3& n, double r) {
    const Vec3 p{x[0] - c[0], x[1] - c[1], x[2] - c[2]};
    const double z = p[0] * n[0] + p[1] * n[1] + p[2] * n[2];
    const double rho = std::sqrt(std::max(0.0, p[0] * p[0] + p[1] * p[1] + p[2] * p[2] - z * z));
    return std::hypot(rho - r, z);
}

inline double indicator(double d) { return 0.5 * (1.0 - std::tanh(d / 0.03)); }

// Two solid tori around a Hopf link: beta ~ +1 near one circle, -1 near the other.
inline double hopf_link_beta(const Vec3& x) {
    const double a = circle_distance(x, {-0.175, 0.0, 0.0}, {0.0, 0.0, 1.0}, 0.35);
    const double b = circle_distance(x, {0.175, 0.0, 0.0}, {0.0, 1.0, 0.0}, 0.35);
    return indicator(a - 0.1) - indicator(b - 0.1);
}

}  // namespace fixtures
