#pragma once

// Coefficient-space formulas used by the grid kernels. They avoid building 3x3
// matrices and are cross-checked against the matrix route in qtensor.cpp.

#include <cmath>

#include "ldg/qtensor.hpp"

namespace ldg::pointwise {

inline constexpr double kInvSqrt2 = 0.70710678118654752440;
inline constexpr double kInvSqrt6 = 0.40824829046386301637;
inline constexpr double kSqrt2v = 1.41421356237309504880;

// tr(Q^3) = 3 det Q for traceless Q.
inline double tr3(const QTensor& q) {
    const double d = q[0] * kInvSqrt6, t = q[3] * kInvSqrt2;
    const double a = q[4] * kInvSqrt2, b = q[1] * kInvSqrt2, e = q[2] * kInvSqrt2;
    const double det = 2.0 * d * d * d + d * e * e - 2.0 * d * t * t - t * e * e - 2.0 * a * a * d +
                       2.0 * a * b * e + b * b * d + b * b * t;
    return 3.0 * det;
}

// Coefficients of Q^2 - |Q|^2 I/3.
inline QTensor square_traceless(const QTensor& q) {
    const double d = q[0] * kInvSqrt6, t = q[3] * kInvSqrt2;
    const double a = q[4] * kInvSqrt2, b = q[1] * kInvSqrt2, e = q[2] * kInvSqrt2;
    const double m00 = (t - d) * (t - d) + a * a + b * b;
    const double m11 = a * a + (d + t) * (d + t) + e * e;
    const double m22 = b * b + e * e + 4.0 * d * d;
    const double m01 = -2.0 * d * a + b * e;
    const double m02 = (d + t) * b + a * e;
    const double m12 = a * b + (d - t) * e;
    QTensor p;
    p[0] = (2.0 * m22 - m00 - m11) * kInvSqrt6;
    p[1] = kSqrt2v * m02;
    p[2] = kSqrt2v * m12;
    p[3] = (m00 - m11) * kInvSqrt2;
    p[4] = kSqrt2v * m01;
    return p;
}

inline double w(const QTensor& q) {
    const double n2 = norm2(q);
    return n2 * n2 * (0.25 * kInvSqrt6) - tr3(q) / 3.0 + kInvSqrt6 / 12.0;
}

inline QTensor grad_w(const QTensor& q) {
    QTensor g = square_traceless(q);
    const double s = norm2(q) * kInvSqrt6;
    for (int i = 0; i < 5; ++i) g[i] = s * q[i] - g[i];
    return g;
}

// W(q + dq) - W(q) without cancellation between the two absolute values.
inline double w_delta(const QTensor& q, const QTensor& dq) {
    const QTensor q2 = q + dq;
    double sum_dot = 0.0;
    for (int i = 0; i < 5; ++i) sum_dot += dq[i] * (q2[i] + q[i]);
    const double quartic = sum_dot * (norm2(q2) + norm2(q)) * (0.25 * kInvSqrt6);
    // tr((Q+D)^3) - tr(Q^3) = 3 tr(Q^2 D) + 3 tr(Q D^2) + tr(D^3); tr(Q^2 D) = (Q^2)_0 : D.
    const double c1 = dot(square_traceless(q), dq);
    const QTensor d2 = square_traceless(dq);
    const double c2 = dot(d2, q);
    const double cubic = 3.0 * c1 + 3.0 * c2 + tr3(dq);
    return quartic - cubic / 3.0;
}

}  // namespace ldg::pointwise
