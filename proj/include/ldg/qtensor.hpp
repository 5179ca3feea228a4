#pragma once

// Pointwise algebra on S0, the space of traceless symmetric 3x3 matrices.
//
// A QTensor stores five coefficients in the orthonormal basis
//   e0 = sqrt(3/2) (k⊗k - I/3)    e1 = (i⊗k + k⊗i)/sqrt2    e2 = (j⊗k + k⊗j)/sqrt2
//   e3 = (i⊗i - j⊗j)/sqrt2        e4 = (i⊗j + j⊗i)/sqrt2
// so the Frobenius product of two tensors is the plain 5-vector dot product.

#include <array>
#include <cmath>
#include <numbers>

#include "ldg/error.hpp"

namespace ldg {

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<std::array<double, 3>, 3>;

inline constexpr double kSqrt2 = std::numbers::sqrt2;
inline const double kSqrt6 = std::sqrt(6.0);
inline const double kSqrt3Over2 = std::sqrt(1.5);

// Threshold below which biaxiality is undefined (isotropic phase).
inline constexpr double kIsoTol = 1e-7;

struct QTensor {
    std::array<double, 5> c{};

    constexpr double& operator[](int i) { return c[static_cast<std::size_t>(i)]; }
    constexpr double operator[](int i) const { return c[static_cast<std::size_t>(i)]; }

    QTensor& operator+=(const QTensor& o) {
        for (int i = 0; i < 5; ++i) (*this)[i] += o[i];
        return *this;
    }
    QTensor& operator-=(const QTensor& o) {
        for (int i = 0; i < 5; ++i) (*this)[i] -= o[i];
        return *this;
    }
    QTensor& operator*=(double s) {
        for (auto& v : c) v *= s;
        return *this;
    }

    static QTensor basis(int i) {
        QTensor q;
        q[i] = 1.0;
        return q;
    }

    friend bool operator==(const QTensor&, const QTensor&) = default;
};

inline QTensor operator+(QTensor a, const QTensor& b) { return a += b; }
inline QTensor operator-(QTensor a, const QTensor& b) { return a -= b; }
inline QTensor operator-(QTensor a) { return a *= -1.0; }
inline QTensor operator*(double s, QTensor a) { return a *= s; }
inline QTensor operator*(QTensor a, double s) { return a *= s; }

// Frobenius product Q:P.
inline double dot(const QTensor& a, const QTensor& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3] + a[4] * b[4];
}
inline double norm2(const QTensor& q) { return dot(q, q); }
inline double norm(const QTensor& q) { return std::sqrt(norm2(q)); }

Mat3 to_matrix(const QTensor& q);

// Projects onto the basis; throws NotInS0 when M is not symmetric/traceless within tol.
QTensor from_matrix(const Mat3& m, double tol = 1e-12);

// Sym-traceless projection without validation.
QTensor project_s0(const Mat3& m);

// s (n⊗n - I/3); n must be a unit vector within 1e-12.
QTensor uniaxial(const Vec3& n, double s);

struct Traces {
    double tr2;  // tr(Q^2) = |Q|^2
    double tr3;  // tr(Q^3)
};
Traces traces(const QTensor& q);

// sqrt6 tr(Q^3)/|Q|^3 in [-1, 1]; throws IsotropicPoint when |Q| < iso_tol.
double biaxiality(const QTensor& q, double iso_tol = kIsoTol);

// W(Q) = |Q|^4/(4 sqrt6) - tr(Q^3)/3 + 1/(12 sqrt6).
double potential_w(const QTensor& q);

// ∇W(Q) = |Q|^2 Q/sqrt6 - (Q^2 - |Q|^2 I/3).
QTensor potential_grad(const QTensor& q);

// Tangential gradient on the unit sphere of S0: -(Q^2 - I/3 - tr(Q^3) Q).
QTensor tangential_grad_w(const QTensor& q);

// D^2W(Q) Psi:Psi = (2 (Q:Psi)^2 + |Q|^2 |Psi|^2)/sqrt6 - 2 tr(Q Psi^2).
double hessian_w_raw(const QTensor& q, const QTensor& psi);

// Second derivative of W along s -> normalize(Q + s Phi_T) at s = 0.
double hessian_w_tangential(const QTensor& q, const QTensor& phi);

// Phi - Q (Q:Phi) for |Q| = 1.
QTensor tangent_project(const QTensor& q, const QTensor& phi);

// tr(A B C) for tensors in S0.
double trace_product(const QTensor& a, const QTensor& b, const QTensor& c);

struct EigenResult {
    std::array<double, 3> values;   // ascending
    std::array<Vec3, 3> vectors;    // vectors[i] belongs to values[i]
};

// Closed-form symmetric 3x3 eigendecomposition. Each eigenvector has its first
// non-negligible component positive.
EigenResult eigen(const QTensor& q);

// 2 tr(TQT) - 1/sqrt6 - c_emp sqrt(W(Q)) for unit Q and unit tangent T.
double spectral_bound_gap(const QTensor& q, const QTensor& t, double c_emp = 2.0);

// Physical-to-reduced parameters.
double s_plus(double a2, double b2, double c2);

struct PhysicalParams {
    double a2, b2, c2, L;
};

struct EnergyParams {
    double lambda = 1.0;
    double mu = 0.0;
    double epsilon = 0.0;  // only meaningful for the anchored penalty path
    bool has_physical = false;
    PhysicalParams physical{};
};

EnergyParams params_from_physical(double a2, double b2, double c2, double L);

// Throws BadParams on invalid reduced parameters.
void validate(const EnergyParams& p);

inline constexpr double kSphereTol = 1e-9;

}  // namespace ldg
