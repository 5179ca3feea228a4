#include "ldg/qtensor.hpp"

#include <algorithm>
#include <string>

namespace ldg {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::NotInS0: return "NotInS0";
        case ErrorKind::NotUnit: return "NotUnit";
        case ErrorKind::NotOnSphere: return "NotOnSphere";
        case ErrorKind::NotTangent: return "NotTangent";
        case ErrorKind::IsotropicPoint: return "IsotropicPoint";
        case ErrorKind::BadParams: return "BadParams";
        case ErrorKind::ResolutionTooCoarse: return "ResolutionTooCoarse";
        case ErrorKind::InvalidDomain: return "InvalidDomain";
        case ErrorKind::GridMismatch: return "GridMismatch";
        case ErrorKind::BallEscapesDomain: return "BallEscapesDomain";
        case ErrorKind::LineSearchStalled: return "LineSearchStalled";
        case ErrorKind::NoConvergence: return "NoConvergence";
        case ErrorKind::DomainMismatch: return "DomainMismatch";
        case ErrorKind::SingularIntegrand: return "SingularIntegrand";
        case ErrorKind::EmptyLevelSet: return "EmptyLevelSet";
        case ErrorKind::EigenvalueGapTooSmall: return "EigenvalueGapTooSmall";
        case ErrorKind::LiftingObstructed: return "LiftingObstructed";
        case ErrorKind::DegreeUnresolved: return "DegreeUnresolved";
        case ErrorKind::ConfigInvalid: return "ConfigInvalid";
        case ErrorKind::IoError: return "IoError";
    }
    return "Unknown";
}

namespace {

const double kInvSqrt2 = 1.0 / kSqrt2;
const double kInvSqrt6 = 1.0 / std::sqrt(6.0);

Mat3 mul(const Mat3& a, const Mat3& b) {
    Mat3 r{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double s = 0.0;
            for (int k = 0; k < 3; ++k) s += a[i][k] * b[k][j];
            r[i][j] = s;
        }
    return r;
}

double trace(const Mat3& a) { return a[0][0] + a[1][1] + a[2][2]; }

void require_unit(const QTensor& q, const char* what) {
    if (std::abs(norm(q) - 1.0) > kSphereTol)
        throw Error(ErrorKind::NotOnSphere, std::string(what) + ": |Q| must be 1");
}

Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
double dot3(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
Vec3 scale(const Vec3& a, double s) { return {a[0] * s, a[1] * s, a[2] * s}; }

Vec3 mat_vec(const Mat3& m, const Vec3& v) {
    return {m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
            m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
            m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2]};
}

// Eigenvector for an isolated eigenvalue: the best-conditioned cross product of
// two rows of (A - value I).
Vec3 isolated_eigenvector(const Mat3& a, double value) {
    const Vec3 r0{a[0][0] - value, a[0][1], a[0][2]};
    const Vec3 r1{a[1][0], a[1][1] - value, a[1][2]};
    const Vec3 r2{a[2][0], a[2][1], a[2][2] - value};
    const std::array<Vec3, 3> c{cross(r0, r1), cross(r0, r2), cross(r1, r2)};
    std::size_t best = 0;
    double best_n = dot3(c[0], c[0]);
    for (std::size_t i = 1; i < 3; ++i) {
        const double n = dot3(c[i], c[i]);
        if (n > best_n) {
            best_n = n;
            best = i;
        }
    }
    if (best_n == 0.0) return {1.0, 0.0, 0.0};
    return scale(c[best], 1.0 / std::sqrt(best_n));
}

// Orthonormal u, v completing w to a basis.
void complete_basis(const Vec3& w, Vec3& u, Vec3& v) {
    if (std::abs(w[0]) > std::abs(w[1])) {
        const double inv = 1.0 / std::sqrt(w[0] * w[0] + w[2] * w[2]);
        u = {-w[2] * inv, 0.0, w[0] * inv};
    } else {
        const double inv = 1.0 / std::sqrt(w[1] * w[1] + w[2] * w[2]);
        u = {0.0, w[2] * inv, -w[1] * inv};
    }
    v = cross(w, u);
}

// Eigenvectors of A restricted to the plane orthogonal to v0, from an exact
// Jacobi rotation of the 2x2 block (no reliance on approximate eigenvalues).
std::array<Vec3, 2> planar_eigenvectors(const Mat3& a, const Vec3& v0) {
    Vec3 u, v;
    complete_basis(v0, u, v);
    const Vec3 au = mat_vec(a, u);
    const Vec3 av = mat_vec(a, v);
    const double m00 = dot3(u, au), m01 = dot3(u, av), m11 = dot3(v, av);
    const double theta = 0.5 * std::atan2(2.0 * m01, m00 - m11);
    const double c = std::cos(theta), s = std::sin(theta);
    return {Vec3{c * u[0] + s * v[0], c * u[1] + s * v[1], c * u[2] + s * v[2]},
            Vec3{-s * u[0] + c * v[0], -s * u[1] + c * v[1], -s * u[2] + c * v[2]}};
}

void canonical_sign(Vec3& v) {
    for (double c : v) {
        if (std::abs(c) > 1e-12) {
            if (c < 0.0) v = scale(v, -1.0);
            return;
        }
    }
}

}  // namespace

Mat3 to_matrix(const QTensor& q) {
    const double d = q[0] * kInvSqrt6;
    const double t = q[3] * kInvSqrt2;
    Mat3 m{};
    m[0][0] = -d + t;
    m[1][1] = -d - t;
    m[2][2] = 2.0 * d;
    m[0][1] = m[1][0] = q[4] * kInvSqrt2;
    m[0][2] = m[2][0] = q[1] * kInvSqrt2;
    m[1][2] = m[2][1] = q[2] * kInvSqrt2;
    return m;
}

QTensor project_s0(const Mat3& m) {
    QTensor q;
    q[0] = (2.0 * m[2][2] - m[0][0] - m[1][1]) * kInvSqrt6;
    q[1] = (m[0][2] + m[2][0]) * kInvSqrt2;
    q[2] = (m[1][2] + m[2][1]) * kInvSqrt2;
    q[3] = (m[0][0] - m[1][1]) * kInvSqrt2;
    q[4] = (m[0][1] + m[1][0]) * kInvSqrt2;
    return q;
}

QTensor from_matrix(const Mat3& m, double tol) {
    double asym = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) asym += (m[i][j] - m[j][i]) * (m[i][j] - m[j][i]);
    if (std::sqrt(asym) > tol) throw Error(ErrorKind::NotInS0, "matrix is not symmetric");
    if (std::abs(trace(m)) > tol) throw Error(ErrorKind::NotInS0, "matrix is not traceless");
    return project_s0(m);
}

QTensor uniaxial(const Vec3& n, double s) {
    const double nn = std::sqrt(dot3(n, n));
    if (std::abs(nn - 1.0) > 1e-12) throw Error(ErrorKind::NotUnit, "director must be a unit vector");
    Mat3 m{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m[i][j] = s * n[i] * n[j];
    return project_s0(m);
}

Traces traces(const QTensor& q) {
    const Mat3 m = to_matrix(q);
    const Mat3 m2 = mul(m, m);
    double tr3 = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k) tr3 += m2[i][k] * m[k][i];
    return {norm2(q), tr3};
}

double biaxiality(const QTensor& q, double iso_tol) {
    const double n = norm(q);
    if (n < iso_tol) throw Error(ErrorKind::IsotropicPoint, "|Q| below isotropic tolerance");
    const double b = kSqrt6 * traces(q).tr3 / (n * n * n);
    return std::clamp(b, -1.0, 1.0);
}

double potential_w(const QTensor& q) {
    const Traces t = traces(q);
    return t.tr2 * t.tr2 / (4.0 * kSqrt6) - t.tr3 / 3.0 + 1.0 / (12.0 * kSqrt6);
}

QTensor potential_grad(const QTensor& q) {
    const Mat3 m = to_matrix(q);
    // project_s0 removes the trace, i.e. yields Q^2 - |Q|^2 I/3.
    const QTensor sq = project_s0(mul(m, m));
    return (norm2(q) / kSqrt6) * q - sq;
}

QTensor tangential_grad_w(const QTensor& q) {
    require_unit(q, "tangential_grad_w");
    const Mat3 m = to_matrix(q);
    const QTensor sq = project_s0(mul(m, m));
    return traces(q).tr3 * q - sq;
}

double trace_product(const QTensor& a, const QTensor& b, const QTensor& c) {
    const Mat3 ab = mul(to_matrix(a), to_matrix(b));
    const Mat3 mc = to_matrix(c);
    double s = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k) s += ab[i][k] * mc[k][i];
    return s;
}

double hessian_w_raw(const QTensor& q, const QTensor& psi) {
    const double qp = dot(q, psi);
    return (2.0 * qp * qp + norm2(q) * norm2(psi)) / kSqrt6 - 2.0 * trace_product(q, psi, psi);
}

QTensor tangent_project(const QTensor& q, const QTensor& phi) {
    require_unit(q, "tangent_project");
    return phi - dot(q, phi) * q;
}

double hessian_w_tangential(const QTensor& q, const QTensor& phi) {
    const QTensor pt = tangent_project(q, phi);
    // The normalized curve has acceleration -|Phi_T|^2 Q at s = 0.
    return hessian_w_raw(q, pt) - norm2(pt) * dot(potential_grad(q), q);
}

EigenResult eigen(const QTensor& q) {
    EigenResult r{};
    const double scale_q = norm(q);
    if (scale_q == 0.0) {
        r.values = {0.0, 0.0, 0.0};
        r.vectors = {Vec3{1, 0, 0}, Vec3{0, 1, 0}, Vec3{0, 0, 1}};
        return r;
    }
    const Mat3 a = to_matrix((1.0 / scale_q) * q);
    // Traceless: eigenvalues 2p cos(phi + 2 pi k/3) with p^2 = tr(A^2)/6 = 1/6.
    const double p = kInvSqrt6;
    const Mat3 b = to_matrix((1.0 / (scale_q * p)) * q);
    const double det_b = b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1]) -
                         b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0]) +
                         b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]);
    const double half_det = std::clamp(det_b / 2.0, -1.0, 1.0);
    const double phi = std::acos(half_det) / 3.0;
    const double hi = 2.0 * p * std::cos(phi);
    const double lo = 2.0 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
    const double mid = -hi - lo;

    const Vec3 isolated = isolated_eigenvector(a, hi - mid >= mid - lo ? hi : lo);
    const std::array<Vec3, 2> planar = planar_eigenvectors(a, isolated);

    std::array<std::pair<double, Vec3>, 3> pairs{};
    const std::array<Vec3, 3> vs{isolated, planar[0], planar[1]};
    for (std::size_t i = 0; i < 3; ++i) {
        Vec3 v = vs[i];
        const double nv = std::sqrt(dot3(v, v));
        v = scale(v, 1.0 / nv);
        canonical_sign(v);
        // Rayleigh quotients are accurate even when the trigonometric split of a
        // near-double eigenvalue is not.
        pairs[i] = {dot3(v, mat_vec(a, v)) * scale_q, v};
    }
    std::sort(pairs.begin(), pairs.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
    for (std::size_t i = 0; i < 3; ++i) {
        r.values[i] = pairs[i].first;
        r.vectors[i] = pairs[i].second;
    }
    return r;
}

double spectral_bound_gap(const QTensor& q, const QTensor& t, double c_emp) {
    require_unit(q, "spectral_bound_gap");
    if (std::abs(norm(t) - 1.0) > kSphereTol)
        throw Error(ErrorKind::NotUnit, "spectral_bound_gap: |T| must be 1");
    if (std::abs(dot(q, t)) > kSphereTol)
        throw Error(ErrorKind::NotTangent, "spectral_bound_gap: T:Q must vanish");
    const double w = std::max(potential_w(q), 0.0);
    return 2.0 * trace_product(t, q, t) - 1.0 / kSqrt6 - c_emp * std::sqrt(w);
}

double s_plus(double a2, double b2, double c2) {
    if (!(a2 > 0.0 && b2 > 0.0 && c2 > 0.0))
        throw Error(ErrorKind::BadParams, "s_plus requires a2, b2, c2 > 0");
    return (b2 + std::sqrt(b2 * b2 + 24.0 * a2 * c2)) / (4.0 * c2);
}

EnergyParams params_from_physical(double a2, double b2, double c2, double L) {
    if (!(L > 0.0)) throw Error(ErrorKind::BadParams, "L must be positive");
    const double sp = s_plus(a2, b2, c2);
    EnergyParams p;
    p.lambda = std::sqrt(2.0 / 3.0) * b2 * sp / L;
    p.mu = a2 / L;
    p.has_physical = true;
    p.physical = {a2, b2, c2, L};
    return p;
}

void validate(const EnergyParams& p) {
    if (!(p.lambda > 0.0)) throw Error(ErrorKind::BadParams, "lambda must be positive");
    if (!(p.mu >= 0.0)) throw Error(ErrorKind::BadParams, "mu must be non-negative");
    if (p.epsilon < 0.0) throw Error(ErrorKind::BadParams, "epsilon must be positive when set");
    if (p.has_physical) {
        const EnergyParams ref = params_from_physical(p.physical.a2, p.physical.b2, p.physical.c2,
                                                      p.physical.L);
        if (std::abs(ref.lambda - p.lambda) > 1e-12 * ref.lambda ||
            std::abs(ref.mu - p.mu) > 1e-12 * std::max(ref.mu, 1.0))
            throw Error(ErrorKind::BadParams, "reduced values disagree with physical values");
    }
}

}  // namespace ldg
