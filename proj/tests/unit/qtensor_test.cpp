#include <cmath>
#include <random>

#include "doctest.h"
#include "ldg/qtensor.hpp"
#include "oracles.hpp"

using namespace ldg;

namespace {

QTensor basis(int i) {
    QTensor q;
    q[i] = 1.0;
    return q;
}

QTensor max_biaxial() {
    Mat3 m{};
    m[0][0] = 1.0 / std::sqrt(2.0);
    m[2][2] = -1.0 / std::sqrt(2.0);
    return from_matrix(m);
}

const double s6 = std::sqrt(6.0);

}  // namespace

TEST_SUITE("qtensor_test") {

TEST_CASE("from_matrix recovers basis coefficients") {
    for (int k = 0; k < 5; ++k) {
        const auto b = oracle::basis_matrix(k);
        Mat3 m{};
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) m[i][j] = b[i][j];
        const QTensor q = from_matrix(m);
        for (int c = 0; c < 5; ++c) CHECK(q[c] == doctest::Approx(c == k ? 1.0 : 0.0).epsilon(1e-15));
    }
    CHECK(norm(from_matrix(Mat3{})) == 0.0);
    Mat3 id{};
    id[0][0] = id[1][1] = id[2][2] = 1.0;
    CHECK_THROWS_AS(from_matrix(id), Error);
    Mat3 skew{};
    skew[0][1] = 1e-3;
    CHECK_THROWS_AS(from_matrix(skew), Error);
}

TEST_CASE("matrix round trip and norm identity") {
    std::mt19937_64 rng(1);
    for (int t = 0; t < 1000; ++t) {
        const QTensor q = oracle::random_q(rng);
        const Mat3 m = to_matrix(q);
        const auto ref = oracle::matrix(q);
        double diff = 0.0, tr = m[0][0] + m[1][1] + m[2][2];
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) diff = std::max(diff, std::abs(m[i][j] - ref[i][j]));
        CHECK(diff < 1e-14);
        CHECK(std::abs(tr) < 1e-14);
        CHECK(norm2(q) == doctest::Approx(oracle::frob2(ref)).epsilon(1e-13));
        const QTensor back = from_matrix(m);
        CHECK(norm(back - q) < 1e-13);
    }
}

TEST_CASE("uniaxial") {
    const QTensor e0 = uniaxial({0, 0, 1}, kSqrt3Over2);
    CHECK(norm(e0 - basis(0)) < 1e-15);
    CHECK(norm(uniaxial({0, 0, 1}, 0.0)) == 0.0);
    CHECK(biaxiality(e0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(uniaxial({0, 0, 1.1}, 1.0), Error);
    std::mt19937_64 rng(2);
    for (int t = 0; t < 100; ++t) {
        const Vec3 n = oracle::random_direction(rng);
        CHECK(norm(uniaxial(n, kSqrt3Over2)) == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(norm(uniaxial(n, 1.0) - uniaxial({-n[0], -n[1], -n[2]}, 1.0)) < 1e-15);
    }
}

TEST_CASE("traces") {
    const Traces t0 = traces(basis(0));
    CHECK(t0.tr2 == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(t0.tr3 == doctest::Approx(1.0 / s6).epsilon(1e-14));
    const Traces z = traces(QTensor{});
    CHECK(z.tr2 == 0.0);
    CHECK(z.tr3 == 0.0);
    const Traces tb = traces(max_biaxial());
    CHECK(tb.tr2 == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(tb.tr3) < 1e-15);
    std::mt19937_64 rng(3);
    for (int i = 0; i < 1000; ++i) {
        const QTensor q = oracle::random_q(rng);
        const auto m = oracle::matrix(q);
        CHECK(traces(q).tr3 == doctest::Approx(oracle::trace(oracle::mul(oracle::mul(m, m), m))).epsilon(1e-12));
    }
}

TEST_CASE("biaxiality special values and range") {
    const Vec3 n{0.6, 0.0, 0.8};
    CHECK(biaxiality(uniaxial(n, kSqrt3Over2)) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(biaxiality(uniaxial(n, -kSqrt3Over2)) == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(std::abs(biaxiality(max_biaxial())) < 1e-14);
    CHECK_THROWS_AS(biaxiality(QTensor{}), Error);
    CHECK_THROWS_AS(biaxiality(1e-8 * basis(2)), Error);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> ud(-3.0, 3.0);
    for (int i = 0; i < 1000000; ++i) {
        const QTensor q = oracle::random_q(rng);
        const double b = biaxiality(q);
        REQUIRE(b >= -1.0);
        REQUIRE(b <= 1.0);
        if (i % 1000 == 0) {
            const double t = ud(rng);
            if (std::abs(t) > 1e-3) {
                const double bt = biaxiality(t * q);
                CHECK(bt == doctest::Approx(t > 0 ? b : -b).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("s_plus and parameter reduction") {
    CHECK(s_plus(1, 1, 1) == 1.5);
    CHECK(s_plus(1e-300, 2, 1) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(s_plus(3, 1e-300, 1) == doctest::Approx(3.0 / std::sqrt(2.0)).epsilon(1e-14));
    CHECK_THROWS_AS(s_plus(0, 1, 1), Error);
    CHECK_THROWS_AS(s_plus(1, -1, 1), Error);
    const EnergyParams p = params_from_physical(1, 1, 1, 1);
    CHECK(p.lambda == doctest::Approx(std::sqrt(2.0 / 3.0) * 1.5).epsilon(1e-15));
    CHECK(p.mu == 1.0);
    CHECK(params_from_physical(4, 1, 1, 1).mu == 4.0);
    const EnergyParams q = params_from_physical(1, 1, 1, 2);
    CHECK(q.lambda == doctest::Approx(0.5 * p.lambda).epsilon(1e-15));
    CHECK(q.mu == doctest::Approx(0.5 * p.mu).epsilon(1e-15));
    CHECK_THROWS_AS(params_from_physical(1, 1, 1, 0), Error);
    EnergyParams bad;
    bad.lambda = -1.0;
    CHECK_THROWS_AS(validate(bad), Error);
}

TEST_CASE("potential values") {
    CHECK(potential_w(QTensor{}) == doctest::Approx(1.0 / (12.0 * s6)).epsilon(1e-14));
    CHECK(std::abs(potential_w(basis(0))) < 1e-15);
    CHECK(potential_w(max_biaxial()) == doctest::Approx(1.0 / (3.0 * s6)).epsilon(1e-14));
    std::mt19937_64 rng(5);
    for (int i = 0; i < 1000000; ++i) {
        const QTensor q = oracle::random_q(rng, 0.7);
        const double w = potential_w(q);
        REQUIRE(w >= -1e-15);
        if (i % 100 == 0) {
            const QTensor u = (1.0 / norm(q)) * q;
            CHECK(potential_w(u) == doctest::Approx((1.0 - biaxiality(u)) / (3.0 * s6)).epsilon(1e-12));
            CHECK(potential_w(q) == doctest::Approx(oracle::w(q)).epsilon(1e-12).scale(1e-3));
        }
    }
}

TEST_CASE("potential zero set is the vacuum manifold") {
    // Sample near the vacuum manifold so that small values of W actually occur.
    std::mt19937_64 rng(6);
    std::normal_distribution<double> nd(0.0, 1.0);
    for (int i = 0; i < 100000; ++i) {
        const QTensor base = uniaxial(oracle::random_direction(rng), kSqrt3Over2);
        const double eps = std::pow(10.0, -1.0 - 7.0 * (i % 8) / 7.0);
        const QTensor q = base + eps * oracle::random_q(rng);
        const double w = potential_w(q);
        if (w <= 1e-13) {
            CHECK(std::abs(norm(q) - 1.0) <= 1e-6);
            CHECK(biaxiality(q) >= 1.0 - 1e-6);
        }
    }
}

TEST_CASE("potential gradient against finite differences") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ud(0.0, 2.0);
    const auto f = [](const QTensor& q) { return potential_w(q); };
    for (int i = 0; i < 1000; ++i) {
        QTensor q = oracle::random_unit(rng);
        q *= ud(rng);
        const QTensor g = potential_grad(q);
        for (int k = 0; k < 5; ++k) {
            const double fd = oracle::fd1(f, q, basis(k), 1e-5);
            CHECK(std::abs(fd - g[k]) <= 1e-8 * std::max(1.0, norm(g)));
        }
    }
    CHECK(norm(potential_grad(basis(0))) < 1e-15);
    CHECK(norm(potential_grad(QTensor{})) == 0.0);
}

TEST_CASE("raw hessian against second differences") {
    std::mt19937_64 rng(8);
    const auto f = [](const QTensor& q) { return potential_w(q); };
    CHECK(hessian_w_raw(QTensor{}, basis(1)) == 0.0);
    for (int i = 0; i < 1000; ++i) {
        const QTensor q = oracle::random_q(rng, 0.8);
        const QTensor psi = oracle::random_unit(rng);
        const double h = hessian_w_raw(q, psi);
        const double fd = oracle::fd2(f, q, psi, 1e-3);
        CHECK(std::abs(fd - h) <= 1e-6 * std::max(1.0, std::abs(h)));
        CHECK(hessian_w_raw(q, 3.0 * psi) == doctest::Approx(9.0 * h).epsilon(1e-12));
    }
}

TEST_CASE("tangential gradient") {
    CHECK(norm(tangential_grad_w(basis(0))) < 1e-15);
    CHECK(norm(tangential_grad_w(uniaxial({0.6, 0.8, 0.0}, -kSqrt3Over2))) < 1e-14);
    const QTensor b = max_biaxial();
    CHECK(norm(tangential_grad_w(b)) == doctest::Approx(1.0 / s6).epsilon(1e-12));
    CHECK_THROWS_AS(tangential_grad_w(2.0 * b), Error);
    std::mt19937_64 rng(9);
    for (int i = 0; i < 1000; ++i) {
        const QTensor q = oracle::random_unit(rng);
        const QTensor g = tangential_grad_w(q);
        CHECK(std::abs(dot(g, q)) < 1e-9);
        // Equals the tangent projection of the full gradient.
        CHECK(norm(g - tangent_project(q, potential_grad(q))) < 1e-12);
    }
}

TEST_CASE("tangential hessian") {
    CHECK(std::abs(hessian_w_tangential(basis(0), basis(0))) < 1e-15);
    CHECK(std::abs(hessian_w_tangential(basis(0), basis(1))) < 1e-14);
    // Second derivative of W along the great circle cos(s) e0 + sin(s) e3.
    CHECK(hessian_w_tangential(basis(0), basis(3)) == doctest::Approx(3.0 / s6).epsilon(1e-13));
    CHECK_THROWS_AS(hessian_w_tangential(2.0 * basis(0), basis(1)), Error);
    std::mt19937_64 rng(10);
    for (int i = 0; i < 500; ++i) {
        const QTensor q = oracle::random_unit(rng);
        const QTensor t = tangent_project(q, oracle::random_q(rng));
        const double tn = norm(t);
        const QTensor u = (1.0 / tn) * t;
        const auto along = [&](double s) { return potential_w(std::cos(s) * q + std::sin(s) * u); };
        const double h = 1e-3;
        const double fd =
            (-along(2 * h) + 16 * along(h) - 30 * along(0) + 16 * along(-h) - along(-2 * h)) / (12 * h * h);
        CHECK(hessian_w_tangential(q, u) == doctest::Approx(fd).epsilon(1e-6).scale(1.0));
        // Depends only on the tangent part.
        CHECK(hessian_w_tangential(q, t + 2.5 * q) == doctest::Approx(hessian_w_tangential(q, t)).epsilon(1e-12));
    }
}

TEST_CASE("tangent projection") {
    CHECK(norm(tangent_project(basis(0), basis(0))) < 1e-15);
    CHECK(norm(tangent_project(basis(0), basis(1)) - basis(1)) < 1e-15);
    CHECK(norm(tangent_project(basis(0), basis(0) + basis(1)) - basis(1)) < 1e-15);
    CHECK_THROWS_AS(tangent_project(0.5 * basis(0), basis(1)), Error);
    std::mt19937_64 rng(11);
    for (int i = 0; i < 1000; ++i) {
        const QTensor q = oracle::random_unit(rng);
        const QTensor p = tangent_project(q, oracle::random_q(rng));
        CHECK(std::abs(dot(p, q)) < 1e-14);
        CHECK(norm(tangent_project(q, p) - p) < 1e-14);
    }
}

TEST_CASE("eigen decomposition") {
    const EigenResult e0 = eigen(basis(0));
    CHECK(e0.values[0] == doctest::Approx(-1.0 / s6).epsilon(1e-14));
    CHECK(e0.values[1] == doctest::Approx(-1.0 / s6).epsilon(1e-14));
    CHECK(e0.values[2] == doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-14));
    CHECK(std::abs(std::abs(e0.vectors[2][2]) - 1.0) < 1e-14);
    const EigenResult z = eigen(QTensor{});
    for (double v : z.values) CHECK(v == 0.0);

    std::mt19937_64 rng(12);
    for (int i = 0; i < 2000; ++i) {
        QTensor q = oracle::random_q(rng);
        if (i % 4 == 1) q = uniaxial(oracle::random_direction(rng), 0.9);  // double eigenvalue
        if (i % 4 == 2) q = uniaxial(oracle::random_direction(rng), -0.4) + 1e-9 * oracle::random_q(rng);
        const EigenResult e = eigen(q);
        const auto ref = oracle::jacobi_eigenvalues(oracle::matrix(q));
        const double scale = norm(q);
        CHECK(std::abs(e.values[0] + e.values[1] + e.values[2]) < 1e-14 * std::max(1.0, scale));
        const auto m = oracle::matrix(q);
        oracle::M3 rec{};
        for (int k = 0; k < 3; ++k) {
            CHECK(std::abs(e.values[k] - ref[k]) <= 1e-10 * scale);
            const Vec3& v = e.vectors[k];
            double res = 0.0;
            for (int a = 0; a < 3; ++a) {
                double mv = 0.0;
                for (int b = 0; b < 3; ++b) mv += m[a][b] * v[b];
                res += (mv - e.values[k] * v[a]) * (mv - e.values[k] * v[a]);
                for (int b = 0; b < 3; ++b) rec[a][b] += e.values[k] * v[a] * v[b];
            }
            CHECK(std::sqrt(res) <= 1e-10 * scale);
            // Sign convention: first non-negligible component positive.
            for (int a = 0; a < 3; ++a) {
                if (std::abs(v[a]) > 1e-12) {
                    CHECK(v[a] > 0.0);
                    break;
                }
            }
        }
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) {
                CHECK(std::abs(rec[a][b] - m[a][b]) <= 1e-10 * scale);
                double d = 0.0;
                for (int c = 0; c < 3; ++c) d += e.vectors[a][c] * e.vectors[b][c];
                CHECK(std::abs(d - (a == b ? 1.0 : 0.0)) < 1e-10);
            }
        if (i % 4 == 0) {
            const QTensor u = (1.0 / scale) * q;
            const EigenResult eu = eigen(u);
            CHECK(eu.values[2] > 0.0);
            CHECK(eu.values[2] <= 2.0 / s6 + 1e-14);
            CHECK(eu.values[0] < 0.0);
            CHECK(eu.values[0] >= -2.0 / s6 - 1e-14);
        }
    }
}

TEST_CASE("spectral bound worked examples") {
    const QTensor e0 = basis(0);
    CHECK(2.0 * trace_product(basis(1), e0, basis(1)) == doctest::Approx(1.0 / s6).epsilon(1e-14));
    CHECK(std::abs(spectral_bound_gap(e0, basis(1))) < 1e-14);
    CHECK(2.0 * trace_product(basis(3), e0, basis(3)) == doctest::Approx(-2.0 / s6).epsilon(1e-14));
    CHECK(spectral_bound_gap(e0, (1.0 / std::sqrt(2.0)) * (basis(1) + basis(3))) <= 0.0);
    CHECK_THROWS_AS(spectral_bound_gap(2.0 * e0, basis(1)), Error);
    CHECK_THROWS_AS(spectral_bound_gap(e0, basis(0)), Error);
    CHECK_THROWS_AS(spectral_bound_gap(e0, 2.0 * basis(1)), Error);
}

TEST_CASE("spectral bound on the vacuum manifold") {
    std::mt19937_64 rng(13);
    double worst = -1.0;
    for (int i = 0; i < 100000; ++i) {
        const QTensor q = uniaxial(oracle::random_direction(rng), kSqrt3Over2);
        QTensor t = tangent_project(q, oracle::random_q(rng));
        t *= 1.0 / norm(t);
        const double lhs = 2.0 * trace_product(t, q, t);
        worst = std::max(worst, lhs - 1.0 / s6);
    }
    CHECK(worst <= 1e-12);
}

}  // TEST_SUITE
