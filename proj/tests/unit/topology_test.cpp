#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "ldg/hedgehog.hpp"
#include "ldg/topology.hpp"
#include "fixtures.hpp"

using namespace ldg;
using namespace fixtures;

namespace {

std::shared_ptr<const Grid> ball(int n) { return build_grid(DomainSpec{1.0, {}}, n); }

double radius(const Vec3& x) { return std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]); }

void check_mesh_invariants(const LevelSetMesh& m) {
    for (const MeshComponent& c : m.components) {
        CHECK(c.euler == c.vertices - c.edges + c.faces);
        if (c.closed) {
            CHECK(c.euler % 2 == 0);
            REQUIRE(c.genus.has_value());
            CHECK(*c.genus >= 0);
            CHECK(2 * c.edges == 3 * c.faces);
        }
    }
}

std::vector<Vec3> map_vertices(const LevelSetMesh& m, const std::function<Vec3(const Vec3&)>& f) {
    std::vector<Vec3> v;
    for (const Vec3& x : m.vertices) v.push_back(f(x));
    return v;
}

}  // namespace

TEST_SUITE("topology_test") {

TEST_CASE("biaxiality of simple fields") {
    const auto g = ball(33);
    const BiaxField bc = biaxiality_field(field_with_boundary(g, boundary_hedgehog(*g)));
    CHECK(std::abs(bc.beta_bar - 1.0) < 1e-9);
    CHECK(std::abs(bc.beta_0 - 1.0) < 1e-9);

    const BiaxField hh = biaxiality_field(assemble_field(solve_profile(1.0, 100.0), g));
    int masked = 0;
    for (std::size_t i = 0; i < g->size(); ++i) {
        if (hh.masked[i]) {
            ++masked;
            CHECK(radius(g->position(i)) < 1e-12);
        } else if (hh.defined(i)) {
            CHECK(std::abs(hh.beta[i] - 1.0) < 1e-9);
        }
    }
    CHECK(masked == 1);

    // Maximal biaxiality: eigenvalues (-1, 0, 1)/sqrt2.
    const QTensor biax = QTensor::basis(3);
    const BiaxField flat = biaxiality_field(sample_field(g, [&](const Vec3&) { return biax; }));
    for (std::size_t i = 0; i < g->size(); ++i)
        if (flat.defined(i)) CHECK(std::abs(flat.beta[i]) < 1e-12);
    CHECK(flat.beta_bar <= flat.beta_0);
}

TEST_CASE("sphere and torus level sets") {
    const auto g = ball(48);
    const BiaxField sphere = synthetic(g, [](const Vec3& x) {
        return step(radius({x[0] - 0.1, x[1], x[2] + 0.05}) - 0.45);
    });
    const LevelSetMesh s = extract_level_set(sphere, 0.0);
    REQUIRE(s.components.size() == 1);
    CHECK(s.components[0].closed);
    CHECK(s.components[0].euler == 2);
    CHECK(s.components[0].genus == 0);
    CHECK(s.components[0].area == doctest::Approx(4.0 * std::numbers::pi * 0.45 * 0.45).epsilon(0.03));
    check_mesh_invariants(s);

    const BiaxField torus = synthetic(g, [](const Vec3& x) {
        const double rho = std::hypot(x[0], x[1]) - 0.5;
        return step(std::hypot(rho, x[2]) - 0.2);
    });
    for (double t : {-0.5, 0.0, 0.5}) {
        const LevelSetMesh m = extract_level_set(torus, t);
        REQUIRE(m.components.size() == 1);
        CHECK(m.components[0].closed);
        CHECK(m.components[0].euler == 0);
        CHECK(m.components[0].genus == 1);
        CHECK(m.max_genus() == 1);
        check_mesh_invariants(m);
    }
    for (const auto& list : level_sensitivity(torus, 0.0)) CHECK(list == std::vector<int>{1});

    // Two disjoint spheres give two components.
    const BiaxField pair = synthetic(g, [](const Vec3& x) {
        return step(std::min(radius({x[0] - 0.4, x[1], x[2]}), radius({x[0] + 0.4, x[1], x[2]})) - 0.25);
    });
    CHECK(extract_level_set(pair, 0.0).genera() == std::vector<int>{0, 0});

    CHECK_THROWS_AS(extract_level_set(torus, -1.5), Error);
}

TEST_CASE("triangles face away from the sublevel region") {
    const auto g = ball(32);
    const BiaxField sphere = synthetic(g, [](const Vec3& x) { return step(radius(x) - 0.5); });
    const LevelSetMesh m = extract_level_set(sphere, 0.0);
    double signed_volume = 0.0;
    for (const auto& t : m.triangles) {
        const Vec3 &a = m.vertices[t[0]], &b = m.vertices[t[1]], &c = m.vertices[t[2]];
        signed_volume += (a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) +
                          a[2] * (b[0] * c[1] - b[1] * c[0])) /
                         6.0;
    }
    CHECK(signed_volume == doctest::Approx(4.0 / 3.0 * std::numbers::pi * 0.125).epsilon(0.03));
}

TEST_CASE("level sets below the boundary minimum stay closed") {
    const auto g = ball(40);
    const BiaxField b = synthetic(g, [](const Vec3& x) {
        return 0.6 * std::cos(3.0 * x[0]) * std::cos(2.0 * x[1] + 0.3) + 0.4 * std::sin(2.5 * x[2]) - 0.2;
    });
    for (double t = -0.9; t < b.beta_bar - 0.05; t += 0.1) {
        try {
            const LevelSetMesh m = extract_level_set(b, t);
            check_mesh_invariants(m);
            for (const MeshComponent& c : m.components) CHECK(c.closed);
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::EmptyLevelSet);
        }
    }
}

TEST_CASE("icosphere degree oracles") {
    for (int level : {2, 3, 4}) {
        const LevelSetMesh s = icosphere(level);
        REQUIRE(s.components.size() == 1);
        CHECK(s.components[0].genus == 0);
        CHECK(degree(map_vertices(s, [](const Vec3& x) { return x; }), s).degree == 1);
        CHECK(degree(map_vertices(s, [](const Vec3&) { return Vec3{0.0, 0.0, 1.0}; }), s).degree == 0);
        CHECK(degree(map_vertices(s, [](const Vec3& x) { return Vec3{-x[0], -x[1], -x[2]}; }), s).degree == -1);
        // A reflection reverses orientation.
        CHECK(degree(map_vertices(s, [](const Vec3& x) { return Vec3{x[0], x[1], -x[2]}; }), s).degree == -1);
    }
    // z -> z^2 on the Riemann sphere has degree 2.
    const LevelSetMesh s = icosphere(5);
    const auto square = [](const Vec3& x) {
        const double d = 1.0 - x[2];
        if (d < 1e-14) return Vec3{0.0, 0.0, 1.0};
        const double re = x[0] / d, im = x[1] / d;
        const double wr = re * re - im * im, wi = 2.0 * re * im, w2 = wr * wr + wi * wi;
        return Vec3{2.0 * wr / (w2 + 1.0), 2.0 * wi / (w2 + 1.0), (w2 - 1.0) / (w2 + 1.0)};
    };
    const DegreeResult d = degree(map_vertices(s, square), s);
    CHECK(d.degree == 2);
    CHECK(d.residual < 0.1);

    std::vector<Vec3> holes = map_vertices(s, [](const Vec3& x) { return x; });
    holes[0] = Vec3{};
    CHECK_THROWS_AS(degree(holes, s), Error);
}

TEST_CASE("eigenvector lifting on boundary meshes") {
    const auto g = ball(40);
    const TensorField hedgehog = sample_field(g, unit_hedgehog);
    const LevelSetMesh surf = boundary_mesh(*g);
    REQUIRE(surf.components.size() == 1);
    CHECK(surf.components[0].genus == 0);
    const Lifting lift = lift_eigenvector(hedgehog, surf);
    CHECK(lift.excluded.empty());
    for (std::size_t v = 0; v < surf.vertices.size(); ++v) {
        const Vec3& x = surf.vertices[v];
        const double r = radius(x);
        const double c = (lift.director[v][0] * x[0] + lift.director[v][1] * x[1] + lift.director[v][2] * x[2]) / r;
        CHECK(c > 0.99);
    }
    CHECK(degree(lift.director, surf).degree == 1);

    const TensorField constant = sample_field(g, [](const Vec3&) { return uniaxial({0.0, 0.0, 1.0}, kSqrt3Over2); });
    const Lifting flat = lift_eigenvector(constant, surf);
    for (const Vec3& v : flat.director) CHECK(std::abs(std::abs(v[2]) - 1.0) < 1e-12);
    CHECK(degree(flat.director, surf).degree == 0);

    const TensorField zero(g);
    CHECK_THROWS_AS(lift_eigenvector(zero, surf), Error);
}

TEST_CASE("degree parity with several boundary components") {
    const DomainSpec spec{1.0, {{{0.4, 0.0, 0.0}, 0.25}, {{-0.4, 0.0, 0.0}, 0.25}}};
    const auto g = build_grid(spec, 48);
    const LevelSetMesh surf = boundary_mesh(*g);
    REQUIRE(surf.components.size() == 3);
    const Lifting lift = lift_eigenvector(sample_field(g, [&](const Vec3& x) {
        const Vec3 n = spec.radial_director(x);
        return uniaxial(n, kSqrt3Over2);
    }), surf);
    const int total = degree(lift.director, surf).degree;
    CHECK(total % 2 != 0);
    for (int flip = 0; flip < 8; ++flip) {
        std::vector<Vec3> v = lift.director;
        for (std::size_t f = 0; f < surf.triangles.size(); ++f) {
            const int c = surf.triangle_component[f];
            if (!((flip >> c) & 1)) continue;
            for (auto id : surf.triangles[f]) v[id] = {-lift.director[id][0], -lift.director[id][1], -lift.director[id][2]};
        }
        const int d = degree(v, surf).degree;
        CHECK(std::abs(d - total) % 2 == 0);
    }
}

TEST_CASE("half-turn line field on a torus has no lifting") {
    const auto g = ball(48);
    const BiaxField torus = synthetic(g, [](const Vec3& x) {
        const double rho = std::hypot(x[0], x[1]) - 0.5;
        return step(std::hypot(rho, x[2]) - 0.2);
    });
    const LevelSetMesh m = extract_level_set(torus, 0.0);
    std::vector<QTensor> q;
    for (const Vec3& x : m.vertices) {
        const double phi = std::atan2(x[1], x[0]);
        const double c = std::cos(phi), s = std::sin(phi);
        // The director turns by pi in the (e_r, e_z) plane once around the torus.
        q.push_back(uniaxial({std::cos(phi / 2) * c, std::cos(phi / 2) * s, std::sin(phi / 2)}, kSqrt3Over2));
    }
    try {
        lift_eigenvector(q, m);
        FAIL("expected LiftingObstructed");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::LiftingObstructed);
    }
    // A full turn lifts.
    q.clear();
    for (const Vec3& x : m.vertices) {
        const double phi = std::atan2(x[1], x[0]);
        q.push_back(uniaxial({std::cos(phi) * std::cos(phi), std::cos(phi) * std::sin(phi), std::sin(phi)}, kSqrt3Over2));
    }
    CHECK_NOTHROW(lift_eigenvector(q, m));
}

TEST_CASE("gap tolerance excludes near-degenerate vertices") {
    const LevelSetMesh s = icosphere(2);
    std::vector<QTensor> q;
    for (const Vec3& x : s.vertices) q.push_back(x[2] > 0.5 ? QTensor::basis(3) * 1e-3 + uniaxial({0, 0, 1}, -1.0) : uniaxial(x, 1.0));
    const Lifting l = lift_eigenvector(q, s);
    CHECK(!l.excluded.empty());
    for (std::size_t v : l.excluded) CHECK(s.vertices[v][2] > 0.5);
    std::vector<QTensor> all(s.vertices.size(), uniaxial({0, 0, 1}, -1.0));
    CHECK_THROWS_AS(lift_eigenvector(all, s), Error);
}

TEST_CASE("region reports") {
    const auto g = ball(48);
    const BiaxField hopf = synthetic(g, hopf_link_beta);
    for (double t : {0.3, 0.5, 0.8}) {
        const RegionReport r = region_report(hopf, -t, t);
        CHECK(!r.low_empty);
        CHECK(!r.high_empty);
        CHECK(r.low_components == 1);
        CHECK(r.high_components == 1);
        CHECK(r.low_genera == std::vector<int>{1});
        CHECK(r.high_genera == std::vector<int>{1});
        CHECK(r.surrogate_linked);
        std::size_t domain = 0;
        for (std::size_t i = 0; i < g->size(); ++i) domain += g->in_domain(i);
        CHECK(r.low_nodes + r.high_nodes + r.middle_nodes + r.masked_nodes == domain);
    }

    const RegionReport pulled = region_report(synthetic(g, [](const Vec3& x) { return hopf_beta(x, 0.2); }), -0.8, 0.8);
    CHECK(pulled.low_genera == std::vector<int>{1});
    CHECK(pulled.high_genera == std::vector<int>{1});
    CHECK(pulled.surrogate_linked);

    // A solid torus paired with a ball is not linked.
    const BiaxField one = synthetic(g, [](const Vec3& x) {
        const double tube = circle_distance(x, {0.0, 0.0, 0.0}, {0.0, 0.0, 1.0}, 0.5) - 0.15;
        const double blob = radius({x[0], x[1], x[2] - 0.6}) - 0.15;
        return indicator(blob) - indicator(tube);
    });
    const RegionReport r1 = region_report(one, -0.5, 0.5);
    CHECK(r1.low_genera == std::vector<int>{1});
    CHECK(r1.high_genera == std::vector<int>{0});
    CHECK(!r1.surrogate_linked);

    const BiaxField hh = biaxiality_field(assemble_field(solve_profile(1.0, 100.0), ball(33)));
    const RegionReport r2 = region_report(hh, -0.8, 0.8);
    CHECK(r2.low_empty);
    CHECK(!r2.surrogate_linked);
    CHECK(r2.masked_nodes == 1);
    CHECK(!r2.note.empty());
    CHECK_THROWS_AS(region_report(hh, 0.5, 0.5), Error);
}

TEST_CASE("attainment and report output") {
    const auto g = ball(33);
    const std::vector<Vec3> up(g->size(), Vec3{0.0, 0.0, 1.0});
    const TensorField constant = field_with_boundary(g, boundary_uniaxial(*g, up));
    TensorField filled = constant;
    for (std::size_t i : g->interior) filled[i] = uniaxial({0.0, 0.0, 1.0}, kSqrt3Over2);
    const BiaxField b = biaxiality_field(filled);
    const LevelSetMesh surf = boundary_mesh(*g);
    const int deg = degree(lift_eigenvector(filled, surf).director, surf).degree;
    const AttainmentReport a = attainment_check(b, deg);
    CHECK(a.min_beta == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(a.hp3.has_value());
    CHECK(!*a.hp3);
    CHECK(a.attained == std::vector<bool>{false, false, false, false, false});

    const BiaxField hopf = synthetic(ball(40), hopf_link_beta);
    const AttainmentReport ah = attainment_check(hopf);
    CHECK(ah.min_beta < -0.99);
    CHECK(ah.attained == std::vector<bool>{true, true, true, true, true});

    const auto j = nlohmann::json::parse(region_report_json(region_report(hopf, -0.5, 0.5), ah));
    for (const char* key : {"t1", "t2", "region_genus_lists", "surrogate_linked", "attainment"}) CHECK(j.contains(key));
    CHECK(j["surrogate_linked"].get<bool>());

    const LevelSetMesh s = icosphere(1);
    std::ostringstream obj, csv;
    write_obj(obj, s);
    write_components_csv(csv, s);
    CHECK(obj.str().find("\nf ") != std::string::npos);
    CHECK(csv.str().rfind("id,euler,genus,closed,area", 0) == 0);
    CHECK(csv.str().find("\n0,2,0,1,") != std::string::npos);
}

}  // TEST_SUITE
