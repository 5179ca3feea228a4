#include <cmath>
#include <filesystem>
#include <functional>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include <unistd.h>

#include "ldg/cli.hpp"
#include "ldg/energy.hpp"
#include "ldg/error.hpp"
#include "ldg/hedgehog.hpp"
#include "ldg/io.hpp"
#include "ldg/kernels.hpp"
#include "ldg/topology.hpp"

namespace ldg::cli {

namespace {

struct Check {
    const char* name;
    std::function<std::string()> run;  // empty string on success, else the failure detail
};

std::string fmt(double v) {
    std::ostringstream s;
    s.precision(3);
    s << v;
    return s.str();
}

QTensor random_q(std::mt19937_64& rng, double scale) {
    std::normal_distribution<double> nd;
    QTensor q;
    for (int k = 0; k < 5; ++k) q[k] = nd(rng);
    return (scale / norm(q)) * q;
}

Vec3 random_direction(std::mt19937_64& rng) {
    std::normal_distribution<double> nd;
    Vec3 v{nd(rng), nd(rng), nd(rng)};
    const double l = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    return {v[0] / l, v[1] / l, v[2] / l};
}

const double kPi = std::numbers::pi;
const double kS6 = std::sqrt(6.0);

std::string parameter_reduction() {
    if (std::abs(s_plus(1.0, 1.0, 1.0) - 1.5) > 1e-15) return "s_plus(1,1,1) != 1.5";
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.1, 10.0);
    for (int i = 0; i < 1000; ++i) {
        const double a2 = u(rng), b2 = u(rng), c2 = u(rng), s = s_plus(a2, b2, c2);
        const double r = 2.0 * c2 * s * s - b2 * s - 3.0 * a2;
        if (std::abs(r) > 1e-12 * (2.0 * c2 * s * s + b2 * s + 3.0 * a2)) return "root residual " + fmt(r);
    }
    return {};
}

std::string potential_constants() {
    const double w0 = potential_w(QTensor{});
    const double wb = potential_w(QTensor::basis(3));
    const double wm = potential_w(-1.0 * QTensor::basis(0));
    if (std::abs(w0 - 1.0 / (12.0 * kS6)) > 1e-12) return "W(0) = " + fmt(w0);
    if (std::abs(wb - 1.0 / (3.0 * kS6)) > 1e-12) return "W(beta=0) = " + fmt(wb);
    if (std::abs(wm - 2.0 / (3.0 * kS6)) > 1e-12) return "W(beta=-1) = " + fmt(wm);
    if (std::abs(potential_w(QTensor::basis(0))) > 1e-15) return "W(e0) != 0";
    return {};
}

std::string potential_derivatives() {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    for (int i = 0; i < 200; ++i) {
        const QTensor q = random_q(rng, u(rng));
        const QTensor g = potential_grad(q);
        for (int k = 0; k < 5; ++k) {
            const double h = 1e-5;
            const QTensor e = QTensor::basis(k);
            const double fd = (potential_w(q + h * e) - potential_w(q - h * e)) / (2.0 * h);
            if (std::abs(fd - g[k]) > 1e-8 * std::max(1.0, norm(g))) return "gradient mismatch " + fmt(fd - g[k]);
        }
        const QTensor psi = random_q(rng, 1.0);
        const double h = 1e-3;
        const double fd2 = (potential_w(q + h * psi) - 2.0 * potential_w(q) + potential_w(q - h * psi)) / (h * h);
        const double an = hessian_w_raw(q, psi);
        if (std::abs(fd2 - an) > 1e-6 * std::max(1.0, std::abs(an))) return "hessian mismatch " + fmt(fd2 - an);
    }
    return {};
}

std::string eigen_residuals() {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 500; ++i) {
        const QTensor q = random_q(rng, 1.5);
        const Mat3 m = to_matrix(q);
        const EigenResult e = eigen(q);
        if (std::abs(e.values[0] + e.values[1] + e.values[2]) > 1e-12) return "eigenvalues do not sum to 0";
        for (int k = 0; k < 3; ++k) {
            double r = 0.0;
            for (int a = 0; a < 3; ++a) {
                double mv = 0.0;
                for (int b = 0; b < 3; ++b) mv += m[a][b] * e.vectors[k][b];
                r += (mv - e.values[k] * e.vectors[k][a]) * (mv - e.values[k] * e.vectors[k][a]);
            }
            if (std::sqrt(r) > 1e-10 * norm(q)) return "eigenpair residual " + fmt(std::sqrt(r));
        }
    }
    return {};
}

std::string biaxiality_values() {
    std::mt19937_64 rng(4);
    for (int i = 0; i < 100; ++i) {
        const Vec3 n = random_direction(rng);
        if (std::abs(biaxiality(uniaxial(n, 0.7)) - 1.0) > 1e-12) return "positive uniaxial != 1";
        if (std::abs(biaxiality(uniaxial(n, -0.7)) + 1.0) > 1e-12) return "negative uniaxial != -1";
        const double b = biaxiality(random_q(rng, 1.0));
        if (b < -1.0 - 1e-12 || b > 1.0 + 1e-12) return "biaxiality out of range";
    }
    if (std::abs(biaxiality(QTensor::basis(3))) > 1e-12) return "maximal biaxial != 0";
    return {};
}

TensorField random_interior_field(const std::shared_ptr<const Grid>& g, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    TensorField f = field_with_boundary(g, boundary_hedgehog(*g));
    for (std::size_t i : g->interior) f[i] = random_q(rng, 0.5 + 0.5 * std::uniform_real_distribution<double>()(rng));
    return f;
}

std::string kernels_agree() {
    const auto g = build_grid(DomainSpec{1.0, {{{0.3, 0.0, 0.0}, 0.2}}}, 24);
    const TensorField f = random_interior_field(g, 5);
    const Objective obj{1.3, 20.0};
    const EnergyBreakdown es = kernels::serial::energy(*g, f.values, obj);
    const EnergyBreakdown ep = kernels::parallel::energy(*g, f.values, obj);
    if (std::abs(es.total - ep.total) > 1e-12 * std::abs(es.total)) return "energy differs";
    std::vector<QTensor> gs(g->interior.size()), gp(g->interior.size());
    kernels::serial::gradient(*g, f.values, obj, gs);
    kernels::parallel::gradient(*g, f.values, obj, gp);
    for (std::size_t s = 0; s < gs.size(); ++s)
        if (norm(gs[s] - gp[s]) > 1e-12 * std::max(1.0, norm(gs[s]))) return "gradient differs";
    return {};
}

std::string gradient_matches_energy() {
    const auto g = build_grid(DomainSpec{1.0, {}}, 16);
    TensorField f = random_interior_field(g, 6);
    const Objective obj{1.0, 10.0};
    std::vector<QTensor> grad(g->interior.size());
    kernels::serial::gradient(*g, f.values, obj, grad);
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<std::size_t> pick(0, g->interior.size() - 1);
    for (int t = 0; t < 20; ++t) {
        const std::size_t s = pick(rng), i = g->interior[s];
        const int k = t % 5;
        const double h = 1e-6;
        const QTensor keep = f[i];
        f[i][k] = keep[k] + h;
        const double ep = kernels::serial::energy(*g, f.values, obj).total;
        f[i][k] = keep[k] - h;
        const double em = kernels::serial::energy(*g, f.values, obj).total;
        f[i] = keep;
        const double fd = (ep - em) / (2.0 * h);
        if (std::abs(fd - grad[s][k]) > 1e-5 * std::max(std::abs(grad[s][k]), g->h * g->h * g->h))
            return "gradient mismatch at node " + std::to_string(i);
    }
    return {};
}

std::string vacuum_is_stationary() {
    const auto g = build_grid(DomainSpec{1.0, {}}, 16);
    const QTensor k = QTensor::basis(0);
    const TensorField f = sample_field(g, [&](const Vec3&) { return k; });
    SolveOptions opts;
    opts.max_iters = 10;
    const auto [out, rep] = minimize_constrained(f, 1.0, opts);
    if (rep.iterations != 0 || !rep.converged) return "constant vacuum state moved";
    if (std::abs(rep.energy.total) > 1e-14) return "nonzero energy " + fmt(rep.energy.total);
    return {};
}

std::string hedgehog_profile() {
    const HedgehogProfile p = solve_profile(1.0, 100.0, 1025);
    if (p.residual > 1e-8) return "residual " + fmt(p.residual);
    for (std::size_t i = 0; i + 1 < p.s.size(); ++i)
        if (p.s[i + 1] < p.s[i] - 1e-12) return "profile not monotone";
    if (p.s.front() != 0.0 || std::abs(p.s.back() - std::sqrt(1.5)) > 1e-15) return "wrong end values";
    return {};
}

std::string radial_constants() {
    RadialProfile quad;
    quad.value = [](double r) { return r * (1.0 - r); };
    quad.derivative = [](double r) { return 1.0 - 2.0 * r; };
    quad.breakpoints = {0.0, 1.0};
    const double v = second_var_radial(quad);
    if (std::abs(v - 8.0 * kPi / 75.0) > 1e-10) return "r(1-r) value " + fmt(v);
    if (!(second_var_radial(eta_family(100)) < 0.0)) return "eta_100 not negative";
    const auto gram = hedgehog_basis_gram();
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j)
            if (std::abs(gram[i][j] - (i == j ? 4.0 * kPi / 5.0 : 0.0)) > 1e-3) return "basis gram off";
    return {};
}

std::string icosphere_degrees() {
    const LevelSetMesh m = icosphere(3);
    std::vector<Vec3> id = m.vertices, anti = m.vertices, cst(m.vertices.size(), Vec3{0.0, 0.0, 1.0});
    for (Vec3& v : anti) v = {-v[0], -v[1], -v[2]};
    if (degree(id, m).degree != 1) return "identity degree";
    if (degree(cst, m).degree != 0) return "constant degree";
    if (degree(anti, m).degree != -1) return "antipodal degree";
    return {};
}

std::string level_set_genus() {
    const auto g = build_grid_from_sdf([](const Vec3& x) { return std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) - 1.0; },
                                       1.0, 40);
    std::vector<double> sphere(g->size()), torus(g->size());
    std::vector<std::uint8_t> all(g->size(), 1);
    for (std::size_t i = 0; i < g->size(); ++i) {
        const Vec3 x = g->position(i);
        sphere[i] = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) - 0.5;
        const double q = std::sqrt(x[0] * x[0] + x[1] * x[1]) - 0.5;
        torus[i] = std::sqrt(q * q + x[2] * x[2]) - 0.2;
    }
    const auto gs = extract_surface(*g, sphere, all, 0.0).genera();
    const auto gt = extract_surface(*g, torus, all, 0.0).genera();
    if (gs != std::vector<int>{0}) return "sphere genus";
    if (gt != std::vector<int>{1}) return "torus genus";
    return {};
}

std::string vtk_round_trip() {
    const auto g = build_grid(DomainSpec{1.0, {{{0.0, 0.4, 0.0}, 0.3}}}, 32);
    const TensorField f = random_interior_field(g, 8);
    const auto path = std::filesystem::temp_directory_path() / ("ldg-selftest-" + std::to_string(::getpid()) + ".vtk");
    write_field_vtk(path.string(), f);
    const TensorField back = read_field_vtk(path.string());
    std::filesystem::remove(path);
    for (std::size_t i = 0; i < g->size(); ++i)
        for (int k = 0; k < 5; ++k)
            if (back[i][k] != f[i][k]) return "coefficient changed at node " + std::to_string(i);
    if (back.grid->kind != g->kind) return "node kinds changed";
    return {};
}

std::string spectral_inequality() {
    std::mt19937_64 rng(9);
    const double bound = 1.0 / kS6;
    for (int i = 0; i < 10000; ++i) {
        const QTensor q = uniaxial(random_direction(rng), std::sqrt(1.5));
        QTensor t = random_q(rng, 1.0);
        t = t - dot(t, q) * q;
        t *= 1.0 / norm(t);
        const double v = 2.0 * trace_product(t, q, t);
        if (v > bound + 1e-12) return "2tr(TQT) exceeds 1/sqrt6 by " + fmt(v - bound);
    }
    const double eq = 2.0 * trace_product(QTensor::basis(1), QTensor::basis(0), QTensor::basis(1));
    if (std::abs(eq - bound) > 1e-12) return "equality case " + fmt(eq - bound);
    return {};
}

std::string config_strictness() {
    const auto rejects = [](const char* text) {
        try {
            parse_config(text);
        } catch (const Error& e) {
            return e.kind() == ErrorKind::ConfigInvalid;
        }
        return false;
    };
    if (!rejects("[params]\nlambda = 1\nlamda = 2\n")) return "unknown key accepted";
    if (!rejects("[params]\nlambda = 1\na2 = 1\n")) return "mixed parameter sets accepted";
    if (!rejects("[params]\nlambda = 1\n[analysis]\nlevels = 0, 1\n")) return "level 1 accepted";
    if (rejects("[params]\nlambda = 1\n")) return "minimal config rejected";
    return {};
}

}  // namespace

int run_selftest(std::ostream& log) {
    configure_threads();
    const std::vector<Check> checks{
        {"parameter reduction", parameter_reduction},
        {"potential constants", potential_constants},
        {"potential derivatives", potential_derivatives},
        {"eigen residuals", eigen_residuals},
        {"biaxiality values", biaxiality_values},
        {"serial and parallel kernels", kernels_agree},
        {"discrete gradient", gradient_matches_energy},
        {"vacuum state", vacuum_is_stationary},
        {"hedgehog profile", hedgehog_profile},
        {"radial constants", radial_constants},
        {"icosphere degrees", icosphere_degrees},
        {"level-set genus", level_set_genus},
        {"vtk round trip", vtk_round_trip},
        {"spectral inequality", spectral_inequality},
        {"config strictness", config_strictness},
    };
    int failures = 0;
    for (const Check& c : checks) {
        std::string detail;
        try {
            detail = c.run();
        } catch (const std::exception& e) {
            detail = std::string("threw ") + e.what();
        }
        if (detail.empty()) {
            log << "PASS " << c.name << '\n';
        } else {
            ++failures;
            log << "FAIL " << c.name << ": " << detail << '\n';
        }
    }
    log << (failures == 0 ? "selftest passed" : "selftest failed: " + std::to_string(failures) + " check(s)") << '\n';
    return failures == 0 ? kOk : kAnalysisFailure;
}

}  // namespace ldg::cli
