#include "ldg/hedgehog.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>

#include "ldg/kernels.hpp"

namespace ldg {

namespace {

const double kS1 = std::sqrt(1.5);  // s(1), the unit-norm uniaxial order

double g_prime(double s, double lambda, double mu) {
    return lambda * (2.0 * s / 3.0 - 2.0 * s * s / kSqrt6) + mu * (1.0 - 2.0 * s * s);
}

// r^2-scaled central-difference residual at sample i (r_i = i dr):
// i^2 (s+ - 2s + s-) + i (s+ - s-) - 6 s + r_i^2 g(s).
double scaled_residual(const std::vector<double>& s, std::size_t i, double dr, double lambda, double mu) {
    const double fi = static_cast<double>(i);
    const double r = fi * dr;
    return fi * fi * (s[i + 1] - 2.0 * s[i] + s[i - 1]) + fi * (s[i + 1] - s[i - 1]) - 6.0 * s[i] +
           r * r * hedgehog_bulk_term(s[i], lambda, mu);
}

double merit(const std::vector<double>& s, double dr, double lambda, double mu) {
    double acc = 0.0;
    for (std::size_t i = 1; i + 1 < s.size(); ++i) {
        const double f = scaled_residual(s, i, dr, lambda, mu);
        acc += f * f;
    }
    return std::sqrt(acc);
}

double unscaled_residual(const std::vector<double>& s, double dr, double lambda, double mu) {
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < s.size(); ++i) {
        const double r = static_cast<double>(i) * dr;
        worst = std::max(worst, std::abs(scaled_residual(s, i, dr, lambda, mu)) / (r * r));
    }
    return worst;
}

void newton(std::vector<double>& s, double dr, double lambda, double mu) {
    const std::size_t n = s.size();
    const std::size_t m = n - 2;  // unknowns s_1 .. s_{n-2}
    std::vector<double> lo(m), di(m), up(m), rhs(m), ds(m), trial(n);
    double f0 = merit(s, dr, lambda, mu);
    for (int it = 0; it < 200; ++it) {
        for (std::size_t k = 0; k < m; ++k) {
            const std::size_t i = k + 1;
            const double fi = static_cast<double>(i);
            const double r = fi * dr;
            lo[k] = fi * fi - fi;
            di[k] = -2.0 * fi * fi - 6.0 + r * r * g_prime(s[i], lambda, mu);
            up[k] = fi * fi + fi;
            rhs[k] = -scaled_residual(s, i, dr, lambda, mu);
        }
        // Thomas algorithm.
        for (std::size_t k = 1; k < m; ++k) {
            const double w = lo[k] / di[k - 1];
            di[k] -= w * up[k - 1];
            rhs[k] -= w * rhs[k - 1];
        }
        ds[m - 1] = rhs[m - 1] / di[m - 1];
        for (std::size_t k = m - 1; k-- > 0;) ds[k] = (rhs[k] - up[k] * ds[k + 1]) / di[k];

        double step = 0.0;
        for (double v : ds) step = std::max(step, std::abs(v));
        if (!std::isfinite(step)) throw Error(ErrorKind::NoConvergence, "singular Newton system");

        double t = 1.0, f1 = 0.0;
        for (;;) {
            trial = s;
            for (std::size_t k = 0; k < m; ++k) trial[k + 1] += t * ds[k];
            f1 = merit(trial, dr, lambda, mu);
            if (f1 <= (1.0 - 1e-4 * t) * f0 || t * step < 1e-15) break;
            t *= 0.5;
            if (t < 1e-10) throw Error(ErrorKind::NoConvergence, "damped Newton step failed at mu=" + std::to_string(mu));
        }
        s.swap(trial);
        f0 = f1;
        if (t * step < 1e-13) return;
    }
    throw Error(ErrorKind::NoConvergence, "Newton iteration limit at mu=" + std::to_string(mu));
}

// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
    std::vector<double> x, w;
};

GaussRule gauss_legendre(int n) {
    GaussRule g;
    g.x.resize(static_cast<std::size_t>(n));
    g.w.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        g.x[static_cast<std::size_t>(i)] = x;
        g.w[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return g;
}

double radius(const Vec3& x) { return std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]); }

void require_unit_ball(const Grid& g) {
    if (!g.spec || !g.spec->holes.empty() || std::abs(g.spec->outer_radius - 1.0) > 1e-12)
        throw Error(ErrorKind::DomainMismatch, "hedgehog fields live on the unit ball without holes");
}

}  // namespace

double hedgehog_bulk_term(double s, double lambda, double mu) {
    return lambda * (s * s / 3.0 - 2.0 * s * s * s / (3.0 * kSqrt6)) + mu * (1.0 - 2.0 * s * s / 3.0) * s;
}

double HedgehogProfile::operator()(double rr) const {
    if (rr <= 0.0) return 0.0;
    if (rr >= 1.0) return s.back();
    const std::size_t n = r.size();
    const double dr = 1.0 / static_cast<double>(n - 1);
    const auto k = static_cast<std::size_t>(rr / dr);
    const std::size_t first = std::min(n - 4, k > 0 ? k - 1 : 0);
    double out = 0.0;
    for (std::size_t a = first; a < first + 4; ++a) {
        double l = 1.0;
        for (std::size_t b = first; b < first + 4; ++b)
            if (b != a) l *= (rr - r[b]) / (r[a] - r[b]);
        out += l * s[a];
    }
    return out;
}

HedgehogProfile solve_profile(double lambda, double mu, int nr) {
    if (!(lambda > 0.0) || !(mu > 0.0)) throw Error(ErrorKind::BadParams, "lambda and mu must be positive");
    if (nr < 256) throw Error(ErrorKind::BadParams, "profile needs at least 256 samples");
    HedgehogProfile p;
    p.lambda = lambda;
    p.mu = mu;
    const auto n = static_cast<std::size_t>(nr);
    const double dr = 1.0 / static_cast<double>(n - 1);
    p.r.resize(n);
    p.s.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        p.r[i] = static_cast<double>(i) * dr;
        p.s[i] = kS1 * p.r[i] * p.r[i];
    }
    p.s.front() = 0.0;
    p.s.back() = kS1;

    std::vector<double> ladder{mu};
    while (ladder.back() > 8.0) ladder.push_back(ladder.back() / 2.0);
    std::reverse(ladder.begin(), ladder.end());
    for (double m : ladder) newton(p.s, dr, lambda, m);

    p.residual = unscaled_residual(p.s, dr, lambda, mu);
    if (!(p.residual < 1e-8))
        throw Error(ErrorKind::NoConvergence, "profile residual " + std::to_string(p.residual) + " above 1e-8");
    return p;
}

QTensor unit_hedgehog(const Vec3& x) {
    const double r = radius(x);
    if (r == 0.0) return QTensor{};
    return uniaxial({x[0] / r, x[1] / r, x[2] / r}, kS1);
}

TensorField assemble_field(const HedgehogProfile& profile, std::shared_ptr<const Grid> grid) {
    const Grid& g = *grid;
    require_unit_ball(g);
    TensorField f = field_with_boundary(grid, boundary_hedgehog(g));
    for (std::size_t i : g.interior) {
        const Vec3 x = g.position(i);
        const double r = radius(x);
        f[i] = r == 0.0 ? QTensor{} : uniaxial({x[0] / r, x[1] / r, x[2] / r}, profile(r));
    }
    return f;
}

double RadialProfile::operator()(double r) const {
    if (breakpoints.empty() || r < support_begin() || r > support_end()) return 0.0;
    return value(r);
}

double RadialProfile::slope(double r) const {
    if (breakpoints.empty() || r < support_begin() || r > support_end()) return 0.0;
    return derivative(r);
}

RadialProfile eta_family(int n) {
    if (n < 1) throw Error(ErrorKind::BadParams, "eta_n needs n >= 1");
    RadialProfile p;
    if (n <= 8) {
        p.value = [](double) { return 0.0; };
        p.derivative = [](double) { return 0.0; };
        p.breakpoints = {0.25, 0.25};
        return p;
    }
    const double nn = n;
    p.value = [nn](double r) { return std::max(0.0, std::min(nn * r, 1.0 / std::sqrt(r)) - 2.0); };
    p.derivative = [nn](double r) {
        if (r <= 2.0 / nn || r >= 0.25) return 0.0;
        return nn * r < 1.0 / std::sqrt(r) ? nn : -0.5 * std::pow(r, -1.5);
    };
    p.breakpoints = {2.0 / nn, std::pow(nn, -2.0 / 3.0), 0.25};
    return p;
}

RadialProfile log_hardy_bump(double a, double b) {
    if (!(a > 0.0 && a < b && b <= 1.0)) throw Error(ErrorKind::BadParams, "log bump needs 0 < a < b <= 1");
    const double k = std::numbers::pi / std::log(b / a);
    RadialProfile p;
    p.value = [a, k](double r) {
        const double t = std::sin(k * std::log(r / a));
        return t * t / std::sqrt(r);
    };
    p.derivative = [a, k](double r) {
        const double u = k * std::log(r / a);
        const double sn = std::sin(u), cs = std::cos(u);
        return (2.0 * k * sn * cs - 0.5 * sn * sn) * std::pow(r, -1.5);
    };
    p.breakpoints = {a, b};
    return p;
}

RadialProfile rescaled(const RadialProfile& xi, double delta) {
    if (!(delta > 0.0)) throw Error(ErrorKind::BadParams, "delta must be positive");
    RadialProfile p;
    p.value = [v = xi.value, delta](double r) { return v(r / delta); };
    p.derivative = [d = xi.derivative, delta](double r) { return d(r / delta) / delta; };
    p.breakpoints = xi.breakpoints;
    for (double& b : p.breakpoints) b *= delta;
    return p;
}

double second_var_radial(const RadialProfile& eta) {
    if (eta.breakpoints.size() < 2) throw Error(ErrorKind::BadParams, "profile without support");
    if (eta.support_begin() <= 0.0 && std::abs(eta.value(0.0)) > 1e-12)
        throw Error(ErrorKind::SingularIntegrand, "eta(0) != 0, so eta^2/r^2 is not integrable");
    static const GaussRule rule = gauss_legendre(20);
    constexpr int kSub = 64;
    double acc = 0.0;
    for (std::size_t p = 0; p + 1 < eta.breakpoints.size(); ++p) {
        const double a = std::min(eta.breakpoints[p], 1.0);
        const double b = std::min(eta.breakpoints[p + 1], 1.0);
        if (!(b > a)) continue;
        const double step = (b - a) / kSub;
        for (int k = 0; k < kSub; ++k) {
            const double lo = a + k * step, mid = lo + 0.5 * step;
            for (std::size_t q = 0; q < rule.x.size(); ++q) {
                const double r = mid + 0.5 * step * rule.x[q];
                const double v = eta.value(r), d = eta.derivative(r);
                acc += 0.5 * step * rule.w[q] * (d * d * r * r - 3.0 * v * v);
            }
        }
    }
    return 16.0 * std::numbers::pi / 5.0 * acc;
}

std::array<std::array<double, 5>, 5> hedgehog_basis_gram(int n_theta, int n_phi) {
    if (n_theta < 2 || n_phi < 3) throw Error(ErrorKind::BadParams, "sphere quadrature too coarse");
    const GaussRule rule = gauss_legendre(n_theta);
    std::array<std::array<double, 5>, 5> gram{};
    const double dphi = 2.0 * std::numbers::pi / n_phi;
    for (std::size_t t = 0; t < rule.x.size(); ++t) {
        const double ct = rule.x[t], st = std::sqrt(1.0 - ct * ct);
        for (int k = 0; k < n_phi; ++k) {
            const double ph = k * dphi;
            const QTensor h = unit_hedgehog({st * std::cos(ph), st * std::sin(ph), ct});
            for (int i = 0; i < 5; ++i)
                for (int j = 0; j < 5; ++j) gram[i][j] += rule.w[t] * dphi * h[i] * h[j];
        }
    }
    return gram;
}

Perturbation make_perturbation(const RadialProfile& xi, const QTensor& vbar, std::shared_ptr<const Grid> grid) {
    if (std::abs(norm(vbar) - 1.0) > 1e-12) throw Error(ErrorKind::NotUnit, "direction must be a unit tensor");
    const Grid& g = *grid;
    Perturbation p{xi, vbar, TensorField(grid), TensorField(grid)};
    for (std::size_t i = 0; i < g.size(); ++i) {
        const Vec3 x = g.position(i);
        const double v = xi(radius(x));
        if (v == 0.0) continue;
        if (g.kind[i] != NodeKind::Interior)
            throw Error(ErrorKind::BadParams, "perturbation does not vanish outside the interior");
        p.phi[i] = v * vbar;
        const QTensor h = unit_hedgehog(x);
        p.phi_t[i] = p.phi[i] - dot(h, p.phi[i]) * h;
    }
    return p;
}

SecondVariation second_var_F_terms(const TensorField& hedgehog, const TensorField& phi_t, double lambda, double mu) {
    require_same_grid(hedgehog, phi_t);
    const Grid& g = *hedgehog.grid;
    SecondVariation out;
    double pot = 0.0, pen = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!g.in_domain(i)) continue;
        const QTensor& h = hedgehog[i];
        const QTensor& f = phi_t[i];
        const double hf = dot(h, f);
        if (std::abs(hf) > 1e-9)
            throw Error(ErrorKind::NotTangent, "Phi_T:H = " + std::to_string(hf) + " at node " + std::to_string(i));
        if (norm2(f) == 0.0) continue;
        pot += g.weight[i] * hessian_w_raw(h, f);
        pen += g.weight[i] * (2.0 * hf * hf + (norm2(h) - 1.0) * norm2(f));
    }
    out.gradient = 2.0 * kernels::parallel::energy(g, phi_t.values, Objective{}).dirichlet;
    out.potential = lambda * pot;
    out.penalty = mu * pen;
    out.total = out.gradient + out.potential + out.penalty;
    return out;
}

double second_var_F(const TensorField& hedgehog, const TensorField& phi_t, double lambda, double mu) {
    return second_var_F_terms(hedgehog, phi_t, lambda, mu).total;
}

double limit_penalty_term(const TensorField& phi_t) {
    const Grid& g = *phi_t.grid;
    double acc = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!g.in_domain(i)) continue;
        const double n2 = norm2(phi_t[i]);
        if (n2 == 0.0) continue;
        const double r = radius(g.position(i));
        acc += g.weight[i] * 6.0 / (r * r) * n2;
    }
    return -acc;
}

double second_var_E(const TensorField& phi_t, double lambda) {
    const Grid& g = *phi_t.grid;
    double pot = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!g.in_domain(i) || norm2(phi_t[i]) == 0.0) continue;
        pot += g.weight[i] * hessian_w_raw(unit_hedgehog(g.position(i)), phi_t[i]);
    }
    return 2.0 * kernels::parallel::energy(g, phi_t.values, Objective{}).dirichlet + limit_penalty_term(phi_t) +
           lambda * pot;
}

RadialProfile default_sweep_profile() { return log_hardy_bump(0.1, 0.95); }

SweepReport instability_sweep(double lambda, const std::vector<double>& mu_ladder,
                              const std::vector<double>& delta_ladder, int n_grid, const RadialProfile& xi,
                              const QTensor& vbar, int nr) {
    if (mu_ladder.empty() || delta_ladder.empty()) throw Error(ErrorKind::BadParams, "empty ladder");
    for (double d : delta_ladder)
        if (!(d > 0.0 && d <= 1.0)) throw Error(ErrorKind::BadParams, "delta must lie in (0, 1]");
    const auto grid = build_grid(DomainSpec{1.0, {}}, n_grid);

    struct PerDelta {
        Perturbation pert;
        double limit, e_lambda, e0_grid, e0_radial;
    };
    std::vector<PerDelta> per;
    per.reserve(delta_ladder.size());
    for (double d : delta_ladder) {
        const RadialProfile xd = rescaled(xi, d);
        Perturbation p = make_perturbation(xd, vbar, grid);
        const double lim = limit_penalty_term(p.phi_t);
        const double el = second_var_E(p.phi_t, lambda);
        const double e0 = second_var_E(p.phi_t, 0.0);
        per.push_back(PerDelta{std::move(p), lim, el, e0, second_var_radial(xd)});
    }

    SweepReport rep;
    for (double mu : mu_ladder) {
        const HedgehogProfile prof = solve_profile(lambda, mu, nr);
        const TensorField h = assemble_field(prof, grid);
        for (std::size_t k = 0; k < delta_ladder.size(); ++k) {
            SweepRow row;
            row.mu = mu;
            row.delta = delta_ladder[k];
            row.f = second_var_F_terms(h, per[k].pert.phi_t, lambda, mu);
            row.limit_term = per[k].limit;
            row.e_lambda = per[k].e_lambda;
            row.e0_grid = per[k].e0_grid;
            row.e0_radial = per[k].e0_radial;
            row.profile_residual = prof.residual;
            if (rep.first_negative < 0 && row.f.total < 0.0) rep.first_negative = static_cast<int>(rep.rows.size());
            rep.rows.push_back(row);
        }
    }

    const std::size_t nd = delta_ladder.size();
    const std::size_t top = static_cast<std::size_t>(
        std::max_element(mu_ladder.begin(), mu_ladder.end()) - mu_ladder.begin());
    std::size_t best = 0;
    for (std::size_t k = 1; k < nd; ++k)
        if (rep.rows[top * nd + k].f.total < rep.rows[top * nd + best].f.total) best = k;
    rep.best_delta = delta_ladder[best];

    std::vector<std::size_t> order(mu_ladder.size());
    for (std::size_t j = 0; j < order.size(); ++j) order[j] = j;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return mu_ladder[a] < mu_ladder[b]; });
    rep.decreasing_in_mu = true;
    for (std::size_t j = 0; j < mu_ladder.size(); ++j) rep.best_delta_values.push_back(rep.rows[j * nd + best].f.total);
    for (std::size_t j = 1; j < order.size(); ++j)
        if (!(rep.rows[order[j] * nd + best].f.total < rep.rows[order[j - 1] * nd + best].f.total))
            rep.decreasing_in_mu = false;

    const SweepRow& tr = rep.rows[top * nd + best];
    rep.limit_rel_error = tr.limit_term != 0.0 ? std::abs(tr.f.penalty - tr.limit_term) / std::abs(tr.limit_term)
                                               : std::numeric_limits<double>::infinity();
    return rep;
}

void write_profile_csv(std::ostream& out, const HedgehogProfile& profile) {
    const auto old = out.precision(17);
    out << "r,s\n";
    for (std::size_t i = 0; i < profile.r.size(); ++i) out << profile.r[i] << ',' << profile.s[i] << '\n';
    out.precision(old);
}

void write_sweep_csv(std::ostream& out, const SweepReport& report) {
    const auto old = out.precision(17);
    out << "mu,delta,value,gradient,potential,penalty,limit_term,e_lambda,e0_grid,e0_radial\n";
    for (const SweepRow& r : report.rows)
        out << r.mu << ',' << r.delta << ',' << r.f.total << ',' << r.f.gradient << ',' << r.f.potential << ','
            << r.f.penalty << ',' << r.limit_term << ',' << r.e_lambda << ',' << r.e0_grid << ',' << r.e0_radial
            << '\n';
    out.precision(old);
}

}  // namespace ldg
