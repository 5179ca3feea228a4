#include "ldg/minimize.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace ldg {

namespace {

// Sum of f(s) over s < count in fixed blocks added in order.
template <class F>
double ordered_sum(std::size_t count, F f) {
    const std::size_t blocks = (count + kernels::kBlock - 1) / kernels::kBlock;
    std::vector<double> part(blocks, 0.0);
#pragma omp parallel for schedule(static)
    for (std::size_t b = 0; b < blocks; ++b) {
        const std::size_t end = std::min(count, (b + 1) * kernels::kBlock);
        double acc = 0.0;
        for (std::size_t s = b * kernels::kBlock; s < end; ++s) acc += f(s);
        part[b] = acc;
    }
    double total = 0.0;
    for (double p : part) total += p;
    return total;
}

QTensor unit_or_fallback(const QTensor& q) {
    const double n = norm(q);
    if (n > 1e-14) return (1.0 / n) * q;
    QTensor e0;
    e0[0] = 1.0;
    return e0;
}

void check_unit(const TensorField& f, const char* what) {
    const Grid& g = *f.grid;
    for (std::size_t i = 0; i < g.size(); ++i)
        if (g.in_domain(i) && std::abs(norm(f[i]) - 1.0) > kUnitNormTol)
            throw Error(ErrorKind::NotOnSphere, std::string(what) + ": node " + std::to_string(i) + " is not unit");
}

void fill_norms(const TensorField& f, SolveReport& rep) {
    const Grid& g = *f.grid;
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0, pen = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!g.in_domain(i)) continue;
        const double n2 = norm2(f[i]);
        lo = std::min(lo, std::sqrt(n2));
        hi = std::max(hi, std::sqrt(n2));
        pen += g.weight[i] * (1.0 - n2) * (1.0 - n2);
    }
    rep.min_norm = lo;
    rep.max_norm = hi;
    rep.penalty_integral = pen;
}

// Steepest descent with Armijo backtracking from a Barzilai-Borwein step.
// With `sphere` set the gradient is projected on the tangent space and the
// update is retracted by normalization.
std::pair<TensorField, SolveReport> descend(const TensorField& start, const Objective& obj, bool sphere,
                                            const SolveOptions& opts) {
    const auto t0 = std::chrono::steady_clock::now();
    if (!(opts.tol > 0.0) || opts.max_iters < 0 || !(opts.armijo_c > 0.0 && opts.armijo_c < 1.0) ||
        !(opts.backtrack > 0.0 && opts.backtrack < 1.0) || opts.step_cap < 0.0)
        throw Error(ErrorKind::BadParams, "invalid solver options");

    const Grid& g = *start.grid;
    const std::size_t m = g.interior.size();
    const double h = g.h;
    double cap = opts.step_cap > 0.0 ? opts.step_cap : 1.0 / (h * h * h);
    constexpr int kMaxBacktracks = 60;

    TensorField x = start;
    TensorField trial = start;
    std::vector<QTensor> grad(m), grad_prev(m), step(m);

    auto compute_gradient = [&](const TensorField& f, std::vector<QTensor>& out) {
        kernels::parallel::gradient(g, f.values, obj, out);
        if (!sphere) return;
#pragma omp parallel for schedule(static)
        for (std::size_t s = 0; s < m; ++s) {
            const QTensor& q = f[g.interior[s]];
            out[s] -= dot(out[s], q) * q;
        }
    };

    SolveReport rep;
    double energy = kernels::parallel::energy(g, x.values, obj).total;
    rep.trace.emplace_back(0, energy);
    compute_gradient(x, grad);

    double tau_next = 1.0 / (12.0 * h);
    bool cap_halved = false;
    int it = 0;
    for (;;) {
        rep.residual = residual_from_gradient(g, grad).l2_normalized;
        if (rep.residual < opts.tol) {
            rep.converged = true;
            break;
        }
        if (it >= opts.max_iters) break;

        if (opts.progress && opts.progress_every > 0 && it % opts.progress_every == 0)
            opts.progress(it, energy, rep.residual);
        const double gnorm2 = ordered_sum(m, [&](std::size_t s) { return norm2(grad[s]); });
        double tau0 = std::min(tau_next, cap);
        double delta = 0.0;
        bool accepted = false;
        for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
            double tau = tau0;
            for (int k = 0; k < kMaxBacktracks; ++k, tau *= opts.backtrack) {
#pragma omp parallel for schedule(static)
                for (std::size_t s = 0; s < m; ++s) {
                    const std::size_t i = g.interior[s];
                    const QTensor y = x[i] - tau * grad[s];
                    trial[i] = sphere ? unit_or_fallback(y) : y;
                }
                delta = kernels::parallel::energy_delta(g, x.values, trial.values, obj);
                if (delta < 0.0 && delta <= -opts.armijo_c * tau * gnorm2) {
                    accepted = true;
                    break;
                }
            }
            if (!accepted) {
                if (cap_halved) break;
                cap_halved = true;
                cap = 0.5 * tau0;
                tau0 = cap * std::pow(opts.backtrack, kMaxBacktracks);
            }
        }
        if (!accepted)
            throw Error(ErrorKind::LineSearchStalled, "no decreasing step at iteration " + std::to_string(it) +
                                                          " (residual " + std::to_string(rep.residual) + ")");

#pragma omp parallel for schedule(static)
        for (std::size_t s = 0; s < m; ++s) {
            const std::size_t i = g.interior[s];
            step[s] = trial[i] - x[i];
            x[i] = trial[i];
        }
        energy += delta;
        ++it;
        rep.trace.emplace_back(it, energy);

        grad_prev.swap(grad);
        compute_gradient(x, grad);
        const double ss = ordered_sum(m, [&](std::size_t s) { return norm2(step[s]); });
        const double sy = ordered_sum(m, [&](std::size_t s) { return dot(step[s], grad[s] - grad_prev[s]); });
        // Short BB step s.y / y.y; far fewer Armijo rejections than s.s / s.y here.
        const double yy = ordered_sum(m, [&](std::size_t s) { return norm2(grad[s] - grad_prev[s]); });
        tau_next = sy > 0.0 && yy > 0.0 ? sy / yy : (sy > 0.0 ? ss / sy : cap);
    }

    rep.iterations = it;
    rep.energy = kernels::parallel::energy(g, x.values, obj);
    fill_norms(x, rep);
    rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {std::move(x), std::move(rep)};
}

}  // namespace

TensorField normalized(const TensorField& field) {
    TensorField out = field;
    const Grid& g = *field.grid;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!g.in_domain(i)) continue;
        const double n = norm(out[i]);
        if (n > 0.0) out[i] *= 1.0 / n;
    }
    return out;
}

TensorField harmonic_extension(const TensorField& boundary, double rtol) {
    const Grid& g = *boundary.grid;
    const std::size_t m = g.interior.size();
    const Objective dirichlet{};

    // A v = gradient of the Dirichlet term with zero boundary data.
    TensorField work(boundary.grid);
    std::vector<QTensor> b(m), r(m), p(m), ap(m);
    TensorField bc = boundary;
    for (std::size_t i : g.interior) bc[i] = QTensor{};
    kernels::parallel::gradient(g, bc.values, dirichlet, b);
    for (QTensor& v : b) v = -v;

    auto apply = [&](const std::vector<QTensor>& v, std::vector<QTensor>& out) {
        for (std::size_t s = 0; s < m; ++s) work[g.interior[s]] = v[s];
        kernels::parallel::gradient(g, work.values, dirichlet, out);
    };

    std::vector<QTensor> u(m);
    r = b;
    p = r;
    double rr = ordered_sum(m, [&](std::size_t s) { return norm2(r[s]); });
    const double stop = rtol * rtol * std::max(rr, std::numeric_limits<double>::min());
    for (std::size_t k = 0; k < 10 * m + 10 && rr > stop; ++k) {
        apply(p, ap);
        const double pap = ordered_sum(m, [&](std::size_t s) { return dot(p[s], ap[s]); });
        if (!(pap > 0.0)) break;
        const double alpha = rr / pap;
        for (std::size_t s = 0; s < m; ++s) {
            u[s] += alpha * p[s];
            r[s] -= alpha * ap[s];
        }
        const double rr_new = ordered_sum(m, [&](std::size_t s) { return norm2(r[s]); });
        const double beta = rr_new / rr;
        for (std::size_t s = 0; s < m; ++s) p[s] = r[s] + beta * p[s];
        rr = rr_new;
    }

    TensorField out = boundary;
    for (std::size_t s = 0; s < m; ++s) out[g.interior[s]] = u[s];
    return out;
}

TensorField initial_field(const TensorField& boundary, double noise_amplitude, std::uint64_t seed) {
    if (noise_amplitude < 0.0) throw Error(ErrorKind::BadParams, "noise amplitude must be nonnegative");
    TensorField f = harmonic_extension(boundary);
    const Grid& g = *f.grid;
    for (std::size_t i : g.interior) f[i] = unit_or_fallback(f[i]);
    if (noise_amplitude == 0.0) return f;

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, noise_amplitude);
    for (std::size_t i : g.interior) {
        QTensor xi;
        for (int c = 0; c < 5; ++c) xi[c] = normal(rng);
        xi -= dot(xi, f[i]) * f[i];
        f[i] = unit_or_fallback(f[i] + xi);
    }
    return f;
}

std::pair<TensorField, SolveReport> minimize_constrained(const TensorField& start, double lambda,
                                                         const SolveOptions& opts) {
    if (lambda < 0.0) throw Error(ErrorKind::BadParams, "lambda must be nonnegative");
    check_unit(start, "minimize_constrained");
    // Interior values are renormalized exactly; frozen nodes stay untouched.
    TensorField x = start;
    for (std::size_t i : x.grid->interior) x[i] = unit_or_fallback(x[i]);
    return descend(x, Objective{lambda, 0.0, 0.0, nullptr}, true, opts);
}

std::pair<TensorField, SolveReport> minimize_unconstrained(const TensorField& start, double lambda, double mu,
                                                           const SolveOptions& opts) {
    if (lambda < 0.0 || mu < 0.0) throw Error(ErrorKind::BadParams, "lambda and mu must be nonnegative");
    return descend(start, Objective{lambda, mu, 0.0, nullptr}, false, opts);
}

std::vector<MuStage> mu_continuation(const TensorField& start, double lambda, const std::vector<double>& mu_ladder,
                                     const SolveOptions& opts) {
    for (std::size_t k = 0; k < mu_ladder.size(); ++k)
        if (!(mu_ladder[k] >= 0.0) || (k > 0 && mu_ladder[k] <= mu_ladder[k - 1]))
            throw Error(ErrorKind::BadParams, "mu ladder must be strictly increasing");
    std::vector<MuStage> stages;
    const TensorField* warm = &start;
    for (double mu : mu_ladder) {
        auto [field, report] = minimize_unconstrained(*warm, lambda, mu, opts);
        stages.push_back(MuStage{mu, std::move(field), std::move(report)});
        warm = &stages.back().field;
    }
    return stages;
}

std::vector<GlStage> minimize_gl(const TensorField& anchor, double lambda, const std::vector<double>& eps_ladder,
                                 const SolveOptions& opts) {
    check_unit(anchor, "minimize_gl anchor");
    for (std::size_t k = 0; k < eps_ladder.size(); ++k)
        if (!(eps_ladder[k] > 0.0) || (k > 0 && eps_ladder[k] >= eps_ladder[k - 1]))
            throw Error(ErrorKind::BadParams, "epsilon ladder must be positive and strictly decreasing");
    const Grid& g = *anchor.grid;
    std::vector<GlStage> stages;
    stages.reserve(eps_ladder.size());
    const TensorField* warm = &anchor;
    for (double eps : eps_ladder) {
        const Objective obj{lambda, 1.0 / (eps * eps), 1.0, &anchor.values};
        auto [field, report] = descend(*warm, obj, false, opts);
        GlStage st{eps, std::move(field), std::move(report), 0.0, 0.0};
        double d2 = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i)
            if (g.in_domain(i)) d2 += g.weight[i] * norm2(st.field[i] - anchor[i]);
        st.distance_l2 = std::sqrt(d2);
        st.gl_energy = st.report.energy.total;
        stages.push_back(std::move(st));
        warm = &stages.back().field;
    }
    return stages;
}

}  // namespace ldg
