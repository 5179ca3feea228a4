#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "ldg/energy.hpp"

namespace ldg {

struct SolveOptions {
    double tol = 1e-5;           // on residual L2 / sqrt(|Omega|)
    int max_iters = 50000;
    double noise_amplitude = 0.0;
    std::uint64_t seed = 0;
    double armijo_c = 1e-4;
    double backtrack = 0.5;
    double step_cap = 0.0;       // 0 selects 1/h^3
    // Called as progress(iteration, objective, residual) every progress_every iterations.
    std::function<void(int, double, double)> progress;
    int progress_every = 0;
};

struct SolveReport {
    int iterations = 0;
    bool converged = false;
    EnergyBreakdown energy;
    double residual = 0.0;       // L2 / sqrt(|Omega|) at the final iterate
    double min_norm = 0.0;       // over non-Exterior nodes
    double max_norm = 0.0;
    double penalty_integral = 0.0;  // int (1 - |Q|^2)^2
    std::vector<std::pair<int, double>> trace;  // (iteration, objective)
    double wall_seconds = 0.0;
};

// Interior values solving the discrete Laplace equation with the field's
// boundary values (conjugate gradients).
TensorField harmonic_extension(const TensorField& boundary, double rtol = 1e-10);

// Normalized harmonic extension, optionally perturbed by seeded tangent noise
// of the given amplitude and renormalized.
TensorField initial_field(const TensorField& boundary, double noise_amplitude, std::uint64_t seed);

// Sphere-constrained descent for E_lambda. Throws LineSearchStalled, NotOnSphere.
std::pair<TensorField, SolveReport> minimize_constrained(const TensorField& start, double lambda,
                                                         const SolveOptions& opts);

// Penalized descent for F_{lambda,mu}. Throws LineSearchStalled.
std::pair<TensorField, SolveReport> minimize_unconstrained(const TensorField& start, double lambda, double mu,
                                                           const SolveOptions& opts);

struct MuStage {
    double mu = 0.0;
    TensorField field;
    SolveReport report;
};

// Warm-started stages over a strictly increasing mu ladder.
std::vector<MuStage> mu_continuation(const TensorField& start, double lambda, const std::vector<double>& mu_ladder,
                                     const SolveOptions& opts);

struct GlStage {
    double epsilon = 0.0;
    TensorField field;
    SolveReport report;
    double distance_l2 = 0.0;  // ||Q_eps - anchor||_{L2}
    double gl_energy = 0.0;
};

// Anchored penalty approximation over a strictly decreasing epsilon ladder,
// each stage warm-started from the previous one (the first from the anchor).
std::vector<GlStage> minimize_gl(const TensorField& anchor, double lambda, const std::vector<double>& eps_ladder,
                                 const SolveOptions& opts);

// Field rescaled to unit norm at every non-Exterior node with |Q| > 0.
TensorField normalized(const TensorField& field);

}  // namespace ldg
