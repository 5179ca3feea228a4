#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <vector>

#include "ldg/domain.hpp"

namespace ldg {

// Radial hedgehog H(x) = s(|x|) (x/|x| ⊗ x/|x| - I/3) of F_{lambda,mu} on the unit ball.
// The profile solves s'' + 2s'/r - 6s/r^2 = -g(s) with
//   g(s) = lambda (s^2/3 - 2 s^3/(3 sqrt6)) + mu (1 - 2s^2/3) s,  s(0) = 0, s(1) = sqrt(3/2).
struct HedgehogProfile {
    std::vector<double> r;  // uniform on [0, 1]
    std::vector<double> s;
    double lambda = 0.0;
    double mu = 0.0;
    double residual = 0.0;  // sup of the discrete ODE residual over interior samples

    // Cubic interpolation between samples; s(1) beyond r = 1.
    double operator()(double radius) const;
};

double hedgehog_bulk_term(double s, double lambda, double mu);  // g(s)

// Damped Newton on the central-difference BVP with continuation in mu.
// Throws BadParams, NoConvergence.
HedgehogProfile solve_profile(double lambda, double mu, int nr = 2049);

// Unit hedgehog sqrt(3/2)(n⊗n - I/3), n = x/|x|; zero at the origin.
QTensor unit_hedgehog(const Vec3& x);

// Samples the profile on a unit-ball grid; Boundary and Exterior nodes carry
// the radial anchoring. Throws DomainMismatch for other domains.
TensorField assemble_field(const HedgehogProfile& profile, std::shared_ptr<const Grid> grid);

// Radial function with piecewise-smooth pieces between breakpoints. It vanishes
// outside [breakpoints.front(), breakpoints.back()].
struct RadialProfile {
    std::function<double(double)> value;
    std::function<double(double)> derivative;
    std::vector<double> breakpoints;

    double operator()(double r) const;
    double slope(double r) const;
    double support_begin() const { return breakpoints.front(); }
    double support_end() const { return breakpoints.back(); }
};

// eta_n(r) = [min(n r, r^{-1/2}) - 2]_+ ; identically zero for n <= 8.
RadialProfile eta_family(int n);

// sin^2(pi log(r/a)/log(b/a)) / sqrt(r) on [a, b], continuously differentiable.
RadialProfile log_hardy_bump(double a, double b);

// r -> xi(r / delta).
RadialProfile rescaled(const RadialProfile& xi, double delta);

// (16 pi/5) int_0^1 (eta'^2 r^2 - 3 eta^2) dr by composite Gauss-Legendre
// quadrature on the smooth pieces. Throws SingularIntegrand when eta(0) != 0.
double second_var_radial(const RadialProfile& eta);

// Gram matrix of r -> H̄(x):e_i over the unit sphere (expected 4pi/5 I).
std::array<std::array<double, 5>, 5> hedgehog_basis_gram(int n_theta = 32, int n_phi = 64);

// Phi = xi(|x|) vbar and its projection Phi_T = Phi - H̄(H̄:Phi) on a grid.
struct Perturbation {
    RadialProfile xi;
    QTensor direction;
    TensorField phi;
    TensorField phi_t;
};

// Throws NotUnit when |vbar| != 1.
Perturbation make_perturbation(const RadialProfile& xi, const QTensor& vbar, std::shared_ptr<const Grid> grid);

struct SecondVariation {
    double gradient = 0.0;   // int |grad Phi_T|^2 (discrete Dirichlet form)
    double potential = 0.0;  // lambda int D^2W(H) Phi_T:Phi_T
    double penalty = 0.0;    // mu int (|H|^2 - 1)|Phi_T|^2
    double total = 0.0;
};

// Second variation of F_{lambda,mu} at H along a tangent Phi_T, the exact second
// t-derivative of the discrete energy at H + t Phi_T.
// Throws NotTangent (|Phi_T:H| > 1e-9 at some node), GridMismatch.
SecondVariation second_var_F_terms(const TensorField& hedgehog, const TensorField& phi_t, double lambda, double mu);
double second_var_F(const TensorField& hedgehog, const TensorField& phi_t, double lambda, double mu);

// -int |grad H̄|^2 |Phi_T|^2 = -int 6/|x|^2 |Phi_T|^2, the large-mu limit of the penalty part.
double limit_penalty_term(const TensorField& phi_t);

// E''_lambda(Phi; H̄) = int |grad Phi_T|^2 - 6/|x|^2 |Phi_T|^2 + lambda D^2W(H̄) Phi_T:Phi_T.
double second_var_E(const TensorField& phi_t, double lambda);

struct SweepRow {
    double mu = 0.0;
    double delta = 0.0;
    SecondVariation f;
    double limit_term = 0.0;     // limit_penalty_term for this delta
    double e_lambda = 0.0;       // second_var_E for this delta
    double e0_grid = 0.0;        // second_var_E at lambda = 0
    double e0_radial = 0.0;      // second_var_radial of xi_delta
    double profile_residual = 0.0;
};

struct SweepReport {
    std::vector<SweepRow> rows;  // mu-major
    int first_negative = -1;     // row index, -1 when every entry is nonnegative
    double best_delta = 0.0;     // minimizer of F'' at the largest mu
    std::vector<double> best_delta_values;  // F'' at best_delta along the mu ladder
    bool decreasing_in_mu = false;
    // |mu int (|H|^2-1)|Phi_T|^2 - limit| / |limit| at the largest mu and best_delta.
    double limit_rel_error = 0.0;
};

// Default destabilizing profile of the sweep: log_hardy_bump(0.1, 0.95).
RadialProfile default_sweep_profile();

// F'' over mu x delta on a unit-ball grid with n nodes per axis, Phi = xi_delta vbar.
// Throws BadParams for empty or invalid ladders.
SweepReport instability_sweep(double lambda, const std::vector<double>& mu_ladder,
                              const std::vector<double>& delta_ladder, int n_grid,
                              const RadialProfile& xi = default_sweep_profile(),
                              const QTensor& vbar = QTensor::basis(0), int nr = 2049);

void write_profile_csv(std::ostream& out, const HedgehogProfile& profile);
void write_sweep_csv(std::ostream& out, const SweepReport& report);

}  // namespace ldg
