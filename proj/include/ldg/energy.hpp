#pragma once

#include <iosfwd>
#include <vector>

#include "ldg/domain.hpp"
#include "ldg/kernels.hpp"

namespace ldg {

// Unit-norm tolerance accepted by the constrained energy.
inline constexpr double kUnitNormTol = 1e-6;

// E_lambda = int 1/2 |grad Q|^2 + lambda W(Q). Throws NotOnSphere.
EnergyBreakdown energy_constrained(const TensorField& field, double lambda);

// F_{lambda,mu} = E_lambda + mu/4 int (1 - |Q|^2)^2.
EnergyBreakdown energy_unconstrained(const TensorField& field, double lambda, double mu);

// GL_eps(Q_ref; Q) = E_lambda + 1/(4 eps^2) int (1-|Q|^2)^2 + 1/2 int |Q - Q_ref|^2.
EnergyBreakdown energy_gl(const TensorField& field, const TensorField& anchor, double lambda, double epsilon);

struct Residual {
    std::vector<QTensor> values;  // ordered like grid.interior
    double l2 = 0.0;              // (sum w |r|^2)^(1/2)
    double l2_normalized = 0.0;   // l2 / sqrt(|Omega|)
};

// Minus the energy gradient divided by h^3, projected on the sphere tangent.
// Approximates Delta Q + |grad Q|^2 Q - lambda grad_tan W(Q). Throws NotOnSphere.
Residual residual_constrained(const TensorField& field, double lambda);

// Minus the gradient of the discrete F_{lambda,mu} divided by h^3.
Residual residual_unconstrained(const TensorField& field, double lambda, double mu);

// Assembles a Residual from a raw gradient (ordered like grid.interior).
Residual residual_from_gradient(const Grid& grid, const std::vector<QTensor>& gradient);

struct MonotonicityRow {
    double r = 0.0;
    double ball_energy = 0.0;     // E_lambda(B_r)
    double scaled_energy = 0.0;   // E_lambda(B_r) / r
    // Over the annulus between the previous radius and r (0 on the first row):
    double annulus_radial_term = 0.0;  // int |x-x0|^-1 |dQ/d rho|^2
    double potential_term = 0.0;       // 2 lambda int_{r_prev}^{r} t^-2 int_{B_t} W dt
};

// Scaled ball energies around x0 for increasing radii. Cells are integrated
// through the normalized trilinear interpolant of the node values, so the
// field must have unit norm near the ball. Throws BallEscapesDomain, NotOnSphere.
std::vector<MonotonicityRow> monotonicity_scan(const TensorField& field, double lambda, const Vec3& x0,
                                               const std::vector<double>& radii);

void write_monotonicity_csv(std::ostream& out, const std::vector<MonotonicityRow>& rows);

}  // namespace ldg
