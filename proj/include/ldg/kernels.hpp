#pragma once

// Stencil kernels for the discrete energies. Two implementations share one
// contract: `serial` is the plain reference loop kept for testing, `parallel`
// is the OpenMP version used by the solvers. Parallel reductions accumulate
// fixed-size blocks and add the block sums in order, so results do not depend
// on the thread count.

#include <span>
#include <vector>

#include "ldg/domain.hpp"

namespace ldg {

struct EnergyBreakdown {
    double dirichlet = 0.0;
    double potential = 0.0;
    double penalty = 0.0;
    double gl_anchor = 0.0;
    double total = 0.0;
};

// Discrete objective
//   sum_edges theta h/2 |dQ|^2 + sum_nodes w [lambda W + mu/4 (1-|Q|^2)^2 + kappa/2 |Q - Q_ref|^2].
struct Objective {
    double lambda = 0.0;
    double mu = 0.0;
    double anchor_weight = 0.0;
    const std::vector<QTensor>* anchor = nullptr;
};

namespace kernels {

inline constexpr std::size_t kBlock = 2048;

namespace serial {
EnergyBreakdown energy(const Grid& grid, std::span<const QTensor> q, const Objective& obj);
// Gradient with respect to each interior node, ordered like grid.interior.
void gradient(const Grid& grid, std::span<const QTensor> q, const Objective& obj, std::span<QTensor> out);
double energy_delta(const Grid& grid, std::span<const QTensor> q_old, std::span<const QTensor> q_new,
                    const Objective& obj);
}  // namespace serial

namespace parallel {
EnergyBreakdown energy(const Grid& grid, std::span<const QTensor> q, const Objective& obj);
void gradient(const Grid& grid, std::span<const QTensor> q, const Objective& obj, std::span<QTensor> out);
double energy_delta(const Grid& grid, std::span<const QTensor> q_old, std::span<const QTensor> q_new,
                    const Objective& obj);
}  // namespace parallel

}  // namespace kernels

// Worker count used by the parallel kernels; honours LDG_THREADS.
int configure_threads();

}  // namespace ldg
