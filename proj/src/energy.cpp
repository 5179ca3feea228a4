#include "ldg/energy.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <string>

#include "ldg/pointwise.hpp"

namespace ldg {

namespace {

void require_unit(const TensorField& field) {
    const Grid& g = *field.grid;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!g.in_domain(i)) continue;
        if (std::abs(norm(field[i]) - 1.0) > kUnitNormTol)
            throw Error(ErrorKind::NotOnSphere, "node " + std::to_string(i) + " is off the unit sphere");
    }
}

std::vector<QTensor> raw_gradient(const TensorField& field, const Objective& obj) {
    std::vector<QTensor> g(field.grid->interior.size());
    kernels::parallel::gradient(*field.grid, field.values, obj, g);
    return g;
}

double dist(const Vec3& a, const Vec3& b) {
    const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

}  // namespace

EnergyBreakdown energy_constrained(const TensorField& field, double lambda) {
    require_unit(field);
    return kernels::parallel::energy(*field.grid, field.values, Objective{lambda, 0.0, 0.0, nullptr});
}

EnergyBreakdown energy_unconstrained(const TensorField& field, double lambda, double mu) {
    return kernels::parallel::energy(*field.grid, field.values, Objective{lambda, mu, 0.0, nullptr});
}

EnergyBreakdown energy_gl(const TensorField& field, const TensorField& anchor, double lambda, double epsilon) {
    require_same_grid(field, anchor);
    if (!(epsilon > 0.0)) throw Error(ErrorKind::BadParams, "epsilon must be positive");
    const Objective obj{lambda, 1.0 / (epsilon * epsilon), 1.0, &anchor.values};
    return kernels::parallel::energy(*field.grid, field.values, obj);
}

Residual residual_from_gradient(const Grid& grid, const std::vector<QTensor>& gradient) {
    Residual r;
    r.values.resize(gradient.size());
    const double inv = -1.0 / (grid.h * grid.h * grid.h);
    double acc = 0.0;
    for (std::size_t s = 0; s < gradient.size(); ++s) {
        r.values[s] = inv * gradient[s];
        acc += grid.weight[grid.interior[s]] * norm2(r.values[s]);
    }
    r.l2 = std::sqrt(acc);
    r.l2_normalized = r.l2 / std::sqrt(grid.volume());
    return r;
}

Residual residual_constrained(const TensorField& field, double lambda) {
    require_unit(field);
    const Grid& g = *field.grid;
    std::vector<QTensor> grad = raw_gradient(field, Objective{lambda, 0.0, 0.0, nullptr});
    for (std::size_t s = 0; s < grad.size(); ++s) {
        const QTensor& q = field[g.interior[s]];
        grad[s] -= dot(grad[s], q) * q;
    }
    return residual_from_gradient(g, grad);
}

Residual residual_unconstrained(const TensorField& field, double lambda, double mu) {
    return residual_from_gradient(*field.grid, raw_gradient(field, Objective{lambda, mu, 0.0, nullptr}));
}

namespace {

// Per-radius accumulators of one cell slab.
struct ScanSums {
    std::vector<double> ball, annulus, potential;
    explicit ScanSums(std::size_t k) : ball(k, 0.0), annulus(k, 0.0), potential(k, 0.0) {}
};

constexpr int kScanSamples = 4;

}  // namespace

std::vector<MonotonicityRow> monotonicity_scan(const TensorField& field, double lambda, const Vec3& x0,
                                               const std::vector<double>& radii) {
    const Grid& g = *field.grid;
    if (radii.empty()) return {};
    for (std::size_t k = 0; k < radii.size(); ++k) {
        if (!(radii[k] > 0.0) || (k > 0 && radii[k] <= radii[k - 1]))
            throw Error(ErrorKind::BadParams, "radii must be positive and increasing");
    }
    const double r_max = radii.back();
    if (g.sdf(x0) + r_max > 1e-12)
        throw Error(ErrorKind::BallEscapesDomain, "ball of radius " + std::to_string(r_max) + " leaves the domain");

    // Cells are integrated with the normalized trilinear interpolant of the
    // node values, sampled at m^3 interior points.
    const double h = g.h;
    const double reach = 0.5 * std::sqrt(3.0) * h;
    std::array<int, 3> lo{}, hi{};
    for (int a = 0; a < 3; ++a) {
        lo[a] = std::max(0, static_cast<int>(std::floor((x0[a] - r_max - g.origin[a]) / h)) - 1);
        hi[a] = std::min(g.n - 2, static_cast<int>(std::floor((x0[a] + r_max - g.origin[a]) / h)) + 1);
    }
    for (int k = lo[2]; k <= hi[2] + 1; ++k)
        for (int j = lo[1]; j <= hi[1] + 1; ++j)
            for (int i = lo[0]; i <= hi[0] + 1; ++i) {
                const std::size_t idx = g.index(i, j, k);
                if (dist(g.position(i, j, k), x0) > r_max + 2.0 * reach) continue;
                if (std::abs(norm(field[idx]) - 1.0) > kUnitNormTol)
                    throw Error(ErrorKind::NotOnSphere, "scan needs a unit-norm field near the ball");
            }

    const std::size_t nr = radii.size();
    const int m = kScanSamples;
    const double dv = std::pow(h / m, 3);
    const int slabs = hi[2] - lo[2] + 1;
    std::vector<ScanSums> partial(static_cast<std::size_t>(slabs), ScanSums(nr));

#pragma omp parallel for schedule(dynamic)
    for (int sk = 0; sk < slabs; ++sk) {
        ScanSums& acc = partial[static_cast<std::size_t>(sk)];
        const int k = lo[2] + sk;
        for (int j = lo[1]; j <= hi[1]; ++j)
            for (int i = lo[0]; i <= hi[0]; ++i) {
                const Vec3 base = g.position(i, j, k);
                const Vec3 centre{base[0] + 0.5 * h, base[1] + 0.5 * h, base[2] + 0.5 * h};
                if (dist(centre, x0) - reach >= r_max) continue;
                std::array<QTensor, 8> c;
                for (int corner = 0; corner < 8; ++corner)
                    c[static_cast<std::size_t>(corner)] =
                        field[g.index(i + (corner & 1), j + ((corner >> 1) & 1), k + ((corner >> 2) & 1))];
                for (int a = 0; a < m; ++a)
                    for (int b = 0; b < m; ++b)
                        for (int d = 0; d < m; ++d) {
                            const double u = (a + 0.5) / m, v = (b + 0.5) / m, w = (d + 0.5) / m;
                            const Vec3 y{base[0] + u * h, base[1] + v * h, base[2] + w * h};
                            const double rho = dist(y, x0);
                            if (rho >= r_max) continue;
                            QTensor p, du, dvv, dw;
                            for (int corner = 0; corner < 8; ++corner) {
                                const double fu = (corner & 1) ? u : 1.0 - u;
                                const double fv = ((corner >> 1) & 1) ? v : 1.0 - v;
                                const double fw = ((corner >> 2) & 1) ? w : 1.0 - w;
                                const double su = (corner & 1) ? 1.0 : -1.0;
                                const double sv = ((corner >> 1) & 1) ? 1.0 : -1.0;
                                const double sw = ((corner >> 2) & 1) ? 1.0 : -1.0;
                                const QTensor& q = c[static_cast<std::size_t>(corner)];
                                p += (fu * fv * fw) * q;
                                du += (su * fv * fw / h) * q;
                                dvv += (fu * sv * fw / h) * q;
                                dw += (fu * fv * sw / h) * q;
                            }
                            const double np = norm(p);
                            if (np < 1e-12) continue;
                            const QTensor n = (1.0 / np) * p;
                            // Derivatives of p/|p|.
                            std::array<QTensor, 3> grad{du, dvv, dw};
                            double grad2 = 0.0;
                            for (QTensor& gq : grad) {
                                gq = (1.0 / np) * (gq - dot(n, gq) * n);
                                grad2 += norm2(gq);
                            }
                            const double wv = pointwise::w(n);
                            double radial = 0.0;
                            if (rho > 0.0) {
                                QTensor dr;
                                for (int ax = 0; ax < 3; ++ax) dr += ((y[ax] - x0[ax]) / rho) * grad[ax];
                                radial = norm2(dr) / rho;
                            }
                            for (std::size_t kr = 0; kr < nr; ++kr) {
                                const double r = radii[kr];
                                if (rho >= r) continue;
                                acc.ball[kr] += dv * (0.5 * grad2 + lambda * wv);
                                if (kr > 0) {
                                    const double rp = radii[kr - 1];
                                    if (rho >= rp) acc.annulus[kr] += dv * radial;
                                    acc.potential[kr] += dv * wv * (1.0 / std::max(rho, rp) - 1.0 / r);
                                }
                            }
                        }
            }
    }

    std::vector<MonotonicityRow> rows(nr);
    for (std::size_t kr = 0; kr < nr; ++kr) {
        MonotonicityRow& row = rows[kr];
        row.r = radii[kr];
        for (const ScanSums& s : partial) {
            row.ball_energy += s.ball[kr];
            row.annulus_radial_term += s.annulus[kr];
            row.potential_term += s.potential[kr];
        }
        row.potential_term *= 2.0 * lambda;
        row.scaled_energy = row.ball_energy / row.r;
    }
    return rows;
}

void write_monotonicity_csv(std::ostream& out, const std::vector<MonotonicityRow>& rows) {
    const auto old = out.precision(17);
    out << "r,scaled_energy,annulus_radial_term,potential_term\n";
    for (const MonotonicityRow& row : rows)
        out << row.r << ',' << row.scaled_energy << ',' << row.annulus_radial_term << ',' << row.potential_term
            << '\n';
    out.precision(old);
}

}  // namespace ldg
