#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>

#include "ldg/cli.hpp"
#include "ldg/energy.hpp"
#include "ldg/error.hpp"
#include "ldg/hedgehog.hpp"
#include "ldg/io.hpp"
#include "ldg/kernels.hpp"
#include "ldg/topology.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace ldg::cli {

namespace {

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

// Exclusive use of an output directory for the lifetime of a run.
class OutputDir {
public:
    explicit OutputDir(const std::string& path) : dir_(path) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec) throw Error(ErrorKind::ConfigInvalid, "cannot create output directory " + path + ": " + ec.message());
        lock_ = dir_ / ".ldg.lock";
        std::FILE* f = std::fopen(lock_.c_str(), "wx");
        if (!f) throw Error(ErrorKind::ConfigInvalid, "output directory is locked by another run: " + path);
        std::fclose(f);
    }
    ~OutputDir() {
        std::error_code ec;
        fs::remove(lock_, ec);
    }
    OutputDir(const OutputDir&) = delete;
    OutputDir& operator=(const OutputDir&) = delete;

    std::string file(const std::string& name) const { return (dir_ / name).string(); }

    std::ofstream open(const std::string& name) const {
        std::ofstream out(file(name));
        if (!out) throw Error(ErrorKind::IoError, "cannot write " + file(name));
        out.precision(17);
        return out;
    }
    void write_json(const std::string& name, const json& j) const {
        auto out = open(name);
        out << dump_json(j) << '\n';
        if (!out) throw Error(ErrorKind::IoError, "write failed: " + file(name));
    }

private:
    fs::path dir_;
    fs::path lock_;
};

json energy_json(const EnergyBreakdown& e) {
    return {{"dirichlet", e.dirichlet}, {"potential", e.potential}, {"penalty", e.penalty}, {"total", e.total}};
}

json vec_json(const Vec3& v) { return json::array({v[0], v[1], v[2]}); }

json stage_json(const SolveReport& r, std::optional<double> mu, double h) {
    json j = energy_json(r.energy);
    j["mu"] = mu ? json(*mu) : json(nullptr);
    j["iterations"] = r.iterations;
    j["converged"] = r.converged;
    j["residual"] = r.residual;
    j["min_norm"] = r.min_norm;
    j["max_norm"] = r.max_norm;
    j["max_norm_bound"] = 1.0 + 5.0 * h * h;
    j["penalty_integral"] = r.penalty_integral;
    j["mu_penalty"] = mu ? json(*mu * r.penalty_integral) : json(nullptr);
    j["wall_seconds"] = r.wall_seconds;
    json trace = json::array();
    for (const auto& [it, obj] : r.trace) trace.push_back({it, obj});
    j["trace"] = std::move(trace);
    return j;
}

double min_norm(const TensorField& f) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < f.grid->size(); ++i)
        if (f.grid->in_domain(i)) m = std::min(m, norm(f[i]));
    return m;
}

std::vector<double> norm_array(const TensorField& f) {
    std::vector<double> out(f.grid->size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = norm(f[i]);
    return out;
}

bool is_unit(const TensorField& f) {
    for (std::size_t i = 0; i < f.grid->size(); ++i)
        if (f.grid->in_domain(i) && std::abs(norm(f[i]) - 1.0) > kUnitNormTol) return false;
    return true;
}

// Level-set meshes, boundary degree, region and attainment reports for one field.
json analyze_topology(const TensorField& field, const std::vector<double>& levels, double t1, double t2,
                      const OutputDir& dir, std::ostream& log) {
    const BiaxField biax = biaxiality_field(field);
    json top;
    std::size_t masked = 0;
    for (auto m : biax.masked) masked += m;
    top["biaxiality"] = {{"beta_bar", biax.beta_bar}, {"beta_0", biax.beta_0}, {"masked_nodes", masked}};

    json lv = json::array();
    for (std::size_t k = 0; k < levels.size(); ++k) {
        const double t = levels[k];
        json e{{"t", t}};
        try {
            const LevelSetMesh mesh = extract_level_set(biax, t);
            const std::string stem = "level_" + std::to_string(k);
            {
                auto out = dir.open(stem + ".obj");
                write_obj(out, mesh);
            }
            {
                auto out = dir.open(stem + "_components.csv");
                write_components_csv(out, mesh);
            }
            json comps = json::array();
            for (const MeshComponent& c : mesh.components)
                comps.push_back({{"euler", c.euler},
                                 {"closed", c.closed},
                                 {"genus", c.genus ? json(*c.genus) : json(nullptr)},
                                 {"area", c.area},
                                 {"vertices", c.vertices},
                                 {"faces", c.faces}});
            e["empty"] = false;
            e["mesh"] = stem + ".obj";
            e["components"] = std::move(comps);
            e["max_genus"] = mesh.max_genus();
        } catch (const Error& err) {
            if (err.kind() != ErrorKind::EmptyLevelSet) throw;
            e["empty"] = true;
            e["mesh"] = nullptr;
            e["components"] = json::array();
            e["max_genus"] = -1;
        }
        const auto sens = level_sensitivity(biax, t);
        e["sensitivity"] = {{"minus", sens[0]}, {"at", sens[1]}, {"plus", sens[2]}};
        lv.push_back(std::move(e));
    }
    top["levels"] = std::move(lv);

    std::optional<int> total_degree;
    json deg;
    try {
        const LevelSetMesh bm = boundary_mesh(*field.grid);
        const Lifting lift = lift_eigenvector(field, bm);
        const DegreeResult d = degree(lift.director, bm);
        json per = json::array();
        for (std::size_t c = 0; c < bm.components.size(); ++c)
            per.push_back(degree(lift.director, bm, static_cast<int>(c)).degree);
        total_degree = d.degree;
        deg = {{"degree", d.degree},
               {"raw", d.raw},
               {"residual", d.residual},
               {"per_component", std::move(per)},
               {"excluded_vertices", lift.excluded.size()},
               {"min_edge_dot", lift.min_edge_dot}};
    } catch (const Error& err) {
        log << "boundary degree unavailable: " << err.what() << '\n';
        deg = {{"degree", nullptr}, {"error", err.what()}};
    }
    top["boundary_degree"] = std::move(deg);

    const RegionReport region = region_report(biax, t1, t2);
    const AttainmentReport att = attainment_check(biax, total_degree);
    json rj = json::parse(region_report_json(region, att));
    rj["low_nodes"] = region.low_nodes;
    rj["high_nodes"] = region.high_nodes;
    rj["middle_nodes"] = region.middle_nodes;
    rj["masked_nodes"] = region.masked_nodes;
    rj["low_components"] = region.low_components;
    rj["high_components"] = region.high_components;
    rj["note"] = region.note;
    dir.write_json("region.json", rj);
    top["region"] = std::move(rj);
    return top;
}

struct MonotonicityStats {
    double worst_step = 0.0;      // min_k (s_k - s_{k-1}) / s_k
    double worst_identity = 0.0;  // min_k (s_k - s_{k-1} - annulus - potential) / s_k
};

MonotonicityStats monotonicity_stats(const std::vector<MonotonicityRow>& rows) {
    MonotonicityStats s;
    for (std::size_t k = 1; k < rows.size(); ++k) {
        const double sk = rows[k].scaled_energy, ds = sk - rows[k - 1].scaled_energy;
        if (!(sk > 0.0)) continue;
        s.worst_step = std::min(s.worst_step, ds / sk);
        s.worst_identity =
            std::min(s.worst_identity, (ds - rows[k].annulus_radial_term - rows[k].potential_term) / sk);
    }
    return s;
}

json run_monotonicity_points(const TensorField& unit_field, double lambda, const std::vector<Vec3>& points,
                             const std::vector<double>& radii, const OutputDir& dir) {
    json all = json::array();
    for (std::size_t k = 0; k < points.size(); ++k) {
        const auto rows = monotonicity_scan(unit_field, lambda, points[k], radii);
        const std::string name = "monotonicity_" + std::to_string(k) + ".csv";
        {
            auto out = dir.open(name);
            write_monotonicity_csv(out, rows);
        }
        const MonotonicityStats st = monotonicity_stats(rows);
        json scaled = json::array();
        for (const auto& r : rows) scaled.push_back(r.scaled_energy);
        all.push_back({{"x0", vec_json(points[k])},
                       {"csv", name},
                       {"radii", radii},
                       {"scaled_energy", std::move(scaled)},
                       {"worst_relative_step", st.worst_step},
                       {"worst_relative_identity_gap", st.worst_identity}});
    }
    return all;
}

std::vector<double> beta_array(const TensorField& f) { return biaxiality_field(f).beta; }

TensorField make_boundary(const RunConfig& c, const std::shared_ptr<const Grid>& grid) {
    if (c.bc_type == "hedgehog") return field_with_boundary(grid, boundary_hedgehog(*grid));
    TensorField file;
    try {
        file = read_field_vtk(c.bc_file, grid);
    } catch (const Error& e) {
        throw Error(ErrorKind::ConfigInvalid, std::string("[bc] file: ") + e.what());
    }
    std::vector<QTensor> bc(grid->size());
    for (std::size_t i = 0; i < grid->size(); ++i) {
        if (grid->kind[i] == NodeKind::Interior) continue;
        bc[i] = file[i];
        if (grid->kind[i] != NodeKind::Boundary) continue;
        if (std::abs(norm(bc[i]) - 1.0) > kUnitNormTol || biaxiality(bc[i]) < 1.0 - 1e-6)
            throw Error(ErrorKind::ConfigInvalid, "[bc] file: boundary values must be unit positive uniaxial");
    }
    return field_with_boundary(grid, bc);
}

int fail(std::ostream& log, int code, const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return code;
}

json args_echo(std::initializer_list<std::pair<const std::string, json>> kv) { return json(std::map(kv)); }

}  // namespace

int run_minimize(const RunConfig& c, std::ostream& log) {
    const Stopwatch total;
    configure_threads();

    std::shared_ptr<const Grid> grid;
    TensorField boundary;
    std::optional<OutputDir> dir;
    try {
        validate(c.params);
        grid = build_grid(c.domain, c.n);
        boundary = make_boundary(c, grid);
        dir.emplace(c.output_dir);
    } catch (const std::exception& e) {
        return fail(log, kConfigInvalid, e);
    }

    const double setup_seconds = total.seconds();
    const double lambda = c.params.lambda;
    TensorField result;
    json energy;
    const Stopwatch solve_clock;
    try {
        SolveOptions opts = c.solve;
        if (opts.progress_every > 0)
            opts.progress = [&log](int it, double obj, double res) {
                log << "iter " << it << " objective " << obj << " residual " << res << '\n';
            };
        const TensorField start = initial_field(boundary, c.solve.noise_amplitude, c.solve.seed);
        json stages = json::array();
        if (c.constrained) {
            auto [field, report] = minimize_constrained(start, lambda, opts);
            dir->write_json("stage_0.json", stage_json(report, std::nullopt, grid->h));
            stages.push_back(stage_json(report, std::nullopt, grid->h));
            energy = energy_json(report.energy);
            energy["functional"] = "E_lambda";
            energy["mu"] = nullptr;
            energy["iterations"] = report.iterations;
            energy["converged"] = report.converged;
            energy["residual"] = report.residual;
            result = std::move(field);
        } else {
            const auto runs = mu_continuation(start, lambda, c.mu_ladder, opts);
            int iterations = 0;
            for (std::size_t k = 0; k < runs.size(); ++k) {
                const json sj = stage_json(runs[k].report, runs[k].mu, grid->h);
                dir->write_json("stage_" + std::to_string(k) + ".json", sj);
                write_field_vtk(dir->file("field_stage_" + std::to_string(k) + ".vtk"), runs[k].field);
                stages.push_back(sj);
                iterations += runs[k].report.iterations;
            }
            const SolveReport& last = runs.back().report;
            energy = energy_json(last.energy);
            energy["functional"] = "F_lambda_mu";
            energy["mu"] = runs.back().mu;
            energy["iterations"] = iterations;
            energy["converged"] = last.converged;
            energy["residual"] = last.residual;
            result = runs.back().field;
            try {
                energy["e_lambda_normalized"] = energy_constrained(normalized(result), lambda).total;
            } catch (const Error&) {
                energy["e_lambda_normalized"] = nullptr;
            }
        }
        energy["lambda"] = lambda;
        for (json& s : stages) s.erase("trace");
        energy["stages"] = std::move(stages);
    } catch (const std::exception& e) {
        return fail(log, kSolverFailure, e);
    }
    const double solve_seconds = solve_clock.seconds();

    const Stopwatch analysis_clock;
    json topology = nullptr;
    try {
        write_field_vtk(dir->file("field.vtk"), result, {{"beta", beta_array(result)}, {"norm", norm_array(result)}});
        if (!c.levels.empty()) topology = analyze_topology(result, c.levels, c.region_t1, c.region_t2, *dir, log);
        if (!c.mono_points.empty()) {
            const TensorField unit = c.constrained ? result : normalized(result);
            dir->write_json("monotonicity.json",
                            {{"lambda", lambda},
                             {"points", run_monotonicity_points(unit, lambda, c.mono_points, c.mono_radii, *dir)}});
        }
        const json timings{{"setup", setup_seconds},
                           {"solve", solve_seconds},
                           {"analysis", analysis_clock.seconds()},
                           {"total", total.seconds()}};
        dir->write_json("summary.json", make_summary(json(c.echo), energy, min_norm(result), topology, timings));
    } catch (const std::exception& e) {
        return fail(log, kAnalysisFailure, e);
    }
    log << "energy " << energy["total"].get<double>() << " iterations " << energy["iterations"].get<int>()
        << (energy["converged"].get<bool>() ? " converged" : " not converged") << '\n';
    return kOk;
}

int run_topology(const TopologyArgs& a, std::ostream& log) {
    const Stopwatch total;
    configure_threads();
    TensorField field;
    std::optional<OutputDir> dir;
    try {
        for (double t : a.levels)
            if (!(t > -1.0 && t < 1.0)) throw Error(ErrorKind::ConfigInvalid, "levels must lie in (-1, 1)");
        if (!(a.t1 < a.t2)) throw Error(ErrorKind::ConfigInvalid, "region needs t1 < t2");
        if (a.lambda && !(*a.lambda > 0.0)) throw Error(ErrorKind::ConfigInvalid, "lambda must be positive");
        field = read_field_vtk(a.field);
        dir.emplace(a.out);
    } catch (const std::exception& e) {
        return fail(log, kConfigInvalid, e);
    }
    try {
        json energy = nullptr;
        if (a.lambda) {
            const bool unit = is_unit(field);
            energy = energy_json(energy_constrained(unit ? field : normalized(field), *a.lambda));
            energy["functional"] = "E_lambda";
            energy["lambda"] = *a.lambda;
            energy["normalized"] = !unit;
        }
        json topology = analyze_topology(field, a.levels, a.t1, a.t2, *dir, log);
        const json echo = args_echo({{"field", a.field},
                                     {"levels", a.levels},
                                     {"region", json::array({a.t1, a.t2})},
                                     {"lambda", a.lambda ? json(*a.lambda) : json(nullptr)},
                                     {"out", a.out}});
        dir->write_json("summary.json", make_summary(echo, energy, min_norm(field), topology,
                                                     {{"analysis", total.seconds()}, {"total", total.seconds()}}));
    } catch (const std::exception& e) {
        return fail(log, kAnalysisFailure, e);
    }
    return kOk;
}

int run_hedgehog(const HedgehogArgs& a, std::ostream& log) {
    const Stopwatch total;
    configure_threads();
    std::optional<OutputDir> dir;
    std::shared_ptr<const Grid> grid;
    try {
        validate(EnergyParams{a.lambda, a.mu});
        if (a.n > 0) grid = build_grid(DomainSpec{1.0, {}}, a.n);
        dir.emplace(a.out);
    } catch (const std::exception& e) {
        return fail(log, kConfigInvalid, e);
    }
    HedgehogProfile profile;
    const Stopwatch solve_clock;
    try {
        profile = solve_profile(a.lambda, a.mu, a.nr);
    } catch (const Error& e) {
        return fail(log, e.kind() == ErrorKind::BadParams ? kConfigInvalid : kSolverFailure, e);
    }
    const double solve_seconds = solve_clock.seconds();
    try {
        {
            auto out = dir->open("profile.csv");
            write_profile_csv(out, profile);
        }
        json energy = {{"profile_residual", profile.residual}, {"lambda", a.lambda}, {"mu", a.mu}};
        json mn = nullptr;
        if (grid) {
            const TensorField f = assemble_field(profile, grid);
            write_field_vtk(dir->file("hedgehog.vtk"), f, {{"beta", beta_array(f)}, {"norm", norm_array(f)}});
            const EnergyBreakdown e = energy_unconstrained(f, a.lambda, a.mu);
            energy.update(energy_json(e));
            energy["functional"] = "F_lambda_mu";
            mn = min_norm(f);
        }
        const json echo =
            args_echo({{"lambda", a.lambda}, {"mu", a.mu}, {"nr", a.nr}, {"n", a.n}, {"out", a.out}});
        dir->write_json("summary.json", make_summary(echo, energy, mn, nullptr,
                                                     {{"solve", solve_seconds}, {"total", total.seconds()}}));
    } catch (const std::exception& e) {
        return fail(log, kAnalysisFailure, e);
    }
    log << "profile residual " << profile.residual << '\n';
    return kOk;
}

int run_stability(const StabilityArgs& a, std::ostream& log) {
    const Stopwatch total;
    configure_threads();
    std::optional<OutputDir> dir;
    try {
        if (a.mu_ladder.empty() || a.delta_ladder.empty())
            throw Error(ErrorKind::ConfigInvalid, "mu and delta ladders must be nonempty");
        dir.emplace(a.out);
    } catch (const std::exception& e) {
        return fail(log, kConfigInvalid, e);
    }
    SweepReport rep;
    try {
        rep = instability_sweep(a.lambda, a.mu_ladder, a.delta_ladder, a.n);
    } catch (const Error& e) {
        const bool bad_input = e.kind() == ErrorKind::BadParams || e.kind() == ErrorKind::ResolutionTooCoarse;
        return fail(log, bad_input ? kConfigInvalid : e.kind() == ErrorKind::NoConvergence ? kSolverFailure
                                                                                           : kAnalysisFailure,
                    e);
    }
    try {
        {
            auto out = dir->open("sweep.csv");
            write_sweep_csv(out, rep);
        }
        json first = nullptr;
        if (rep.first_negative >= 0) {
            const SweepRow& r = rep.rows[static_cast<std::size_t>(rep.first_negative)];
            first = {{"mu", r.mu}, {"delta", r.delta}, {"value", r.f.total}};
        }
        dir->write_json("sweep.json", {{"first_negative", first},
                                       {"best_delta", rep.best_delta},
                                       {"best_delta_values", rep.best_delta_values},
                                       {"decreasing_in_mu", rep.decreasing_in_mu},
                                       {"limit_rel_error", rep.limit_rel_error}});
        const json echo = args_echo({{"lambda", a.lambda},
                                     {"mu_ladder", a.mu_ladder},
                                     {"delta_ladder", a.delta_ladder},
                                     {"n", a.n},
                                     {"out", a.out}});
        dir->write_json("summary.json", make_summary(echo, nullptr, nullptr, nullptr,
                                                     {{"analysis", total.seconds()}, {"total", total.seconds()}}));
    } catch (const std::exception& e) {
        return fail(log, kAnalysisFailure, e);
    }
    log << "first negative " << (rep.first_negative >= 0 ? "found" : "none") << ", decreasing in mu "
        << (rep.decreasing_in_mu ? "yes" : "no") << ", limit error " << rep.limit_rel_error << '\n';
    return kOk;
}

int run_monotonicity(const MonotonicityArgs& a, std::ostream& log) {
    const Stopwatch total;
    configure_threads();
    TensorField field;
    std::optional<OutputDir> dir;
    try {
        if (a.points.empty()) throw Error(ErrorKind::ConfigInvalid, "no points given");
        if (!(a.lambda >= 0.0)) throw Error(ErrorKind::ConfigInvalid, "lambda must be non-negative");
        field = read_field_vtk(a.field);
        dir.emplace(a.out);
    } catch (const std::exception& e) {
        return fail(log, kConfigInvalid, e);
    }
    try {
        const bool unit = is_unit(field);
        const TensorField u = unit ? field : normalized(field);
        json points;
        try {
            points = run_monotonicity_points(u, a.lambda, a.points, a.radii, *dir);
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::BallEscapesDomain || e.kind() == ErrorKind::BadParams)
                return fail(log, kConfigInvalid, e);
            throw;
        }
        dir->write_json("monotonicity.json", {{"lambda", a.lambda}, {"normalized", !unit}, {"points", points}});
        json energy = energy_json(energy_constrained(u, a.lambda));
        energy["functional"] = "E_lambda";
        energy["lambda"] = a.lambda;
        energy["normalized"] = !unit;
        json pts = json::array();
        for (const Vec3& p : a.points) pts.push_back(vec_json(p));
        const json echo = args_echo(
            {{"field", a.field}, {"lambda", a.lambda}, {"points", pts}, {"radii", a.radii}, {"out", a.out}});
        dir->write_json("summary.json", make_summary(echo, energy, min_norm(field), nullptr,
                                                     {{"analysis", total.seconds()}, {"total", total.seconds()}}));
    } catch (const std::exception& e) {
        return fail(log, kAnalysisFailure, e);
    }
    return kOk;
}

}  // namespace ldg::cli
