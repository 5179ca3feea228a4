#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "ldg/minimize.hpp"

namespace ldg::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { kOk = 0, kConfigInvalid = 1, kSolverFailure = 2, kAnalysisFailure = 3 };

// section -> key -> raw value
using Sections = std::map<std::string, std::map<std::string, std::string>>;

// Sectioned key = value text. '#' and ';' start comment lines. Keys outside a
// section, duplicate keys and malformed lines throw ConfigInvalid.
Sections parse_sections(std::string_view text);

struct RunConfig {
    DomainSpec domain{1.0, {}};
    int n = 32;
    EnergyParams params;
    std::vector<double> mu_ladder;  // penalized stages; empty for the constrained solver
    bool constrained = true;
    std::string bc_type = "hedgehog";  // hedgehog | uniaxial-file
    std::string bc_file;
    SolveOptions solve;
    std::vector<double> levels;
    double region_t1 = -0.8, region_t2 = 0.8;
    std::vector<Vec3> mono_points;
    std::vector<double> mono_radii;  // default radius * {1/32, 1/16, 1/8, 1/4}
    std::string output_dir = "ldg-out";
    Sections echo;
};

// Throws ConfigInvalid on unknown sections or keys, unparsable values, and
// parameter sets that are missing, mixed or inconsistent.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);

// Comma-separated numbers.
std::vector<double> parse_list(std::string_view text);
// Semicolon-separated groups of comma-separated numbers, each of the given size.
std::vector<std::vector<double>> parse_groups(std::string_view text, std::size_t size);

// JSON text with every floating-point value printed to 17 significant digits.
// Non-finite values become null.
std::string dump_json(const nlohmann::json& j, int indent = 2);

// {version, config_echo, energy, min_norm, topology, timings}
nlohmann::json make_summary(nlohmann::json config_echo, nlohmann::json energy, nlohmann::json min_norm,
                            nlohmann::json topology, nlohmann::json timings);

// Subcommands. Each writes its artifacts under `out` and returns an ExitCode;
// diagnostics go to `log`.
int run_minimize(const RunConfig& config, std::ostream& log);

struct TopologyArgs {
    std::string field;
    std::vector<double> levels;
    double t1 = -0.8, t2 = 0.8;
    std::optional<double> lambda;  // adds E_lambda of the normalized field
    std::string out = "ldg-topology";
};
int run_topology(const TopologyArgs& args, std::ostream& log);

struct HedgehogArgs {
    double lambda = 1.0;
    double mu = 200.0;
    int nr = 2049;
    int n = 0;  // > 0 also samples the field on a unit-ball grid
    std::string out = "ldg-hedgehog";
};
int run_hedgehog(const HedgehogArgs& args, std::ostream& log);

struct StabilityArgs {
    double lambda = 1.0;
    std::vector<double> mu_ladder{50.0, 200.0, 800.0, 3200.0};
    std::vector<double> delta_ladder{1.0, 0.5, 0.25, 0.1};
    int n = 64;
    std::string out = "ldg-stability";
};
int run_stability(const StabilityArgs& args, std::ostream& log);

struct MonotonicityArgs {
    std::string field;
    double lambda = 1.0;
    std::vector<Vec3> points;
    std::vector<double> radii{0.0625, 0.125, 0.25, 0.5};
    std::string out = "ldg-monotonicity";
};
int run_monotonicity(const MonotonicityArgs& args, std::ostream& log);

// Built-in invariant checks, one PASS/FAIL line each. Returns kOk or kAnalysisFailure.
int run_selftest(std::ostream& log);

}  // namespace ldg::cli
