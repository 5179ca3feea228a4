#include <iostream>

#include "CLI11.hpp"
#include "ldg/cli.hpp"
#include "ldg/error.hpp"

using namespace ldg;

namespace {

// CLI11 validators for list-valued options, reusing the config parsers.
std::vector<double> list_arg(const std::string& s) { return cli::parse_list(s); }

std::vector<Vec3> points_arg(const std::string& s) {
    std::vector<Vec3> out;
    for (const auto& g : cli::parse_groups(s, 3)) out.push_back({g[0], g[1], g[2]});
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Landau-de Gennes Q-tensor solver and analyzer"};
    app.set_version_flag("--version", cli::kVersion);
    app.require_subcommand(1);

    std::string config_path, out_override;
    auto* minimize = app.add_subcommand("minimize", "solve from a config file, then analyze and export");
    minimize->add_option("-c,--config", config_path, "sectioned key = value config file")->required();
    minimize->add_option("-o,--out", out_override, "output directory (overrides [output] dir)");

    cli::HedgehogArgs hh;
    auto* hedgehog = app.add_subcommand("hedgehog", "radial hedgehog profile and optional grid sample");
    hedgehog->add_option("--lambda", hh.lambda)->capture_default_str();
    hedgehog->add_option("--mu", hh.mu)->capture_default_str();
    hedgehog->add_option("--nr", hh.nr, "radial samples")->capture_default_str();
    hedgehog->add_option("--n", hh.n, "grid nodes per axis, 0 for none")->capture_default_str();
    hedgehog->add_option("-o,--out", hh.out)->capture_default_str();

    cli::TopologyArgs top;
    std::string top_levels = "-0.9,0,0.9", top_region = "-0.8,0.8";
    double top_lambda = 0.0;
    auto* topology = app.add_subcommand("topology", "level sets, degree and region report of a saved field");
    topology->add_option("--field", top.field, "field file written by this tool")->required();
    topology->add_option("--levels", top_levels, "comma-separated biaxiality levels")->capture_default_str();
    topology->add_option("--region", top_region, "t1,t2 for the region report")->capture_default_str();
    auto* top_lambda_opt = topology->add_option("--lambda", top_lambda, "also report E_lambda");
    topology->add_option("-o,--out", top.out)->capture_default_str();

    cli::StabilityArgs st;
    std::string st_mu = "50,200,800,3200", st_delta = "1,0.5,0.25,0.1";
    auto* stability = app.add_subcommand("stability", "second-variation sweep about the hedgehog");
    stability->add_option("--lambda", st.lambda)->capture_default_str();
    stability->add_option("--mu-ladder", st_mu)->capture_default_str();
    stability->add_option("--delta-ladder", st_delta)->capture_default_str();
    stability->add_option("--n", st.n, "grid nodes per axis")->capture_default_str();
    stability->add_option("-o,--out", st.out)->capture_default_str();

    cli::MonotonicityArgs mono;
    std::string mono_points, mono_radii = "0.0625,0.125,0.25,0.5";
    auto* monotonicity = app.add_subcommand("monotonicity", "scaled ball energies of a saved field");
    monotonicity->add_option("--field", mono.field)->required();
    monotonicity->add_option("--lambda", mono.lambda)->capture_default_str();
    monotonicity->add_option("--points", mono_points, "x,y,z;x,y,z;...")->required();
    monotonicity->add_option("--radii", mono_radii)->capture_default_str();
    monotonicity->add_option("-o,--out", mono.out)->capture_default_str();

    auto* selftest = app.add_subcommand("selftest", "built-in invariant checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : cli::kConfigInvalid;
    }

    try {
        if (*minimize) {
            cli::RunConfig config = cli::load_config(config_path);
            if (!out_override.empty()) config.output_dir = out_override;
            return cli::run_minimize(config, std::cerr);
        }
        if (*hedgehog) return cli::run_hedgehog(hh, std::cerr);
        if (*topology) {
            top.levels = list_arg(top_levels);
            const auto region = list_arg(top_region);
            if (region.size() != 2) throw Error(ErrorKind::ConfigInvalid, "--region takes t1,t2");
            top.t1 = region[0];
            top.t2 = region[1];
            if (*top_lambda_opt) top.lambda = top_lambda;
            return cli::run_topology(top, std::cerr);
        }
        if (*stability) {
            st.mu_ladder = list_arg(st_mu);
            st.delta_ladder = list_arg(st_delta);
            return cli::run_stability(st, std::cerr);
        }
        if (*monotonicity) {
            mono.points = points_arg(mono_points);
            mono.radii = list_arg(mono_radii);
            return cli::run_monotonicity(mono, std::cerr);
        }
        if (*selftest) return cli::run_selftest(std::cout);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return cli::kConfigInvalid;
    }
    return cli::kConfigInvalid;
}
