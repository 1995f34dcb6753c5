#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sflsim/errors.hpp"
#include "sflsim/experiments.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw sflsim::ConfigError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw sflsim::ConfigError("cannot write " + path.string());
    out << content;
}

sflsim::Config load_with_overrides(const std::string& path,
                                   const std::vector<std::string>& methods,
                                   const std::string& sweep, bool have_seed, long long seed,
                                   const std::string& out_dir) {
    sflsim::Config cfg = sflsim::Config::parse_file(path);
    if (!methods.empty()) {
        std::string joined;
        for (const auto& m : methods) {
            if (!joined.empty()) joined += ",";
            joined += m == "all" ? "proposed,ra,era,hfl,dda" : m;
        }
        cfg.set("experiment", "methods", joined);
    }
    if (!sweep.empty()) {
        const auto eq = sweep.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 >= sweep.size())
            throw sflsim::ConfigError("--sweep expects <parameter>=v1,v2,...");
        cfg.set("experiment", "sweep_parameter", sweep.substr(0, eq));
        cfg.set("experiment", "sweep_values", sweep.substr(eq + 1));
    }
    if (have_seed) cfg.set("experiment", "seed", std::to_string(seed));
    if (!out_dir.empty()) cfg.set("experiment", "output_dir", out_dir);
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"split federated learning optimizer over a satellite-UAV-device network"};
    app.require_subcommand(1);

    std::string config_path;
    std::string manifest_path;
    std::string sweep_arg;
    std::string out_dir;
    std::vector<std::string> methods;
    long long seed = 0;

    auto* run = app.add_subcommand("run", "solve one configuration or a sweep, write CSV");
    run->add_option("--config", config_path, "configuration file")->required();
    run->add_option("--baseline", methods,
                    "restrict methods (proposed, ra, era, hfl, dda); repeatable");
    run->add_option("--sweep", sweep_arg, "override the sweep: <parameter>=v1,v2,...");
    auto* seed_opt = run->add_option("--seed", seed, "override the experiment seed");
    run->add_option("--out", out_dir, "override the output directory");

    auto* replay = app.add_subcommand("replay", "re-run a manifest, write identical CSV");
    replay->add_option("--manifest", manifest_path, "manifest from a previous run")->required();

    auto* bound = app.add_subcommand("bound", "emit convergence-bound curves");
    bound->add_option("--config", config_path, "configuration file")->required();

    auto* oracle = app.add_subcommand("oracle", "brute-force a small instance, compare solvers");
    oracle->add_option("--config", config_path, "configuration file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (run->parsed()) {
            auto cfg = sflsim::ExperimentConfig::from_config(load_with_overrides(
                config_path, methods, sweep_arg, seed_opt->count() > 0, seed, out_dir));
            const auto result = sflsim::run_experiment(cfg);
            sflsim::write_outputs(result, cfg.output_dir);
            std::cout << result.rows.size() << " rows -> " << cfg.output_dir
                      << "/results.csv (manifest.ini, timings.csv alongside)\n";
        } else if (replay->parsed()) {
            const std::string text = read_file(manifest_path);
            const auto result = sflsim::replay_manifest(text);
            const auto eol = text.find('\n');
            const std::string body = eol == std::string::npos ? "" : text.substr(eol + 1);
            const auto cfg = sflsim::ExperimentConfig::from_config(
                sflsim::Config::parse_string(body, "<manifest>"));
            sflsim::write_outputs(result, cfg.output_dir);
            std::cout << "replayed " << result.rows.size() << " rows -> " << cfg.output_dir
                      << "/results.csv\n";
        } else if (bound->parsed()) {
            const auto cfg = sflsim::ExperimentConfig::load_file(config_path);
            const auto curves = sflsim::bound_curves(cfg);
            std::filesystem::create_directories(cfg.output_dir);
            write_file(std::filesystem::path(cfg.output_dir) / "bound_vs_layer.csv",
                       curves.vs_layer_csv);
            write_file(std::filesystem::path(cfg.output_dir) / "bound_vs_heterogeneity.csv",
                       curves.vs_heterogeneity_csv);
            std::cout << "bound curves -> " << cfg.output_dir << "\n";
        } else if (oracle->parsed()) {
            const auto cfg = sflsim::ExperimentConfig::load_file(config_path);
            const auto inst = sflsim::prepare_instance(cfg);
            const auto ctx = sflsim::base_context(cfg, inst);
            const auto exact = sflsim::brute_force_oracle(ctx);
            const auto heuristic = sflsim::solve_joint(ctx, cfg.optimizer);
            std::cout << "oracle:\n" << exact.report() << "heuristic:\n" << heuristic.report();
            if (exact.objective > 0)
                std::cout << "gap: "
                          << 100.0 * (heuristic.objective - exact.objective) / exact.objective
                          << "%\n";
        }
        return 0;
    } catch (const sflsim::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const sflsim::InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
