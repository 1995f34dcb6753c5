#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sflsim/baselines.hpp"
#include "sflsim/bound.hpp"
#include "sflsim/channel.hpp"
#include "sflsim/config.hpp"
#include "sflsim/constellation.hpp"
#include "sflsim/dnn_profile.hpp"
#include "sflsim/optimizer.hpp"
#include "sflsim/scenario.hpp"

namespace sflsim {

struct SweepSpec {
    std::string parameter; // empty for a single evaluation
    std::vector<double> values;
};

struct ExperimentConfig {
    ScenarioConfig scenario;
    A2GChannelParams a2g;
    SatLinkParams sat;
    ConstellationConfig constellation;
    GroundTarget target;
    OptimizerSettings optimizer;
    BoundParams bound;
    DnnProfile profile;
    double total_bandwidth_hz = 50e6;
    double theta = 0.5;
    double z_bound = 1.0;
    double sigma_bound = 1.0;
    double bisect_tol_s = 1e-12;
    SweepSpec sweep;
    std::vector<std::string> methods{"proposed", "ra", "era", "hfl", "dda"};
    std::string output_dir = "out";
    std::uint64_t seed = 1;
    int handover_rounds = 20;   // rounds counted for N_sw
    double horizon_s = 7200.0;  // access-schedule horizon
    double access_step_s = 30.0;
    int workers = 0;            // sweep pool size, 0 = hardware
    std::string resolved;       // canonical config text, embedded in the manifest

    static ExperimentConfig from_config(Config cfg);
    static ExperimentConfig load_file(const std::string& path);
};

struct ExperimentRow {
    std::string method;
    double sweep_value = 0.0;
    Solution solution;
    double theta = 0.0; // the theta this row was scored under
};

struct ExperimentResult {
    std::string results_csv; // deterministic, byte-stable under replay
    std::string timings_csv; // wall clock, intentionally separate
    std::string manifest;
    std::vector<ExperimentRow> rows;
};

// Scenario plus link rates for the configured seed: the shared input of
// every method at the sweep's base point.
struct PreparedInstance {
    Scenario scenario;
    LinkRates rates;
};

PreparedInstance prepare_instance(const ExperimentConfig& cfg);

// Context over a prepared instance at the configured (unswept) values.
// The instance must outlive the returned context.
SolverContext base_context(const ExperimentConfig& cfg, const PreparedInstance& inst);

ExperimentResult run_experiment(const ExperimentConfig& cfg);

ExperimentResult replay_manifest(const std::string& manifest_text);

void write_outputs(const ExperimentResult& result, const std::string& out_dir);

struct BoundCurves {
    std::string vs_layer_csv;
    std::string vs_heterogeneity_csv;
};

BoundCurves bound_curves(const ExperimentConfig& cfg);

} // namespace sflsim
