#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "driftguard/bench/detector.hpp"
#include "driftguard/metrics/metrics.hpp"
#include "driftguard/sim/simulate.hpp"

namespace driftguard::bench {

struct CalibrationConfig {
    /// When false every detector uses the z of its own spec.
    bool enabled = true;
    /// Seeds taken from the calibration schedule per phi.
    std::size_t seed_count = 30;
    /// Run-level false alarm probability over the pre-change test points.
    double target_fap = 0.02;
};

struct ExperimentConfig {
    std::vector<double> phis{0.1};
    std::vector<double> deltas{0.0};
    sim::SeedScheduleKind schedule = sim::SeedScheduleKind::Main;
    /// Leading seeds of the schedule; 0 = all.
    std::size_t seed_count = 0;
    /// Length, change point, GARCH constants, burn-in and shift mode.
    sim::SimConfig base;
    std::size_t n_train = 350;
    std::vector<DetectorSpec> detectors;
    CalibrationConfig calibration;
    /// Worker threads; 0 = hardware concurrency.
    std::size_t jobs = 0;

    /// Throws ConfigError; also validates every (phi, delta) SimConfig.
    void validate() const;
};

/// Config with all four detectors at their defaults.
ExperimentConfig default_experiment();

nlohmann::json to_json(const ExperimentConfig& cfg);
/// Missing fields keep the values in `base`. Throws ConfigError.
ExperimentConfig experiment_config_from_json(const nlohmann::json& doc, const ExperimentConfig& base);

struct RunRecord {
    double phi = 0.0;
    double delta = 0.0;
    std::uint64_t seed = 0;
    DetectorKind kind = DetectorKind::Proposed;
    bool ok = false;
    std::string error;
    std::string data_hash;
    double z = 0.0;
    metrics::RunOutcome outcome;
};

struct ExperimentResult {
    /// Ordered by phi, then delta, then detector as configured.
    std::vector<metrics::MetricsReport> reports;
    /// Ordered by phi, delta, seed, detector.
    std::vector<RunRecord> runs;
    /// Multiplier used per (detector, phi).
    std::map<std::pair<DetectorKind, double>, double> z;
    std::size_t failed_runs = 0;
    std::string report_csv;
    nlohmann::json manifest;
};

/// Simulates every (phi, delta, seed) cell, trains each detector once per
/// (phi, seed) and distinct training prefix, calibrates z on the disjoint
/// calibration seeds and monitors every test segment. Failures of single
/// runs are recorded, not thrown. Results do not depend on `jobs`.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Grid presets: table2 (delta = 0), table4 (delta > 0) on the main seeds,
/// appendix (all deltas) on the appendix seeds; `scale` seeds each.
ExperimentConfig reproduce_preset(const std::string& table, std::size_t scale);

}  // namespace driftguard::bench
