#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "driftguard/data/time_series.hpp"

namespace driftguard::sim {

struct GarchParams {
    double alpha0 = 0.1;
    double alpha1 = 0.1;
    double beta = 0.8;

    /// alpha0 / (1 - alpha1 - beta).
    double unconditional_variance() const noexcept { return alpha0 / (1.0 - alpha1 - beta); }
};

/// Where the mean shift enters the process.
/// Output: delta is added to the observed x_t for t >= tau.
/// Innovation: delta is added to the AR recursion input, so the level
/// settles at delta / (1 - phi).
enum class ShiftMode { Output, Innovation };

struct SimConfig {
    double phi = 0.1;
    GarchParams garch;
    std::size_t length = 500;
    /// 1-based index of the first shifted point.
    std::size_t tau = 401;
    double delta = 0.0;
    std::uint64_t seed = 0;
    /// Pre-samples generated and discarded before x_1.
    std::size_t burn_in = 200;
    ShiftMode shift = ShiftMode::Output;

    /// Throws ConfigError: alpha0 > 0, alpha1, beta >= 0, alpha1 + beta < 1,
    /// |phi| < 1, 1 <= tau <= length.
    void validate() const;
    std::string label() const;
};

nlohmann::json to_json(const SimConfig& cfg);
/// Missing fields keep the values in `base`. Throws ConfigError naming the
/// field; the result is validated.
SimConfig sim_config_from_json(const nlohmann::json& doc, const SimConfig& base = {});

/// AR(1)-GARCH(1,1) path with z_t from a counter-based normal stream.
/// Recursion starts at sigma^2 = alpha0/(1-alpha1-beta), x_0 = eps_0 = 0.
data::TimeSeries generate(const SimConfig& cfg);

enum class SeedScheduleKind { Main, Appendix, Calibration };

/// Main: 20000, 20100, ..., 119900. Appendix: 200, 203, ..., 3197.
/// Calibration: 150000, 150007, ... (1000 seeds, disjoint from both).
std::vector<std::uint64_t> seed_schedule(SeedScheduleKind kind);

/// Lower-case name: main, appendix, calibration.
std::string to_string(SeedScheduleKind kind);
SeedScheduleKind seed_schedule_from_string(const std::string& name);

inline const std::vector<double> kGridPhis{0.1, 0.5, 0.9};
inline const std::vector<double> kGridDeltas{0.0, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0};

/// Cartesian product phis x deltas x the first `seed_count` seeds of the
/// schedule (0 = all), with T = 500 and tau = 401. Ordered phi-major, then
/// delta, then seed.
std::vector<SimConfig> experiment_grid(SeedScheduleKind kind, std::size_t seed_count = 0,
                                       const std::vector<double>& phis = kGridPhis,
                                       const std::vector<double>& deltas = kGridDeltas,
                                       const SimConfig& base = {});

}  // namespace driftguard::sim
