#include "driftguard/sim/simulate.hpp"

#include <cmath>
#include <cstdio>

#include "driftguard/error.hpp"
#include "driftguard/random.hpp"

namespace driftguard::sim {

void SimConfig::validate() const {
    if (!(garch.alpha0 > 0.0)) throw ConfigError("garch.alpha0 must be > 0");
    if (!(garch.alpha1 >= 0.0)) throw ConfigError("garch.alpha1 must be >= 0");
    if (!(garch.beta >= 0.0)) throw ConfigError("garch.beta must be >= 0");
    if (!(garch.alpha1 + garch.beta < 1.0)) {
        throw ConfigError("garch: alpha1 + beta must be < 1 for a stationary process");
    }
    if (!(std::fabs(phi) < 1.0)) throw ConfigError("phi: |phi| must be < 1");
    if (length == 0) throw ConfigError("length must be positive");
    if (tau < 1 || tau > length) throw ConfigError("tau must lie in [1, length]");
    if (!std::isfinite(delta)) throw ConfigError("delta must be finite");
}

std::string SimConfig::label() const {
    char buf[96];
    std::snprintf(buf, sizeof buf, "phi%g_delta%g_seed%llu", phi, delta,
                  static_cast<unsigned long long>(seed));
    return buf;
}

nlohmann::json to_json(const SimConfig& cfg) {
    return {{"phi", cfg.phi},
            {"alpha0", cfg.garch.alpha0},
            {"alpha1", cfg.garch.alpha1},
            {"beta", cfg.garch.beta},
            {"length", cfg.length},
            {"tau", cfg.tau},
            {"delta", cfg.delta},
            {"seed", cfg.seed},
            {"burn_in", cfg.burn_in},
            {"shift", cfg.shift == ShiftMode::Output ? "output" : "innovation"}};
}

SimConfig sim_config_from_json(const nlohmann::json& doc, const SimConfig& base) {
    if (!doc.is_object()) throw ConfigError("simulation config must be a JSON object");
    SimConfig cfg = base;
    auto take = [&](const char* name, auto& dst) {
        if (!doc.contains(name)) return;
        try {
            dst = doc.at(name).get<std::remove_reference_t<decltype(dst)>>();
        } catch (const nlohmann::json::exception&) {
            throw ConfigError(std::string(name) + ": wrong type");
        }
    };
    take("phi", cfg.phi);
    take("alpha0", cfg.garch.alpha0);
    take("alpha1", cfg.garch.alpha1);
    take("beta", cfg.garch.beta);
    take("length", cfg.length);
    take("tau", cfg.tau);
    take("delta", cfg.delta);
    take("seed", cfg.seed);
    take("burn_in", cfg.burn_in);
    if (doc.contains("shift")) {
        std::string mode;
        take("shift", mode);
        if (mode == "output") {
            cfg.shift = ShiftMode::Output;
        } else if (mode == "innovation") {
            cfg.shift = ShiftMode::Innovation;
        } else {
            throw ConfigError("shift: expected output or innovation");
        }
    }
    cfg.validate();
    return cfg;
}

data::TimeSeries generate(const SimConfig& cfg) {
    cfg.validate();
    CounterRng rng(cfg.seed);
    double sigma2 = cfg.garch.unconditional_variance();
    double eps = 0.0;
    double x = 0.0;
    std::vector<double> out;
    out.reserve(cfg.length);
    const std::size_t total = cfg.burn_in + cfg.length;
    for (std::size_t k = 0; k < total; ++k) {
        if (k > 0) sigma2 = cfg.garch.alpha0 + cfg.garch.alpha1 * eps * eps + cfg.garch.beta * sigma2;
        eps = std::sqrt(sigma2) * rng.normal();
        x = cfg.phi * x + eps;
        if (k < cfg.burn_in) continue;
        const std::size_t t = k - cfg.burn_in + 1;  // 1-based reported index
        if (t >= cfg.tau && cfg.shift == ShiftMode::Innovation) x += cfg.delta;
        out.push_back(t >= cfg.tau && cfg.shift == ShiftMode::Output ? x + cfg.delta : x);
    }
    return data::TimeSeries(std::move(out), {}, cfg.label());
}

std::vector<std::uint64_t> seed_schedule(SeedScheduleKind kind) {
    std::vector<std::uint64_t> seeds;
    seeds.reserve(1000);
    switch (kind) {
        case SeedScheduleKind::Main:
            for (std::uint64_t s = 20000; s < 120000; s += 100) seeds.push_back(s);
            break;
        case SeedScheduleKind::Appendix:
            for (std::uint64_t s = 200; s < 3200; s += 3) seeds.push_back(s);
            break;
        case SeedScheduleKind::Calibration:
            for (std::uint64_t k = 0; k < 1000; ++k) seeds.push_back(150000 + 7 * k);
            break;
    }
    return seeds;
}

std::string to_string(SeedScheduleKind kind) {
    switch (kind) {
        case SeedScheduleKind::Main: return "main";
        case SeedScheduleKind::Appendix: return "appendix";
        case SeedScheduleKind::Calibration: return "calibration";
    }
    return "main";
}

SeedScheduleKind seed_schedule_from_string(const std::string& name) {
    if (name == "main") return SeedScheduleKind::Main;
    if (name == "appendix") return SeedScheduleKind::Appendix;
    if (name == "calibration") return SeedScheduleKind::Calibration;
    throw ConfigError("seed schedule: expected main, appendix or calibration, got \"" + name + "\"");
}

std::vector<SimConfig> experiment_grid(SeedScheduleKind kind, std::size_t seed_count,
                                       const std::vector<double>& phis,
                                       const std::vector<double>& deltas, const SimConfig& base) {
    auto seeds = seed_schedule(kind);
    if (seed_count > 0 && seed_count < seeds.size()) seeds.resize(seed_count);
    std::vector<SimConfig> grid;
    grid.reserve(phis.size() * deltas.size() * seeds.size());
    for (double phi : phis) {
        for (double delta : deltas) {
            for (auto seed : seeds) {
                SimConfig cfg = base;
                cfg.phi = phi;
                cfg.delta = delta;
                cfg.seed = seed;
                cfg.validate();
                grid.push_back(cfg);
            }
        }
    }
    return grid;
}

}  // namespace driftguard::sim
