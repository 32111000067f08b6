#include "driftguard/bench/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <set>
#include <sstream>
#include <thread>

#include "driftguard/bench/calibration.hpp"
#include "driftguard/error.hpp"
#include "driftguard/hash.hpp"
#include "driftguard/log.hpp"
#include "driftguard/version.hpp"

namespace driftguard::bench {

using nlohmann::json;

namespace {

// Detector seeds are shared by all phi and delta cells of one data seed.
constexpr std::uint64_t kDetectorStream = 0xde7ec7;

struct Scored {
    std::size_t index = 0;
    double value = 0.0;
    chart::Forecast fc;
};

struct DetectorTrace {
    bool ok = true;
    std::string error;
    std::string data_hash;
    // Per delta of the job, one entry per test point.
    std::vector<std::vector<Scored>> per_delta;
    std::vector<double> maxima;
};

struct Job {
    std::size_t phi_idx = 0;
    std::uint64_t seed = 0;
    bool calibration = false;
};

struct JobResult {
    std::vector<DetectorTrace> detectors;
};

std::vector<Scored> score_test(const chart::Forecaster& f, const data::TimeSeries& train,
                               const data::TimeSeries& test) {
    const auto records = monitor_test(f, train, test, 1.0);
    std::vector<Scored> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back({r.index, r.value, {r.f_hat, r.s}});
    return out;
}

JobResult run_job(const ExperimentConfig& cfg, const Job& job) {
    const std::vector<double> deltas = job.calibration ? std::vector<double>{0.0} : cfg.deltas;
    const std::size_t nd = cfg.detectors.size();
    JobResult result;
    result.detectors.resize(nd);
    for (auto& d : result.detectors) d.per_delta.resize(deltas.size());

    std::vector<data::TimeSeries> trains, tests;
    std::vector<std::string> hashes;
    for (double delta : deltas) {
        sim::SimConfig sc = cfg.base;
        sc.phi = cfg.phis[job.phi_idx];
        sc.delta = delta;
        sc.seed = job.seed;
        auto [train, test] = data::split_train_test(sim::generate(sc), cfg.n_train);
        hashes.push_back(fingerprint(train.values()));
        trains.push_back(std::move(train));
        tests.push_back(std::move(test));
    }

    const std::uint64_t master = derive_seed(job.seed, kDetectorStream);
    std::vector<bool> done(deltas.size(), false);
    for (std::size_t g = 0; g < deltas.size(); ++g) {
        if (done[g]) continue;
        // Deltas whose training prefix is identical share one Phase I.
        std::vector<std::size_t> members;
        for (std::size_t k = g; k < deltas.size(); ++k) {
            if (!done[k] && hashes[k] == hashes[g]) {
                members.push_back(k);
                done[k] = true;
            }
        }
        std::vector<TrainedDetector> trained;
        std::vector<std::string> train_errors(nd);
        try {
            trained = train_detectors(cfg.detectors, trains[g], master);
        } catch (const Error&) {
            // Isolate the failing family.
            trained.resize(nd);
            for (std::size_t d = 0; d < nd; ++d) {
                try {
                    trained[d] = train_detector(cfg.detectors[d], trains[g], master);
                } catch (const std::exception& e) {
                    train_errors[d] = e.what();
                }
            }
        }
        for (std::size_t d = 0; d < nd; ++d) {
            auto& trace = result.detectors[d];
            if (!train_errors[d].empty()) {
                trace.ok = false;
                trace.error = "training: " + train_errors[d];
                continue;
            }
            trace.data_hash = hashes[g];
            for (std::size_t k : members) {
                try {
                    trace.per_delta[k] = score_test(*trained[d].forecaster, trains[k], tests[k]);
                } catch (const std::exception& e) {
                    trace.ok = false;
                    trace.error = std::string("monitoring: ") + e.what();
                }
            }
        }
    }

    if (job.calibration) {
        const std::size_t block = cfg.base.tau - cfg.n_train - 1;
        for (auto& trace : result.detectors) {
            if (!trace.ok) continue;
            std::vector<double> scores;
            for (const auto& s : trace.per_delta[0]) scores.push_back(standardized_score(s.value, s.fc));
            trace.maxima = block_maxima(scores, block);
            trace.per_delta.clear();
        }
    }
    return result;
}

std::vector<std::uint64_t> leading(std::vector<std::uint64_t> seeds, std::size_t count) {
    if (count != 0 && count < seeds.size()) seeds.resize(count);
    return seeds;
}

json seeds_json(const std::vector<std::uint64_t>& seeds) {
    json a = json::array();
    for (auto s : seeds) a.push_back(s);
    return a;
}

}  // namespace

void ExperimentConfig::validate() const {
    if (phis.empty()) throw ConfigError("experiment: phis must not be empty");
    if (deltas.empty()) throw ConfigError("experiment: deltas must not be empty");
    if (detectors.empty()) throw ConfigError("experiment: at least one detector is required");
    std::set<DetectorKind> kinds;
    for (const auto& d : detectors) {
        d.validate();
        if (!kinds.insert(d.kind).second) {
            throw ConfigError("experiment: detector " + to_string(d.kind) + " listed twice");
        }
        if (n_train < d.window_len + 2) throw ConfigError("experiment: n_train too small for the window");
    }
    if (n_train >= base.length) throw ConfigError("experiment: n_train must be less than the series length");
    for (double phi : phis) {
        for (double delta : deltas) {
            sim::SimConfig sc = base;
            sc.phi = phi;
            sc.delta = delta;
            try {
                sc.validate();
            } catch (const ConfigError& e) {
                throw ConfigError(std::string("experiment.sim: ") + e.what());
            }
        }
    }
    const auto seeds = sim::seed_schedule(schedule);
    if (seed_count > seeds.size()) {
        throw ConfigError("experiment: seed_count exceeds the " + sim::to_string(schedule) + " schedule");
    }
    if (calibration.enabled) {
        if (calibration.seed_count == 0) throw ConfigError("experiment.calibration: seed_count must be positive");
        if (calibration.seed_count > sim::seed_schedule(sim::SeedScheduleKind::Calibration).size()) {
            throw ConfigError("experiment.calibration: seed_count exceeds the calibration schedule");
        }
        if (!(calibration.target_fap > 0.0 && calibration.target_fap < 1.0)) {
            throw ConfigError("experiment.calibration: target_fap must lie in (0, 1)");
        }
        if (base.tau <= n_train + 1) {
            throw ConfigError("experiment.calibration: needs pre-change test points (tau > n_train + 1)");
        }
    }
}

ExperimentConfig default_experiment() {
    ExperimentConfig cfg;
    for (auto k : kAllDetectors) cfg.detectors.push_back(default_spec(k));
    return cfg;
}

json to_json(const ExperimentConfig& cfg) {
    json detectors = json::array();
    for (const auto& d : cfg.detectors) detectors.push_back(to_json(d));
    json sim = sim::to_json(cfg.base);
    sim.erase("phi");
    sim.erase("delta");
    sim.erase("seed");
    return {{"phis", cfg.phis},
            {"deltas", cfg.deltas},
            {"schedule", sim::to_string(cfg.schedule)},
            {"seed_count", cfg.seed_count},
            {"sim", sim},
            {"n_train", cfg.n_train},
            {"detectors", detectors},
            {"calibration",
             {{"enabled", cfg.calibration.enabled},
              {"seed_count", cfg.calibration.seed_count},
              {"target_fap", cfg.calibration.target_fap}}}};
}

ExperimentConfig experiment_config_from_json(const json& doc, const ExperimentConfig& base) {
    if (!doc.is_object()) throw ConfigError("experiment config must be a JSON object");
    ExperimentConfig cfg = base;
    auto take = [](const json& obj, const char* name, auto& dst, const std::string& path) {
        if (!obj.contains(name)) return;
        try {
            dst = obj.at(name).get<std::remove_reference_t<decltype(dst)>>();
        } catch (const json::exception&) {
            throw ConfigError(path + name + ": wrong type");
        }
    };
    take(doc, "phis", cfg.phis, "");
    take(doc, "deltas", cfg.deltas, "");
    take(doc, "seed_count", cfg.seed_count, "");
    take(doc, "n_train", cfg.n_train, "");
    take(doc, "jobs", cfg.jobs, "");
    if (doc.contains("schedule")) {
        std::string name;
        take(doc, "schedule", name, "");
        cfg.schedule = sim::seed_schedule_from_string(name);
    }
    if (doc.contains("sim")) {
        try {
            cfg.base = sim::sim_config_from_json(doc.at("sim"), cfg.base);
        } catch (const ConfigError& e) {
            throw ConfigError(std::string("sim.") + e.what());
        }
    }
    if (doc.contains("detectors")) {
        const auto& arr = doc.at("detectors");
        if (!arr.is_array()) throw ConfigError("detectors: expected an array");
        cfg.detectors.clear();
        for (std::size_t i = 0; i < arr.size(); ++i) {
            try {
                cfg.detectors.push_back(arr[i].is_string() ? default_spec(detector_kind_from_string(arr[i]))
                                                           : detector_spec_from_json(arr[i]));
            } catch (const ConfigError& e) {
                throw ConfigError("detectors[" + std::to_string(i) + "]: " + e.what());
            }
        }
    }
    if (doc.contains("calibration")) {
        const auto& c = doc.at("calibration");
        take(c, "enabled", cfg.calibration.enabled, "calibration.");
        take(c, "seed_count", cfg.calibration.seed_count, "calibration.");
        take(c, "target_fap", cfg.calibration.target_fap, "calibration.");
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig reproduce_preset(const std::string& table, std::size_t scale) {
    if (scale == 0) throw ConfigError("reproduce: scale must be at least 1");
    ExperimentConfig cfg = default_experiment();
    cfg.phis = sim::kGridPhis;
    cfg.seed_count = scale;
    if (table == "table2") {
        cfg.deltas = {0.0};
    } else if (table == "table4") {
        cfg.deltas.assign(sim::kGridDeltas.begin() + 1, sim::kGridDeltas.end());
    } else if (table == "appendix") {
        cfg.deltas = sim::kGridDeltas;
        cfg.schedule = sim::SeedScheduleKind::Appendix;
    } else {
        throw ConfigError("reproduce: unknown table '" + table + "' (expected table2, table4 or appendix)");
    }
    cfg.validate();
    return cfg;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto seeds = leading(sim::seed_schedule(cfg.schedule), cfg.seed_count);
    const auto cal_seeds = cfg.calibration.enabled
                               ? leading(sim::seed_schedule(sim::SeedScheduleKind::Calibration),
                                         cfg.calibration.seed_count)
                               : std::vector<std::uint64_t>{};
    std::vector<Job> jobs;
    for (std::size_t p = 0; p < cfg.phis.size(); ++p) {
        for (auto s : cal_seeds) jobs.push_back({p, s, true});
        for (auto s : seeds) jobs.push_back({p, s, false});
    }

    std::vector<JobResult> results(jobs.size());
    std::size_t workers = cfg.jobs != 0 ? cfg.jobs : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, jobs.size());
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> finished{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
            try {
                results[i] = run_job(cfg, jobs[i]);
            } catch (const std::exception& e) {
                results[i].detectors.assign(cfg.detectors.size(), DetectorTrace{});
                for (auto& d : results[i].detectors) {
                    d.ok = false;
                    d.error = e.what();
                }
            }
            const std::size_t n = ++finished;
            logger()->info("experiment: {}/{} jobs done (phi={}, seed={}{})", n, jobs.size(),
                           cfg.phis[jobs[i].phi_idx], jobs[i].seed, jobs[i].calibration ? ", calibration" : "");
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    ExperimentResult out;
    json z_manifest = json::array();
    for (std::size_t p = 0; p < cfg.phis.size(); ++p) {
        for (std::size_t d = 0; d < cfg.detectors.size(); ++d) {
            const auto kind = cfg.detectors[d].kind;
            double z = cfg.detectors[d].chart.z;
            json entry = {{"detector", to_string(kind)}, {"phi", cfg.phis[p]}};
            if (cfg.calibration.enabled) {
                std::vector<double> maxima;
                std::size_t failed = 0;
                for (std::size_t j = 0; j < jobs.size(); ++j) {
                    if (!jobs[j].calibration || jobs[j].phi_idx != p) continue;
                    const auto& tr = results[j].detectors[d];
                    if (!tr.ok) {
                        ++failed;
                        continue;
                    }
                    maxima.insert(maxima.end(), tr.maxima.begin(), tr.maxima.end());
                }
                entry["blocks"] = maxima.size();
                entry["failed_seeds"] = failed;
                try {
                    z = calibrate_z(maxima, cfg.calibration.target_fap);
                    entry["source"] = conformal_z(maxima, cfg.calibration.target_fap) ? "conformal" : "gumbel";
                } catch (const Error& e) {
                    entry["source"] = "spec";
                    entry["error"] = e.what();
                }
            } else {
                entry["source"] = "spec";
            }
            entry["z"] = z;
            out.z[{kind, cfg.phis[p]}] = z;
            z_manifest.push_back(entry);
        }
    }

    // Evaluation jobs of phi p occupy a contiguous run in seed order.
    std::vector<metrics::KeyedRun> keyed;
    json runs_manifest = json::array();
    for (std::size_t p = 0; p < cfg.phis.size(); ++p) {
        for (std::size_t k = 0; k < cfg.deltas.size(); ++k) {
            for (std::size_t j = 0; j < jobs.size(); ++j) {
                if (jobs[j].calibration || jobs[j].phi_idx != p) continue;
                for (std::size_t d = 0; d < cfg.detectors.size(); ++d) {
                    const auto& tr = results[j].detectors[d];
                    RunRecord rec;
                    rec.phi = cfg.phis[p];
                    rec.delta = cfg.deltas[k];
                    rec.seed = jobs[j].seed;
                    rec.kind = cfg.detectors[d].kind;
                    rec.z = out.z.at({rec.kind, rec.phi});
                    rec.ok = tr.ok;
                    rec.error = tr.error;
                    rec.data_hash = tr.data_hash;
                    rec.outcome.tau = cfg.base.tau;
                    rec.outcome.length = cfg.base.length;
                    if (rec.ok) {
                        for (const auto& s : tr.per_delta[k]) {
                            if (!chart::classify(s.index, s.value, s.fc, rec.z).in_control) {
                                rec.outcome.alarms.push_back(s.index);
                            }
                        }
                        keyed.push_back({{to_string(rec.kind), rec.phi, rec.delta}, rec.outcome});
                    } else {
                        ++out.failed_runs;
                    }
                    json r = {{"phi", rec.phi},
                              {"delta", rec.delta},
                              {"seed", rec.seed},
                              {"detector", to_string(rec.kind)},
                              {"status", rec.ok ? "ok" : "failed"}};
                    if (rec.ok) {
                        r["train_sha256"] = rec.data_hash;
                        r["alarms"] = rec.outcome.alarms.size();
                        r["first_alarm"] = rec.outcome.alarms.empty() ? json(nullptr)
                                                                      : json(rec.outcome.alarms.front());
                    } else {
                        r["error"] = rec.error;
                    }
                    runs_manifest.push_back(std::move(r));
                    out.runs.push_back(std::move(rec));
                }
            }
        }
    }

    for (double phi : cfg.phis) {
        for (double delta : cfg.deltas) {
            for (const auto& spec : cfg.detectors) {
                const metrics::GroupKey key{to_string(spec.kind), phi, delta};
                std::vector<metrics::RunOutcome> group;
                for (const auto& kr : keyed) {
                    if (kr.key == key) group.push_back(kr.run);
                }
                if (group.empty()) {
                    metrics::MetricsReport empty;
                    empty.key = key;
                    out.reports.push_back(empty);
                } else {
                    out.reports.push_back(metrics::summarize(key, group));
                }
            }
        }
    }

    std::ostringstream csv;
    metrics::write_report_csv(out.reports, csv);
    out.report_csv = csv.str();

    json detectors = json::array();
    for (const auto& d : cfg.detectors) detectors.push_back(to_json(d));
    out.manifest = {{"tool", "driftguard"},
                    {"version", kVersion},
                    {"config", to_json(cfg)},
                    {"seeds", seeds_json(seeds)},
                    {"calibration_seeds", seeds_json(cal_seeds)},
                    {"z", z_manifest},
                    {"runs", runs_manifest},
                    {"failed_runs", out.failed_runs},
                    {"report_sha256", sha256_hex(out.report_csv)}};
    return out;
}

}  // namespace driftguard::bench
