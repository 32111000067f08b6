#include "commands.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "driftguard/bench/experiment.hpp"
#include "driftguard/chart/chart.hpp"
#include "driftguard/data/csv.hpp"
#include "driftguard/data/preprocess.hpp"
#include "driftguard/error.hpp"
#include "driftguard/hash.hpp"
#include "driftguard/log.hpp"
#include "driftguard/sim/simulate.hpp"
#include "driftguard/uq/bundle.hpp"
#include "driftguard/version.hpp"

namespace driftguard::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

void make_parent(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
}

void write_text(const fs::path& path, const std::string& text) {
    make_parent(path);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path.string());
    out << text;
}

std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

/// Replay record written next to every command's outputs.
class RunManifest {
public:
    explicit RunManifest(std::string command)
        : started_(std::chrono::steady_clock::now()),
          doc_{{"command", std::move(command)},
               {"version", kVersion},
               {"started_at", utc_now()},
               {"inputs", json::array()},
               {"outputs", json::array()}} {}

    json& operator[](const char* key) { return doc_[key]; }
    void input(const fs::path& p) { doc_["inputs"].push_back({{"path", p.string()}, {"sha256", file_sha256(p)}}); }
    void output(const fs::path& p) { doc_["outputs"].push_back({{"path", p.string()}, {"sha256", file_sha256(p)}}); }

    void write(const fs::path& path) {
        doc_["seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - started_).count();
        write_text(path, doc_.dump(2) + "\n");
    }

private:
    std::chrono::steady_clock::time_point started_;
    json doc_;
};

fs::path sidecar(const fs::path& out) { return fs::path(out.string() + ".manifest.json"); }

// ---- simulate -------------------------------------------------------------

struct SimulateArgs {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
    const json doc = a.config.empty() ? json::object() : read_json(a.config);
    sim::SimConfig base;
    try {
        base = sim::sim_config_from_json(doc.contains("sim") ? doc.at("sim") : json::object());
    } catch (const ConfigError& e) {
        throw ConfigError(std::string("sim.") + e.what());
    }
    std::vector<sim::SimConfig> configs;
    if (doc.contains("grid")) {
        if (a.seed) throw ConfigError("--seed cannot be combined with a grid config");
        const auto& g = doc.at("grid");
        try {
            configs = sim::experiment_grid(
                sim::seed_schedule_from_string(g.value("schedule", std::string("main"))),
                g.value("seed_count", std::size_t{0}), g.value("phis", sim::kGridPhis),
                g.value("deltas", sim::kGridDeltas), base);
        } catch (const json::exception& e) {
            throw ConfigError(std::string("grid: ") + e.what());
        }
    } else {
        if (a.seed) base.seed = *a.seed;
        configs.push_back(base);
    }
    // Reject the whole run before writing anything.
    for (const auto& c : configs) c.validate();

    fs::create_directories(a.out);
    RunManifest manifest("simulate");
    manifest["config"] = doc;
    json seeds = json::array();
    for (const auto& c : configs) {
        const fs::path path = fs::path(a.out) / (c.label() + ".csv");
        data::write_csv(sim::generate(c), path);
        manifest.output(path);
        seeds.push_back(c.seed);
    }
    manifest["seeds"] = seeds;
    manifest.write(fs::path(a.out) / "manifest.json");
    out << "simulate: wrote " << configs.size() << " series to " << a.out << "\n";
    return kOk;
}

// ---- preprocess -----------------------------------------------------------

struct PreprocessArgs {
    std::string mode;
    std::string input;
    std::string out;
    std::string config;
};

bool parse_number(const std::string& text, double& v) {
    if (text.empty()) return false;
    char* end = nullptr;
    v = std::strtod(text.c_str(), &end);
    return end == text.c_str() + text.size();
}

std::vector<std::string> split_fields(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

// One averaged spectrum per row: optional leading timestamp, then the
// amplitudes. A first line that is neither is taken as a header.
data::TimeSeries summarize_spectra(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    std::vector<double> values;
    std::vector<data::Timestamp> stamps;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto fields = split_fields(line);
        if (fields.empty() || (fields.size() == 1 && fields[0].empty())) continue;
        std::size_t first = 0;
        double v = 0.0;
        if (!parse_number(fields[0], v)) {
            try {
                stamps.push_back(data::parse_timestamp(fields[0]));
                first = 1;
            } catch (const InputError&) {
                if (lineno == 1) continue;
                throw ParseError(lineno, "expected a timestamp or a number, got '" + fields[0] + "'");
            }
        }
        std::vector<double> amps;
        for (std::size_t k = first; k < fields.size(); ++k) {
            if (!parse_number(fields[k], v)) throw ParseError(lineno, "bad amplitude '" + fields[k] + "'");
            amps.push_back(v);
        }
        if (amps.empty()) throw ParseError(lineno, "row has no amplitudes");
        if (!stamps.empty() && stamps.size() != values.size() + 1) {
            throw ParseError(lineno, "timestamps must be given on every row or none");
        }
        values.push_back(data::at_summary(amps));
    }
    if (values.empty()) throw InputError(path.string() + ": no spectra");
    return data::TimeSeries(std::move(values), std::move(stamps));
}

data::EnergyResampleOptions energy_options(const json& doc) {
    data::EnergyResampleOptions opt;
    try {
        if (doc.contains("bucket_minutes")) opt.bucket = std::chrono::minutes(doc.at("bucket_minutes").get<int>());
        if (doc.contains("day_start_minutes")) {
            opt.day_start = std::chrono::minutes(doc.at("day_start_minutes").get<int>());
        }
        if (doc.contains("service")) {
            const auto& s = doc.at("service");
            if (s.is_null()) {
                opt.service.reset();
            } else {
                data::ServiceWindow w;
                if (s.contains("start_minutes")) w.start = std::chrono::minutes(s.at("start_minutes").get<int>());
                if (s.contains("end_minutes")) w.end = std::chrono::minutes(s.at("end_minutes").get<int>());
                opt.service = w;
            }
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("preprocess config: ") + e.what());
    }
    if (opt.bucket.count() <= 0) throw ConfigError("bucket_minutes must be positive");
    return opt;
}

int cmd_preprocess(const PreprocessArgs& a, std::ostream& out) {
    const json doc = a.config.empty() ? json::object() : read_json(a.config);
    data::TimeSeries result;
    if (a.mode == "at-summary") {
        result = summarize_spectra(a.input);
    } else {
        const auto opt = energy_options(doc);
        result = data::resample_energy(data::load_csv(a.input), opt);
    }
    make_parent(a.out);
    data::write_csv(result, fs::path(a.out));
    RunManifest manifest("preprocess " + a.mode);
    manifest["config"] = doc;
    manifest.input(a.input);
    manifest.output(a.out);
    manifest.write(sidecar(a.out));
    out << "preprocess: " << result.size() << " points written to " << a.out << "\n";
    return kOk;
}

// ---- train ----------------------------------------------------------------

struct TrainArgs {
    std::string data;
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
};

int cmd_train(const TrainArgs& a, std::ostream& out) {
    const json doc = a.config.empty() ? json::object() : read_json(a.config);
    auto cfg = uq::phase_one_config_from_json(doc);
    if (a.seed) cfg.master_seed = *a.seed;
    const auto series = data::load_csv(a.data);
    if (cfg.window_len >= series.size()) {
        throw InputError("window_len " + std::to_string(cfg.window_len) + " must be less than the " +
                         std::to_string(series.size()) + " data points");
    }
    const auto bundle = uq::fit_bundle(series, cfg);
    make_parent(a.out);
    uq::save_bundle(bundle, a.out);
    RunManifest manifest("train");
    manifest["config"] = uq::to_json(cfg);
    manifest["seeds"] = {{"master_seed", cfg.master_seed}};
    manifest.input(a.data);
    manifest.output(a.out);
    manifest.write(sidecar(a.out));
    out << "train: bundle with " << bundle.ensemble.members.size() << " members written to " << a.out << "\n";
    return kOk;
}

// ---- monitor --------------------------------------------------------------

struct MonitorArgs {
    std::string bundle;
    std::string data;
    std::string config;
    std::string out;
    std::optional<double> z;
};

int cmd_monitor(const MonitorArgs& a, std::ostream& out) {
    const json doc = a.config.empty() ? json::object() : read_json(a.config);
    chart::ChartConfig cc;
    try {
        if (doc.contains("z")) cc.z = doc.at("z").get<double>();
    } catch (const json::exception&) {
        throw ConfigError("z: wrong type");
    }
    if (a.z) cc.z = *a.z;
    cc.validate();
    const auto bundle = uq::load_bundle(a.bundle);
    if (doc.contains("window_len") && doc.at("window_len").get<std::size_t>() != bundle.window_len) {
        throw ConfigError("incompatible bundle: it was trained with window_len " +
                          std::to_string(bundle.window_len) + ", config asks for " +
                          std::to_string(doc.at("window_len").get<std::size_t>()));
    }
    const auto series = data::load_csv(a.data);
    if (series.size() < bundle.window_len + 1) {
        throw InputError("incompatible data: " + std::to_string(series.size()) +
                         " points cannot fill a window of " + std::to_string(bundle.window_len) +
                         " plus one monitored point");
    }
    const auto records = chart::monitor(bundle, series, cc);
    std::ostringstream csv;
    chart::write_alarms_csv(records, csv);
    write_text(a.out, csv.str());
    RunManifest manifest("monitor");
    manifest["config"] = {{"z", cc.z}, {"window_len", bundle.window_len}};
    manifest.input(a.bundle);
    manifest.input(a.data);
    manifest.output(a.out);
    manifest.write(sidecar(a.out));
    out << "monitor: " << chart::alarm_indices(records).size() << " alarms in " << records.size()
        << " monitored points\n";
    return kOk;
}

// ---- evaluate / reproduce -------------------------------------------------

struct GridArgs {
    std::string table;
    std::string config;
    std::string manifest;
    std::string out;
    std::optional<std::size_t> scale;
    std::optional<std::size_t> jobs;
    std::optional<double> z;
};

int run_grid(const std::string& command, bench::ExperimentConfig cfg, const GridArgs& a, std::ostream& out) {
    if (a.scale) {
        if (*a.scale == 0) throw ConfigError("--scale must be at least 1");
        cfg.seed_count = *a.scale;
    }
    if (a.z) {
        for (auto& d : cfg.detectors) d.chart.z = *a.z;
        cfg.calibration.enabled = false;
    }
    if (a.jobs) cfg.jobs = *a.jobs;
    cfg.validate();
    const auto result = bench::run_experiment(cfg);
    const fs::path dir(a.out);
    const fs::path report = dir / "report.csv";
    write_text(report, result.report_csv);
    RunManifest manifest(command);
    for (auto& [key, value] : result.manifest.items()) manifest[key.c_str()] = value;
    manifest.output(report);
    manifest.write(dir / "manifest.json");
    out << command << ": " << result.reports.size() << " rows written to " << report.string() << "\n";
    if (result.failed_runs > 0) {
        out << command << ": " << result.failed_runs << " runs failed (see manifest)\n";
        return kPartialFailure;
    }
    return kOk;
}

int cmd_evaluate(const GridArgs& a, std::ostream& out) {
    return run_grid("evaluate", bench::experiment_config_from_json(read_json(a.config), bench::default_experiment()),
                    a, out);
}

int cmd_reproduce(const GridArgs& a, std::ostream& out) {
    bench::ExperimentConfig cfg;
    if (!a.manifest.empty()) {
        const json m = read_json(a.manifest);
        if (!m.contains("config")) throw ConfigError(a.manifest + ": manifest has no config");
        // Replaying a manifest reproduces its grid exactly; the recorded
        // config already holds the seed count.
        cfg = bench::experiment_config_from_json(m.at("config"), bench::default_experiment());
    } else {
        if (a.table.empty()) throw ConfigError("reproduce: a table (table2, table4, appendix) or --manifest is required");
        cfg = bench::reproduce_preset(a.table, a.scale.value_or(1));
    }
    if (!a.config.empty()) cfg = bench::experiment_config_from_json(read_json(a.config), cfg);
    return run_grid("reproduce " + (a.table.empty() ? std::string("manifest") : a.table), cfg, a, out);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"driftguard: LSTM prediction-interval control charts for heteroscedastic time series"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    SimulateArgs sim_args;
    auto* sim = app.add_subcommand("simulate", "Generate AR(1)-GARCH(1,1) series");
    sim->add_option("--config", sim_args.config, "JSON with a 'sim' object and an optional 'grid'");
    sim->add_option("--out", sim_args.out, "Output directory")->required();
    sim->add_option("--seed", sim_args.seed, "Seed for a single-series run (overrides config)");

    PreprocessArgs pre_args;
    auto* pre = app.add_subcommand("preprocess", "Turn raw measurements into a monitored series");
    pre->add_option("mode", pre_args.mode, "at-summary or energy-resample")
        ->required()
        ->check(CLI::IsMember({"at-summary", "energy-resample"}));
    pre->add_option("--in", pre_args.input, "Input CSV")->required()->check(CLI::ExistingFile);
    pre->add_option("--out", pre_args.out, "Output CSV")->required();
    pre->add_option("--config", pre_args.config, "Resampling options (JSON)");

    TrainArgs train_args;
    auto* train = app.add_subcommand("train", "Phase I: fit the ensemble and the noise-variance network");
    train->add_option("--data", train_args.data, "Training CSV")->required()->check(CLI::ExistingFile);
    train->add_option("--config", train_args.config, "Phase I config (JSON)");
    train->add_option("--out", train_args.out, "Bundle path")->required();
    train->add_option("--seed", train_args.seed, "Master seed (overrides config)");

    MonitorArgs mon_args;
    auto* mon = app.add_subcommand("monitor", "Phase II: check a series against prediction limits");
    mon->add_option("--bundle", mon_args.bundle, "Bundle from 'train'")->required()->check(CLI::ExistingFile);
    mon->add_option("--data", mon_args.data, "Series to monitor")->required()->check(CLI::ExistingFile);
    mon->add_option("--config", mon_args.config, "Chart config (JSON: z, window_len)");
    mon->add_option("--z", mon_args.z, "Limit multiplier (overrides config)");
    mon->add_option("--out", mon_args.out, "Alarm CSV")->required();

    GridArgs eval_args;
    auto* eval = app.add_subcommand("evaluate", "Run a simulation grid for the four detectors");
    eval->add_option("--config", eval_args.config, "Experiment config (JSON)")->required();
    eval->add_option("--out", eval_args.out, "Output directory")->required();
    eval->add_option("--scale", eval_args.scale, "Seeds per cell (overrides config)");
    eval->add_option("--jobs", eval_args.jobs, "Worker threads (default: all cores)");
    eval->add_option("--z", eval_args.z, "Fixed multiplier for every detector; disables calibration");

    GridArgs rep_args;
    auto* rep = app.add_subcommand("reproduce", "Reproduce a results table at desk scale");
    rep->add_option("table", rep_args.table, "table2, table4 or appendix")
        ->check(CLI::IsMember({"table2", "table4", "appendix"}));
    rep->add_option("--scale", rep_args.scale, "Seeds per cell (default 1)");
    rep->add_option("--manifest", rep_args.manifest, "Replay the grid recorded in a manifest");
    rep->add_option("--config", rep_args.config, "Experiment overrides (JSON)");
    rep->add_option("--out", rep_args.out, "Output directory")->required();
    rep->add_option("--jobs", rep_args.jobs, "Worker threads (default: all cores)");
    rep->add_option("--z", rep_args.z, "Fixed multiplier for every detector; disables calibration");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForVersion&) {
        out << kVersion << "\n";
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kConfigError;
    }

    try {
        if (*sim) return cmd_simulate(sim_args, out);
        if (*pre) return cmd_preprocess(pre_args, out);
        if (*train) return cmd_train(train_args, out);
        if (*mon) return cmd_monitor(mon_args, out);
        if (*eval) return cmd_evaluate(eval_args, out);
        if (*rep) return cmd_reproduce(rep_args, out);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const InputError& e) {
        err << "data error: " << e.what() << "\n";
        return kDataError;
    } catch (const NumericError& e) {
        err << "numeric error: " << e.what() << "\n";
        return kNumericError;
    } catch (const DomainError& e) {
        err << "numeric error: " << e.what() << "\n";
        return kNumericError;
    } catch (const json::exception& e) {
        err << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const fs::filesystem_error& e) {
        err << "data error: " << e.what() << "\n";
        return kDataError;
    }
    return kConfigError;
}

}  // namespace driftguard::cli
