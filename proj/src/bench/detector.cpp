#include "driftguard/bench/detector.hpp"

#include <cmath>
#include <map>
#include <numeric>

#include "driftguard/error.hpp"
#include "driftguard/hash.hpp"
#include "driftguard/nn/rnn.hpp"
#include "driftguard/nn/serialize.hpp"

namespace driftguard::bench {

using nlohmann::json;

namespace {

// Stream ids for per-family seeds under one master seed.
constexpr std::uint64_t kSingleLstmStream = 0xab;
constexpr std::uint64_t kRnnStream = 0xe1;

std::vector<double> standardized(const data::TimeSeries& series, const data::Standardizer& sc) {
    std::vector<double> out(series.size());
    for (std::size_t i = 0; i < series.size(); ++i) out[i] = sc.apply(series[i]);
    return out;
}

// Scaled-unit model wrapped as a raw-unit predictor.
template <class Model>
Predictor scaled_predictor(std::shared_ptr<const Model> model, data::Standardizer sc) {
    return [model = std::move(model), sc](std::span<const double> window) {
        thread_local std::vector<double> buf;
        buf.resize(window.size());
        for (std::size_t i = 0; i < window.size(); ++i) buf[i] = sc.apply(window[i]);
        return sc.invert(model->predict(buf));
    };
}

struct EnsemblePredictor {
    uq::EnsembleModel ensemble;
    double predict(std::span<const double> x) const { return uq::ensemble_predict(ensemble, x).f_hat; }
};

// Single model trained on all pairs with a 10% suffix for early stopping.
template <class Model>
Model fit_single(Model model, const data::WindowedPairs& pairs, const nn::TrainConfig& cfg) {
    const std::size_t n_val = std::max<std::size_t>(1, pairs.size() / 10);
    if (pairs.size() < n_val + 1) throw InputError("training series too short for a validation split");
    std::vector<std::size_t> fit_rows(pairs.size() - n_val), val_rows(n_val);
    std::iota(fit_rows.begin(), fit_rows.end(), std::size_t{0});
    std::iota(val_rows.begin(), val_rows.end(), pairs.size() - n_val);
    const auto fit_set = pairs.subset(fit_rows);
    const auto val_set = pairs.subset(val_rows);
    return nn::fit(std::move(model), fit_set.view(), val_set.view(), nn::LossKind::MeanSquared, cfg).model;
}

TrainedDetector residual_detector(DetectorKind kind, const DetectorSpec& spec, const data::TimeSeries& train,
                                  Predictor predict, std::string hash) {
    const auto raw_pairs = data::make_windows(train, spec.window_len);
    const auto stats = residual_stats(raw_pairs, predict);
    return {kind, std::make_shared<ResidualChartForecaster>(spec.window_len, std::move(predict), stats),
            std::move(hash)};
}

TrainedDetector from_stage(const DetectorSpec& spec, const uq::EnsembleStage& stage,
                           const data::TimeSeries& train, std::uint64_t master_seed) {
    if (spec.kind == DetectorKind::Proposed) {
        auto bundle = std::make_shared<uq::UncertaintyBundle>(uq::complete_bundle(stage, spec.phase_one(master_seed)));
        struct Owning final : chart::Forecaster {
            std::shared_ptr<const uq::UncertaintyBundle> b;
            chart::BundleForecaster inner;
            explicit Owning(std::shared_ptr<const uq::UncertaintyBundle> p) : b(std::move(p)), inner(*b) {}
            std::size_t window_len() const override { return inner.window_len(); }
            chart::Forecast forecast(std::span<const double> w) const override { return inner.forecast(w); }
        };
        return {spec.kind, std::make_shared<Owning>(std::move(bundle)), stage.data_hash};
    }
    auto model = std::make_shared<const EnsemblePredictor>(EnsemblePredictor{stage.ensemble});
    return residual_detector(spec.kind, spec, train, scaled_predictor(model, stage.scaler), stage.data_hash);
}

}  // namespace

std::string to_string(DetectorKind kind) {
    switch (kind) {
        case DetectorKind::Proposed: return "proposed";
        case DetectorKind::AblatedA: return "ablated_a";
        case DetectorKind::AblatedB: return "ablated_b";
        case DetectorKind::RnnResidual: return "rnn_residual";
    }
    return "unknown";
}

DetectorKind detector_kind_from_string(const std::string& name) {
    for (auto k : kAllDetectors) {
        if (to_string(k) == name) return k;
    }
    throw ConfigError("unknown detector '" + name +
                      "' (expected proposed, ablated_a, ablated_b or rnn_residual)");
}

void DetectorSpec::validate() const {
    const std::string who = "detector " + to_string(kind) + ": ";
    if (window_len == 0) throw ConfigError(who + "window_len must be positive");
    if (uses_ensemble(kind)) {
        if (members && *members < 2) throw ConfigError(who + "members must be at least 2");
        if (resample_size && *resample_size == 0) throw ConfigError(who + "resample_size must be positive");
    } else if (members || resample_size) {
        throw ConfigError(who + "members/resample_size apply only to ensemble detectors");
    }
    train.validate();
    chart.validate();
    if (kind == DetectorKind::Proposed) {
        variance.train.validate();
        if (variance.hidden_dim == 0) throw ConfigError(who + "variance.hidden_dim must be positive");
    }
}

uq::PhaseOneConfig DetectorSpec::phase_one(std::uint64_t master_seed) const {
    uq::PhaseOneConfig cfg;
    cfg.window_len = window_len;
    cfg.ensemble.members = members.value_or(5);
    cfg.ensemble.resample_size = resample_size;
    cfg.ensemble.train = train;
    cfg.ensemble.variant = variant;
    cfg.ensemble.use_bias = use_bias;
    cfg.variance = variance;
    cfg.master_seed = master_seed;
    return cfg;
}

DetectorSpec default_spec(DetectorKind kind) {
    DetectorSpec spec;
    spec.kind = kind;
    if (uses_ensemble(kind)) spec.members = 5;
    return spec;
}

json to_json(const DetectorSpec& spec) {
    json doc = {{"kind", to_string(spec.kind)},
                {"window_len", spec.window_len},
                {"train", nn::to_json(spec.train)},
                {"variant", spec.variant == nn::CellVariant::Standard ? "standard" : "squashed_cell"},
                {"use_bias", spec.use_bias},
                {"z", spec.chart.z}};
    if (spec.members) doc["members"] = *spec.members;
    if (spec.resample_size) doc["resample_size"] = *spec.resample_size;
    if (spec.kind == DetectorKind::Proposed) {
        doc["variance"] = {{"hidden_dim", spec.variance.hidden_dim},
                           {"holdout_fraction", spec.variance.holdout_fraction},
                           {"train", nn::to_json(spec.variance.train)}};
    }
    return doc;
}

DetectorSpec detector_spec_from_json(const json& doc) {
    if (!doc.is_object() || !doc.contains("kind") || !doc.at("kind").is_string()) {
        throw ConfigError("detector: expected an object with a string 'kind'");
    }
    DetectorSpec spec = default_spec(detector_kind_from_string(doc.at("kind").get<std::string>()));
    const std::string path = "detector " + to_string(spec.kind) + ".";
    auto take = [&](const char* name, auto& dst) {
        if (!doc.contains(name)) return;
        try {
            dst = doc.at(name).get<std::remove_reference_t<decltype(dst)>>();
        } catch (const json::exception&) {
            throw ConfigError(path + name + ": wrong type");
        }
    };
    take("window_len", spec.window_len);
    take("use_bias", spec.use_bias);
    take("z", spec.chart.z);
    auto take_optional = [&](const char* name, std::optional<std::size_t>& dst) {
        if (!doc.contains(name)) return;
        if (doc.at(name).is_null()) {
            dst.reset();
            return;
        }
        std::size_t v = 0;
        take(name, v);
        dst = v;
    };
    take_optional("members", spec.members);
    take_optional("resample_size", spec.resample_size);
    if (doc.contains("variant")) {
        const auto v = doc.at("variant").is_string() ? doc.at("variant").get<std::string>() : "";
        if (v == "standard") {
            spec.variant = nn::CellVariant::Standard;
        } else if (v == "squashed_cell") {
            spec.variant = nn::CellVariant::SquashedCell;
        } else {
            throw ConfigError(path + "variant: expected standard or squashed_cell");
        }
    }
    try {
        if (doc.contains("train")) spec.train = nn::train_config_from_json(doc.at("train"), spec.train);
        if (doc.contains("variance")) {
            const auto& v = doc.at("variance");
            if (v.contains("hidden_dim")) spec.variance.hidden_dim = v.at("hidden_dim").get<std::size_t>();
            if (v.contains("holdout_fraction")) {
                spec.variance.holdout_fraction = v.at("holdout_fraction").get<double>();
            }
            if (v.contains("train")) {
                spec.variance.train = nn::train_config_from_json(v.at("train"), spec.variance.train);
            }
        }
    } catch (const json::exception&) {
        throw ConfigError(path + "variance: wrong type");
    } catch (const ConfigError& e) {
        throw ConfigError(path + e.what());
    }
    spec.validate();
    return spec;
}

ResidualStats residual_stats(const data::WindowedPairs& raw_pairs, const Predictor& predict) {
    const std::size_t n = raw_pairs.size();
    if (n < 2) throw InputError("residual_stats: need at least two pairs");
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n; ++i) r[i] = raw_pairs.label(i) - predict(raw_pairs.input(i));
    ResidualStats s;
    s.mean = std::accumulate(r.begin(), r.end(), 0.0) / static_cast<double>(n);
    double ss = 0.0;
    for (double v : r) ss += (v - s.mean) * (v - s.mean);
    s.sd = std::sqrt(ss / static_cast<double>(n - 1));
    if (!(s.sd > 0.0) || !std::isfinite(s.sd) || !std::isfinite(s.mean)) {
        throw DomainError("residual_stats: residual standard deviation must be positive and finite");
    }
    return s;
}

chart::Forecast ResidualChartForecaster::forecast(std::span<const double> window) const {
    if (window.size() != window_len_) throw InputError("residual chart: window length mismatch");
    return {predict_(window) + stats_.mean, stats_.sd};
}

TrainedDetector train_detector(const DetectorSpec& spec, const data::TimeSeries& train,
                               std::uint64_t master_seed) {
    const DetectorSpec one[] = {spec};
    return train_detectors(one, train, master_seed).front();
}

std::vector<TrainedDetector> train_detectors(std::span<const DetectorSpec> specs,
                                             const data::TimeSeries& train, std::uint64_t master_seed) {
    std::vector<TrainedDetector> out;
    out.reserve(specs.size());
    // Phase I ensembles keyed by their configuration.
    std::map<std::string, std::shared_ptr<const uq::EnsembleStage>> stages;
    for (const auto& spec : specs) {
        spec.validate();
        if (uses_ensemble(spec.kind)) {
            const auto cfg = spec.phase_one(master_seed);
            json key = uq::to_json(cfg);
            key.erase("variance");
            auto& stage = stages[key.dump()];
            if (!stage) stage = std::make_shared<const uq::EnsembleStage>(uq::fit_ensemble_stage(train, cfg));
            out.push_back(from_stage(spec, *stage, train, master_seed));
            continue;
        }
        if (train.size() < spec.window_len + 2) {
            throw InputError("training series too short for window " + std::to_string(spec.window_len));
        }
        const auto scaler = data::Standardizer::fit(train.values());
        const auto pairs = data::make_windows(standardized(train, scaler), spec.window_len);
        auto cfg = spec.train;
        const std::string hash = fingerprint(train.values());
        if (spec.kind == DetectorKind::AblatedB) {
            const auto seed = derive_seed(master_seed, kSingleLstmStream);
            CounterRng init(derive_seed(seed, 2));
            cfg.rng_seed = derive_seed(seed, 3);
            auto params = nn::LstmParams::random(1, cfg.hidden_dim, init, spec.use_bias);
            auto model = std::make_shared<const nn::LstmModel>(
                fit_single(nn::LstmModel(std::move(params), spec.variant, spec.use_bias), pairs, cfg));
            out.push_back(residual_detector(spec.kind, spec, train, scaled_predictor(model, scaler), hash));
        } else {
            const auto seed = derive_seed(master_seed, kRnnStream);
            CounterRng init(derive_seed(seed, 2));
            cfg.rng_seed = derive_seed(seed, 3);
            auto model = std::make_shared<const nn::RnnModel>(
                fit_single(nn::RnnModel(nn::RnnParams::random(1, cfg.hidden_dim, init)), pairs, cfg));
            out.push_back(residual_detector(spec.kind, spec, train, scaled_predictor(model, scaler), hash));
        }
    }
    return out;
}

std::vector<chart::AlarmRecord> monitor_test(const chart::Forecaster& forecaster,
                                             const data::TimeSeries& train, const data::TimeSeries& test,
                                             double z) {
    const std::size_t w = forecaster.window_len();
    if (train.size() < w) throw InputError("monitor_test: training tail shorter than the window");
    std::vector<double> joined(train.values().begin(), train.values().end());
    joined.insert(joined.end(), test.values().begin(), test.values().end());
    std::vector<chart::AlarmRecord> records;
    records.reserve(test.size());
    for (std::size_t k = 0; k < test.size(); ++k) {
        const std::size_t pos = train.size() + k;  // 0-based position in joined
        const std::span<const double> window(joined.data() + pos - w, w);
        records.push_back(chart::classify(pos + 1, joined[pos], forecaster.forecast(window), z));
    }
    return records;
}

metrics::RunOutcome run_detector(const chart::Forecaster& forecaster, const data::TimeSeries& train,
                                 const data::TimeSeries& test, double z, std::size_t tau) {
    metrics::RunOutcome run;
    run.tau = tau;
    run.length = train.size() + test.size();
    run.alarms = chart::alarm_indices(monitor_test(forecaster, train, test, z));
    run.validate();
    return run;
}

namespace {

metrics::RunOutcome run_kind(DetectorKind expected, const data::TimeSeries& train, const data::TimeSeries& test,
                             const DetectorSpec& spec, std::size_t tau, std::uint64_t master_seed) {
    if (spec.kind != expected) {
        throw ConfigError("expected a " + to_string(expected) + " spec, got " + to_string(spec.kind));
    }
    const auto det = train_detector(spec, train, master_seed);
    return run_detector(*det.forecaster, train, test, spec.chart.z, tau);
}

}  // namespace

metrics::RunOutcome run_proposed(const data::TimeSeries& train, const data::TimeSeries& test,
                                 const DetectorSpec& spec, std::size_t tau, std::uint64_t master_seed) {
    return run_kind(DetectorKind::Proposed, train, test, spec, tau, master_seed);
}

metrics::RunOutcome run_ablated_a(const data::TimeSeries& train, const data::TimeSeries& test,
                                  const DetectorSpec& spec, std::size_t tau, std::uint64_t master_seed) {
    return run_kind(DetectorKind::AblatedA, train, test, spec, tau, master_seed);
}

metrics::RunOutcome run_ablated_b(const data::TimeSeries& train, const data::TimeSeries& test,
                                  const DetectorSpec& spec, std::size_t tau, std::uint64_t master_seed) {
    return run_kind(DetectorKind::AblatedB, train, test, spec, tau, master_seed);
}

metrics::RunOutcome run_rnn_residual(const data::TimeSeries& train, const data::TimeSeries& test,
                                     const DetectorSpec& spec, std::size_t tau, std::uint64_t master_seed) {
    return run_kind(DetectorKind::RnnResidual, train, test, spec, tau, master_seed);
}

}  // namespace driftguard::bench
