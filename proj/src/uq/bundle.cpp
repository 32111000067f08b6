#include "driftguard/uq/bundle.hpp"

#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include "driftguard/data/windows.hpp"
#include "driftguard/error.hpp"
#include "driftguard/hash.hpp"
#include "driftguard/nn/serialize.hpp"
#include "driftguard/random.hpp"

namespace driftguard::uq {

using nlohmann::json;

void PhaseOneConfig::validate() const {
    if (window_len == 0) throw ConfigError("window_len must be positive");
    ensemble.validate();
    variance.train.validate();
    if (variance.hidden_dim == 0) throw ConfigError("variance.hidden_dim must be positive");
}

json to_json(const PhaseOneConfig& cfg) {
    json ens = {{"members", cfg.ensemble.members},
                {"variant", cfg.ensemble.variant == nn::CellVariant::Standard ? "standard" : "squashed_cell"},
                {"use_bias", cfg.ensemble.use_bias},
                {"train", nn::to_json(cfg.ensemble.train)}};
    ens["resample_size"] = cfg.ensemble.resample_size ? json(*cfg.ensemble.resample_size) : json(nullptr);
    return {{"window_len", cfg.window_len},
            {"master_seed", cfg.master_seed},
            {"ensemble", ens},
            {"variance",
             {{"hidden_dim", cfg.variance.hidden_dim},
              {"holdout_fraction", cfg.variance.holdout_fraction},
              {"train", nn::to_json(cfg.variance.train)}}}};
}

PhaseOneConfig phase_one_config_from_json(const json& doc, const PhaseOneConfig& base) {
    PhaseOneConfig cfg = base;
    if (!doc.is_object()) throw ConfigError("phase-one config must be a JSON object");
    auto take = [](const json& obj, const char* name, auto& dst, const std::string& path) {
        if (!obj.contains(name)) return;
        try {
            dst = obj.at(name).get<std::remove_reference_t<decltype(dst)>>();
        } catch (const json::exception&) {
            throw ConfigError(path + name + ": wrong type");
        }
    };
    take(doc, "window_len", cfg.window_len, "");
    take(doc, "master_seed", cfg.master_seed, "");
    if (doc.contains("ensemble")) {
        const auto& e = doc.at("ensemble");
        take(e, "members", cfg.ensemble.members, "ensemble.");
        take(e, "use_bias", cfg.ensemble.use_bias, "ensemble.");
        if (e.contains("resample_size") && !e.at("resample_size").is_null()) {
            std::size_t n = 0;
            take(e, "resample_size", n, "ensemble.");
            cfg.ensemble.resample_size = n;
        }
        if (e.contains("variant")) {
            const auto v = e.at("variant").get<std::string>();
            if (v == "standard") {
                cfg.ensemble.variant = nn::CellVariant::Standard;
            } else if (v == "squashed_cell") {
                cfg.ensemble.variant = nn::CellVariant::SquashedCell;
            } else {
                throw ConfigError("ensemble.variant: expected standard or squashed_cell");
            }
        }
        if (e.contains("train")) {
            try {
                cfg.ensemble.train = nn::train_config_from_json(e.at("train"), cfg.ensemble.train);
            } catch (const ConfigError& err) {
                throw ConfigError(std::string("ensemble.") + err.what());
            }
        }
    }
    if (doc.contains("variance")) {
        const auto& v = doc.at("variance");
        take(v, "hidden_dim", cfg.variance.hidden_dim, "variance.");
        take(v, "holdout_fraction", cfg.variance.holdout_fraction, "variance.");
        if (v.contains("train")) {
            try {
                cfg.variance.train = nn::train_config_from_json(v.at("train"), cfg.variance.train);
            } catch (const ConfigError& err) {
                throw ConfigError(std::string("variance.") + err.what());
            }
        }
    }
    cfg.validate();
    return cfg;
}

double total_std(double noise_variance, double model_variance) {
    const double total = noise_variance + model_variance;
    if (!(total > 0.0) || !std::isfinite(total)) {
        throw DomainError("total_std: total variance must be positive and finite");
    }
    return std::sqrt(total);
}

EnsembleStage fit_ensemble_stage(const data::TimeSeries& train, const PhaseOneConfig& cfg) {
    cfg.validate();
    if (train.size() < cfg.window_len + 2) {
        throw InputError("fit_bundle: training series of length " + std::to_string(train.size()) +
                         " is too short for window " + std::to_string(cfg.window_len));
    }
    EnsembleStage stage;
    stage.scaler = data::Standardizer::fit(train.values());
    std::vector<double> scaled(train.size());
    for (std::size_t i = 0; i < train.size(); ++i) scaled[i] = stage.scaler.apply(train[i]);
    stage.pairs = data::make_windows(scaled, cfg.window_len);
    stage.ensemble = train_ensemble(stage.pairs, cfg.ensemble, cfg.master_seed);
    stage.data_hash = fingerprint(train.values());
    return stage;
}

UncertaintyBundle complete_bundle(const EnsembleStage& stage, const PhaseOneConfig& cfg) {
    UncertaintyBundle bundle;
    bundle.window_len = cfg.window_len;
    bundle.scaler = stage.scaler;
    bundle.ensemble = stage.ensemble;
    const auto residuals = compute_residuals(bundle.ensemble, stage.pairs);
    bundle.variance_net =
        train_variance_net(residuals, cfg.variance, derive_seed(cfg.master_seed, 0x5eed)).net;
    bundle.provenance = {cfg, stage.data_hash, stage.pairs.size() + cfg.window_len};
    return bundle;
}

UncertaintyBundle fit_bundle(const data::TimeSeries& train, const PhaseOneConfig& cfg) {
    return complete_bundle(fit_ensemble_stage(train, cfg), cfg);
}

TotalPrediction predict_total_std(const UncertaintyBundle& bundle, std::span<const double> window) {
    if (window.size() != bundle.window_len) {
        throw InputError("predict_total_std: window of length " + std::to_string(window.size()) +
                         ", expected " + std::to_string(bundle.window_len));
    }
    thread_local std::vector<double> scaled;
    scaled.resize(window.size());
    for (std::size_t i = 0; i < window.size(); ++i) scaled[i] = bundle.scaler.apply(window[i]);
    const auto pred = ensemble_predict(bundle.ensemble, scaled);
    const double noise = bundle.variance_net.variance(scaled);
    const double scale2 = bundle.scaler.scale * bundle.scaler.scale;
    TotalPrediction out;
    out.f_hat = bundle.scaler.invert(pred.f_hat);
    out.model_variance = pred.model_variance * scale2;
    out.noise_variance = noise * scale2;
    out.s = bundle.scaler.scale * total_std(noise, pred.model_variance);
    return out;
}

json to_json(const UncertaintyBundle& bundle) {
    json members = json::array();
    for (const auto& m : bundle.ensemble.members) members.push_back(nn::to_json(m));
    return {{"format_version", kBundleFormatVersion},
            {"kind", "uncertainty_bundle"},
            {"window_len", bundle.window_len},
            {"scaler", {{"mean", bundle.scaler.mean}, {"scale", bundle.scaler.scale}}},
            {"ensemble", {{"seeds", bundle.ensemble.seeds}, {"members", members}}},
            {"variance_net", nn::to_json(bundle.variance_net.network())},
            {"provenance",
             {{"config", to_json(bundle.provenance.config)},
              {"data_sha256", bundle.provenance.data_hash},
              {"n_train", bundle.provenance.n_train}}}};
}

UncertaintyBundle bundle_from_json(const json& doc) {
    try {
        if (!doc.is_object() || doc.value("kind", "") != "uncertainty_bundle") {
            throw InputError("bundle: not an uncertainty_bundle document");
        }
        if (doc.at("format_version").get<int>() != kBundleFormatVersion) {
            throw InputError("bundle: unsupported format_version " + doc.at("format_version").dump());
        }
        UncertaintyBundle b;
        b.window_len = doc.at("window_len").get<std::size_t>();
        b.scaler.mean = doc.at("scaler").at("mean").get<double>();
        b.scaler.scale = doc.at("scaler").at("scale").get<double>();
        if (!(b.scaler.scale > 0.0)) throw InputError("bundle: scaler scale must be positive");
        b.ensemble.window_len = b.window_len;
        b.ensemble.seeds = doc.at("ensemble").at("seeds").get<std::vector<std::uint64_t>>();
        for (const auto& m : doc.at("ensemble").at("members")) {
            b.ensemble.members.push_back(nn::lstm_from_json(m));
        }
        if (b.ensemble.members.size() < 2) throw InputError("bundle: ensemble needs at least two members");
        if (b.ensemble.seeds.size() != b.ensemble.members.size()) {
            throw InputError("bundle: seed count does not match member count");
        }
        for (const auto& m : b.ensemble.members) {
            if (m.params().input_dim() != 1) throw InputError("bundle: members must be univariate");
        }
        b.variance_net = VarianceNet(nn::mlp_from_json(doc.at("variance_net")));
        if (b.variance_net.window_len() != b.window_len) {
            throw InputError("bundle: variance net width " + std::to_string(b.variance_net.window_len()) +
                             " differs from window_len " + std::to_string(b.window_len));
        }
        const auto& prov = doc.at("provenance");
        b.provenance.config = phase_one_config_from_json(prov.at("config"));
        if (b.provenance.config.window_len != b.window_len) {
            throw InputError("bundle: provenance window_len disagrees with bundle");
        }
        b.provenance.data_hash = prov.at("data_sha256").get<std::string>();
        b.provenance.n_train = prov.at("n_train").get<std::size_t>();
        return b;
    } catch (const json::exception& e) {
        throw InputError(std::string("bundle: ") + e.what());
    } catch (const ConfigError& e) {
        throw InputError(std::string("bundle: ") + e.what());
    }
}

void save_bundle(const UncertaintyBundle& bundle, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path.string());
    out << to_json(bundle).dump(1) << '\n';
}

UncertaintyBundle load_bundle(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw InputError(path.string() + ": " + e.what());
    }
    return bundle_from_json(doc);
}

}  // namespace driftguard::uq
