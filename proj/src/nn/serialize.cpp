#include "driftguard/nn/serialize.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "driftguard/error.hpp"

namespace driftguard::nn {
namespace {

using nlohmann::json;

void check_header(const json& doc, const char* kind) {
    if (!doc.is_object() || !doc.contains("format_version") || !doc.contains("kind")) {
        throw InputError(std::string(kind) + ": missing format_version or kind");
    }
    if (doc.at("format_version").get<int>() != kModelFormatVersion) {
        throw InputError(std::string(kind) + ": unsupported format_version " +
                         doc.at("format_version").dump());
    }
    if (doc.at("kind").get<std::string>() != kind) {
        throw InputError(std::string("expected a ") + kind + " document, got " +
                         doc.at("kind").get<std::string>());
    }
}

void load_values(const json& doc, std::span<double> dst, const char* kind) {
    const auto& arr = doc.at("weights");
    if (!arr.is_array() || arr.size() != dst.size()) {
        throw InputError(std::string(kind) + ": weight count does not match dimensions");
    }
    for (std::size_t k = 0; k < dst.size(); ++k) {
        dst[k] = arr[k].get<double>();
        if (!std::isfinite(dst[k])) throw InputError(std::string(kind) + ": non-finite weight");
    }
}

json values_json(std::span<const double> values) { return json(std::vector<double>(values.begin(), values.end())); }

const char* variant_name(CellVariant v) {
    return v == CellVariant::Standard ? "standard" : "squashed_cell";
}

}  // namespace

json to_json(const LstmModel& model) {
    const auto& p = model.params();
    return {{"format_version", kModelFormatVersion},
            {"kind", "lstm"},
            {"variant", variant_name(model.variant())},
            {"use_bias", model.use_bias()},
            {"input_dim", p.input_dim()},
            {"hidden_dim", p.hidden_dim()},
            {"layout", "U[i,o,f,g](HxI) W[i,o,f,g](HxH) bias[i,o,f,g](H) dense_w(H) dense_b"},
            {"weights", values_json(p.values())}};
}

LstmModel lstm_from_json(const json& doc) {
    try {
        check_header(doc, "lstm");
        const std::string variant = doc.at("variant").get<std::string>();
        CellVariant v;
        if (variant == "standard") {
            v = CellVariant::Standard;
        } else if (variant == "squashed_cell") {
            v = CellVariant::SquashedCell;
        } else {
            throw InputError("lstm: unknown variant " + variant);
        }
        LstmParams p(doc.at("input_dim").get<std::size_t>(), doc.at("hidden_dim").get<std::size_t>());
        load_values(doc, p.values(), "lstm");
        return LstmModel(std::move(p), v, doc.at("use_bias").get<bool>());
    } catch (const json::exception& e) {
        throw InputError(std::string("lstm: ") + e.what());
    } catch (const ConfigError& e) {
        throw InputError(e.what());
    }
}

json to_json(const RnnModel& model) {
    const auto& p = model.params();
    return {{"format_version", kModelFormatVersion},
            {"kind", "elman_rnn"},
            {"input_dim", p.input_dim()},
            {"hidden_dim", p.hidden_dim()},
            {"layout", "U(HxI) W(HxH) bias(H) dense_w(H) dense_b"},
            {"weights", values_json(p.values())}};
}

RnnModel rnn_from_json(const json& doc) {
    try {
        check_header(doc, "elman_rnn");
        RnnParams p(doc.at("input_dim").get<std::size_t>(), doc.at("hidden_dim").get<std::size_t>());
        load_values(doc, p.values(), "elman_rnn");
        return RnnModel(std::move(p));
    } catch (const json::exception& e) {
        throw InputError(std::string("elman_rnn: ") + e.what());
    } catch (const ConfigError& e) {
        throw InputError(e.what());
    }
}

json to_json(const MlpModel& model) {
    const auto& p = model.params();
    return {{"format_version", kModelFormatVersion},
            {"kind", "mlp"},
            {"input_dim", p.input_dim()},
            {"hidden_dim", p.hidden_dim()},
            {"layout", "W1(HxI) b1(H) w2(H) b2"},
            {"weights", values_json(p.values())}};
}

MlpModel mlp_from_json(const json& doc) {
    try {
        check_header(doc, "mlp");
        MlpParams p(doc.at("input_dim").get<std::size_t>(), doc.at("hidden_dim").get<std::size_t>());
        load_values(doc, p.values(), "mlp");
        return MlpModel(std::move(p));
    } catch (const json::exception& e) {
        throw InputError(std::string("mlp: ") + e.what());
    } catch (const ConfigError& e) {
        throw InputError(e.what());
    }
}

json to_json(const TrainConfig& cfg) {
    return {{"learning_rate", cfg.learning_rate},
            {"max_epochs", cfg.max_epochs},
            {"batch_size", cfg.batch_size},
            {"patience", cfg.patience},
            {"hidden_dim", cfg.hidden_dim},
            {"optimizer", cfg.optimizer == OptimizerKind::Adam ? "adam" : "sgd"},
            {"rng_seed", cfg.rng_seed}};
}

TrainConfig train_config_from_json(const json& doc, const TrainConfig& base) {
    TrainConfig cfg = base;
    if (!doc.is_object()) throw ConfigError("train config must be a JSON object");
    auto field = [&](const char* name, auto& dst) {
        if (!doc.contains(name)) return;
        try {
            dst = doc.at(name).get<std::remove_reference_t<decltype(dst)>>();
        } catch (const json::exception&) {
            throw ConfigError(std::string("train.") + name + ": wrong type");
        }
    };
    field("learning_rate", cfg.learning_rate);
    field("max_epochs", cfg.max_epochs);
    field("batch_size", cfg.batch_size);
    field("patience", cfg.patience);
    field("hidden_dim", cfg.hidden_dim);
    field("rng_seed", cfg.rng_seed);
    if (doc.contains("optimizer")) {
        const auto name = doc.at("optimizer").get<std::string>();
        if (name == "adam") {
            cfg.optimizer = OptimizerKind::Adam;
        } else if (name == "sgd" || name == "gd") {
            cfg.optimizer = OptimizerKind::GradientDescent;
        } else {
            throw ConfigError("train.optimizer: expected \"adam\" or \"sgd\", got \"" + name + "\"");
        }
    }
    cfg.validate();
    return cfg;
}

}  // namespace driftguard::nn
