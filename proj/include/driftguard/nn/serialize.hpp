#pragma once

#include <json.hpp>

#include "driftguard/nn/lstm.hpp"
#include "driftguard/nn/mlp.hpp"
#include "driftguard/nn/rnn.hpp"
#include "driftguard/nn/train_config.hpp"

namespace driftguard::nn {

inline constexpr int kModelFormatVersion = 1;

// Doubles are written in shortest round-trip form, so load(save(m)) == m
// bit for bit. Loaders verify format_version and dimensions and throw
// InputError on any inconsistency.

nlohmann::json to_json(const LstmModel& model);
LstmModel lstm_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const RnnModel& model);
RnnModel rnn_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const MlpModel& model);
MlpModel mlp_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const TrainConfig& cfg);
/// Missing fields keep their defaults; unknown optimizer names are rejected.
TrainConfig train_config_from_json(const nlohmann::json& doc, const TrainConfig& base = {});

}  // namespace driftguard::nn
