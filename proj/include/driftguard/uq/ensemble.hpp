#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "driftguard/data/windows.hpp"
#include "driftguard/nn/lstm.hpp"
#include "driftguard/nn/train.hpp"
#include "driftguard/nn/train_config.hpp"

namespace driftguard::uq {

struct EnsembleConfig {
    /// Number of bootstrap members; at least 2.
    std::size_t members = 5;
    /// Draws per bag; defaults to the number of pairs.
    std::optional<std::size_t> resample_size;
    nn::TrainConfig train;
    nn::CellVariant variant = nn::CellVariant::Standard;
    bool use_bias = true;

    void validate() const;
};

/// Bootstrap ensemble of LSTM predictors sharing one window length.
struct EnsembleModel {
    std::vector<nn::LstmModel> members;
    /// Per-member seeds, derived from the master seed.
    std::vector<std::uint64_t> seeds;
    std::size_t window_len = 0;
    /// Training curves; not serialized.
    std::vector<nn::TrainingHistory> histories;
};

struct EnsemblePrediction {
    double f_hat = 0.0;
    /// Sample variance of member outputs (denominator b - 1).
    double model_variance = 0.0;
};

/// Mean and b-1 sample variance of member outputs. Needs >= 2 outputs.
EnsemblePrediction aggregate(std::span<const double> member_outputs);

/// Trains member j on bootstrap bag j with its out-of-bag pairs as the
/// early-stopping set (a 10% suffix of the pairs when the bag covers all of
/// them). Throws NumericError naming the member on divergence.
EnsembleModel train_ensemble(const data::WindowedPairs& pairs, const EnsembleConfig& cfg,
                             std::uint64_t master_seed);

/// Throws InputError on a width mismatch.
EnsemblePrediction ensemble_predict(const EnsembleModel& ensemble, std::span<const double> x);

/// Training pairs (x_i, r_i^2) for the noise-variance network.
struct ResidualSet {
    std::size_t window_len = 0;
    std::vector<double> inputs;  // row-major, size() x window_len
    std::vector<double> r2;

    std::size_t size() const noexcept { return r2.size(); }
    nn::SampleView view() const noexcept { return {window_len, inputs, r2}; }
};

/// max((label - f_hat)^2 - model_variance, 0).
double noise_residual(double label, double f_hat, double model_variance) noexcept;

ResidualSet compute_residuals(const EnsembleModel& ensemble, const data::WindowedPairs& pairs);

}  // namespace driftguard::uq
