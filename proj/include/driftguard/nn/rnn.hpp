#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "driftguard/nn/model.hpp"
#include "driftguard/random.hpp"

namespace driftguard::nn {

/// Elman cell h_t = tanh(U x_t + W h_{t-1} + bias) with a scalar dense head.
/// Layout: U (H x I), W (H x H), bias (H), dense weights (H), dense bias (1).
class RnnParams {
public:
    RnnParams() = default;
    RnnParams(std::size_t input_dim, std::size_t hidden_dim);

    static RnnParams random(std::size_t input_dim, std::size_t hidden_dim, CounterRng& rng);
    static std::size_t count(std::size_t input_dim, std::size_t hidden_dim) noexcept;

    std::size_t input_dim() const noexcept { return input_dim_; }
    std::size_t hidden_dim() const noexcept { return hidden_dim_; }

    std::span<double> input_weights() noexcept;
    std::span<const double> input_weights() const noexcept;
    std::span<double> recurrent_weights() noexcept;
    std::span<const double> recurrent_weights() const noexcept;
    std::span<double> bias() noexcept;
    std::span<const double> bias() const noexcept;
    std::span<double> dense_weights() noexcept;
    std::span<const double> dense_weights() const noexcept;
    double& dense_bias() noexcept { return values_.back(); }
    double dense_bias() const noexcept { return values_.back(); }

    std::span<double> values() noexcept { return values_; }
    std::span<const double> values() const noexcept { return values_; }

private:
    std::size_t input_dim_ = 0;
    std::size_t hidden_dim_ = 0;
    std::vector<double> values_;
};

std::vector<double> rnn_cell_forward(std::span<const double> x, std::span<const double> h_prev,
                                     const RnnParams& p);

double rnn_model_forward(std::span<const double> window, const RnnParams& p);

class RnnModel {
public:
    RnnModel() = default;
    explicit RnnModel(RnnParams params) : params_(std::move(params)) {}

    const RnnParams& params() const noexcept { return params_; }
    RnnParams& params() noexcept { return params_; }

    std::span<double> parameters() noexcept { return params_.values(); }
    std::span<const double> parameters() const noexcept { return params_.values(); }

    double predict(std::span<const double> window) const { return rnn_model_forward(window, params_); }
    double loss(const SampleView& data, std::span<const std::size_t> batch, LossKind kind) const;
    double loss_and_gradient(const SampleView& data, std::span<const std::size_t> batch,
                             LossKind kind, std::span<double> grad) const;

private:
    RnnParams params_;
};

static_assert(TrainableModel<RnnModel>);

}  // namespace driftguard::nn
