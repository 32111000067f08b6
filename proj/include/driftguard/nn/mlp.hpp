#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "driftguard/nn/model.hpp"
#include "driftguard/random.hpp"

namespace driftguard::nn {

/// One tanh hidden layer, scalar linear output.
/// Layout: W1 (H x I), b1 (H), w2 (H), b2 (1).
class MlpParams {
public:
    MlpParams() = default;
    MlpParams(std::size_t input_dim, std::size_t hidden_dim);

    static MlpParams random(std::size_t input_dim, std::size_t hidden_dim, CounterRng& rng);
    static std::size_t count(std::size_t input_dim, std::size_t hidden_dim) noexcept;

    std::size_t input_dim() const noexcept { return input_dim_; }
    std::size_t hidden_dim() const noexcept { return hidden_dim_; }

    std::span<double> hidden_weights() noexcept;
    std::span<const double> hidden_weights() const noexcept;
    std::span<double> hidden_bias() noexcept;
    std::span<const double> hidden_bias() const noexcept;
    std::span<double> output_weights() noexcept;
    std::span<const double> output_weights() const noexcept;
    double& output_bias() noexcept { return values_.back(); }
    double output_bias() const noexcept { return values_.back(); }

    std::span<double> values() noexcept { return values_; }
    std::span<const double> values() const noexcept { return values_; }

private:
    std::size_t input_dim_ = 0;
    std::size_t hidden_dim_ = 0;
    std::vector<double> values_;
};

class MlpModel {
public:
    MlpModel() = default;
    explicit MlpModel(MlpParams params) : params_(std::move(params)) {}

    const MlpParams& params() const noexcept { return params_; }
    MlpParams& params() noexcept { return params_; }

    std::span<double> parameters() noexcept { return params_.values(); }
    std::span<const double> parameters() const noexcept { return params_.values(); }

    /// Raw network output. Throws InputError on width mismatch.
    double predict(std::span<const double> x) const;
    double loss(const SampleView& data, std::span<const std::size_t> batch, LossKind kind) const;
    double loss_and_gradient(const SampleView& data, std::span<const std::size_t> batch,
                             LossKind kind, std::span<double> grad) const;

private:
    MlpParams params_;
};

static_assert(TrainableModel<MlpModel>);

}  // namespace driftguard::nn
