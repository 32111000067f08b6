#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "driftguard/nn/mlp.hpp"
#include "driftguard/nn/train.hpp"
#include "driftguard/uq/ensemble.hpp"

namespace driftguard::uq {

struct VarianceNetConfig {
    std::size_t hidden_dim = 16;
    nn::TrainConfig train;
    /// Trailing share of the residual set held out for early stopping.
    double holdout_fraction = 0.1;
};

/// Feed-forward network whose output is a log-variance; the predicted noise
/// variance is exp(output), floored at nn::kVarianceFloor.
class VarianceNet {
public:
    VarianceNet() = default;
    explicit VarianceNet(nn::MlpModel net) : net_(std::move(net)) {}

    double variance(std::span<const double> x) const;
    std::size_t window_len() const noexcept { return net_.params().input_dim(); }
    const nn::MlpModel& network() const noexcept { return net_; }

private:
    nn::MlpModel net_;
};

struct VarianceNetFit {
    VarianceNet net;
    nn::TrainingHistory history;
};

/// Minimizes the Gaussian negative log-likelihood of the squared residuals.
/// Output weights start at zero and the output bias at log(mean r^2), so
/// training begins at the best constant variance.
VarianceNetFit train_variance_net(const ResidualSet& residuals, const VarianceNetConfig& cfg,
                                  std::uint64_t seed);

}  // namespace driftguard::uq
