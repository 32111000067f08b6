#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "driftguard/nn/train_config.hpp"

namespace driftguard::nn {

/// First-order update rule with its own moment state.
/// Adam uses beta1 = 0.9, beta2 = 0.999, eps = 1e-8.
class Optimizer {
public:
    Optimizer(OptimizerKind kind, double learning_rate, std::size_t num_params);

    /// Updates params in place. Throws ConfigError on a size mismatch.
    void step(std::span<double> params, std::span<const double> grads);

    std::size_t steps_taken() const noexcept { return t_; }

private:
    OptimizerKind kind_;
    double lr_;
    std::vector<double> m_;
    std::vector<double> v_;
    std::size_t t_ = 0;
};

/// Stateless single step: a fresh optimizer of the configured kind applied
/// once. For the plain rule this is theta - lr * g.
std::vector<double> optimizer_step(std::span<const double> params, std::span<const double> grads,
                                   const TrainConfig& cfg);

}  // namespace driftguard::nn
