#pragma once

#include <cstddef>
#include <cstdint>

namespace driftguard::nn {

enum class OptimizerKind { GradientDescent, Adam };

struct TrainConfig {
    double learning_rate = 0.01;
    std::size_t max_epochs = 300;
    std::size_t batch_size = 32;
    /// Epochs without validation improvement before stopping.
    std::size_t patience = 20;
    std::size_t hidden_dim = 32;
    OptimizerKind optimizer = OptimizerKind::Adam;
    std::uint64_t rng_seed = 0;

    /// Throws ConfigError on the first violated constraint.
    void validate() const;
};

}  // namespace driftguard::nn
