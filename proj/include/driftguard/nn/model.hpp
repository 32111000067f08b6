#pragma once

#include <concepts>
#include <cstddef>
#include <span>

namespace driftguard::nn {

/// Read-only view over supervised samples: row-major inputs of fixed width
/// plus one scalar target per row.
struct SampleView {
    std::size_t width = 0;
    std::span<const double> inputs;
    std::span<const double> targets;

    std::size_t size() const noexcept { return targets.size(); }
    std::span<const double> input(std::size_t i) const noexcept {
        return inputs.subspan(i * width, width);
    }
};

/// MeanSquared: target is the next value. GaussianNll: the network output
/// is a log-variance and the target a squared residual.
enum class LossKind { MeanSquared, GaussianNll };

/// Variance floor used by the Gaussian likelihood.
inline constexpr double kVarianceFloor = 1e-8;

/// Per-sample loss for a scalar network output; writes dloss/doutput.
double output_loss(LossKind kind, double output, double target, double& d_output);

/// What the trainer, optimizer and gradient checker need from a network.
template <class M>
concept TrainableModel = requires(M m, const M cm, const SampleView& view,
                                  std::span<const std::size_t> batch, LossKind kind,
                                  std::span<double> grad, std::span<const double> x) {
    { m.parameters() } -> std::same_as<std::span<double>>;
    { cm.parameters() } -> std::same_as<std::span<const double>>;
    { cm.predict(x) } -> std::convertible_to<double>;
    { cm.loss(view, batch, kind) } -> std::convertible_to<double>;
    { cm.loss_and_gradient(view, batch, kind, grad) } -> std::convertible_to<double>;
};

}  // namespace driftguard::nn
