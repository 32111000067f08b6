#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "driftguard/error.hpp"
#include "driftguard/nn/model.hpp"

namespace driftguard::nn {

/// Central finite differences of the mean batch loss, one parameter at a time.
template <TrainableModel Model>
std::vector<double> numeric_gradient(Model model, const SampleView& data,
                                     std::span<const std::size_t> batch, LossKind kind,
                                     double epsilon) {
    if (!(epsilon > 0.0)) throw DomainError("numeric_gradient: epsilon must be > 0");
    auto theta = model.parameters();
    std::vector<double> out(theta.size());
    for (std::size_t k = 0; k < theta.size(); ++k) {
        const double saved = theta[k];
        theta[k] = saved + epsilon;
        const double up = model.loss(data, batch, kind);
        theta[k] = saved - epsilon;
        const double down = model.loss(data, batch, kind);
        theta[k] = saved;
        out[k] = (up - down) / (2.0 * epsilon);
    }
    return out;
}

/// max_k |a_k - n_k| / max(|a_k|, |n_k|, 1e-8).
inline double max_relative_error(std::span<const double> analytic, std::span<const double> numeric) {
    if (analytic.size() != numeric.size()) throw InputError("grad_check: size mismatch");
    double worst = 0.0;
    for (std::size_t k = 0; k < analytic.size(); ++k) {
        const double denom = std::max({std::fabs(analytic[k]), std::fabs(numeric[k]), 1e-8});
        worst = std::max(worst, std::fabs(analytic[k] - numeric[k]) / denom);
    }
    return worst;
}

/// Largest relative disagreement between backpropagated and finite-difference
/// gradients over every parameter.
template <TrainableModel Model>
double grad_check(const Model& model, const SampleView& data, std::span<const std::size_t> batch,
                  LossKind kind, double epsilon) {
    std::vector<double> analytic(model.parameters().size());
    model.loss_and_gradient(data, batch, kind, analytic);
    return max_relative_error(analytic, numeric_gradient(model, data, batch, kind, epsilon));
}

}  // namespace driftguard::nn
