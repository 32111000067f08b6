#include "driftguard/nn/optimizer.hpp"

#include <cmath>

#include "driftguard/error.hpp"

namespace driftguard::nn {

namespace {
constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kEps = 1e-8;
}  // namespace

Optimizer::Optimizer(OptimizerKind kind, double learning_rate, std::size_t num_params)
    : kind_(kind), lr_(learning_rate) {
    if (!(learning_rate > 0.0)) throw ConfigError("optimizer: learning rate must be > 0");
    if (kind_ == OptimizerKind::Adam) {
        m_.assign(num_params, 0.0);
        v_.assign(num_params, 0.0);
    }
}

void Optimizer::step(std::span<double> params, std::span<const double> grads) {
    if (params.size() != grads.size()) throw ConfigError("optimizer: shape mismatch");
    ++t_;
    if (kind_ == OptimizerKind::GradientDescent) {
        for (std::size_t k = 0; k < params.size(); ++k) params[k] -= lr_ * grads[k];
        return;
    }
    if (m_.size() != params.size()) throw ConfigError("optimizer: shape mismatch");
    const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(t_));
    const double step_size = lr_ * std::sqrt(c2) / c1;
    for (std::size_t k = 0; k < params.size(); ++k) {
        m_[k] = kBeta1 * m_[k] + (1.0 - kBeta1) * grads[k];
        v_[k] = kBeta2 * v_[k] + (1.0 - kBeta2) * grads[k] * grads[k];
        params[k] -= step_size * m_[k] / (std::sqrt(v_[k]) + kEps * std::sqrt(c2));
    }
}

std::vector<double> optimizer_step(std::span<const double> params, std::span<const double> grads,
                                   const TrainConfig& cfg) {
    std::vector<double> out(params.begin(), params.end());
    Optimizer opt(cfg.optimizer, cfg.learning_rate, out.size());
    opt.step(out, grads);
    return out;
}

}  // namespace driftguard::nn
