#include "driftguard/nn/loss.hpp"

#include <algorithm>
#include <cmath>

#include "driftguard/error.hpp"
#include "driftguard/nn/model.hpp"
#include "driftguard/nn/train_config.hpp"

namespace driftguard::nn {

double output_loss(LossKind kind, double output, double target, double& d_output) {
    if (kind == LossKind::MeanSquared) {
        const double diff = output - target;
        d_output = 2.0 * diff;
        return diff * diff;
    }
    const double raw = std::exp(output);
    if (raw < kVarianceFloor) {
        d_output = 0.0;
        return 0.5 * (target / kVarianceFloor + std::log(kVarianceFloor));
    }
    const double ratio = target / raw;
    d_output = 0.5 * (1.0 - ratio);
    return 0.5 * (ratio + output);
}

double mse_loss(std::span<const double> preds, std::span<const double> labels) {
    if (preds.size() != labels.size()) {
        throw InputError("mse_loss: length mismatch");
    }
    if (preds.empty()) {
        throw InputError("mse_loss: empty input");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        const double d = preds[i] - labels[i];
        sum += d * d;
    }
    return sum / static_cast<double>(preds.size());
}

double nll_loss(std::span<const double> r2, std::span<const double> sigma2) {
    if (r2.size() != sigma2.size()) {
        throw InputError("nll_loss: length mismatch");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < r2.size(); ++i) {
        if (!(sigma2[i] > 0.0)) {
            throw DomainError("nll_loss: variance must be strictly positive");
        }
        sum += r2[i] / sigma2[i] + std::log(sigma2[i]);
    }
    return 0.5 * sum;
}

void TrainConfig::validate() const {
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
        throw ConfigError("train.learning_rate must be > 0");
    }
    if (max_epochs == 0) throw ConfigError("train.max_epochs must be positive");
    if (batch_size == 0) throw ConfigError("train.batch_size must be positive");
    if (patience == 0) throw ConfigError("train.patience must be positive");
    if (patience > max_epochs) throw ConfigError("train.patience must not exceed train.max_epochs");
    if (hidden_dim == 0) throw ConfigError("train.hidden_dim must be positive");
}

}  // namespace driftguard::nn
