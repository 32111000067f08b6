#pragma once

#include <span>

namespace driftguard::nn {

/// Mean of squared differences. Equal, nonzero lengths.
double mse_loss(std::span<const double> preds, std::span<const double> labels);

/// Gaussian negative log-likelihood without the constant:
/// 0.5 * sum(r2 / sigma2 + ln sigma2). Throws DomainError if any sigma2 <= 0.
double nll_loss(std::span<const double> r2, std::span<const double> sigma2);

}  // namespace driftguard::nn
