#include "driftguard/bench/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

#include "driftguard/error.hpp"

namespace driftguard::bench {

double standardized_score(double value, const chart::Forecast& fc) {
    if (!(fc.s > 0.0)) throw DomainError("standardized_score: s must be positive");
    return std::abs(value - fc.center) / fc.s;
}

std::vector<double> block_maxima(std::span<const double> scores, std::size_t block) {
    if (block == 0) throw InputError("block_maxima: block size must be positive");
    std::vector<double> out;
    for (std::size_t start = 0; start + block <= scores.size(); start += block) {
        out.push_back(*std::max_element(scores.begin() + static_cast<std::ptrdiff_t>(start),
                                        scores.begin() + static_cast<std::ptrdiff_t>(start + block)));
    }
    return out;
}

GumbelFit fit_gumbel(std::span<const double> maxima) {
    const std::size_t n = maxima.size();
    if (n < 2) throw InputError("fit_gumbel: need at least two maxima");
    double mean = 0.0;
    for (double m : maxima) mean += m;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double m : maxima) ss += (m - mean) * (m - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    if (!(sd > 0.0) || !std::isfinite(sd)) throw DomainError("fit_gumbel: maxima have no spread");
    GumbelFit fit;
    fit.scale = sd * std::sqrt(6.0) / std::numbers::pi;
    fit.location = mean - std::numbers::egamma * fit.scale;
    return fit;
}

double gumbel_quantile(const GumbelFit& fit, double p) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("gumbel_quantile: p must lie in (0, 1)");
    return fit.location - fit.scale * std::log(-std::log(p));
}

std::optional<double> conformal_z(std::span<const double> maxima, double target) {
    if (!(target > 0.0 && target < 1.0)) throw DomainError("conformal_z: target must lie in (0, 1)");
    const std::size_t n = maxima.size();
    const auto rank = static_cast<std::size_t>(std::ceil(static_cast<double>(n + 1) * (1.0 - target) - 1e-9));
    if (rank == 0 || rank > n) return std::nullopt;
    std::vector<double> sorted(maxima.begin(), maxima.end());
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(rank - 1), sorted.end());
    return sorted[rank - 1];
}

double calibrate_z(std::span<const double> block_maxima, double target) {
    if (!(target > 0.0 && target < 1.0)) throw DomainError("calibrate_z: target must lie in (0, 1)");
    if (const auto z = conformal_z(block_maxima, target)) return *z;
    return gumbel_quantile(fit_gumbel(block_maxima), 1.0 - target);
}

}  // namespace driftguard::bench
