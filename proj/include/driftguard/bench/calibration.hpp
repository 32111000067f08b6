#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "driftguard/chart/chart.hpp"

namespace driftguard::bench {

/// |value - center| / s: the smallest z at which the point is in control.
double standardized_score(double value, const chart::Forecast& fc);

/// Maxima of consecutive non-overlapping blocks; a short tail is dropped.
std::vector<double> block_maxima(std::span<const double> scores, std::size_t block);

struct GumbelFit {
    double location = 0.0;
    double scale = 1.0;
};

/// Method-of-moments fit. Throws InputError for fewer than two maxima and
/// DomainError when they have no spread.
GumbelFit fit_gumbel(std::span<const double> maxima);

/// Inverse CDF of exp(-exp(-(x - location) / scale)). 0 < p < 1.
double gumbel_quantile(const GumbelFit& fit, double p);

/// Split-conformal threshold: the ceil((n + 1)(1 - target))-th smallest
/// maximum, exceeded by a fresh in-control maximum with probability at most
/// `target`. Empty when n is too small for that rank (n < 1/target - 1).
std::optional<double> conformal_z(std::span<const double> maxima, double target);

/// Chart multiplier whose run-level false alarm probability over one block
/// is `target`, from in-control block maxima of standardized scores. Uses
/// the conformal threshold when there are enough maxima and extrapolates a
/// Gumbel fit otherwise.
double calibrate_z(std::span<const double> block_maxima, double target);

}  // namespace driftguard::bench
