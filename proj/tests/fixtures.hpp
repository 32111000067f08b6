#pragma once

// Synthetic data with known structure, shared by unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <vector>

#include "driftguard/data/time_series.hpp"
#include "driftguard/random.hpp"

namespace fixtures {

/// Noise variance with a 50-step period, ranging over e^-2 .. e^2.
inline double periodic_variance(std::size_t t) {
    return std::exp(2.0 * std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / 50.0));
}

/// x_t = sigma_t z_t with sigma_t^2 = periodic_variance(t).
inline driftguard::data::TimeSeries periodic_noise(std::size_t n, std::uint64_t seed) {
    driftguard::CounterRng rng(seed);
    std::vector<double> xs(n);
    for (std::size_t t = 0; t < n; ++t) xs[t] = std::sqrt(periodic_variance(t)) * rng.normal();
    return driftguard::data::TimeSeries(std::move(xs));
}

/// Homoscedastic N(0, 1) noise.
inline driftguard::data::TimeSeries white_noise(std::size_t n, std::uint64_t seed) {
    driftguard::CounterRng rng(seed);
    std::vector<double> xs(n);
    for (auto& x : xs) x = rng.normal();
    return driftguard::data::TimeSeries(std::move(xs));
}

inline std::vector<double> ranks(const std::vector<double>& v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
        const double avg = 0.5 * static_cast<double>(i + j);
        for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
        i = j + 1;
    }
    return r;
}

inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
    const double n = static_cast<double>(a.size());
    const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
    const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

inline double spearman(const std::vector<double>& a, const std::vector<double>& b) {
    return pearson(ranks(a), ranks(b));
}

/// Coefficient of variation (population standard deviation over mean).
/// The variance is taken about the first element so that a constant input
/// gives exactly zero.
inline double coefficient_of_variation(const std::vector<double>& v) {
    const double n = static_cast<double>(v.size());
    const double k = v.front();
    double sd = 0.0, sd2 = 0.0;
    for (double x : v) {
        sd += x - k;
        sd2 += (x - k) * (x - k);
    }
    const double var = std::max(0.0, (sd2 - sd * sd / n) / n);
    return std::sqrt(var) / (k + sd / n);
}

}  // namespace fixtures
