#pragma once

#include <chrono>
#include <optional>
#include <span>

#include "driftguard/data/time_series.hpp"

namespace driftguard::data {

/// Vibration level summary sqrt(sum(a_k^2) / 1.5) of an averaged amplitude
/// spectrum. Throws InputError on empty or non-finite input.
double at_summary(std::span<const double> amplitudes);

/// Operating hours as clock times. `end` may exceed 24h to denote the
/// following calendar day (00:30 next day = 24h30m).
struct ServiceWindow {
    std::chrono::minutes start{5 * 60 + 30};
    std::chrono::minutes end{24 * 60 + 30};
};

struct EnergyResampleOptions {
    std::chrono::minutes bucket{30};
    /// Clock time at which a service day begins.
    std::chrono::minutes day_start{4 * 60};
    /// When set, a bucket is kept only if its start lies strictly inside
    /// (start, end). The defaults keep 37 half-hour buckets per day.
    std::optional<ServiceWindow> service = ServiceWindow{};
};

/// Averages timestamped readings into fixed clock-aligned buckets, then
/// drops buckets outside the service window. Output timestamps are bucket
/// starts; buckets with no readings are omitted.
TimeSeries resample_energy(const TimeSeries& readings, const EnergyResampleOptions& options = {});

}  // namespace driftguard::data
