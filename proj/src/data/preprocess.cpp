#include "driftguard/data/preprocess.hpp"

#include <cmath>
#include <map>

#include "driftguard/error.hpp"

namespace driftguard::data {

double at_summary(std::span<const double> amplitudes) {
    if (amplitudes.empty()) throw InputError("at_summary: empty spectrum");
    double ss = 0.0;
    for (double a : amplitudes) {
        if (!std::isfinite(a)) throw InputError("at_summary: non-finite amplitude");
        ss += a * a;
    }
    return std::sqrt(ss / 1.5);
}

TimeSeries resample_energy(const TimeSeries& readings, const EnergyResampleOptions& options) {
    using namespace std::chrono;
    if (!readings.has_timestamps()) throw InputError("resample_energy: timestamps are required");
    const minutes day{24 * 60};
    if (options.bucket <= minutes{0} || day.count() % options.bucket.count() != 0) {
        throw ConfigError("resample_energy: bucket must divide a day evenly");
    }
    const seconds bucket = options.bucket;

    struct Acc {
        double sum = 0.0;
        std::size_t n = 0;
    };
    std::map<std::int64_t, Acc> buckets;
    for (std::size_t i = 0; i < readings.size(); ++i) {
        const std::int64_t secs = readings.timestamps()[i].time_since_epoch().count();
        const std::int64_t b = bucket.count();
        const std::int64_t key = secs >= 0 ? secs / b : -((-secs + b - 1) / b);
        auto& acc = buckets[key];
        acc.sum += readings[i];
        ++acc.n;
    }

    auto service_offset = [&](minutes clock) {
        minutes off = (clock - options.day_start) % day;
        return off < minutes{0} ? off + day : off;
    };

    std::vector<double> values;
    std::vector<Timestamp> stamps;
    for (const auto& [key, acc] : buckets) {
        const Timestamp start{seconds{key * bucket.count()}};
        if (options.service) {
            const auto clock = floor<minutes>(start - floor<days>(start));
            const minutes off = service_offset(clock);
            const minutes lo = service_offset(options.service->start);
            minutes hi = service_offset(options.service->end);
            if (hi <= lo) hi += day;
            if (!(off > lo && off < hi)) continue;
        }
        values.push_back(acc.sum / static_cast<double>(acc.n));
        stamps.push_back(start);
    }
    return TimeSeries(std::move(values), std::move(stamps), readings.label());
}

}  // namespace driftguard::data
