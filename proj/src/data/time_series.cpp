#include "driftguard/data/time_series.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "driftguard/error.hpp"

namespace driftguard::data {

TimeSeries::TimeSeries(std::vector<double> values, std::vector<Timestamp> timestamps,
                       std::string label)
    : values_(std::move(values)), timestamps_(std::move(timestamps)), label_(std::move(label)) {
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) {
            throw InputError("time series: non-finite value at index " + std::to_string(i));
        }
    }
    if (!timestamps_.empty()) {
        if (timestamps_.size() != values_.size()) {
            throw InputError("time series: timestamp count differs from value count");
        }
        for (std::size_t i = 1; i < timestamps_.size(); ++i) {
            if (timestamps_[i] <= timestamps_[i - 1]) {
                throw InputError("time series: timestamps not strictly increasing at index " +
                                 std::to_string(i));
            }
        }
    }
}

TimeSeries TimeSeries::slice(std::size_t first, std::size_t count) const {
    if (first + count > values_.size()) throw InputError("time series: slice out of range");
    std::vector<double> v(values_.begin() + static_cast<std::ptrdiff_t>(first),
                          values_.begin() + static_cast<std::ptrdiff_t>(first + count));
    std::vector<Timestamp> ts;
    if (has_timestamps()) {
        ts.assign(timestamps_.begin() + static_cast<std::ptrdiff_t>(first),
                  timestamps_.begin() + static_cast<std::ptrdiff_t>(first + count));
    }
    return TimeSeries(std::move(v), std::move(ts), label_);
}

std::pair<TimeSeries, TimeSeries> split_train_test(const TimeSeries& series, std::size_t n_train) {
    if (n_train == 0 || n_train >= series.size()) {
        throw InputError("split_train_test: n_train must lie in (0, " +
                         std::to_string(series.size()) + ")");
    }
    return {series.slice(0, n_train), series.slice(n_train, series.size() - n_train)};
}

Standardizer Standardizer::fit(std::span<const double> values) {
    if (values.empty()) throw InputError("standardizer: empty input");
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    double sd = values.size() > 1 ? std::sqrt(ss / static_cast<double>(values.size() - 1)) : 0.0;
    if (!(sd > 1e-12 * std::max(1.0, std::fabs(mean)))) sd = 1.0;
    return {mean, sd};
}

Timestamp parse_timestamp(const std::string& text) {
    int y = 0;
    unsigned mo = 0, d = 0, h = 0, mi = 0, s = 0;
    char sep = 0;
    int consumed = 0;
    const int n = std::sscanf(text.c_str(), "%4d-%2u-%2u%c%2u:%2u:%2u%n", &y, &mo, &d, &sep, &h, &mi,
                              &s, &consumed);
    if (n != 7 || (sep != 'T' && sep != ' ')) {
        throw InputError("bad timestamp \"" + text + "\"");
    }
    const std::string rest = text.substr(static_cast<std::size_t>(consumed));
    if (!(rest.empty() || rest == "Z")) throw InputError("bad timestamp \"" + text + "\"");
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{mo},
                                          std::chrono::day{d}};
    if (!ymd.ok() || h > 23 || mi > 59 || s > 59) throw InputError("bad timestamp \"" + text + "\"");
    return std::chrono::sys_days{ymd} + std::chrono::hours{h} + std::chrono::minutes{mi} +
           std::chrono::seconds{s};
}

std::string format_timestamp(Timestamp t) {
    const auto day = std::chrono::floor<std::chrono::days>(t);
    const std::chrono::year_month_day ymd{day};
    const std::chrono::hh_mm_ss hms{t - day};
    char buf[64];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02lldZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<long>(hms.hours().count()), static_cast<long>(hms.minutes().count()),
                  static_cast<long long>(hms.seconds().count()));
    return buf;
}

}  // namespace driftguard::data
