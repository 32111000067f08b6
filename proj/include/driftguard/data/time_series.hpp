#pragma once

#include <chrono>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace driftguard::data {

using Timestamp = std::chrono::sys_seconds;

/// Ordered observations with optional strictly increasing UTC timestamps.
class TimeSeries {
public:
    TimeSeries() = default;
    /// Throws InputError on non-finite values or bad timestamps.
    explicit TimeSeries(std::vector<double> values, std::vector<Timestamp> timestamps = {},
                        std::string label = {});

    std::span<const double> values() const noexcept { return values_; }
    std::span<const Timestamp> timestamps() const noexcept { return timestamps_; }
    bool has_timestamps() const noexcept { return !timestamps_.empty(); }
    const std::string& label() const noexcept { return label_; }
    void set_label(std::string label) { label_ = std::move(label); }

    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }
    double operator[](std::size_t i) const noexcept { return values_[i]; }

    /// Elements [first, first + count).
    TimeSeries slice(std::size_t first, std::size_t count) const;

private:
    std::vector<double> values_;
    std::vector<Timestamp> timestamps_;
    std::string label_;
};

/// Prefix of n_train points and the remaining suffix. 0 < n_train < size.
std::pair<TimeSeries, TimeSeries> split_train_test(const TimeSeries& series, std::size_t n_train);

/// Mean/scale affine map fitted on training data; scale falls back to 1 for
/// (near-)constant data.
struct Standardizer {
    double mean = 0.0;
    double scale = 1.0;

    static Standardizer fit(std::span<const double> values);
    double apply(double x) const noexcept { return (x - mean) / scale; }
    double invert(double z) const noexcept { return z * scale + mean; }
};

/// ISO-8601 "YYYY-MM-DDTHH:MM:SS[Z]" (a space may replace the T).
Timestamp parse_timestamp(const std::string& text);
std::string format_timestamp(Timestamp t);

}  // namespace driftguard::data
