#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "driftguard/data/time_series.hpp"
#include "driftguard/uq/bundle.hpp"

namespace driftguard::chart {

/// Two-sided standard-normal quantile for alpha = 0.02.
inline constexpr double kDefaultZ = 2.326;

struct ChartConfig {
    double z = kDefaultZ;
    void validate() const;
};

struct ControlLimits {
    double lcl = 0.0;
    double ucl = 0.0;
};

/// f_hat -/+ z * s. Throws DomainError unless s > 0 and z > 0.
ControlLimits limits(double f_hat, double s, double z);

/// Center and spread of the one-step-ahead prediction interval.
struct Forecast {
    double center = 0.0;
    double s = 0.0;
};

/// Anything that turns the previous w observations into a prediction
/// interval. Implementations must be safe to call concurrently.
class Forecaster {
public:
    virtual ~Forecaster() = default;
    virtual std::size_t window_len() const = 0;
    virtual Forecast forecast(std::span<const double> window) const = 0;
};

/// The proposed chart: ensemble mean, sqrt(noise + model variance).
class BundleForecaster final : public Forecaster {
public:
    explicit BundleForecaster(const uq::UncertaintyBundle& bundle) : bundle_(&bundle) {}
    std::size_t window_len() const override { return bundle_->window_len; }
    Forecast forecast(std::span<const double> window) const override;

private:
    const uq::UncertaintyBundle* bundle_;
};

struct AlarmRecord {
    /// 1-based position of the monitored point in the series.
    std::size_t index = 0;
    double value = 0.0;
    double f_hat = 0.0;
    double s = 0.0;
    double lcl = 0.0;
    double ucl = 0.0;
    /// lcl <= value <= ucl; a value exactly on a limit is in control.
    bool in_control = true;
};

/// Classifies one observation against its interval.
AlarmRecord classify(std::size_t index, double value, const Forecast& fc, double z);

/// Phase II: every point from `first_index` (1-based; 0 means w + 1) to the
/// end is checked against limits built from the w observed values before it.
/// Alarms never reset the chart. Throws InputError if |series| < w + 1.
std::vector<AlarmRecord> monitor(const Forecaster& model, const data::TimeSeries& series,
                                 const ChartConfig& cfg, std::size_t first_index = 0);

std::vector<AlarmRecord> monitor(const uq::UncertaintyBundle& bundle, const data::TimeSeries& series,
                                 const ChartConfig& cfg, std::size_t first_index = 0);

/// Smallest index whose record is out of control.
std::optional<std::size_t> first_alarm(std::span<const AlarmRecord> records);

/// Indices of all out-of-control records, ascending.
std::vector<std::size_t> alarm_indices(std::span<const AlarmRecord> records);

/// Columns index,value,f_hat,s,lcl,ucl,in_control (in_control as 1/0).
void write_alarms_csv(std::span<const AlarmRecord> records, std::ostream& out);
nlohmann::json alarms_to_json(std::span<const AlarmRecord> records);

}  // namespace driftguard::chart
