#include "driftguard/chart/chart.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "driftguard/data/csv.hpp"
#include "driftguard/error.hpp"

namespace driftguard::chart {

void ChartConfig::validate() const {
    if (!(z > 0.0) || !std::isfinite(z)) throw ConfigError("chart.z must be a positive number");
}

ControlLimits limits(double f_hat, double s, double z) {
    if (!(s > 0.0)) throw DomainError("limits: s must be positive");
    if (!(z > 0.0)) throw DomainError("limits: z must be positive");
    return {f_hat - z * s, f_hat + z * s};
}

Forecast BundleForecaster::forecast(std::span<const double> window) const {
    const auto pred = uq::predict_total_std(*bundle_, window);
    return {pred.f_hat, pred.s};
}

AlarmRecord classify(std::size_t index, double value, const Forecast& fc, double z) {
    const auto lim = limits(fc.center, fc.s, z);
    return {index, value, fc.center, fc.s, lim.lcl, lim.ucl, lim.lcl <= value && value <= lim.ucl};
}

std::vector<AlarmRecord> monitor(const Forecaster& model, const data::TimeSeries& series,
                                 const ChartConfig& cfg, std::size_t first_index) {
    cfg.validate();
    const std::size_t w = model.window_len();
    if (series.size() < w + 1) {
        throw InputError("monitor: series of length " + std::to_string(series.size()) +
                         " is too short for window " + std::to_string(w));
    }
    if (first_index == 0) first_index = w + 1;
    if (first_index < w + 1) throw InputError("monitor: first_index must be at least w + 1");

    const auto values = series.values();
    std::vector<AlarmRecord> records;
    records.reserve(series.size() + 1 - std::min(first_index, series.size() + 1));
    for (std::size_t idx = first_index; idx <= series.size(); ++idx) {
        // point idx (1-based) is values[idx - 1]; its window is the w values before it
        const auto window = values.subspan(idx - 1 - w, w);
        records.push_back(classify(idx, values[idx - 1], model.forecast(window), cfg.z));
    }
    return records;
}

std::vector<AlarmRecord> monitor(const uq::UncertaintyBundle& bundle, const data::TimeSeries& series,
                                 const ChartConfig& cfg, std::size_t first_index) {
    return monitor(BundleForecaster(bundle), series, cfg, first_index);
}

std::optional<std::size_t> first_alarm(std::span<const AlarmRecord> records) {
    std::optional<std::size_t> first;
    for (const auto& r : records) {
        if (!r.in_control && (!first || r.index < *first)) first = r.index;
    }
    return first;
}

std::vector<std::size_t> alarm_indices(std::span<const AlarmRecord> records) {
    std::vector<std::size_t> out;
    for (const auto& r : records) {
        if (!r.in_control) out.push_back(r.index);
    }
    std::sort(out.begin(), out.end());
    return out;
}

void write_alarms_csv(std::span<const AlarmRecord> records, std::ostream& out) {
    using data::format_double;
    out << "index,value,f_hat,s,lcl,ucl,in_control\n";
    for (const auto& r : records) {
        out << r.index << ',' << format_double(r.value) << ',' << format_double(r.f_hat) << ','
            << format_double(r.s) << ',' << format_double(r.lcl) << ',' << format_double(r.ucl) << ','
            << (r.in_control ? 1 : 0) << '\n';
    }
}

nlohmann::json alarms_to_json(std::span<const AlarmRecord> records) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : records) {
        arr.push_back({{"index", r.index},
                       {"value", r.value},
                       {"f_hat", r.f_hat},
                       {"s", r.s},
                       {"lcl", r.lcl},
                       {"ucl", r.ucl},
                       {"in_control", r.in_control}});
    }
    return arr;
}

}  // namespace driftguard::chart
