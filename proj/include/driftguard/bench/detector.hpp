#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "driftguard/chart/chart.hpp"
#include "driftguard/data/time_series.hpp"
#include "driftguard/data/windows.hpp"
#include "driftguard/metrics/metrics.hpp"
#include "driftguard/uq/bundle.hpp"

namespace driftguard::bench {

/// The four compared detectors.
///   proposed:     bootstrap ensemble + noise-variance network.
///   ablated_a:    bootstrap ensemble, constant-width residual chart.
///   ablated_b:    single LSTM, constant-width residual chart.
///   rnn_residual: single Elman RNN, constant-width residual chart.
enum class DetectorKind { Proposed, AblatedA, AblatedB, RnnResidual };

inline constexpr DetectorKind kAllDetectors[] = {DetectorKind::Proposed, DetectorKind::AblatedA,
                                                  DetectorKind::AblatedB, DetectorKind::RnnResidual};

std::string to_string(DetectorKind kind);
/// Throws ConfigError on an unknown name.
DetectorKind detector_kind_from_string(const std::string& name);

/// Whether the family uses the bootstrap ensemble.
constexpr bool uses_ensemble(DetectorKind k) noexcept {
    return k == DetectorKind::Proposed || k == DetectorKind::AblatedA;
}

struct DetectorSpec {
    DetectorKind kind = DetectorKind::Proposed;
    std::size_t window_len = 5;
    nn::TrainConfig train;
    /// Ensemble size b and bag size n; only for ensemble families.
    std::optional<std::size_t> members;
    std::optional<std::size_t> resample_size;
    /// Variance network; only for the proposed detector.
    uq::VarianceNetConfig variance;
    nn::CellVariant variant = nn::CellVariant::Standard;
    bool use_bias = true;
    chart::ChartConfig chart;

    /// Ensemble families need members >= 2; the others must not set b or n.
    void validate() const;
    /// Phase I settings derived from this spec (members default to 5).
    uq::PhaseOneConfig phase_one(std::uint64_t master_seed) const;
};

/// Spec with defaults for `kind` (b = 5 for the ensemble families).
DetectorSpec default_spec(DetectorKind kind);

nlohmann::json to_json(const DetectorSpec& spec);
/// Missing fields keep the defaults of the named kind. Throws ConfigError.
DetectorSpec detector_spec_from_json(const nlohmann::json& doc);

/// Raw-unit point predictor over a window of raw values.
using Predictor = std::function<double(std::span<const double>)>;

struct ResidualStats {
    double mean = 0.0;
    /// Sample standard deviation (denominator n - 1).
    double sd = 0.0;
};

/// Statistics of label - predict(input) over raw-unit pairs. Throws
/// InputError for fewer than two pairs and DomainError if sd is not > 0.
ResidualStats residual_stats(const data::WindowedPairs& raw_pairs, const Predictor& predict);

/// Constant-width chart around a point predictor: center = f_hat + mean,
/// s = sd.
class ResidualChartForecaster final : public chart::Forecaster {
public:
    ResidualChartForecaster(std::size_t window_len, Predictor predict, ResidualStats stats)
        : window_len_(window_len), predict_(std::move(predict)), stats_(stats) {}

    std::size_t window_len() const override { return window_len_; }
    chart::Forecast forecast(std::span<const double> window) const override;
    const ResidualStats& stats() const noexcept { return stats_; }

private:
    std::size_t window_len_;
    Predictor predict_;
    ResidualStats stats_;
};

/// A Phase I result ready for monitoring.
struct TrainedDetector {
    DetectorKind kind = DetectorKind::Proposed;
    std::shared_ptr<const chart::Forecaster> forecaster;
    /// Fingerprint of the training values.
    std::string data_hash;
};

/// Trains every spec on `train`. Ensemble families with identical Phase I
/// settings share one ensemble. All detectors derive their seeds from
/// `master_seed`.
std::vector<TrainedDetector> train_detectors(std::span<const DetectorSpec> specs,
                                             const data::TimeSeries& train, std::uint64_t master_seed);

TrainedDetector train_detector(const DetectorSpec& spec, const data::TimeSeries& train,
                               std::uint64_t master_seed);

/// Monitors test point k (0-based) as global index n_train + k + 1, using
/// the tail of `train` as the first window. Alarm indices are global.
std::vector<chart::AlarmRecord> monitor_test(const chart::Forecaster& forecaster,
                                             const data::TimeSeries& train, const data::TimeSeries& test,
                                             double z);

metrics::RunOutcome run_detector(const chart::Forecaster& forecaster, const data::TimeSeries& train,
                                 const data::TimeSeries& test, double z, std::size_t tau);

/// Phase I on `train` and Phase II on `test` for one family. `tau` is the
/// global change index.
metrics::RunOutcome run_proposed(const data::TimeSeries& train, const data::TimeSeries& test,
                                 const DetectorSpec& spec, std::size_t tau, std::uint64_t master_seed);
metrics::RunOutcome run_ablated_a(const data::TimeSeries& train, const data::TimeSeries& test,
                                  const DetectorSpec& spec, std::size_t tau, std::uint64_t master_seed);
metrics::RunOutcome run_ablated_b(const data::TimeSeries& train, const data::TimeSeries& test,
                                  const DetectorSpec& spec, std::size_t tau, std::uint64_t master_seed);
metrics::RunOutcome run_rnn_residual(const data::TimeSeries& train, const data::TimeSeries& test,
                                     const DetectorSpec& spec, std::size_t tau, std::uint64_t master_seed);

}  // namespace driftguard::bench
