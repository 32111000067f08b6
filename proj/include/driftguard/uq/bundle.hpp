#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>

#include <json.hpp>

#include "driftguard/data/time_series.hpp"
#include "driftguard/data/windows.hpp"
#include "driftguard/uq/ensemble.hpp"
#include "driftguard/uq/variance_net.hpp"

namespace driftguard::uq {

inline constexpr int kBundleFormatVersion = 1;

struct PhaseOneConfig {
    std::size_t window_len = 5;
    EnsembleConfig ensemble;
    VarianceNetConfig variance;
    std::uint64_t master_seed = 0;

    void validate() const;
};

nlohmann::json to_json(const PhaseOneConfig& cfg);
/// Missing fields keep the values in `base`. Throws ConfigError naming the
/// offending field.
PhaseOneConfig phase_one_config_from_json(const nlohmann::json& doc, const PhaseOneConfig& base = {});

struct Provenance {
    PhaseOneConfig config;
    std::string data_hash;
    std::size_t n_train = 0;
};

/// Everything Phase II needs: the ensemble, the noise-variance network and
/// the affine scaling both were trained under.
struct UncertaintyBundle {
    data::Standardizer scaler;
    EnsembleModel ensemble;
    VarianceNet variance_net;
    std::size_t window_len = 0;
    Provenance provenance;
};

struct TotalPrediction {
    double f_hat = 0.0;
    /// sqrt(noise_variance + model_variance), in data units.
    double s = 0.0;
    double model_variance = 0.0;
    double noise_variance = 0.0;
};

/// sqrt(noise_variance + model_variance). Throws DomainError unless > 0.
double total_std(double noise_variance, double model_variance);

/// Scaling and bootstrap-ensemble part of Phase I.
struct EnsembleStage {
    data::Standardizer scaler;
    /// Standardized training pairs.
    data::WindowedPairs pairs;
    EnsembleModel ensemble;
    std::string data_hash;
};

EnsembleStage fit_ensemble_stage(const data::TimeSeries& train, const PhaseOneConfig& cfg);

/// Residual extraction and the noise-variance network on top of a fitted
/// ensemble stage.
UncertaintyBundle complete_bundle(const EnsembleStage& stage, const PhaseOneConfig& cfg);

/// Phase I on a training series: windows, bootstrap ensemble, residual
/// extraction and the noise-variance network.
UncertaintyBundle fit_bundle(const data::TimeSeries& train, const PhaseOneConfig& cfg);

/// Prediction and total standard deviation for one raw-unit window.
TotalPrediction predict_total_std(const UncertaintyBundle& bundle, std::span<const double> window);

nlohmann::json to_json(const UncertaintyBundle& bundle);
/// Verifies format_version and that every component agrees on the window.
UncertaintyBundle bundle_from_json(const nlohmann::json& doc);

void save_bundle(const UncertaintyBundle& bundle, const std::filesystem::path& path);
UncertaintyBundle load_bundle(const std::filesystem::path& path);

}  // namespace driftguard::uq
