#include "driftguard/uq/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "driftguard/data/bootstrap.hpp"
#include "driftguard/error.hpp"
#include "driftguard/log.hpp"
#include "driftguard/random.hpp"

namespace driftguard::uq {

void EnsembleConfig::validate() const {
    if (members < 2) throw ConfigError("ensemble.members must be at least 2");
    if (resample_size && *resample_size == 0) throw ConfigError("ensemble.resample_size must be positive");
    train.validate();
}

EnsemblePrediction aggregate(std::span<const double> member_outputs) {
    const std::size_t b = member_outputs.size();
    if (b < 2) throw InputError("aggregate: need at least two member outputs");
    double mean = 0.0;
    for (double v : member_outputs) mean += v;
    mean /= static_cast<double>(b);
    double ss = 0.0;
    for (double v : member_outputs) ss += (v - mean) * (v - mean);
    return {mean, ss / static_cast<double>(b - 1)};
}

EnsembleModel train_ensemble(const data::WindowedPairs& pairs, const EnsembleConfig& cfg,
                             std::uint64_t master_seed) {
    cfg.validate();
    if (pairs.size() < 2) throw InputError("train_ensemble: need at least two training pairs");
    const std::size_t n = cfg.resample_size.value_or(pairs.size());

    EnsembleModel ensemble;
    ensemble.window_len = pairs.window_len();
    for (std::size_t j = 0; j < cfg.members; ++j) {
        const std::uint64_t seed = derive_seed(master_seed, j);
        const auto split = data::bootstrap_resample(pairs.size(), n, derive_seed(seed, 1));
        const auto bag = pairs.subset(split.bag);
        data::WindowedPairs val;
        if (!split.oob.empty()) {
            val = pairs.subset(split.oob);
        } else {
            const std::size_t hold = std::max<std::size_t>(1, pairs.size() / 10);
            std::vector<std::size_t> tail(hold);
            std::iota(tail.begin(), tail.end(), pairs.size() - hold);
            val = pairs.subset(tail);
        }
        CounterRng init_rng(derive_seed(seed, 2));
        nn::LstmModel model(nn::LstmParams::random(1, cfg.train.hidden_dim, init_rng, cfg.use_bias),
                            cfg.variant, cfg.use_bias);
        nn::TrainConfig member_cfg = cfg.train;
        member_cfg.rng_seed = derive_seed(seed, 3);
        try {
            auto result = nn::fit(std::move(model), bag.view(), val.view(), nn::LossKind::MeanSquared,
                                  member_cfg);
            logger()->debug("ensemble member {}: best epoch {} val {:.6g}", j,
                            result.history.best_epoch, result.history.best_val_loss);
            ensemble.members.push_back(std::move(result.model));
            ensemble.histories.push_back(std::move(result.history));
        } catch (const NumericError& e) {
            throw NumericError("ensemble member " + std::to_string(j) + ": " + e.what());
        }
        ensemble.seeds.push_back(seed);
    }
    return ensemble;
}

EnsemblePrediction ensemble_predict(const EnsembleModel& ensemble, std::span<const double> x) {
    if (x.size() != ensemble.window_len) {
        throw InputError("ensemble_predict: window of length " + std::to_string(x.size()) +
                         ", expected " + std::to_string(ensemble.window_len));
    }
    thread_local std::vector<double> outputs;
    outputs.clear();
    for (const auto& m : ensemble.members) outputs.push_back(m.predict(x));
    return aggregate(outputs);
}

double noise_residual(double label, double f_hat, double model_variance) noexcept {
    const double e = label - f_hat;
    return std::max(e * e - model_variance, 0.0);
}

ResidualSet compute_residuals(const EnsembleModel& ensemble, const data::WindowedPairs& pairs) {
    if (pairs.empty()) throw InputError("compute_residuals: no pairs");
    ResidualSet out;
    out.window_len = pairs.window_len();
    out.inputs.reserve(pairs.size() * pairs.window_len());
    out.r2.reserve(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto pred = ensemble_predict(ensemble, pairs.input(i));
        const auto x = pairs.input(i);
        out.inputs.insert(out.inputs.end(), x.begin(), x.end());
        out.r2.push_back(noise_residual(pairs.label(i), pred.f_hat, pred.model_variance));
    }
    return out;
}

}  // namespace driftguard::uq
