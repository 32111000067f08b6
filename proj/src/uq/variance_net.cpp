#include "driftguard/uq/variance_net.hpp"

#include <algorithm>
#include <cmath>

#include "driftguard/audit.hpp"
#include "driftguard/error.hpp"
#include "driftguard/random.hpp"

namespace driftguard::uq {

double VarianceNet::variance(std::span<const double> x) const {
    if (x.size() != window_len()) throw InputError("variance net: input width mismatch");
    return std::max(std::exp(net_.predict(x)), nn::kVarianceFloor);
}

VarianceNetFit train_variance_net(const ResidualSet& residuals, const VarianceNetConfig& cfg,
                                  std::uint64_t seed) {
    if (residuals.size() == 0) throw InputError("train_variance_net: empty residual set");
    if (residuals.window_len == 0) throw InputError("train_variance_net: zero window length");
    if (!(cfg.holdout_fraction >= 0.0 && cfg.holdout_fraction < 1.0)) {
        throw ConfigError("variance.holdout_fraction must lie in [0, 1)");
    }
    ++audit::counters().variance_net_fits;

    const std::size_t n = residuals.size();
    std::size_t hold = static_cast<std::size_t>(std::ceil(cfg.holdout_fraction * static_cast<double>(n)));
    if (n < 2) hold = 0;
    hold = std::min(hold, n - 1);

    const auto all = residuals.view();
    nn::SampleView train{all.width, all.inputs.first((n - hold) * all.width), all.targets.first(n - hold)};
    nn::SampleView val = hold > 0 ? nn::SampleView{all.width, all.inputs.subspan((n - hold) * all.width),
                                                   all.targets.subspan(n - hold)}
                                  : train;

    CounterRng rng(derive_seed(seed, 1));
    nn::MlpModel model(nn::MlpParams::random(residuals.window_len, cfg.hidden_dim, rng));
    double mean_r2 = 0.0;
    for (double r : train.targets) mean_r2 += r;
    mean_r2 /= static_cast<double>(train.size());
    // Start from the best constant variance: zero output weights, bias at
    // log(mean r^2).
    for (auto& w : model.params().output_weights()) w = 0.0;
    model.params().output_bias() = std::log(std::max(mean_r2, nn::kVarianceFloor));

    nn::TrainConfig tc = cfg.train;
    tc.hidden_dim = cfg.hidden_dim;
    tc.rng_seed = derive_seed(seed, 2);
    try {
        auto result = nn::fit(std::move(model), train, val, nn::LossKind::GaussianNll, tc);
        return {VarianceNet(std::move(result.model)), std::move(result.history)};
    } catch (const NumericError& e) {
        throw NumericError(std::string("variance net: ") + e.what());
    }
}

}  // namespace driftguard::uq
