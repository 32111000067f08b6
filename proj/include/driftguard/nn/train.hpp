#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "driftguard/error.hpp"
#include "driftguard/nn/model.hpp"
#include "driftguard/nn/optimizer.hpp"
#include "driftguard/nn/train_config.hpp"
#include "driftguard/random.hpp"

namespace driftguard::nn {

struct EpochRecord {
    std::size_t epoch = 0;  // 1-based
    double train_loss = 0.0;
    double val_loss = 0.0;
};

struct TrainingHistory {
    std::vector<EpochRecord> epochs;
    std::size_t best_epoch = 0;
    double best_val_loss = std::numeric_limits<double>::infinity();
    bool stopped_early = false;
};

template <class Model>
struct TrainResult {
    Model model;
    TrainingHistory history;
};

/// Mini-batch training with early stopping on `val`.
///
/// Each epoch shuffles the training rows with a stream seeded from
/// cfg.rng_seed, takes one optimizer step per batch, then scores the
/// validation set. Training stops after cfg.max_epochs, or once the
/// validation loss has not improved for cfg.patience epochs. The returned
/// model holds the parameters of the best validation epoch.
template <TrainableModel Model>
TrainResult<Model> fit(Model model, const SampleView& train, const SampleView& val, LossKind kind,
                       const TrainConfig& cfg) {
    cfg.validate();
    if (train.size() == 0) throw InputError("train: empty training set");
    if (val.size() == 0) throw InputError("train: empty validation set");

    CounterRng rng(derive_seed(cfg.rng_seed, 0x7ea1));
    std::vector<std::size_t> order(train.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<std::size_t> val_rows(val.size());
    std::iota(val_rows.begin(), val_rows.end(), std::size_t{0});

    const std::size_t n_params = model.parameters().size();
    std::vector<double> grad(n_params);
    std::vector<double> best(model.parameters().begin(), model.parameters().end());
    Optimizer opt(cfg.optimizer, cfg.learning_rate, n_params);

    TrainingHistory history;
    std::size_t since_best = 0;
    for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        rng.shuffle(std::span<std::size_t>(order));
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t len = std::min(cfg.batch_size, order.size() - start);
            const std::span<const std::size_t> batch(order.data() + start, len);
            epoch_loss += model.loss_and_gradient(train, batch, kind, grad) * static_cast<double>(len);
            opt.step(model.parameters(), grad);
        }
        epoch_loss /= static_cast<double>(order.size());
        const double val_loss = model.loss(val, val_rows, kind);
        if (!std::isfinite(val_loss) || !std::isfinite(epoch_loss)) {
            throw NumericError("train: non-finite loss at epoch " + std::to_string(epoch));
        }
        history.epochs.push_back({epoch, epoch_loss, val_loss});
        if (val_loss < history.best_val_loss) {
            history.best_val_loss = val_loss;
            history.best_epoch = epoch;
            std::copy(model.parameters().begin(), model.parameters().end(), best.begin());
            since_best = 0;
        } else if (++since_best >= cfg.patience) {
            history.stopped_early = epoch < cfg.max_epochs;
            break;
        }
    }
    std::copy(best.begin(), best.end(), model.parameters().begin());
    return {std::move(model), std::move(history)};
}

}  // namespace driftguard::nn
