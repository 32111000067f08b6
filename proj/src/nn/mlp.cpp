#include "driftguard/nn/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "driftguard/error.hpp"

namespace driftguard::nn {
namespace {

double forward(const MlpParams& p, std::span<const double> x, double* hidden) {
    const std::size_t in = p.input_dim();
    const std::size_t hid = p.hidden_dim();
    const double* w1 = p.values().data();
    const double* b1 = w1 + hid * in;
    const double* w2 = b1 + hid;
    double y = p.output_bias();
    for (std::size_t r = 0; r < hid; ++r) {
        double s = b1[r];
        const double* row = w1 + r * in;
        for (std::size_t k = 0; k < in; ++k) s += row[k] * x[k];
        hidden[r] = std::tanh(s);
        y += w2[r] * hidden[r];
    }
    return y;
}

}  // namespace

MlpParams::MlpParams(std::size_t input_dim, std::size_t hidden_dim)
    : input_dim_(input_dim), hidden_dim_(hidden_dim), values_(count(input_dim, hidden_dim), 0.0) {
    if (input_dim == 0 || hidden_dim == 0) {
        throw ConfigError("mlp: input_dim and hidden_dim must be positive");
    }
}

MlpParams MlpParams::random(std::size_t input_dim, std::size_t hidden_dim, CounterRng& rng) {
    MlpParams p(input_dim, hidden_dim);
    const double in_bound = 1.0 / std::sqrt(static_cast<double>(input_dim));
    const double out_bound = 1.0 / std::sqrt(static_cast<double>(hidden_dim));
    for (double& v : p.hidden_weights()) v = rng.uniform(-in_bound, in_bound);
    for (double& v : p.output_weights()) v = rng.uniform(-out_bound, out_bound);
    return p;
}

std::size_t MlpParams::count(std::size_t input_dim, std::size_t hidden_dim) noexcept {
    return hidden_dim * input_dim + 2 * hidden_dim + 1;
}

std::span<double> MlpParams::hidden_weights() noexcept {
    return std::span<double>(values_).first(hidden_dim_ * input_dim_);
}
std::span<const double> MlpParams::hidden_weights() const noexcept {
    return std::span<const double>(values_).first(hidden_dim_ * input_dim_);
}
std::span<double> MlpParams::hidden_bias() noexcept {
    return std::span<double>(values_).subspan(hidden_dim_ * input_dim_, hidden_dim_);
}
std::span<const double> MlpParams::hidden_bias() const noexcept {
    return std::span<const double>(values_).subspan(hidden_dim_ * input_dim_, hidden_dim_);
}
std::span<double> MlpParams::output_weights() noexcept {
    return std::span<double>(values_).subspan(hidden_dim_ * (input_dim_ + 1), hidden_dim_);
}
std::span<const double> MlpParams::output_weights() const noexcept {
    return std::span<const double>(values_).subspan(hidden_dim_ * (input_dim_ + 1), hidden_dim_);
}

double MlpModel::predict(std::span<const double> x) const {
    if (x.size() != params_.input_dim()) throw InputError("mlp: input width mismatch");
    thread_local std::vector<double> hidden;
    hidden.resize(params_.hidden_dim());
    return forward(params_, x, hidden.data());
}

double MlpModel::loss(const SampleView& data, std::span<const std::size_t> batch,
                      LossKind kind) const {
    if (batch.empty()) throw InputError("mlp loss: empty batch");
    double total = 0.0;
    double unused = 0.0;
    for (std::size_t idx : batch) {
        total += output_loss(kind, predict(data.input(idx)), data.targets[idx], unused);
    }
    return total / static_cast<double>(batch.size());
}

double MlpModel::loss_and_gradient(const SampleView& data, std::span<const std::size_t> batch,
                                   LossKind kind, std::span<double> grad) const {
    if (batch.empty()) throw InputError("mlp backward: empty batch");
    if (grad.size() != params_.values().size()) {
        throw ConfigError("mlp backward: gradient buffer has wrong size");
    }
    if (data.width != params_.input_dim()) throw InputError("mlp backward: input width mismatch");
    std::fill(grad.begin(), grad.end(), 0.0);
    const std::size_t in = params_.input_dim();
    const std::size_t hid = params_.hidden_dim();
    const double* w2 = params_.values().data() + hid * (in + 1);
    double* g_w1 = grad.data();
    double* g_b1 = g_w1 + hid * in;
    double* g_w2 = g_b1 + hid;

    thread_local std::vector<double> hidden;
    hidden.resize(hid);
    const double scale = 1.0 / static_cast<double>(batch.size());
    double total = 0.0;
    for (std::size_t idx : batch) {
        const auto x = data.input(idx);
        double d_out = 0.0;
        total += output_loss(kind, forward(params_, x, hidden.data()), data.targets[idx], d_out);
        d_out *= scale;
        grad.back() += d_out;
        for (std::size_t r = 0; r < hid; ++r) {
            g_w2[r] += d_out * hidden[r];
            const double z = d_out * w2[r] * (1.0 - hidden[r] * hidden[r]);
            g_b1[r] += z;
            double* row = g_w1 + r * in;
            for (std::size_t k = 0; k < in; ++k) row[k] += z * x[k];
        }
    }
    const double mean_loss = total * scale;
    if (!std::isfinite(mean_loss)) throw NumericError("mlp backward: non-finite loss");
    for (std::size_t k = 0; k < grad.size(); ++k) {
        if (!std::isfinite(grad[k])) {
            throw NumericError("mlp backward: non-finite gradient at parameter " + std::to_string(k));
        }
    }
    return mean_loss;
}

}  // namespace driftguard::nn
