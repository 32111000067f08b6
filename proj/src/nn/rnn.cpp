#include "driftguard/nn/rnn.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "driftguard/error.hpp"

namespace driftguard::nn {
namespace {

void step(const double* x, const double* h_prev, const RnnParams& p, double* h_out) {
    const std::size_t in = p.input_dim();
    const std::size_t hid = p.hidden_dim();
    const double* u = p.values().data();
    const double* w = u + hid * in;
    const double* b = w + hid * hid;
    for (std::size_t r = 0; r < hid; ++r) {
        double s = b[r];
        for (std::size_t k = 0; k < in; ++k) s += u[r * in + k] * x[k];
        const double* wr = w + r * hid;
        for (std::size_t k = 0; k < hid; ++k) s += wr[k] * h_prev[k];
        h_out[r] = std::tanh(s);
    }
}

// Hidden states for every step; row 0 is the zero initial state.
void run(std::span<const double> seq, const RnnParams& p, std::vector<double>& hs) {
    if (seq.empty()) throw InputError("rnn: empty window");
    if (p.hidden_dim() == 0) throw ConfigError("rnn: parameters are uninitialized");
    if (seq.size() % p.input_dim() != 0) {
        throw ConfigError("rnn: window length is not a multiple of input_dim");
    }
    const std::size_t in = p.input_dim();
    const std::size_t hid = p.hidden_dim();
    const std::size_t steps = seq.size() / in;
    hs.assign((steps + 1) * hid, 0.0);
    for (std::size_t t = 0; t < steps; ++t) {
        step(seq.data() + t * in, &hs[t * hid], p, &hs[(t + 1) * hid]);
    }
}

double dense(const RnnParams& p, const double* h) {
    const auto dw = p.dense_weights();
    double y = p.dense_bias();
    for (std::size_t j = 0; j < dw.size(); ++j) y += dw[j] * h[j];
    return y;
}

}  // namespace

RnnParams::RnnParams(std::size_t input_dim, std::size_t hidden_dim)
    : input_dim_(input_dim), hidden_dim_(hidden_dim), values_(count(input_dim, hidden_dim), 0.0) {
    if (input_dim == 0 || hidden_dim == 0) {
        throw ConfigError("rnn: input_dim and hidden_dim must be positive");
    }
}

RnnParams RnnParams::random(std::size_t input_dim, std::size_t hidden_dim, CounterRng& rng) {
    RnnParams p(input_dim, hidden_dim);
    const double bound = 1.0 / std::sqrt(static_cast<double>(hidden_dim));
    for (double& v : p.values_) v = rng.uniform(-bound, bound);
    std::fill(p.bias().begin(), p.bias().end(), 0.0);
    p.dense_bias() = 0.0;
    return p;
}

std::size_t RnnParams::count(std::size_t input_dim, std::size_t hidden_dim) noexcept {
    return hidden_dim * input_dim + hidden_dim * hidden_dim + 2 * hidden_dim + 1;
}

std::span<double> RnnParams::input_weights() noexcept {
    return std::span<double>(values_).first(hidden_dim_ * input_dim_);
}
std::span<const double> RnnParams::input_weights() const noexcept {
    return std::span<const double>(values_).first(hidden_dim_ * input_dim_);
}
std::span<double> RnnParams::recurrent_weights() noexcept {
    return std::span<double>(values_).subspan(hidden_dim_ * input_dim_, hidden_dim_ * hidden_dim_);
}
std::span<const double> RnnParams::recurrent_weights() const noexcept {
    return std::span<const double>(values_).subspan(hidden_dim_ * input_dim_,
                                                    hidden_dim_ * hidden_dim_);
}
std::span<double> RnnParams::bias() noexcept {
    return std::span<double>(values_).subspan(hidden_dim_ * (input_dim_ + hidden_dim_), hidden_dim_);
}
std::span<const double> RnnParams::bias() const noexcept {
    return std::span<const double>(values_).subspan(hidden_dim_ * (input_dim_ + hidden_dim_),
                                                    hidden_dim_);
}
std::span<double> RnnParams::dense_weights() noexcept {
    return std::span<double>(values_).subspan(hidden_dim_ * (input_dim_ + hidden_dim_ + 1),
                                              hidden_dim_);
}
std::span<const double> RnnParams::dense_weights() const noexcept {
    return std::span<const double>(values_).subspan(hidden_dim_ * (input_dim_ + hidden_dim_ + 1),
                                                    hidden_dim_);
}

std::vector<double> rnn_cell_forward(std::span<const double> x, std::span<const double> h_prev,
                                     const RnnParams& p) {
    if (x.size() != p.input_dim() || h_prev.size() != p.hidden_dim()) {
        throw ConfigError("rnn_cell_forward: dimension mismatch");
    }
    std::vector<double> h(p.hidden_dim());
    step(x.data(), h_prev.data(), p, h.data());
    if (!std::all_of(h.begin(), h.end(), [](double v) { return std::isfinite(v); })) {
        throw NumericError("rnn_cell_forward: non-finite state");
    }
    return h;
}

double rnn_model_forward(std::span<const double> window, const RnnParams& p) {
    if (p.input_dim() != 1) throw ConfigError("rnn_model_forward: requires input_dim == 1");
    thread_local std::vector<double> hs;
    run(window, p, hs);
    return dense(p, &hs[window.size() * p.hidden_dim()]);
}

double RnnModel::loss(const SampleView& data, std::span<const std::size_t> batch,
                      LossKind kind) const {
    if (batch.empty()) throw InputError("rnn loss: empty batch");
    double total = 0.0;
    double unused = 0.0;
    for (std::size_t idx : batch) {
        total += output_loss(kind, predict(data.input(idx)), data.targets[idx], unused);
    }
    return total / static_cast<double>(batch.size());
}

double RnnModel::loss_and_gradient(const SampleView& data, std::span<const std::size_t> batch,
                                   LossKind kind, std::span<double> grad) const {
    if (batch.empty()) throw InputError("rnn backward: empty batch");
    if (grad.size() != params_.values().size()) {
        throw ConfigError("rnn backward: gradient buffer has wrong size");
    }
    std::fill(grad.begin(), grad.end(), 0.0);
    const std::size_t in = params_.input_dim();
    const std::size_t hid = params_.hidden_dim();
    const double* w = params_.values().data() + hid * in;
    const auto dense_w = params_.dense_weights();
    double* g_u = grad.data();
    double* g_w = g_u + hid * in;
    double* g_b = g_w + hid * hid;
    double* g_dense = g_b + hid;

    thread_local std::vector<double> hs, dh, dz, dh_prev;
    dh.resize(hid);
    dz.resize(hid);
    dh_prev.resize(hid);

    const double scale = 1.0 / static_cast<double>(batch.size());
    double total = 0.0;
    for (std::size_t idx : batch) {
        const auto seq = data.input(idx);
        run(seq, params_, hs);
        const std::size_t steps = seq.size() / in;
        const double* h_last = &hs[steps * hid];
        double d_out = 0.0;
        total += output_loss(kind, dense(params_, h_last), data.targets[idx], d_out);
        d_out *= scale;
        for (std::size_t j = 0; j < hid; ++j) {
            g_dense[j] += d_out * h_last[j];
            dh[j] = d_out * dense_w[j];
        }
        grad.back() += d_out;
        for (std::size_t t = steps; t-- > 0;) {
            const double* h_cur = &hs[(t + 1) * hid];
            const double* h_prev = &hs[t * hid];
            const double* x = seq.data() + t * in;
            std::fill(dh_prev.begin(), dh_prev.end(), 0.0);
            for (std::size_t r = 0; r < hid; ++r) {
                const double z = dh[r] * (1.0 - h_cur[r] * h_cur[r]);
                for (std::size_t k = 0; k < in; ++k) g_u[r * in + k] += z * x[k];
                double* gwr = g_w + r * hid;
                const double* wr = w + r * hid;
                for (std::size_t k = 0; k < hid; ++k) {
                    gwr[k] += z * h_prev[k];
                    dh_prev[k] += wr[k] * z;
                }
                g_b[r] += z;
            }
            std::swap(dh, dh_prev);
        }
    }
    const double mean_loss = total * scale;
    if (!std::isfinite(mean_loss)) throw NumericError("rnn backward: non-finite loss");
    for (std::size_t k = 0; k < grad.size(); ++k) {
        if (!std::isfinite(grad[k])) {
            throw NumericError("rnn backward: non-finite gradient at parameter " + std::to_string(k));
        }
    }
    return mean_loss;
}

}  // namespace driftguard::nn
