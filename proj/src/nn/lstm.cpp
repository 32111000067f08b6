#include "driftguard/nn/lstm.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "driftguard/error.hpp"

namespace driftguard::nn {
namespace {

inline double sigmoid(double a) noexcept { return 1.0 / (1.0 + std::exp(-a)); }

constexpr const char* kGateNames[] = {"input", "output", "forget", "candidate"};

/// Forward activations for one window, kept for the backward pass.
/// Rows of h and c are offset by one: row 0 is the initial state.
struct Trace {
    std::size_t steps = 0;
    std::size_t hidden = 0;
    std::vector<double> gates;  // steps x 4H, activated
    std::vector<double> c;      // (steps + 1) x H
    std::vector<double> h;      // (steps + 1) x H
    std::vector<double> aux;    // steps x H, the tanh feeding h

    void reset(std::size_t n_steps, std::size_t n_hidden) {
        steps = n_steps;
        hidden = n_hidden;
        gates.assign(n_steps * 4 * n_hidden, 0.0);
        c.assign((n_steps + 1) * n_hidden, 0.0);
        h.assign((n_steps + 1) * n_hidden, 0.0);
        aux.assign(n_steps * n_hidden, 0.0);
    }
};

// One cell step: writes activated gates, new cell, tanh term and hidden.
void cell_step(const double* x, const double* h_prev, const double* c_prev, const LstmParams& p,
               CellVariant variant, double* gates, double* c_out, double* aux, double* h_out) {
    const std::size_t in = p.input_dim();
    const std::size_t hid = p.hidden_dim();
    const std::span<const double> values = p.values();
    const double* u = values.data();
    const double* w = u + 4 * hid * in;
    const double* b = w + 4 * hid * hid;

    for (std::size_t r = 0; r < 4 * hid; ++r) {
        double s = b[r];
        const double* ur = u + r * in;
        for (std::size_t k = 0; k < in; ++k) s += ur[k] * x[k];
        const double* wr = w + r * hid;
        for (std::size_t k = 0; k < hid; ++k) s += wr[k] * h_prev[k];
        gates[r] = s;
    }
    for (std::size_t j = 0; j < hid; ++j) {
        const double i = sigmoid(gates[j]);
        const double o = sigmoid(gates[hid + j]);
        const double f = sigmoid(gates[2 * hid + j]);
        const double g = std::tanh(gates[3 * hid + j]);
        gates[j] = i;
        gates[hid + j] = o;
        gates[2 * hid + j] = f;
        gates[3 * hid + j] = g;
        const double pre = f * c_prev[j] + i * g;
        if (variant == CellVariant::Standard) {
            c_out[j] = pre;
            aux[j] = std::tanh(pre);
            h_out[j] = o * aux[j];
        } else {
            c_out[j] = sigmoid(pre);
            aux[j] = std::tanh(c_out[j] * o);
            h_out[j] = aux[j];
        }
    }
}

void run_trace(std::span<const double> seq, const LstmParams& p, CellVariant variant, Trace& tr) {
    const std::size_t in = p.input_dim();
    const std::size_t hid = p.hidden_dim();
    tr.reset(seq.size() / in, hid);
    for (std::size_t t = 0; t < tr.steps; ++t) {
        cell_step(seq.data() + t * in, &tr.h[t * hid], &tr.c[t * hid], p, variant,
                  &tr.gates[t * 4 * hid], &tr.c[(t + 1) * hid], &tr.aux[t * hid],
                  &tr.h[(t + 1) * hid]);
    }
}

double dense_output(const LstmParams& p, const double* h) {
    const auto dw = p.dense_weights();
    double y = p.dense_bias();
    for (std::size_t j = 0; j < dw.size(); ++j) y += dw[j] * h[j];
    return y;
}

std::string describe_parameter(const LstmParams& p, std::size_t index) {
    const std::size_t in = p.input_dim();
    const std::size_t hid = p.hidden_dim();
    const std::size_t u_end = 4 * hid * in;
    const std::size_t w_end = u_end + 4 * hid * hid;
    const std::size_t b_end = w_end + 4 * hid;
    if (index < u_end) {
        const std::size_t row = index / in;
        return std::string("U[") + kGateNames[row / hid] + "][" + std::to_string(row % hid) + "," +
               std::to_string(index % in) + "]";
    }
    if (index < w_end) {
        const std::size_t row = (index - u_end) / hid;
        return std::string("W[") + kGateNames[row / hid] + "][" + std::to_string(row % hid) + "," +
               std::to_string((index - u_end) % hid) + "]";
    }
    if (index < b_end) {
        const std::size_t row = index - w_end;
        return std::string("bias[") + kGateNames[row / hid] + "][" + std::to_string(row % hid) + "]";
    }
    if (index < b_end + hid) return "dense_w[" + std::to_string(index - b_end) + "]";
    return "dense_b";
}

void check_window(std::span<const double> window, const LstmParams& p) {
    if (window.empty()) throw InputError("lstm: empty window");
    if (p.hidden_dim() == 0) throw ConfigError("lstm: parameters are uninitialized");
    if (window.size() % p.input_dim() != 0) {
        throw ConfigError("lstm: window length is not a multiple of input_dim");
    }
}

}  // namespace

LstmParams::LstmParams(std::size_t input_dim, std::size_t hidden_dim)
    : input_dim_(input_dim), hidden_dim_(hidden_dim), values_(count(input_dim, hidden_dim), 0.0) {
    if (input_dim == 0 || hidden_dim == 0) {
        throw ConfigError("lstm: input_dim and hidden_dim must be positive");
    }
}

LstmParams LstmParams::random(std::size_t input_dim, std::size_t hidden_dim, CounterRng& rng,
                              bool with_bias) {
    LstmParams p(input_dim, hidden_dim);
    const double bound = 1.0 / std::sqrt(static_cast<double>(hidden_dim));
    for (double& v : p.values_) v = rng.uniform(-bound, bound);
    std::fill(p.biases().begin(), p.biases().end(), 0.0);
    if (with_bias) {
        auto forget = p.bias(Gate::Forget);
        std::fill(forget.begin(), forget.end(), 1.0);
    }
    p.dense_bias() = 0.0;
    return p;
}

std::size_t LstmParams::count(std::size_t input_dim, std::size_t hidden_dim) noexcept {
    return 4 * hidden_dim * input_dim + 4 * hidden_dim * hidden_dim + 4 * hidden_dim + hidden_dim + 1;
}

std::span<double> LstmParams::input_weights(Gate g) noexcept {
    const std::size_t block = hidden_dim_ * input_dim_;
    return std::span<double>(values_).subspan(static_cast<std::size_t>(g) * block, block);
}
std::span<const double> LstmParams::input_weights(Gate g) const noexcept {
    const std::size_t block = hidden_dim_ * input_dim_;
    return std::span<const double>(values_).subspan(static_cast<std::size_t>(g) * block, block);
}
std::span<double> LstmParams::recurrent_weights(Gate g) noexcept {
    const std::size_t block = hidden_dim_ * hidden_dim_;
    return std::span<double>(values_).subspan(offset_w() + static_cast<std::size_t>(g) * block, block);
}
std::span<const double> LstmParams::recurrent_weights(Gate g) const noexcept {
    const std::size_t block = hidden_dim_ * hidden_dim_;
    return std::span<const double>(values_).subspan(offset_w() + static_cast<std::size_t>(g) * block,
                                                    block);
}
std::span<double> LstmParams::bias(Gate g) noexcept {
    return std::span<double>(values_).subspan(offset_b() + static_cast<std::size_t>(g) * hidden_dim_,
                                              hidden_dim_);
}
std::span<const double> LstmParams::bias(Gate g) const noexcept {
    return std::span<const double>(values_).subspan(
        offset_b() + static_cast<std::size_t>(g) * hidden_dim_, hidden_dim_);
}
std::span<double> LstmParams::biases() noexcept {
    return std::span<double>(values_).subspan(offset_b(), 4 * hidden_dim_);
}
std::span<const double> LstmParams::biases() const noexcept {
    return std::span<const double>(values_).subspan(offset_b(), 4 * hidden_dim_);
}
std::span<double> LstmParams::dense_weights() noexcept {
    return std::span<double>(values_).subspan(offset_dense(), hidden_dim_);
}
std::span<const double> LstmParams::dense_weights() const noexcept {
    return std::span<const double>(values_).subspan(offset_dense(), hidden_dim_);
}

bool LstmParams::all_finite() const noexcept {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

LstmState lstm_cell_forward(std::span<const double> x, const LstmState& prev, const LstmParams& p,
                            CellVariant variant) {
    const std::size_t hid = p.hidden_dim();
    if (x.size() != p.input_dim() || prev.h.size() != hid || prev.c.size() != hid) {
        throw ConfigError("lstm_cell_forward: dimension mismatch");
    }
    std::vector<double> gates(4 * hid);
    std::vector<double> aux(hid);
    LstmState next = LstmState::zeros(hid);
    cell_step(x.data(), prev.h.data(), prev.c.data(), p, variant, gates.data(), next.c.data(),
              aux.data(), next.h.data());
    for (std::size_t j = 0; j < hid; ++j) {
        if (!std::isfinite(next.h[j]) || !std::isfinite(next.c[j])) {
            throw NumericError("lstm_cell_forward: non-finite state at unit " + std::to_string(j));
        }
    }
    return next;
}

double model_forward(std::span<const double> window, const LstmParams& p, CellVariant variant) {
    check_window(window, p);
    if (p.input_dim() != 1) throw ConfigError("model_forward: requires input_dim == 1");
    thread_local Trace tr;
    run_trace(window, p, variant, tr);
    return dense_output(p, &tr.h[tr.steps * tr.hidden]);
}

double LstmModel::loss(const SampleView& data, std::span<const std::size_t> batch,
                       LossKind kind) const {
    if (batch.empty()) throw InputError("lstm loss: empty batch");
    double total = 0.0;
    double unused = 0.0;
    for (std::size_t idx : batch) {
        total += output_loss(kind, predict(data.input(idx)), data.targets[idx], unused);
    }
    return total / static_cast<double>(batch.size());
}

double LstmModel::loss_and_gradient(const SampleView& data, std::span<const std::size_t> batch,
                                    LossKind kind, std::span<double> grad) const {
    if (batch.empty()) throw InputError("lstm backward: empty batch");
    if (grad.size() != params_.values().size()) {
        throw ConfigError("lstm backward: gradient buffer has wrong size");
    }
    std::fill(grad.begin(), grad.end(), 0.0);

    const std::size_t in = params_.input_dim();
    const std::size_t hid = params_.hidden_dim();
    const double* w = params_.values().data() + 4 * hid * in;
    const auto dense_w = params_.dense_weights();

    double* g_u = grad.data();
    double* g_w = g_u + 4 * hid * in;
    double* g_b = g_w + 4 * hid * hid;
    double* g_dense = g_b + 4 * hid;
    double& g_dense_b = grad.back();

    thread_local Trace tr;
    thread_local std::vector<double> dh, dc, dh_prev, da;
    dh.resize(hid);
    dc.resize(hid);
    dh_prev.resize(hid);
    da.resize(4 * hid);

    const double scale = 1.0 / static_cast<double>(batch.size());
    double total = 0.0;
    for (std::size_t idx : batch) {
        const auto seq = data.input(idx);
        check_window(seq, params_);
        run_trace(seq, params_, variant_, tr);
        const double* h_last = &tr.h[tr.steps * hid];
        double d_out = 0.0;
        total += output_loss(kind, dense_output(params_, h_last), data.targets[idx], d_out);
        d_out *= scale;

        for (std::size_t j = 0; j < hid; ++j) {
            g_dense[j] += d_out * h_last[j];
            dh[j] = d_out * dense_w[j];
            dc[j] = 0.0;
        }
        g_dense_b += d_out;

        for (std::size_t t = tr.steps; t-- > 0;) {
            const double* gates = &tr.gates[t * 4 * hid];
            const double* c_prev = &tr.c[t * hid];
            const double* c_cur = &tr.c[(t + 1) * hid];
            const double* h_prev = &tr.h[t * hid];
            const double* aux = &tr.aux[t * hid];
            const double* x = seq.data() + t * in;
            for (std::size_t j = 0; j < hid; ++j) {
                const double i = gates[j];
                const double o = gates[hid + j];
                const double f = gates[2 * hid + j];
                const double g = gates[3 * hid + j];
                const double th = aux[j];
                double d_o;
                double d_pre;
                if (variant_ == CellVariant::Standard) {
                    d_o = dh[j] * th;
                    d_pre = dc[j] + dh[j] * o * (1.0 - th * th);
                } else {
                    const double dm = dh[j] * (1.0 - th * th);
                    d_o = dm * c_cur[j];
                    d_pre = (dc[j] + dm * o) * c_cur[j] * (1.0 - c_cur[j]);
                }
                da[j] = d_pre * g * i * (1.0 - i);
                da[hid + j] = d_o * o * (1.0 - o);
                da[2 * hid + j] = d_pre * c_prev[j] * f * (1.0 - f);
                da[3 * hid + j] = d_pre * i * (1.0 - g * g);
                dc[j] = d_pre * f;
            }
            std::fill(dh_prev.begin(), dh_prev.end(), 0.0);
            for (std::size_t r = 0; r < 4 * hid; ++r) {
                const double a = da[r];
                double* gur = g_u + r * in;
                for (std::size_t k = 0; k < in; ++k) gur[k] += a * x[k];
                double* gwr = g_w + r * hid;
                const double* wr = w + r * hid;
                for (std::size_t k = 0; k < hid; ++k) {
                    gwr[k] += a * h_prev[k];
                    dh_prev[k] += wr[k] * a;
                }
                g_b[r] += a;
            }
            std::swap(dh, dh_prev);
        }
    }
    if (!use_bias_) std::fill(g_b, g_b + 4 * hid, 0.0);

    const double mean_loss = total * scale;
    if (!std::isfinite(mean_loss)) throw NumericError("lstm backward: non-finite loss");
    for (std::size_t k = 0; k < grad.size(); ++k) {
        if (!std::isfinite(grad[k])) {
            throw NumericError("lstm backward: non-finite gradient for " +
                               describe_parameter(params_, k));
        }
    }
    return mean_loss;
}

}  // namespace driftguard::nn
