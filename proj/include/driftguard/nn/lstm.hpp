#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "driftguard/nn/model.hpp"
#include "driftguard/random.hpp"

namespace driftguard::nn {

/// Gate blocks, in storage order.
enum class Gate : std::size_t { Input = 0, Output = 1, Forget = 2, Candidate = 3 };

/// Standard: C = f*C_prev + i*g, h = o*tanh(C).
/// SquashedCell: C = sigmoid(f*C_prev + i*g), h = tanh(C*o).
enum class CellVariant { Standard, SquashedCell };

/// Weights of one LSTM layer plus the scalar dense head, stored in a single
/// flat buffer so optimizers and checkers can treat them uniformly.
///
/// Layout: U (4H x I), W (4H x H), gate biases (4H), dense weights (H),
/// dense bias (1). Gate blocks are ordered as in `Gate`; every matrix is
/// row-major with one row per hidden unit.
class LstmParams {
public:
    LstmParams() = default;
    /// All-zero parameters.
    LstmParams(std::size_t input_dim, std::size_t hidden_dim);

    /// Uniform(-1/sqrt(H), 1/sqrt(H)) weights; gate biases zero except the
    /// forget gate at +1 when `with_bias`.
    static LstmParams random(std::size_t input_dim, std::size_t hidden_dim, CounterRng& rng,
                             bool with_bias = true);

    std::size_t input_dim() const noexcept { return input_dim_; }
    std::size_t hidden_dim() const noexcept { return hidden_dim_; }
    static std::size_t count(std::size_t input_dim, std::size_t hidden_dim) noexcept;

    std::span<double> input_weights(Gate g) noexcept;
    std::span<const double> input_weights(Gate g) const noexcept;
    std::span<double> recurrent_weights(Gate g) noexcept;
    std::span<const double> recurrent_weights(Gate g) const noexcept;
    std::span<double> bias(Gate g) noexcept;
    std::span<const double> bias(Gate g) const noexcept;
    std::span<double> biases() noexcept;
    std::span<const double> biases() const noexcept;
    std::span<double> dense_weights() noexcept;
    std::span<const double> dense_weights() const noexcept;
    double& dense_bias() noexcept { return values_.back(); }
    double dense_bias() const noexcept { return values_.back(); }

    std::span<double> values() noexcept { return values_; }
    std::span<const double> values() const noexcept { return values_; }

    bool all_finite() const noexcept;

private:
    std::size_t offset_w() const noexcept { return 4 * hidden_dim_ * input_dim_; }
    std::size_t offset_b() const noexcept { return offset_w() + 4 * hidden_dim_ * hidden_dim_; }
    std::size_t offset_dense() const noexcept { return offset_b() + 4 * hidden_dim_; }

    std::size_t input_dim_ = 0;
    std::size_t hidden_dim_ = 0;
    std::vector<double> values_;
};

struct LstmState {
    std::vector<double> h;
    std::vector<double> c;

    static LstmState zeros(std::size_t hidden_dim) {
        return {std::vector<double>(hidden_dim, 0.0), std::vector<double>(hidden_dim, 0.0)};
    }
};

/// One time step. Throws ConfigError on dimension mismatch and
/// NumericError when the new state is not finite.
LstmState lstm_cell_forward(std::span<const double> x, const LstmState& prev,
                            const LstmParams& p, CellVariant variant = CellVariant::Standard);

/// Runs a univariate window through the cell from the zero state and applies
/// the dense head to the last hidden vector. Requires input_dim == 1.
double model_forward(std::span<const double> window, const LstmParams& p,
                     CellVariant variant = CellVariant::Standard);

/// LSTM predictor: one recurrent layer, scalar dense output.
class LstmModel {
public:
    LstmModel() = default;
    explicit LstmModel(LstmParams params, CellVariant variant = CellVariant::Standard,
                       bool use_bias = true)
        : params_(std::move(params)), variant_(variant), use_bias_(use_bias) {}

    const LstmParams& params() const noexcept { return params_; }
    LstmParams& params() noexcept { return params_; }
    CellVariant variant() const noexcept { return variant_; }
    /// When false, gate biases are held at their current value (zero for a
    /// freshly initialized strict model) and receive no gradient.
    bool use_bias() const noexcept { return use_bias_; }

    std::span<double> parameters() noexcept { return params_.values(); }
    std::span<const double> parameters() const noexcept { return params_.values(); }

    double predict(std::span<const double> window) const {
        return model_forward(window, params_, variant_);
    }

    /// Mean loss over `batch` (indices into `data`).
    double loss(const SampleView& data, std::span<const std::size_t> batch, LossKind kind) const;

    /// Mean loss and its exact gradient by backpropagation through time.
    /// `grad` must have parameters().size() entries; it is overwritten.
    double loss_and_gradient(const SampleView& data, std::span<const std::size_t> batch,
                             LossKind kind, std::span<double> grad) const;

private:
    LstmParams params_;
    CellVariant variant_ = CellVariant::Standard;
    bool use_bias_ = true;
};

static_assert(TrainableModel<LstmModel>);

}  // namespace driftguard::nn
