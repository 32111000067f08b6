#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "driftguard/data/time_series.hpp"
#include "driftguard/nn/model.hpp"

namespace driftguard::data {

/// Moving-window supervised pairs: input i is (x_o, ..., x_{o+w-1}) and its
/// label is x_{o+w}, where o = origin(i) is a 0-based source position.
class WindowedPairs {
public:
    WindowedPairs() = default;
    explicit WindowedPairs(std::size_t window_len) : window_len_(window_len) {}

    void push_back(std::span<const double> input, double label, std::size_t origin);

    std::size_t window_len() const noexcept { return window_len_; }
    std::size_t size() const noexcept { return labels_.size(); }
    bool empty() const noexcept { return labels_.empty(); }

    std::span<const double> input(std::size_t i) const noexcept {
        return std::span<const double>(inputs_).subspan(i * window_len_, window_len_);
    }
    double label(std::size_t i) const noexcept { return labels_[i]; }
    std::size_t origin(std::size_t i) const noexcept { return origins_[i]; }
    std::span<const double> labels() const noexcept { return labels_; }

    /// Rows selected by index, duplicates allowed, in the given order.
    WindowedPairs subset(std::span<const std::size_t> rows) const;

    nn::SampleView view() const noexcept { return {window_len_, inputs_, labels_}; }

private:
    std::size_t window_len_ = 0;
    std::vector<double> inputs_;
    std::vector<double> labels_;
    std::vector<std::size_t> origins_;
};

/// All |series| - w pairs in order. Throws InputError if |series| < w + 1.
WindowedPairs make_windows(std::span<const double> series, std::size_t w);
inline WindowedPairs make_windows(const TimeSeries& series, std::size_t w) {
    return make_windows(series.values(), w);
}

}  // namespace driftguard::data
