#include "driftguard/data/windows.hpp"

#include <string>

#include "driftguard/error.hpp"

namespace driftguard::data {

void WindowedPairs::push_back(std::span<const double> input, double label, std::size_t origin) {
    if (input.size() != window_len_) throw InputError("windowed pairs: input width mismatch");
    inputs_.insert(inputs_.end(), input.begin(), input.end());
    labels_.push_back(label);
    origins_.push_back(origin);
}

WindowedPairs WindowedPairs::subset(std::span<const std::size_t> rows) const {
    WindowedPairs out(window_len_);
    out.inputs_.reserve(rows.size() * window_len_);
    out.labels_.reserve(rows.size());
    out.origins_.reserve(rows.size());
    for (std::size_t r : rows) {
        if (r >= size()) throw InputError("windowed pairs: row index out of range");
        out.push_back(input(r), labels_[r], origins_[r]);
    }
    return out;
}

WindowedPairs make_windows(std::span<const double> series, std::size_t w) {
    if (w == 0) throw InputError("make_windows: window length must be positive");
    if (series.size() < w + 1) {
        throw InputError("make_windows: series of length " + std::to_string(series.size()) +
                         " is too short for window " + std::to_string(w));
    }
    WindowedPairs pairs(w);
    for (std::size_t o = 0; o + w < series.size(); ++o) {
        pairs.push_back(series.subspan(o, w), series[o + w], o);
    }
    return pairs;
}

}  // namespace driftguard::data
