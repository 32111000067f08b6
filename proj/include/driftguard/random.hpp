#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

namespace driftguard {

/// SplitMix64 finalizer. Bijective on 64-bit words.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Derives an independent child seed from a parent seed and a stream id.
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t stream) noexcept;

/// Inverse of the standard normal CDF (Wichura's AS241, ~1e-16 relative).
/// Requires 0 < p < 1.
double normal_quantile(double p);

/// Counter-based generator: draw k is a pure function of (seed, k), so
/// streams are reproducible on every platform and can be skipped ahead.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) noexcept : seed_(mix64(seed ^ 0x6a09e667f3bcc909ULL)) {}

    std::uint64_t next_u64() noexcept;

    /// Uniform on the open interval (0, 1).
    double uniform() noexcept;

    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n). Unbiased (rejection sampling). n > 0.
    std::size_t index(std::size_t n) noexcept;

    /// Standard normal variate by inverse CDF.
    double normal();

    template <class T>
    void shuffle(std::span<T> items) noexcept {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::size_t j = index(i);
            std::swap(items[i - 1], items[j]);
        }
    }

    std::uint64_t counter() const noexcept { return counter_; }

private:
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
};

}  // namespace driftguard
