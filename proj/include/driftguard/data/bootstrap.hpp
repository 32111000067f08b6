#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace driftguard::data {

struct BootstrapSplit {
    /// n draws with replacement, in draw order.
    std::vector<std::size_t> bag;
    /// Sorted indices never drawn.
    std::vector<std::size_t> oob;
};

/// Samples n of `population` indices uniformly with replacement.
/// Throws InputError when population == 0 or n == 0.
BootstrapSplit bootstrap_resample(std::size_t population, std::size_t n, std::uint64_t seed);

}  // namespace driftguard::data
