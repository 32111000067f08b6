#include "driftguard/data/bootstrap.hpp"

#include "driftguard/audit.hpp"
#include "driftguard/error.hpp"
#include "driftguard/random.hpp"

namespace driftguard::data {

BootstrapSplit bootstrap_resample(std::size_t population, std::size_t n, std::uint64_t seed) {
    if (population == 0) throw InputError("bootstrap_resample: no pairs to resample");
    if (n == 0) throw InputError("bootstrap_resample: resample size must be positive");
    ++audit::counters().bootstrap_draws;
    CounterRng rng(seed);
    BootstrapSplit split;
    split.bag.reserve(n);
    std::vector<bool> drawn(population, false);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t idx = rng.index(population);
        split.bag.push_back(idx);
        drawn[idx] = true;
    }
    for (std::size_t i = 0; i < population; ++i) {
        if (!drawn[i]) split.oob.push_back(i);
    }
    return split;
}

}  // namespace driftguard::data
