#pragma once

#include <cstddef>

namespace driftguard::audit {

/// Per-thread call counters for components whose use distinguishes the
/// detector families (bootstrap resampling, variance-network training).
struct Counters {
    std::size_t bootstrap_draws = 0;
    std::size_t variance_net_fits = 0;
};

inline Counters& counters() noexcept {
    thread_local Counters c;
    return c;
}

inline void reset() noexcept { counters() = {}; }

}  // namespace driftguard::audit
