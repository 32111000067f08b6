#pragma once

// Brute-force metric definitions: walk every time index of every run.

#include <cstddef>
#include <optional>
#include <vector>

#include "driftguard/metrics/metrics.hpp"
#include "driftguard/random.hpp"

namespace oracle {

struct Metrics {
    double fap, dr, recall;
    std::optional<double> ced;
};

inline Metrics enumerate(const std::vector<driftguard::metrics::RunOutcome>& runs) {
    double fap = 0, dr = 0, recall = 0, ced_sum = 0;
    std::size_t ced_n = 0;
    for (const auto& r : runs) {
        std::vector<bool> alarm(r.length + 1, false);
        for (auto a : r.alarms) alarm[a] = true;
        bool before = false, detected = false;
        std::size_t post = 0, first_post = 0;
        bool seen_any = false;
        for (std::size_t t = 1; t <= r.length; ++t) {
            if (!alarm[t]) continue;
            if (!seen_any && t < r.tau) before = true;
            seen_any = true;
            if (t >= r.tau) {
                if (!detected) first_post = t;
                detected = true;
                ++post;
            }
        }
        fap += before ? 1 : 0;
        dr += detected ? 1 : 0;
        recall += 100.0 * static_cast<double>(post) / static_cast<double>(r.length - r.tau + 1);
        if (detected) {
            ced_sum += static_cast<double>(first_post - r.tau);
            ++ced_n;
        }
    }
    const double n = static_cast<double>(runs.size());
    Metrics m{fap / n, dr / n, recall / n, std::nullopt};
    if (ced_n > 0) m.ced = ced_sum / static_cast<double>(ced_n);
    return m;
}

/// Random alarm sets over T = 500, tau = 401, forcing the boundary cases
/// (alarm at tau, alarm at T) into some runs.
inline std::vector<driftguard::metrics::RunOutcome> random_runs(driftguard::CounterRng& rng) {
    std::vector<driftguard::metrics::RunOutcome> runs(1 + rng.index(20));
    for (auto& r : runs) {
        const double density = rng.uniform() < 0.3 ? 0.0 : rng.uniform() * 0.05;
        for (std::size_t t = 6; t <= r.length; ++t) {
            const bool boundary = (t == r.tau && rng.uniform() < 0.3) || (t == r.length && rng.uniform() < 0.3);
            if (boundary || rng.uniform() < density) r.alarms.push_back(t);
        }
    }
    return runs;
}

}  // namespace oracle
