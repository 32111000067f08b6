#include "driftguard/metrics/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

#include "driftguard/error.hpp"

namespace driftguard::metrics {

std::optional<std::size_t> RunOutcome::first_alarm() const {
    if (alarms.empty()) return std::nullopt;
    return alarms.front();
}

std::optional<std::size_t> RunOutcome::first_alarm_after_change() const {
    const auto it = std::lower_bound(alarms.begin(), alarms.end(), tau);
    if (it == alarms.end() || *it > length) return std::nullopt;
    return *it;
}

void RunOutcome::validate() const {
    if (tau < 1 || tau > length) throw InputError("run outcome: tau must lie in [1, length]");
    for (std::size_t k = 0; k < alarms.size(); ++k) {
        if (alarms[k] < 1 || alarms[k] > length) throw InputError("run outcome: alarm index out of range");
        if (k > 0 && alarms[k] <= alarms[k - 1]) {
            throw InputError("run outcome: alarm indices must be strictly increasing");
        }
    }
}

double fap(std::span<const RunOutcome> runs) {
    if (runs.empty()) throw InputError("fap: no runs");
    std::size_t hits = 0;
    for (const auto& r : runs) {
        const auto first = r.first_alarm();
        if (first && *first < r.tau) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(runs.size());
}

std::optional<double> ced(std::span<const RunOutcome> runs) {
    double total = 0.0;
    std::size_t n = 0;
    for (const auto& r : runs) {
        if (const auto t = r.first_alarm_after_change()) {
            total += static_cast<double>(*t - r.tau);
            ++n;
        }
    }
    if (n == 0) return std::nullopt;
    return total / static_cast<double>(n);
}

double dr(std::span<const RunOutcome> runs) {
    if (runs.empty()) throw InputError("dr: no runs");
    std::size_t hits = 0;
    for (const auto& r : runs) {
        if (r.first_alarm_after_change()) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(runs.size());
}

double recall(const RunOutcome& run) {
    if (run.tau > run.length) throw InputError("recall: tau must not exceed length");
    const auto lo = std::lower_bound(run.alarms.begin(), run.alarms.end(), run.tau);
    const auto hi = std::upper_bound(run.alarms.begin(), run.alarms.end(), run.length);
    const auto hits = static_cast<double>(std::distance(lo, hi));
    return 100.0 * hits / static_cast<double>(run.length - run.tau + 1);
}

double mean_recall(std::span<const RunOutcome> runs) {
    if (runs.empty()) throw InputError("mean_recall: no runs");
    double total = 0.0;
    for (const auto& r : runs) total += recall(r);
    return total / static_cast<double>(runs.size());
}

MetricsReport summarize(const GroupKey& key, std::span<const RunOutcome> runs) {
    return {key, runs.size(), fap(runs), dr(runs), ced(runs), mean_recall(runs)};
}

std::vector<MetricsReport> aggregate(std::span<const KeyedRun> runs) {
    std::vector<GroupKey> keys;
    std::vector<std::vector<RunOutcome>> groups;
    for (const auto& kr : runs) {
        auto it = std::find(keys.begin(), keys.end(), kr.key);
        if (it == keys.end()) {
            keys.push_back(kr.key);
            groups.emplace_back();
            it = keys.end() - 1;
        }
        auto& group = groups[static_cast<std::size_t>(it - keys.begin())];
        if (!group.empty() && (group.front().tau != kr.run.tau || group.front().length != kr.run.length)) {
            throw InputError("aggregate: runs in group " + kr.key.model +
                             " disagree on tau or length");
        }
        group.push_back(kr.run);
    }
    std::vector<MetricsReport> out;
    out.reserve(keys.size());
    for (std::size_t g = 0; g < keys.size(); ++g) out.push_back(summarize(keys[g], groups[g]));
    return out;
}

void write_report_csv(std::span<const MetricsReport> rows, std::ostream& out) {
    out << "model,phi,delta,reps,FAP,DR,CED,Recall\n";
    char buf[64];
    for (const auto& r : rows) {
        out << r.key.model << ',';
        std::snprintf(buf, sizeof buf, "%g,%g,", r.key.phi, r.key.delta);
        out << buf << r.reps << ',';
        if (r.reps == 0) {
            out << ",,,\n";
            continue;
        }
        std::snprintf(buf, sizeof buf, "%.4f,%.4f,", r.fap, r.dr);
        out << buf;
        if (r.ced) {
            std::snprintf(buf, sizeof buf, "%.4f", *r.ced);
            out << buf;
        }
        std::snprintf(buf, sizeof buf, ",%.4f\n", r.recall);
        out << buf;
    }
}

}  // namespace driftguard::metrics
