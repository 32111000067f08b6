#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace driftguard::metrics {

/// Alarm history of one monitored replication. Indices are 1-based; the
/// post-change window is tau..length inclusive.
struct RunOutcome {
    std::size_t tau = 401;
    std::size_t length = 500;
    /// Ascending, unique.
    std::vector<std::size_t> alarms;

    std::optional<std::size_t> first_alarm() const;
    /// First alarm at or after tau.
    std::optional<std::size_t> first_alarm_after_change() const;
    void validate() const;
};

/// Share of runs whose first alarm precedes tau. Throws InputError if empty.
double fap(std::span<const RunOutcome> runs);

/// Mean of t_A - tau over runs with an alarm at or after tau, where t_A is
/// the first such alarm. nullopt when no run qualifies.
std::optional<double> ced(std::span<const RunOutcome> runs);

/// Share of runs with at least one alarm in [tau, length].
double dr(std::span<const RunOutcome> runs);

/// 100 * (alarms in [tau, length]) / (length - tau + 1).
double recall(const RunOutcome& run);
double mean_recall(std::span<const RunOutcome> runs);

struct GroupKey {
    std::string model;
    double phi = 0.0;
    double delta = 0.0;

    bool operator==(const GroupKey&) const = default;
};

struct MetricsReport {
    GroupKey key;
    std::size_t reps = 0;
    double fap = 0.0;
    double dr = 0.0;
    std::optional<double> ced;
    double recall = 0.0;
};

MetricsReport summarize(const GroupKey& key, std::span<const RunOutcome> runs);

struct KeyedRun {
    GroupKey key;
    RunOutcome run;
};

/// One report per distinct key, in order of first appearance.
std::vector<MetricsReport> aggregate(std::span<const KeyedRun> runs);

/// Header model,phi,delta,reps,FAP,DR,CED,Recall; CED empty when undefined
/// and every metric empty for a group without runs.
void write_report_csv(std::span<const MetricsReport> rows, std::ostream& out);

}  // namespace driftguard::metrics
