// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Optional arguments restrict the run to the listed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "driftguard/bench/detector.hpp"
#include "driftguard/bench/experiment.hpp"
#include "driftguard/chart/chart.hpp"
#include "driftguard/data/preprocess.hpp"
#include "driftguard/metrics/metrics.hpp"
#include "driftguard/nn/grad_check.hpp"
#include "driftguard/nn/lstm.hpp"
#include "driftguard/nn/mlp.hpp"
#include "driftguard/nn/rnn.hpp"
#include "driftguard/random.hpp"
#include "driftguard/sim/simulate.hpp"
#include "driftguard/uq/bundle.hpp"
#include "fixtures.hpp"
#include "metrics_oracle.hpp"
#include "oracle.hpp"

namespace fs = std::filesystem;
using namespace driftguard;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
    bool pass = true;
    std::vector<std::string> notes;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            notes.push_back("violated: " + what);
        }
    }
    void note(const std::string& s) { notes.push_back(s); }
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

// ---- 1. gradients ----------------------------------------------------------

struct Batch {
    std::size_t width;
    std::vector<double> inputs, targets;
    std::vector<std::size_t> rows;
    nn::SampleView view() const { return {width, inputs, targets}; }
};

Batch random_batch(CounterRng& rng, std::size_t n, std::size_t w, bool positive_targets) {
    Batch b{w, {}, {}, {}};
    for (std::size_t i = 0; i < n * w; ++i) b.inputs.push_back(rng.uniform(-1.5, 1.5));
    for (std::size_t i = 0; i < n; ++i) {
        const double t = rng.uniform(-1.0, 1.0);
        b.targets.push_back(positive_targets ? t * t : t);
    }
    b.rows.resize(n);
    std::iota(b.rows.begin(), b.rows.end(), std::size_t{0});
    return b;
}

Verdict gradients() {
    Verdict v;
    const auto t0 = Clock::now();
    CounterRng rng(0x9c);
    double worst_lstm = 0, worst_rnn = 0, worst_mlp = 0;
    for (int k = 0; k < 50; ++k) {
        const std::size_t H = 1 + rng.index(6), w = 1 + rng.index(6), n = 1 + rng.index(8);
        const auto batch = random_batch(rng, n, w, false);
        auto lp = nn::LstmParams::random(1, H, rng);
        for (auto& x : lp.values()) x = rng.uniform(-0.9, 0.9);
        const auto variant = k % 2 == 0 ? nn::CellVariant::Standard : nn::CellVariant::SquashedCell;
        worst_lstm = std::max(worst_lstm, nn::grad_check(nn::LstmModel(lp, variant), batch.view(), batch.rows,
                                                         nn::LossKind::MeanSquared, 1e-5));
        worst_rnn = std::max(worst_rnn, nn::grad_check(nn::RnnModel(nn::RnnParams::random(1, H, rng)), batch.view(),
                                                       batch.rows, nn::LossKind::MeanSquared, 1e-5));
        const auto vb = random_batch(rng, n, w, true);
        worst_mlp = std::max(worst_mlp, nn::grad_check(nn::MlpModel(nn::MlpParams::random(w, H, rng)), vb.view(),
                                                       vb.rows, nn::LossKind::GaussianNll, 1e-5));
    }
    const double secs = seconds_since(t0);
    v.note("max relative error: lstm " + fmt("%.2e", worst_lstm) + ", rnn " + fmt("%.2e", worst_rnn) +
           ", variance net " + fmt("%.2e", worst_mlp) + "; " + fmt("%.1f s", secs));
    v.require(worst_lstm < 1e-4 && worst_rnn < 1e-4 && worst_mlp < 1e-4, "max relative error < 1e-4");
    v.require(secs < 60.0, "runtime < 1 minute");
    return v;
}

// ---- 2. forward oracle -----------------------------------------------------

Verdict forward_oracle() {
    Verdict v;
    CounterRng rng(0xf0);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        const std::size_t I = 1 + rng.index(3), H = 1 + rng.index(5);
        auto p = nn::LstmParams::random(I, H, rng);
        for (auto& x : p.values()) x = rng.uniform(-1.5, 1.5);
        std::vector<double> x(I), h(H), c(H);
        for (auto& e : x) e = rng.uniform(-2.0, 2.0);
        for (auto& e : h) e = rng.uniform(-1.0, 1.0);
        for (auto& e : c) e = rng.uniform(-2.0, 2.0);
        for (bool squashed : {false, true}) {
            const auto got = nn::lstm_cell_forward(x, nn::LstmState{h, c}, p,
                                                   squashed ? nn::CellVariant::SquashedCell : nn::CellVariant::Standard);
            const auto want = oracle::lstm_step(p, x, {h, c}, squashed);
            for (std::size_t j = 0; j < H; ++j) {
                worst = std::max({worst, std::fabs(got.h[j] - want.h[j]), std::fabs(got.c[j] - want.c[j])});
            }
        }
        auto q = nn::RnnParams::random(I, H, rng);
        for (auto& e : q.values()) e = rng.uniform(-1.5, 1.5);
        const auto got = nn::rnn_cell_forward(x, h, q);
        const auto want = oracle::rnn_step(q, x, h);
        for (std::size_t j = 0; j < H; ++j) worst = std::max(worst, std::fabs(got[j] - want[j]));
    }
    v.note("max abs difference " + fmt("%.2e", worst) + " over 100 lstm (both forms) and 100 rnn cases");
    v.require(worst <= 1e-12, "agreement to 1e-12");
    return v;
}

// ---- 3. metric oracle ------------------------------------------------------

Verdict metric_oracle() {
    Verdict v;
    CounterRng rng(0x3e);
    std::size_t at_tau = 0, at_end = 0, mismatches = 0;
    for (int k = 0; k < 50; ++k) {
        const auto runs = oracle::random_runs(rng);
        for (const auto& r : runs) {
            const auto first = r.first_alarm_after_change();
            at_tau += first && *first == r.tau ? 1 : 0;
            at_end += !r.alarms.empty() && r.alarms.back() == r.length ? 1 : 0;
        }
        const auto want = oracle::enumerate(runs);
        const auto c = metrics::ced(runs);
        const bool same = metrics::fap(runs) == want.fap && metrics::dr(runs) == want.dr &&
                          metrics::mean_recall(runs) == want.recall && c.has_value() == want.ced.has_value() &&
                          (!c || *c == *want.ced);
        mismatches += same ? 0 : 1;
    }
    v.note(std::to_string(mismatches) + " mismatching sets of 50; runs with t_A = tau: " + std::to_string(at_tau) +
           ", with an alarm at T: " + std::to_string(at_end));
    v.require(mismatches == 0, "exact equality with enumeration");
    v.require(at_tau > 0 && at_end > 0, "boundary cases exercised");
    return v;
}

// ---- 4. simulator ----------------------------------------------------------

double variance(std::span<const double> x) {
    const double m = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
    double ss = 0.0;
    for (double e : x) ss += (e - m) * (e - m);
    return ss / static_cast<double>(x.size());
}

double lag1(std::span<const double> x) {
    const double m = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        den += (x[i] - m) * (x[i] - m);
        if (i > 0) num += (x[i] - m) * (x[i - 1] - m);
    }
    return num / den;
}

Verdict simulator() {
    Verdict v;
    const auto t0 = Clock::now();
    sim::SimConfig c;
    c.phi = 0.0;
    c.length = 1000000;
    c.tau = c.length;
    c.seed = 4242;
    const double var = variance(sim::generate(c).values());
    v.note("variance over 1e6 points " + fmt("%.4f", var) + " (target 1.0)");
    v.require(std::fabs(var / c.garch.unconditional_variance() - 1.0) < 0.05, "variance within 5%");
    for (double phi : {0.1, 0.5, 0.9}) {
        sim::SimConfig a;
        a.phi = phi;
        a.garch.alpha1 = 0.0;
        a.garch.beta = 0.0;
        a.length = 100000;
        a.tau = a.length;
        a.seed = 4343;
        const double r = lag1(sim::generate(a).values());
        v.note("phi " + fmt("%g", phi) + ": lag-1 autocorrelation " + fmt("%.4f", r));
        v.require(std::fabs(r - phi) <= 0.02, "lag-1 autocorrelation within 0.02 of phi " + fmt("%g", phi));
    }
    const double secs = seconds_since(t0);
    v.note(fmt("%.1f s", secs));
    v.require(secs < 120.0, "runtime < 2 minutes");
    return v;
}

// ---- 5 and 6. simulation grid ----------------------------------------------

const std::vector<double> kPositiveDeltas{0.25, 1.0, 1.5, 2.0};

struct Grid {
    bench::ExperimentResult result;
    double seconds = 0.0;

    const metrics::MetricsReport* find(const std::string& model, double phi, double delta) const {
        for (const auto& r : result.reports) {
            if (r.key.model == model && r.key.phi == phi && r.key.delta == delta) return &r;
        }
        return nullptr;
    }
};

const Grid& grid() {
    static const Grid g = [] {
        bench::ExperimentConfig cfg = bench::default_experiment();
        cfg.phis = {0.1, 0.9};
        cfg.deltas = {0.0};
        cfg.deltas.insert(cfg.deltas.end(), kPositiveDeltas.begin(), kPositiveDeltas.end());
        cfg.schedule = sim::SeedScheduleKind::Main;
        cfg.seed_count = 100;
        // As many calibration seeds as evaluation seeds, so the fitted z is
        // no noisier than the FAP it is judged by.
        cfg.calibration.seed_count = 100;
        for (auto& d : cfg.detectors) d.train.max_epochs = 100;
        const auto t0 = Clock::now();
        Grid out{bench::run_experiment(cfg), 0.0};
        out.seconds = seconds_since(t0);
        std::printf("---- grid report (%.0f s, %zu failed runs) ----\n%s", out.seconds, out.result.failed_runs,
                    out.result.report_csv.c_str());
        for (const auto& [key, z] : out.result.z) {
            std::printf("z[%s, phi=%g] = %.4f\n", bench::to_string(key.first).c_str(), key.second, z);
        }
        std::printf("----\n");
        return out;
    }();
    return g;
}

const char* kModels[] = {"proposed", "ablated_a", "ablated_b", "rnn_residual"};

Verdict fap_calibration() {
    Verdict v;
    const auto& g = grid();
    v.require(g.result.failed_runs == 0, "no failed runs");
    for (const char* m : kModels) {
        const auto* r = g.find(m, 0.1, 0.0);
        if (!r) {
            v.require(false, std::string("row for ") + m);
            continue;
        }
        v.note(std::string(m) + " FAP " + fmt("%.3f", r->fap) + " over " + std::to_string(r->reps) + " seeds");
        v.require(r->reps == 100, std::string(m) + " has 100 seeds");
        v.require(r->fap >= 0.005 && r->fap <= 0.04, std::string(m) + " FAP in [0.005, 0.04]");
    }
    v.note("grid runtime (both phi, all deltas, calibration included) " + fmt("%.0f s", g.seconds));
    return v;
}

double ced_or_inf(const metrics::MetricsReport& r) {
    return r.ced ? *r.ced : std::numeric_limits<double>::infinity();
}

Verdict orderings() {
    Verdict v;
    const auto& g = grid();
    // (a) monotone in delta.
    for (double phi : {0.1, 0.9}) {
        for (const char* m : kModels) {
            std::string dr_row = std::string(m) + " phi " + fmt("%g", phi) + " DR", ced_row = " CED";
            for (std::size_t k = 0; k < kPositiveDeltas.size(); ++k) {
                const auto* r = g.find(m, phi, kPositiveDeltas[k]);
                if (!r) {
                    v.require(false, "row present");
                    continue;
                }
                dr_row += " " + fmt("%.2f", r->dr);
                ced_row += " " + (r->ced ? fmt("%.2f", *r->ced) : std::string("-"));
                if (k == 0) continue;
                const auto* prev = g.find(m, phi, kPositiveDeltas[k - 1]);
                if (!prev) continue;
                const std::string where = std::string(m) + " phi " + fmt("%g", phi) + " delta " +
                                          fmt("%g", kPositiveDeltas[k - 1]) + " -> " + fmt("%g", kPositiveDeltas[k]);
                v.require(r->dr >= prev->dr, "(a) DR non-decreasing, " + where);
                v.require(ced_or_inf(*r) <= ced_or_inf(*prev), "(a) CED non-increasing, " + where);
            }
            v.note(dr_row + ced_row);
        }
    }
    // (b) near-certain detection of a 2-sd shift at low autocorrelation.
    for (const char* m : kModels) {
        const auto* r = g.find(m, 0.1, 2.0);
        if (r) v.require(r->dr >= 0.95, std::string("(b) ") + m + " DR >= 0.95 at phi 0.1, delta 2 (got " +
                                            fmt("%.2f", r->dr) + ")");
    }
    // (c) proposed beats the single LSTM under strong autocorrelation.
    for (double delta : {1.0, 1.5}) {
        const auto* p = g.find("proposed", 0.9, delta);
        const auto* b = g.find("ablated_b", 0.9, delta);
        if (!p || !b) continue;
        v.note("phi 0.9 delta " + fmt("%g", delta) + ": proposed DR " + fmt("%.2f", p->dr) + " recall " +
               fmt("%.2f", p->recall) + " vs ablated_b DR " + fmt("%.2f", b->dr) + " recall " + fmt("%.2f", b->recall));
        v.require(p->dr >= b->dr, "(c) proposed DR >= ablated_b DR at phi 0.9, delta " + fmt("%g", delta));
        v.require(p->recall >= b->recall, "(c) proposed recall >= ablated_b recall at phi 0.9, delta " + fmt("%g", delta));
    }
    // (d) prompt detection by the proposed chart.
    if (const auto* p = g.find("proposed", 0.1, 2.0)) {
        v.require(p->ced && *p->ced <= 5.0, "(d) proposed CED <= 5 at phi 0.1, delta 2 (got " +
                                                (p->ced ? fmt("%.2f", *p->ced) : std::string("undefined")) + ")");
    }
    return v;
}

// ---- 7. heteroscedasticity ---------------------------------------------------

Verdict heteroscedasticity() {
    Verdict v;
    const std::size_t n_train = 1000, n_test = 500, w = 5;
    const auto series = fixtures::periodic_noise(n_train + n_test, 0x7e);
    const auto train = series.slice(0, n_train), test = series.slice(n_train, n_test);
    uq::PhaseOneConfig cfg;
    cfg.window_len = w;
    cfg.master_seed = 77;
    cfg.ensemble.train.max_epochs = 100;
    cfg.variance.train.max_epochs = 100;
    const auto bundle = uq::fit_bundle(train, cfg);
    std::vector<double> predicted, truth;
    for (std::size_t t = n_train; t < n_train + n_test; ++t) {
        predicted.push_back(uq::predict_total_std(bundle, series.values().subspan(t - w, w)).noise_variance);
        truth.push_back(fixtures::periodic_variance(t));
    }
    const double rho = fixtures::spearman(predicted, truth);

    auto widths = [&](const chart::Forecaster& f) {
        std::vector<double> s;
        for (const auto& r : bench::monitor_test(f, train, test, chart::kDefaultZ)) s.push_back(r.s);
        return s;
    };
    const chart::BundleForecaster proposed(bundle);
    auto spec = bench::default_spec(bench::DetectorKind::AblatedA);
    spec.train.max_epochs = 100;
    const auto ablated = bench::train_detector(spec, train, 77);
    const double cv_p = fixtures::coefficient_of_variation(widths(proposed));
    const double cv_a = fixtures::coefficient_of_variation(widths(*ablated.forecaster));
    v.note("spearman(noise variance, truth) " + fmt("%.3f", rho) + "; CV(s) proposed " + fmt("%.3f", cv_p) +
           ", ablated_a " + fmt("%.3g", cv_a));
    v.require(rho > 0.5, "rank correlation > 0.5");
    v.require(cv_p > 0.1, "proposed CV(s) > 0.1");
    v.require(cv_a == 0.0, "ablated_a CV(s) = 0");
    return v;
}

// ---- 8. determinism ------------------------------------------------------------

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Verdict determinism() {
    Verdict v;
    const fs::path dir = fs::temp_directory_path() / "driftguard_acceptance_reproduce";
    fs::remove_all(dir);
    fs::create_directories(dir);
    bench::ExperimentConfig cfg = bench::default_experiment();
    cfg.phis = {0.1, 0.9};
    cfg.deltas = {0.0, 1.0};
    cfg.seed_count = 2;
    cfg.calibration.seed_count = 4;
    for (auto& d : cfg.detectors) d.train.max_epochs = 20;
    {
        std::ofstream(dir / "manifest.json") << nlohmann::json{{"config", bench::to_json(cfg)}}.dump(2);
    }
    std::ostringstream out, err;
    const auto manifest = (dir / "manifest.json").string();
    const int a = cli::run({"reproduce", "--manifest", manifest, "--out", (dir / "a").string()}, out, err);
    const int b = cli::run({"reproduce", "--manifest", manifest, "--out", (dir / "b").string(), "--jobs", "2"}, out, err);
    v.require(a == 0 && b == 0, "both runs succeed (exit " + std::to_string(a) + ", " + std::to_string(b) + ")");
    const auto ra = slurp(dir / "a" / "report.csv"), rb = slurp(dir / "b" / "report.csv");
    v.note("report of " + std::to_string(std::count(ra.begin(), ra.end(), '\n')) + " lines, " +
           (ra == rb ? "identical" : "different"));
    v.require(!ra.empty() && ra == rb, "byte-identical reports");
    return v;
}

// ---- 9. preprocessing ------------------------------------------------------------

Verdict preprocessing() {
    Verdict v;
    const double a = data::at_summary(std::vector<double>{3.0});
    v.require(std::fabs(a - std::sqrt(6.0)) < 1e-12, "at_summary([3]) = sqrt 6 (got " + fmt("%.15g", a) + ")");
    const auto start = data::parse_timestamp("2022-03-01T04:00:00Z");
    std::vector<double> values(1440, 7.25);
    std::vector<data::Timestamp> stamps;
    for (int m = 0; m < 1440; ++m) stamps.push_back(start + std::chrono::minutes(m));
    const data::TimeSeries day(values, stamps);
    data::EnergyResampleOptions all;
    all.service.reset();
    const auto raw = data::resample_energy(day, all);
    const auto kept = data::resample_energy(day);
    v.note(std::to_string(raw.size()) + " buckets before the filter, " + std::to_string(kept.size()) + " after");
    v.require(raw.size() == 48, "48 pre-filter buckets");
    v.require(kept.size() == 37, "37 post-filter points");
    return v;
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
        {"gradient exactness", gradients},
        {"forward oracle", forward_oracle},
        {"metric oracle equivalence", metric_oracle},
        {"simulator statistics", simulator},
        {"FAP calibration", fap_calibration},
        {"detection orderings", orderings},
        {"heteroscedasticity recovery", heteroscedasticity},
        {"end-to-end determinism", determinism},
        {"preprocessor arithmetic", preprocessing},
    };
    std::set<std::size_t> only;
    for (int i = 1; i < argc; ++i) only.insert(std::stoul(argv[i]));

    std::vector<std::string> summary;
    bool all = true;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        if (!only.empty() && !only.count(k + 1)) continue;
        Verdict v;
        try {
            v = criteria[k].second();
        } catch (const std::exception& e) {
            v.pass = false;
            v.notes.push_back(std::string("exception: ") + e.what());
        }
        all = all && v.pass;
        const std::string line =
            "criterion " + std::to_string(k + 1) + " " + (v.pass ? "PASS" : "FAIL") + "  " + criteria[k].first;
        std::printf("%s\n", line.c_str());
        for (const auto& n : v.notes) std::printf("    %s\n", n.c_str());
        std::fflush(stdout);
        summary.push_back(line);
    }
    std::printf("==== summary ====\n");
    for (const auto& s : summary) std::printf("%s\n", s.c_str());
    return all ? 0 : 1;
}
