#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "driftguard/audit.hpp"
#include "driftguard/bench/calibration.hpp"
#include "driftguard/bench/detector.hpp"
#include "driftguard/bench/experiment.hpp"
#include "driftguard/error.hpp"
#include "driftguard/random.hpp"
#include "driftguard/sim/simulate.hpp"
#include "fixtures.hpp"

using namespace driftguard;
using namespace driftguard::bench;

namespace {

// Small networks keep the suite fast; the behaviour under test does not
// depend on capacity.
DetectorSpec fast(DetectorKind kind) {
    DetectorSpec s = default_spec(kind);
    s.train.max_epochs = 12;
    s.train.patience = 4;
    s.train.hidden_dim = 8;
    if (uses_ensemble(kind)) s.members = 3;
    s.variance.hidden_dim = 8;
    s.variance.train.max_epochs = 30;
    return s;
}

std::vector<DetectorSpec> fast_all() {
    std::vector<DetectorSpec> v;
    for (auto k : kAllDetectors) v.push_back(fast(k));
    return v;
}

std::pair<data::TimeSeries, data::TimeSeries> sim_split(double phi, double delta, std::uint64_t seed) {
    sim::SimConfig c;
    c.phi = phi;
    c.delta = delta;
    c.seed = seed;
    return data::split_train_test(sim::generate(c), 350);
}

}  // namespace

TEST_CASE("detector names round trip") {
    for (auto k : kAllDetectors) CHECK(detector_kind_from_string(to_string(k)) == k);
    CHECK(to_string(DetectorKind::AblatedB) == "ablated_b");
    CHECK_THROWS_AS(detector_kind_from_string("lstm"), ConfigError);
}

TEST_CASE("detector specs validate their ensemble settings") {
    auto p = default_spec(DetectorKind::Proposed);
    CHECK(p.members == 5u);
    CHECK_NOTHROW(p.validate());
    p.members = 1;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    auto b = default_spec(DetectorKind::AblatedB);
    CHECK(!b.members);
    b.members = 5;
    CHECK_THROWS_AS(b.validate(), ConfigError);
    auto r = default_spec(DetectorKind::RnnResidual);
    r.resample_size = 100;
    CHECK_THROWS_AS(r.validate(), ConfigError);

    const auto back = detector_spec_from_json(to_json(fast(DetectorKind::AblatedA)));
    CHECK(back.kind == DetectorKind::AblatedA);
    CHECK(back.members == 3u);
    CHECK(back.train.hidden_dim == 8u);
    CHECK_THROWS_AS(detector_spec_from_json(nlohmann::json{{"kind", "proposed"}, {"members", "five"}}), ConfigError);
}

TEST_CASE("residual chart centres on the prediction plus mean residual") {
    data::WindowedPairs pairs(1), flat(1);
    for (std::size_t i = 0; i < 4; ++i) {
        const double x[] = {static_cast<double>(i)};
        pairs.push_back(x, x[0] + (i % 2 == 0 ? 1.0 : 3.0), i);
        flat.push_back(x, x[0] + 1.0, i);
    }
    const Predictor identity = [](std::span<const double> w) { return w.back(); };
    const auto st = residual_stats(pairs, identity);
    CHECK(st.mean == doctest::Approx(2.0));
    CHECK(st.sd == doctest::Approx(std::sqrt(4.0 / 3.0)));
    ResidualChartForecaster fc(1, identity, st);
    const double x[] = {10.0};
    CHECK(fc.forecast(x).center == doctest::Approx(12.0));
    CHECK(fc.forecast(x).s == doctest::Approx(st.sd));

    CHECK_THROWS_AS(residual_stats(flat, identity), DomainError);
}

TEST_CASE("training is deterministic in the master seed") {
    const auto [train, test] = sim_split(0.5, 1.0, 20000);
    const auto specs = fast_all();
    const auto a = train_detectors(specs, train, 42);
    const auto b = train_detectors(specs, train, 42);
    const auto c = train_detectors(specs, train, 43);
    REQUIRE(a.size() == 4);
    const double w[] = {0.1, -0.2, 0.3, 0.0, 0.5};
    bool any_diff = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].kind == specs[i].kind);
        CHECK(a[i].data_hash == b[i].data_hash);
        CHECK(a[i].forecaster->forecast(w).center == b[i].forecaster->forecast(w).center);
        CHECK(a[i].forecaster->forecast(w).s == b[i].forecaster->forecast(w).s);
        any_diff = any_diff || a[i].forecaster->forecast(w).center != c[i].forecaster->forecast(w).center;
    }
    CHECK(any_diff);
    // Jointly and separately trained detectors agree.
    const auto alone = train_detector(specs[2], train, 42);
    CHECK(alone.forecaster->forecast(w).center == a[2].forecaster->forecast(w).center);
}

TEST_CASE("only the proposed detector uses both bootstrap and the variance net") {
    const auto [train, test] = sim_split(0.1, 0.0, 20100);
    auto counts = [&](DetectorKind k) {
        audit::reset();
        train_detector(fast(k), train, 1);
        return audit::counters();
    };
    const auto p = counts(DetectorKind::Proposed);
    CHECK(p.bootstrap_draws == 3);
    CHECK(p.variance_net_fits == 1);
    const auto a = counts(DetectorKind::AblatedA);
    CHECK(a.bootstrap_draws == 3);
    CHECK(a.variance_net_fits == 0);
    for (auto k : {DetectorKind::AblatedB, DetectorKind::RnnResidual}) {
        const auto c = counts(k);
        CHECK(c.bootstrap_draws == 0);
        CHECK(c.variance_net_fits == 0);
    }
}

TEST_CASE("constant-width detectors have a constant spread") {
    const auto [train, test] = sim_split(0.5, 0.0, 20200);
    for (auto k : {DetectorKind::AblatedA, DetectorKind::AblatedB, DetectorKind::RnnResidual}) {
        const auto d = train_detector(fast(k), train, 5);
        const auto recs = monitor_test(*d.forecaster, train, test, 2.326);
        REQUIRE(recs.size() == test.size());
        for (const auto& r : recs) CHECK(r.s == recs.front().s);
        CHECK(recs.front().index == 351);
        CHECK(recs.back().index == 500);
    }
}

TEST_CASE("a shift of 50 data standard deviations is flagged within two steps") {
    std::size_t quick = 0;
    const std::size_t seeds = 20;
    for (std::size_t k = 0; k < seeds; ++k) {
        const auto [train, test] = sim_split(0.1, 50.0, 20000 + 100 * k);
        const auto out = run_proposed(train, test, fast(DetectorKind::Proposed), 401, k);
        const auto first = out.first_alarm_after_change();
        if (first && *first <= 403) ++quick;
    }
    CHECK(static_cast<double>(quick) >= 0.95 * static_cast<double>(seeds));
}

TEST_CASE("on white noise the proposed and constant-width ensembles alarm comparably") {
    std::size_t proposed = 0, ablated = 0;
    const std::vector<DetectorSpec> specs{fast(DetectorKind::Proposed), fast(DetectorKind::AblatedA)};
    for (std::uint64_t k = 0; k < 20; ++k) {
        const auto [train, test] = data::split_train_test(fixtures::white_noise(500, 900 + k), 350);
        const auto dets = train_detectors(specs, train, k);
        proposed += run_detector(*dets[0].forecaster, train, test, 2.0, 401).alarms.size();
        ablated += run_detector(*dets[1].forecaster, train, test, 2.0, 401).alarms.size();
    }
    REQUIRE(proposed > 0);
    const double ratio = static_cast<double>(ablated) / static_cast<double>(proposed);
    CHECK(ratio >= 0.5);
    CHECK(ratio <= 2.0);
}

TEST_CASE("family runners reject a spec of another family") {
    const auto [train, test] = sim_split(0.1, 0.0, 20300);
    CHECK_THROWS_AS(run_ablated_b(train, test, fast(DetectorKind::Proposed), 401, 0), ConfigError);
}

TEST_CASE("block maxima drop a short tail") {
    const std::vector<double> s{1, 5, 2, 3, 9, 4, 7};
    CHECK(block_maxima(s, 3) == std::vector<double>{5, 9});
    CHECK(block_maxima(s, 7) == std::vector<double>{9});
    CHECK(block_maxima(s, 8).empty());
}

TEST_CASE("Gumbel fit recovers known parameters") {
    CounterRng rng(3);
    std::vector<double> x(20000);
    for (auto& v : x) v = 3.0 - 0.5 * std::log(-std::log(rng.uniform()));
    const auto fit = fit_gumbel(x);
    CHECK(fit.location == doctest::Approx(3.0).epsilon(0.02));
    CHECK(fit.scale == doctest::Approx(0.5).epsilon(0.05));
    CHECK(gumbel_quantile({0.0, 1.0}, std::exp(-1.0)) == doctest::Approx(0.0));
    CHECK_THROWS_AS(fit_gumbel(std::vector<double>{1.0}), InputError);
    CHECK_THROWS_AS(fit_gumbel(std::vector<double>{2.0, 2.0}), DomainError);
}

TEST_CASE("calibrated z matches the exact maximum of normal blocks") {
    // P(max of 50 |N(0,1)| <= z) = (1 - erfc(z / sqrt 2))^50 = 0.98.
    auto cdf = [](double z) { return std::pow(1.0 - std::erfc(z / std::sqrt(2.0)), 50.0); };
    double lo = 2.0, hi = 5.0;
    for (int i = 0; i < 100; ++i) (cdf(0.5 * (lo + hi)) < 0.98 ? lo : hi) = 0.5 * (lo + hi);
    CounterRng rng(11);
    std::vector<double> scores(50 * 4000);
    for (auto& v : scores) v = std::fabs(rng.normal());
    const double z = calibrate_z(block_maxima(scores, 50), 0.02);
    CHECK(z == doctest::Approx(lo).epsilon(0.05));
    CHECK(standardized_score(4.0, {1.0, 2.0}) == 1.5);
    CHECK_THROWS_AS(standardized_score(4.0, {1.0, 0.0}), DomainError);
}

TEST_CASE("conformal threshold ranks and falls back to the Gumbel fit") {
    std::vector<double> x(100);
    std::iota(x.begin(), x.end(), 1.0);
    std::reverse(x.begin(), x.end());
    CHECK(conformal_z(x, 0.02) == 99.0);
    CHECK(calibrate_z(x, 0.02) == 99.0);
    CHECK(conformal_z(std::span<const double>(x).first(49), 0.02) == 100.0);
    const std::span<const double> few = std::span<const double>(x).first(30);
    CHECK(!conformal_z(few, 0.02));
    CHECK(calibrate_z(few, 0.02) == gumbel_quantile(fit_gumbel(few), 0.98));
}

TEST_CASE("conformal threshold is exceeded at the target rate") {
    // Fresh in-control maxima exceed the threshold with probability
    // 2 / 101 for n = 100 and target 0.02, whatever their distribution.
    CounterRng rng(21);
    std::size_t exceed = 0;
    const std::size_t reps = 4000;
    for (std::size_t r = 0; r < reps; ++r) {
        std::vector<double> maxima(100);
        for (auto& m : maxima) m = std::exp(2.0 * rng.normal());
        const double z = *conformal_z(maxima, 0.02);
        exceed += std::exp(2.0 * rng.normal()) > z ? 1 : 0;
    }
    CHECK(static_cast<double>(exceed) / reps == doctest::Approx(2.0 / 101.0).epsilon(0.25));
}

TEST_CASE("experiment config parsing") {
    const auto base = default_experiment();
    CHECK(base.detectors.size() == 4);
    const auto cfg = experiment_config_from_json(
        nlohmann::json{{"phis", {0.5}}, {"deltas", {0.0, 1.0}}, {"seed_count", 3},
                       {"detectors", {"ablated_b", {{"kind", "proposed"}, {"members", 4}}}},
                       {"calibration", {{"enabled", false}}}},
        base);
    CHECK(cfg.phis == std::vector<double>{0.5});
    CHECK(cfg.detectors.size() == 2);
    CHECK(cfg.detectors[1].members == 4u);
    CHECK(!cfg.calibration.enabled);
    const auto again = experiment_config_from_json(to_json(cfg), default_experiment());
    CHECK(to_json(again) == to_json(cfg));
    CHECK_THROWS_AS(experiment_config_from_json(nlohmann::json{{"phis", {1.5}}}, base), ConfigError);
    CHECK_THROWS_AS(experiment_config_from_json(nlohmann::json{{"detectors", {"svm"}}}, base), ConfigError);
    CHECK_THROWS_AS(reproduce_preset("table9", 1), ConfigError);
    const auto t4 = reproduce_preset("table4", 2);
    CHECK(std::find(t4.deltas.begin(), t4.deltas.end(), 0.0) == t4.deltas.end());
    CHECK(t4.seed_count == 2);
    CHECK(reproduce_preset("appendix", 1).schedule == sim::SeedScheduleKind::Appendix);
}

TEST_CASE("a one-cell grid reports one row per detector") {
    ExperimentConfig cfg;
    cfg.deltas = {1.0};
    cfg.seed_count = 1;
    cfg.detectors = {fast(DetectorKind::AblatedB)};
    cfg.calibration.enabled = false;
    cfg.jobs = 1;
    const auto res = run_experiment(cfg);
    REQUIRE(res.reports.size() == 1);
    CHECK(res.reports[0].reps == 1);
    CHECK(res.reports[0].key.model == "ablated_b");
    CHECK(res.failed_runs == 0);
    CHECK(res.runs.size() == 1);
    CHECK(res.runs[0].seed == 20000);
    CHECK(res.runs[0].z == chart::kDefaultZ);
    CHECK(res.report_csv.rfind("model,phi,delta,reps,FAP,DR,CED,Recall\nablated_b,0.1,1,1,", 0) == 0);
}

TEST_CASE("experiment results do not depend on the worker count") {
    ExperimentConfig cfg;
    cfg.deltas = {0.0, 2.0};
    cfg.seed_count = 2;
    cfg.detectors = {fast(DetectorKind::AblatedB), fast(DetectorKind::RnnResidual)};
    cfg.calibration.seed_count = 4;
    cfg.jobs = 1;
    const auto one = run_experiment(cfg);
    cfg.jobs = 3;
    const auto three = run_experiment(cfg);
    CHECK(one.report_csv == three.report_csv);
    CHECK(one.manifest == three.manifest);
    REQUIRE(one.runs.size() == 8);
    CHECK(one.reports.size() == 4);
    for (const auto& [key, z] : one.z) {
        CHECK(z > 1.0);
        CHECK(z < 10.0);
    }
    CHECK(one.z.size() == 2);
    // The runs are ordered phi, delta, seed, detector.
    CHECK(one.runs[0].delta == 0.0);
    CHECK(one.runs[1].kind == DetectorKind::RnnResidual);
    CHECK(one.runs[2].seed == 20100);
    CHECK(one.runs[4].delta == 2.0);
}
