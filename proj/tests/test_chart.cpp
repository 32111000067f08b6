#include <doctest.h>

#include <cmath>
#include <sstream>

#include "driftguard/chart/chart.hpp"
#include "driftguard/error.hpp"
#include "fixtures.hpp"

using namespace driftguard;
using namespace driftguard::chart;

namespace {

// Forecasts the mean of the window with a fixed spread.
class MeanForecaster final : public Forecaster {
public:
    MeanForecaster(std::size_t w, double s) : w_(w), s_(s) {}
    std::size_t window_len() const override { return w_; }
    Forecast forecast(std::span<const double> window) const override {
        double m = 0.0;
        for (double x : window) m += x;
        return {m / static_cast<double>(window.size()), s_};
    }

private:
    std::size_t w_;
    double s_;
};

const uq::UncertaintyBundle& small_bundle() {
    static const uq::UncertaintyBundle bundle = [] {
        uq::PhaseOneConfig cfg;
        cfg.ensemble.train.hidden_dim = 8;
        cfg.ensemble.train.max_epochs = 40;
        cfg.variance.train.max_epochs = 40;
        cfg.ensemble.members = 3;
        return uq::fit_bundle(fixtures::white_noise(150, 1), cfg);
    }();
    return bundle;
}

}  // namespace

TEST_CASE("control limits") {
    auto l = limits(0.0, 1.0, 2.326);
    CHECK(l.lcl == -2.326);
    CHECK(l.ucl == 2.326);
    l = limits(5.0, 0.5, 2.0);
    CHECK(l.lcl == 4.0);
    CHECK(l.ucl == 6.0);
    l = limits(-1.3, 0.7, 3.1);
    CHECK(l.ucl - l.lcl == doctest::Approx(2 * 3.1 * 0.7));
    CHECK_THROWS_AS(limits(0.0, 0.0, 2.0), DomainError);
    CHECK_THROWS_AS(limits(0.0, -1.0, 2.0), DomainError);
    CHECK_THROWS_AS(limits(0.0, 1.0, 0.0), DomainError);
}

TEST_CASE("values on a limit are in control") {
    CHECK(classify(1, 2.0, {0.0, 1.0}, 2.0).in_control);
    CHECK(classify(1, -2.0, {0.0, 1.0}, 2.0).in_control);
    CHECK(!classify(1, 2.0000001, {0.0, 1.0}, 2.0).in_control);
}

TEST_CASE("monitoring with a fixed forecaster") {
    std::vector<double> xs(30, 0.0);
    xs[20] = 10.0;
    const data::TimeSeries s(xs);
    const MeanForecaster f(3, 1.0);
    const auto rec = monitor(f, s, {});
    CHECK(rec.size() == 27);
    CHECK(rec.front().index == 4);
    // The spike alarms; the chart keeps running with observed values, so the
    // windows holding the spike alarm too.
    const auto alarms = alarm_indices(rec);
    CHECK(alarms.front() == 21);
    CHECK(*first_alarm(rec) == 21);
    for (const auto& r : rec) CHECK(r.in_control == (r.lcl <= r.value && r.value <= r.ucl));
    CHECK_THROWS_AS(monitor(f, data::TimeSeries(std::vector<double>{1, 2, 3}), {}), InputError);
}

TEST_CASE("first alarm") {
    std::vector<AlarmRecord> rec;
    CHECK(!first_alarm(rec));
    for (std::size_t i = 400; i < 430; ++i) {
        AlarmRecord r;
        r.index = i;
        r.in_control = !(i == 410 || i == 420);
        rec.push_back(r);
    }
    CHECK(*first_alarm(rec) == 410);
    AlarmRecord one;
    one.index = 1;
    one.in_control = false;
    CHECK(*first_alarm(std::vector<AlarmRecord>{one}) == 1);
}

TEST_CASE("alarm sets shrink as z grows") {
    const auto s = fixtures::periodic_noise(200, 3);
    const MeanForecaster f(5, 1.0);
    std::vector<std::size_t> prev = alarm_indices(monitor(f, s, {0.5}));
    for (double z : {1.0, 1.5, 2.0, 3.0}) {
        const auto now = alarm_indices(monitor(f, s, {z}));
        CHECK(std::includes(prev.begin(), prev.end(), now.begin(), now.end()));
        prev = now;
    }
}

TEST_CASE("bundle monitoring: counts, wide limits and a spike") {
    const auto& b = small_bundle();
    const auto s = fixtures::white_noise(120, 2);
    const auto rec = monitor(b, s, {});
    CHECK(rec.size() == s.size() - b.window_len);
    CHECK(alarm_indices(monitor(b, s, {1e6})).empty());

    // Build a spike from the bundle's own limits at position k.
    std::vector<double> xs(s.values().begin(), s.values().end());
    const std::size_t k = 80;  // 1-based index k is xs[k - 1]
    const auto pred = uq::predict_total_std(b, std::span<const double>(xs).subspan(k - 1 - b.window_len, b.window_len));
    xs[k - 1] = pred.f_hat + 50.0 * pred.s;
    const auto spiked = monitor(b, data::TimeSeries(xs), {});
    const auto it = std::find_if(spiked.begin(), spiked.end(), [&](const AlarmRecord& r) { return r.index == k; });
    REQUIRE(it != spiked.end());
    CHECK(!it->in_control);

    // No reset: records before the spike match the unspiked run exactly.
    for (std::size_t i = 0; i < rec.size() && rec[i].index < k; ++i) {
        CHECK(rec[i].lcl == spiked[i].lcl);
        CHECK(rec[i].in_control == spiked[i].in_control);
    }
    // Points whose windows exclude the spike are unaffected after it, too.
    for (std::size_t i = 0; i < rec.size(); ++i) {
        if (rec[i].index > k + b.window_len) CHECK(rec[i].ucl == spiked[i].ucl);
    }
}

TEST_CASE("alarm outputs") {
    const MeanForecaster f(2, 1.0);
    const auto rec = monitor(f, data::TimeSeries(std::vector<double>{0, 0, 5, 0}), {});
    std::ostringstream out;
    write_alarms_csv(rec, out);
    std::istringstream in(out.str());
    std::string header, row;
    std::getline(in, header);
    CHECK(header == "index,value,f_hat,s,lcl,ucl,in_control");
    std::getline(in, row);
    CHECK(row.substr(0, 2) == "3,");
    CHECK(row.back() == '0');
    const auto j = alarms_to_json(rec);
    CHECK(j.size() == 2);
    CHECK(j[0]["in_control"] == false);
    CHECK(j[1]["index"] == 4);
}
