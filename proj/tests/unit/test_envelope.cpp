#include <doctest.h>

#include <numeric>

#include "gridsiter/envelope.hpp"
#include "gridsiter/horizon.hpp"

using namespace gridsiter;

namespace {

LoadTrajectory make(EnvelopeKind kind, double alpha = -1.0, double p = 1000.0) {
    auto s = EnvelopeSpec::defaults(kind, p);
    if (alpha >= 0.0) s.curtailment = alpha;
    return build_envelope(s);
}

}  // namespace

TEST_CASE("default trajectories at P = 1000 MW") {
    const auto firm = make(EnvelopeKind::Firm);
    const auto pause = make(EnvelopeKind::Pause);
    const auto shift = make(EnvelopeKind::Shift);
    for (int tau = 1; tau <= 24; ++tau) {
        const bool peak = tau >= 16 && tau <= 19;
        CHECK(firm.at(tau) == doctest::Approx(800.0).epsilon(1e-15));
        CHECK(pause.at(tau) == doctest::Approx(peak ? 680.0 : 800.0).epsilon(1e-15));
        CHECK(shift.at(tau) == doctest::Approx(peak ? 640.0 : 832.0).epsilon(1e-15));
    }
    CHECK(std::abs(shift.energy() - firm.energy()) <= 1e-9 * firm.energy());
    CHECK(firm.energy() == doctest::Approx(19200.0));
}

TEST_CASE("ramp checks") {
    const auto shift = make(EnvelopeKind::Shift);
    const auto r = check_ramp(shift, 200.0);
    CHECK(r.pass);
    CHECK(r.worst_step == doctest::Approx(192.0).epsilon(1e-12));
    CHECK((r.worst_hour == 16 || r.worst_hour == 20));

    const auto flat = check_ramp(make(EnvelopeKind::Firm), 0.0);
    CHECK(flat.pass);
    CHECK(flat.worst_step == 0.0);

    auto s = EnvelopeSpec::defaults(EnvelopeKind::Shift, 1000.0);
    s.curtailment = 0.6;
    try {
        (void)build_envelope(s);
        FAIL("expected RampViolation");
    } catch (const RampViolation& e) {
        CHECK(e.step == doctest::Approx(576.0));
        CHECK(e.bound == doctest::Approx(200.0));
    }
}

TEST_CASE("firm is the fixed point of pause and shift") {
    const auto firm = make(EnvelopeKind::Firm);
    CHECK(make(EnvelopeKind::Pause, 0.0).values == firm.values);
    CHECK(make(EnvelopeKind::Shift, 0.0).values == firm.values);
}

TEST_CASE("shift conserves energy and is monotone in alpha") {
    double last_peak = 1e9, last_off = -1.0;
    for (double a : {0.0, 0.05, 0.1, 0.15, 0.2}) {
        const auto t = make(EnvelopeKind::Shift, a);
        CHECK(std::abs(t.energy() - 19200.0) <= 1e-9 * 19200.0);
        CHECK(t.at(17) <= last_peak);
        CHECK(t.at(3) >= last_off);
        last_peak = t.at(17);
        last_off = t.at(3);
    }
    CHECK_THROWS_AS(make(EnvelopeKind::Shift, 0.24), EnvelopeError);
}

TEST_CASE("spec validation") {
    auto s = EnvelopeSpec::defaults(EnvelopeKind::Shift, 1000.0);
    s.peak_window.clear();
    CHECK_THROWS_AS(s.validate(), EnvelopeError);
    s = EnvelopeSpec::defaults(EnvelopeKind::Pause, 1000.0);
    s.utilization = 1.2;
    CHECK_THROWS_AS(s.validate(), EnvelopeError);
    s = EnvelopeSpec::defaults(EnvelopeKind::Pause, 1000.0);
    s.curtailment = 1.0;
    CHECK_THROWS_AS(s.validate(), EnvelopeError);
}

TEST_CASE("menu parsing") {
    const auto menu = parse_menu(R"([{"id": "soft", "kind": "pause", "curtailment": 0.1},
                                      {"id": "move", "kind": "shift", "ramp_fraction": 0.6}])");
    REQUIRE(menu.size() == 2);
    const auto s = menu[1].instantiate(500.0);
    CHECK(s.ramp_bound == doctest::Approx(300.0));
    CHECK(menu[0].instantiate(500.0).curtailment == 0.1);
    CHECK_THROWS_AS(parse_menu(R"([{"id": "x", "kind": "pause", "colour": 1}])"), EnvelopeError);
    CHECK_THROWS_AS(parse_menu(R"([{"id": "x", "kind": "pause"}, {"id": "x", "kind": "firm"}])"), EnvelopeError);
    CHECK(default_menu().size() == 3);
}

TEST_CASE("hour mapping") {
    CHECK(map_hour(1, 8760) == 1);
    CHECK(map_hour(25, 8760) == 1);
    CHECK(map_hour(8760, 8760) == 24);
    CHECK_THROWS(map_hour(0, 8760));
    CHECK_THROWS(map_hour(8761, 8760));
}

TEST_CASE("representative days and hour samples") {
    const auto all = representative_days(56, 0);
    REQUIRE(all.size() == 1);
    CHECK(all[0].num_days == 56);

    const auto four = representative_days(56, 4);
    int days = 0;
    for (const auto& b : four) days += b.num_days;
    CHECK(days == 4);
    CHECK(four.front().first_day == 0);

    const auto hours = block_hours({{0, 1}});
    CHECK(hours.size() == 24);
    const auto sample = sample_hours(hours, HourSamplePolicy::parse("every4+peak"), {16, 17, 18, 19});
    // τ ∈ {1,5,9,13,17,21} plus peak {16,18,19}
    CHECK(sample == std::vector<int>{0, 4, 8, 12, 15, 16, 17, 18, 20});
    CHECK(sample_hours(hours, HourSamplePolicy::parse("full"), {}).size() == 24);
    CHECK(HourSamplePolicy::parse("every6").str() == "every6");
    CHECK_THROWS(HourSamplePolicy::parse("sometimes"));
}
