#include <doctest.h>

#include "fixtures.hpp"
#include "gridsiter/case_io.hpp"
#include "gridsiter/pipeline.hpp"
#include "gridsiter/screening.hpp"

using namespace gridsiter;

namespace {

PassRateRecord record(int bus, const std::string& env, long feasible, long total, const std::string& fp = "lib") {
    PassRateRecord r;
    r.bus = bus;
    r.envelope = env;
    r.feasible = feasible;
    r.total = total;
    r.library_fingerprint = fp;
    return r;
}

}  // namespace

TEST_CASE("candidate set uses strict voltage bounds") {
    CaseData d = fixtures::triangle().data();
    d.buses[0].base_kv = 13.8;
    d.buses[1].base_kv = 115.0;
    d.buses[2].base_kv = 500.0;
    const GridCase g(d);
    CHECK(candidate_set(g, 24.0, 500.0) == std::vector<int>{2});
    CHECK(candidate_set(fixtures::triangle(), 24.0, 500.0) == std::vector<int>{1, 2, 3});
    CHECK_THROWS(candidate_set(g, 100.0, 100.0));
}

TEST_CASE("2-bus single-path feasibility") {
    const auto g = fixtures::radial_pair(150.0);
    CHECK(dcopf_feasibility(g, 0, {{2, 40.0}}).delta == 1);
    const auto over = dcopf_feasibility(g, 0, {{2, 80.0}});
    CHECK(over.delta == 0);
    CHECK(over.max_slack == doctest::Approx(30.0));
    CHECK(dcopf_feasibility(g, 0, {{2, 0.0}}).delta == 1);
}

TEST_CASE("half-infeasible 2 contingency x 2 hour grid gives PR = 0.5") {
    CaseData d = fixtures::radial_pair(200.0).data();
    d.branches.push_back(fixtures::line(2, 1, 2, 100.0));
    const GridCase g(d);
    ContingencyLibrary lib;
    lib.items = {{ContingencyKind::Branch, 1}, {ContingencyKind::Branch, 2}};
    lib.fingerprint = "two-lines";
    const Screener screener(g, lib);
    auto spec = EnvelopeSpec::defaults(EnvelopeKind::Firm, 62.5);  // 50 MW flat
    const auto traj = build_envelope(spec);
    const auto r = screener.pass_rate(2, traj, {0, 1});
    CHECK(r.total == 4);
    CHECK(r.feasible == 2);
    CHECK(r.pass_rate() == 0.5);
    // Outage of line 1 leaves 150 MW on the 100 MW line; outage of line 2 is fine.
    for (int h : {0, 1}) {
        CHECK(dcopf_feasibility(apply_contingency(g, lib.items[0]), h, {{2, 50.0}}).delta == 0);
        CHECK(dcopf_feasibility(apply_contingency(g, lib.items[1]), h, {{2, 50.0}}).delta == 1);
        CHECK(!r.cell(static_cast<std::size_t>(h), 0, 2));
        CHECK(r.cell(static_cast<std::size_t>(h), 1, 2));
        CHECK(screener.cell(2, 50.0, h, 0).delta == 0);
    }
    CHECK_THROWS_AS(screener.pass_rate(2, traj, {}), std::invalid_argument);
    CHECK_THROWS_AS(Screener(g, ContingencyLibrary{}).pass_rate(2, traj, {0}), std::invalid_argument);
}

TEST_CASE("gate thresholds") {
    const std::vector<PassRateRecord> recs{record(1, "firm", 100, 100), record(2, "firm", 96, 100),
                                           record(3, "firm", 90, 100), record(3, "pause", 94, 100)};
    const auto q = stage1_gate(recs, 0.95);
    CHECK(q.counts.at("firm") == 2);
    CHECK(q.counts.at("pause") == 0);
    CHECK(!q.contains(3, "pause"));
    CHECK(stage1_gate(recs, 0.0).members.size() == 4);
    auto mixed = recs;
    mixed.push_back(record(4, "firm", 1, 1, "other"));
    CHECK_THROWS_AS(stage1_gate(mixed, 0.9), std::invalid_argument);
}

TEST_CASE("contingency library excludes bridges and lists every generator") {
    const GridCase g = load_case("data/cases/grid20.json");
    const auto lib = build_contingency_library(g);
    const auto bridges = island_forming_branches(g);
    std::size_t branches = 0, gens = 0;
    for (const auto& c : lib.items) {
        if (c.kind == ContingencyKind::Branch) {
            ++branches;
            CHECK(bridges.count(c.element_id) == 0);
        } else {
            ++gens;
        }
    }
    CHECK(branches == g.num_branches() - bridges.size());
    CHECK(gens == g.num_generators());
    CHECK(lib.fingerprint == build_contingency_library(g).fingerprint);
    CHECK(lib.fingerprint.size() == 64);
}

TEST_CASE("PR is rational, deterministic, gate monotone and pause dominates firm on small cases") {
    for (const char* name : {"data/cases/case3.json", "data/cases/case5.json"}) {
        const GridCase g = load_case(name);
        const Screener s(g, build_contingency_library(g));
        const auto envs = expand_menu(default_menu(), {60.0});
        std::vector<int> hours;
        for (int h = 0; h < 24; h += 3) hours.push_back(h);
        std::vector<PassRateRecord> recs;
        for (int bus : candidate_set(g, 24.0, 500.0)) {
            std::map<std::string, double> pr;
            for (const auto& e : envs) {
                auto r = s.pass_rate(bus, e.traj, hours);
                r.envelope = e.label;
                CHECK(r.total == static_cast<long>(hours.size() * s.library().size()));
                CHECK(r.pass_rate() == static_cast<double>(r.feasible) / static_cast<double>(r.total));
                const auto again = s.pass_rate(bus, e.traj, hours);
                CHECK(again.bitmap == r.bitmap);
                pr[e.label] = r.pass_rate();
                recs.push_back(r);
            }
            INFO(name << " bus " << bus);
            CHECK(pr["pause"] >= pr["firm"]);
        }
        const auto q90 = stage1_gate(recs, 0.90), q95 = stage1_gate(recs, 0.95), q99 = stage1_gate(recs, 0.99);
        for (const auto& m : q99.members) CHECK(q95.contains(m.first, m.second));
        for (const auto& m : q95.members) CHECK(q90.contains(m.first, m.second));
    }
}
