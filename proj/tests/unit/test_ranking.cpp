#include <doctest.h>

#include <cmath>
#include <numeric>
#include <map>
#include <random>

#include "gridsiter/ranking.hpp"

using namespace gridsiter;

namespace {

CriteriaRow alt(int bus, double scale, std::mt19937_64* rng = nullptr) {
    std::uniform_real_distribution<double> U(0.5, 1.5);
    auto v = [&](double base) { return base * scale * (rng ? U(*rng) : 1.0); };
    CriteriaRow r;
    r.bus = bus;
    r.envelope = "firm";
    for (MetricRecord* m : {&r.all, &r.on_peak, &r.off_peak}) {
        m->mean_lmp = v(30.0);
        m->p95_p5 = v(4.0);
        m->lmp_std = v(6.0);
        m->binding_hours = v(10.0);
        m->congestion_rent = v(0.02);
        m->hours = 24;
    }
    r.all.window = Window::All;
    r.on_peak.window = Window::OnPeak;
    r.off_peak.window = Window::OffPeak;
    return r;
}

}  // namespace

TEST_CASE("metric groups") {
    const auto& g = metric_groups();
    CHECK(g[0].size() == 4);
    CHECK(g[1].size() == 3);
    CHECK(g[2].size() == 3);
    CHECK(criterion_label(g[1][0]) == "mean_lmp_off_peak");
}

TEST_CASE("inverted min-max scaling") {
    const auto b = scale_invert({10, 20, 30});
    CHECK(b[0] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(b[1] == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(b[2] == 0.0);
    for (double x : scale_invert({5, 5, 5})) CHECK(x == 0.0);
    CHECK(is_degenerate({5, 5, 5}));
    CHECK(!is_degenerate({5, 6}));
}

TEST_CASE("entropy weights") {
    SUBCASE("concentrated column has zero entropy") {
        const auto w = entropy_weights({{1.0, 0.0}}, {false});
        CHECK(std::abs(w.entropies[0]) < 1e-9);
        CHECK(w.dispersions[0] == doctest::Approx(1.0));
        CHECK(w.weights[0] == doctest::Approx(1.0));
    }
    SUBCASE("identical columns share weight") {
        const auto w = entropy_weights({{1.0, 0.3, 0.0}, {1.0, 0.3, 0.0}}, {false, false});
        CHECK(w.weights[0] == doctest::Approx(0.5));
        CHECK(w.weights[1] == doctest::Approx(0.5));
    }
    SUBCASE("concentrated beats uniform") {
        const auto w = entropy_weights({{0.5, 0.5}, {0.99, 0.01}}, {false, false});
        CHECK(w.weights[1] > w.weights[0]);
        CHECK(w.weights[0] + w.weights[1] == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("degenerate column gets zero weight unless strict") {
        const auto w = entropy_weights({{0.0, 0.0, 0.0}, {1.0, 0.2, 0.0}}, {true, false});
        CHECK(w.weights[0] == 0.0);
        CHECK(w.weights[1] == doctest::Approx(1.0));
        const auto s = entropy_weights({{0.0, 0.0, 0.0}, {1.0, 0.2, 0.0}}, {true, false}, true);
        CHECK(s.weights[0] > 0.0);
        CHECK(s.weights[0] + s.weights[1] == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("group normalization") {
    const auto n = normalize_columns({{0.8, 0.0, 1.0}, {0.6, 0.0, 1.0}});
    CHECK(n[0][0] == doctest::Approx(0.8).epsilon(1e-9));
    CHECK(n[1][0] == doctest::Approx(0.6).epsilon(1e-9));
    CHECK(n[0][1] == 0.0);
}

TEST_CASE("TOPSIS fixtures") {
    const auto dom = topsis({{1.0, 0.9, 0.8}, {0.2, 0.1, 0.3}});
    CHECK(dom.closeness[0] == 1.0);
    CHECK(dom.closeness[1] == 0.0);
    const auto three = topsis({{1, 1, 1}, {0, 0, 0}, {0.5, 0.5, 0.5}});
    CHECK(three.closeness[0] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(three.closeness[1] == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(std::abs(three.closeness[2] - 0.5) <= 1e-9);
    const auto same = topsis({{0.3, 0.3, 0.3}, {0.3, 0.3, 0.3}});
    CHECK(same.closeness[0] == 0.5);
    CHECK(same.closeness[1] == 0.5);
}

TEST_CASE("fixed-weight diagnostic") {
    CHECK(weighted_score({{1.0, 0.0, 0.0}})[0] == 0.70);
    CHECK(weighted_score({{0.5, 0.5, 0.5}})[0] == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("spearman and overlap") {
    CHECK(spearman({1, 2, 3, 4}, {1, 2, 3, 4}) == doctest::Approx(1.0));
    CHECK(spearman({1, 2, 3, 4}, {4, 3, 2, 1}) == doctest::Approx(-1.0));
    CHECK(spearman({1, 1, 2}, {1, 1, 2}) == doctest::Approx(1.0));
    CHECK(overlap({1, 2, 3}, {3, 2, 1}) == 3);
    CHECK(overlap({1, 2}, {3, 4}) == 0);
}

TEST_CASE("rank_alternatives invariants on random universes") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<CriteriaRow> rows;
        for (int b = 1; b <= 12; ++b) rows.push_back(alt(b, 1.0, &rng));
        const auto r = rank_alternatives(rows, 5, false, "firm");
        for (const auto& w : r.weights) {
            double s = 0.0;
            for (double x : w.weights) {
                CHECK(x >= 0.0);
                s += x;
            }
            CHECK(std::abs(s - 1.0) <= 1e-9);
        }
        std::vector<int> ranks;
        for (const auto& row : r.rows) {
            CHECK(row.closeness >= 0.0);
            CHECK(row.closeness <= 1.0);
            ranks.push_back(row.rank);
        }
        std::vector<int> expect(12);
        std::iota(expect.begin(), expect.end(), 1);
        CHECK(ranks == expect);
        CHECK(r.shortlist().size() == 5);

        // Reordering the input leaves every CC unchanged.
        auto shuffled = rows;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        const auto r2 = rank_alternatives(shuffled, 5, false, "firm");
        for (std::size_t i = 0; i < r.rows.size(); ++i) {
            CHECK(r.rows[i].bus == r2.rows[i].bus);
            CHECK(r.rows[i].closeness == doctest::Approx(r2.rows[i].closeness).epsilon(1e-12));
        }
    }
}

TEST_CASE("dominated alternative never outranks its dominator") {
    std::vector<CriteriaRow> rows{alt(1, 1.0), alt(2, 1.3), alt(3, 0.8), alt(4, 1.1)};
    const auto r = rank_alternatives(rows, 4);
    std::map<int, double> cc;
    for (const auto& row : r.rows) cc[row.bus] = row.closeness;
    CHECK(cc[3] >= cc[1]);
    CHECK(cc[1] >= cc[4]);
    CHECK(cc[4] >= cc[2]);
    CHECK(r.rows.front().bus == 3);
    CHECK(r.rows.front().closeness == doctest::Approx(1.0));
}

TEST_CASE("ties break on higher G1 score then lower bus") {
    std::vector<CriteriaRow> rows{alt(7, 1.0), alt(3, 1.0), alt(5, 2.0)};
    const auto r = rank_alternatives(rows, 2);
    CHECK(r.rows[0].bus == 3);
    CHECK(r.rows[1].bus == 7);
}

TEST_CASE("k beyond the universe and tiny universes") {
    std::vector<CriteriaRow> rows{alt(1, 1.0), alt(2, 2.0)};
    const auto r = rank_alternatives(rows, 20);
    CHECK(r.shortlist().size() == 2);
    CHECK(rank_alternatives({}, 5).rows.empty());
    const auto single = rank_alternatives({alt(9, 1.0)}, 5);
    REQUIRE(single.rows.size() == 1);
    CHECK(single.rows[0].rank == 1);
}

TEST_CASE("pooled mode reports min and mean CC per bus") {
    std::vector<CriteriaRow> rows;
    for (const char* env : {"firm", "pause"})
        for (int b = 1; b <= 3; ++b) {
            auto r = alt(b, 1.0 + 0.2 * b + (env[0] == 'p' ? 0.05 : 0.0));
            r.envelope = env;
            rows.push_back(r);
        }
    const auto pooled = pooled_ranking(rows);
    REQUIRE(pooled.size() == 3);
    for (const auto& p : pooled) {
        CHECK(p.envelopes == 2);
        CHECK(p.min_closeness <= p.mean_closeness);
    }
}
