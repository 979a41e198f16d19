#include "gridsiter/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

namespace gridsiter {

const MetricRecord& CriteriaRow::window(Window w) const {
    switch (w) {
        case Window::All: return all;
        case Window::OnPeak: return on_peak;
        case Window::OffPeak: return off_peak;
    }
    return all;
}

const std::array<std::vector<CriterionRef>, 3>& metric_groups() {
    static const std::array<std::vector<CriterionRef>, 3> groups{
        std::vector<CriterionRef>{{Window::OnPeak, "p95_p5"},
                                  {Window::OnPeak, "congestion_rent"},
                                  {Window::OnPeak, "binding_hours"},
                                  {Window::OnPeak, "lmp_std"}},
        std::vector<CriterionRef>{{Window::OffPeak, "mean_lmp"}, {Window::OffPeak, "binding_hours"}, {Window::OffPeak, "lmp_std"}},
        std::vector<CriterionRef>{{Window::All, "mean_lmp"}, {Window::All, "congestion_rent"}, {Window::All, "lmp_std"}},
    };
    return groups;
}

std::string criterion_label(const CriterionRef& c) { return fmt::format("{}_{}", c.metric, to_string(c.window)); }

std::vector<double> scale_invert(const std::vector<double>& column) {
    if (column.empty()) return {};
    const auto [lo, hi] = std::minmax_element(column.begin(), column.end());
    const double mx = *hi, range = *hi - *lo;
    std::vector<double> out;
    out.reserve(column.size());
    for (double x : column) out.push_back((mx - x) / (range + kRankingEpsilon));
    return out;
}

bool is_degenerate(const std::vector<double>& raw_column) {
    if (raw_column.empty()) return true;
    const auto [lo, hi] = std::minmax_element(raw_column.begin(), raw_column.end());
    return *hi - *lo < 1e-12;
}

EntropyWeights entropy_weights(const std::vector<std::vector<double>>& benefit_columns,
                               const std::vector<bool>& degenerate, bool strict) {
    const std::size_t J = benefit_columns.size();
    EntropyWeights out;
    out.degenerate = degenerate;
    out.degenerate.resize(J, false);
    out.entropies.assign(J, 0.0);
    out.dispersions.assign(J, 0.0);
    out.weights.assign(J, 0.0);
    if (J == 0) return out;
    const std::size_t R = benefit_columns.front().size();
    if (R < 2) {
        std::fill(out.weights.begin(), out.weights.end(), 1.0 / static_cast<double>(J));
        return out;
    }
    const double log_r = std::log(static_cast<double>(R));
    for (std::size_t j = 0; j < J; ++j) {
        const auto& col = benefit_columns[j];
        const double sum = std::accumulate(col.begin(), col.end(), 0.0);
        double h = 0.0;
        for (double b : col) {
            const double p = b / (sum + kRankingEpsilon);
            h += p * std::log(p + kRankingEpsilon);
        }
        out.entropies[j] = -h / log_r;
        out.dispersions[j] = 1.0 - out.entropies[j];
    }
    double total = 0.0;
    for (std::size_t j = 0; j < J; ++j)
        if (strict || !out.degenerate[j]) total += out.dispersions[j];
    if (!(total > 0.0)) {
        std::size_t live = 0;
        for (std::size_t j = 0; j < J; ++j)
            if (strict || !out.degenerate[j]) ++live;
        for (std::size_t j = 0; j < J; ++j) {
            if (live == 0)
                out.weights[j] = 1.0 / static_cast<double>(J);
            else if (strict || !out.degenerate[j])
                out.weights[j] = 1.0 / static_cast<double>(live);
        }
        return out;
    }
    for (std::size_t j = 0; j < J; ++j)
        if (strict || !out.degenerate[j]) out.weights[j] = out.dispersions[j] / total;
    return out;
}

std::vector<double> group_score(const std::vector<std::vector<double>>& benefit_columns,
                                const std::vector<double>& weights) {
    if (benefit_columns.empty()) return {};
    std::vector<double> s(benefit_columns.front().size(), 0.0);
    for (std::size_t j = 0; j < benefit_columns.size(); ++j)
        for (std::size_t r = 0; r < s.size(); ++r) s[r] += weights[j] * benefit_columns[j][r];
    return s;
}

std::vector<std::vector<double>> normalize_columns(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) return {};
    const std::size_t G = rows.front().size();
    std::vector<double> norm(G, 0.0);
    for (const auto& r : rows)
        for (std::size_t g = 0; g < G; ++g) norm[g] += r[g] * r[g];
    for (double& n : norm) n = std::sqrt(n + kRankingEpsilon);
    std::vector<std::vector<double>> out = rows;
    for (auto& r : out)
        for (std::size_t g = 0; g < G; ++g) r[g] /= norm[g];
    return out;
}

TopsisResult topsis(const std::vector<std::vector<double>>& normalized) {
    TopsisResult out;
    if (normalized.empty()) return out;
    const std::size_t G = normalized.front().size();
    std::vector<double> best(G, -std::numeric_limits<double>::infinity());
    std::vector<double> worst(G, std::numeric_limits<double>::infinity());
    for (const auto& r : normalized) {
        for (std::size_t g = 0; g < G; ++g) {
            best[g] = std::max(best[g], r[g]);
            worst[g] = std::min(worst[g], r[g]);
        }
    }
    for (const auto& r : normalized) {
        double dp = 0.0, dm = 0.0;
        for (std::size_t g = 0; g < G; ++g) {
            dp += (r[g] - best[g]) * (r[g] - best[g]);
            dm += (r[g] - worst[g]) * (r[g] - worst[g]);
        }
        out.s_plus.push_back(std::sqrt(dp));
        out.s_minus.push_back(std::sqrt(dm));
        const double denom = out.s_plus.back() + out.s_minus.back();
        out.closeness.push_back(denom > 0.0 ? out.s_minus.back() / denom : 0.5);
    }
    return out;
}

std::vector<double> weighted_score(const std::vector<std::vector<double>>& normalized,
                                   const std::array<double, 3>& weights) {
    std::vector<double> out;
    for (const auto& r : normalized) {
        double s = 0.0;
        for (std::size_t g = 0; g < std::min<std::size_t>(3, r.size()); ++g) s += weights[g] * r[g];
        out.push_back(s);
    }
    return out;
}

namespace {

std::vector<double> average_ranks(const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] > v[b]; });
    std::vector<double> rank(v.size());
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
        const double r = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) rank[idx[k]] = r;
        i = j + 1;
    }
    return rank;
}

}  // namespace

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("spearman needs equal-length samples");
    if (a.size() < 2) return 1.0;
    const auto ra = average_ranks(a), rb = average_ranks(b);
    const double n = static_cast<double>(a.size());
    const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
    const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        sab += (ra[i] - ma) * (rb[i] - mb);
        saa += (ra[i] - ma) * (ra[i] - ma);
        sbb += (rb[i] - mb) * (rb[i] - mb);
    }
    if (saa == 0.0 || sbb == 0.0) return saa == sbb ? 1.0 : 0.0;
    return sab / std::sqrt(saa * sbb);
}

std::vector<int> RankingResult::shortlist() const {
    std::vector<int> out;
    for (const auto& r : rows)
        if (r.shortlisted) out.push_back(r.bus);
    return out;
}

int overlap(const std::vector<int>& a, const std::vector<int>& b) {
    int n = 0;
    for (int x : a)
        if (std::find(b.begin(), b.end(), x) != b.end()) ++n;
    return n;
}

namespace {

// Positions of alternatives ordered best first by `score`, ties by higher
// S^G1 then lower bus id.
std::vector<std::size_t> order_by(const std::vector<double>& score, const std::vector<RankingRow>& rows) {
    std::vector<std::size_t> idx(rows.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (score[a] != score[b]) return score[a] > score[b];
        if (rows[a].group[0] != rows[b].group[0]) return rows[a].group[0] > rows[b].group[0];
        if (rows[a].bus != rows[b].bus) return rows[a].bus < rows[b].bus;
        return rows[a].envelope < rows[b].envelope;
    });
    return idx;
}

std::vector<int> top_buses(const std::vector<std::size_t>& order, const std::vector<RankingRow>& rows, int k) {
    std::vector<int> out;
    for (std::size_t i = 0; i < order.size() && static_cast<int>(out.size()) < k; ++i) out.push_back(rows[order[i]].bus);
    return out;
}

}  // namespace

RankingResult rank_alternatives(const std::vector<CriteriaRow>& alternatives, int k, bool strict_entropy,
                                const std::string& envelope) {
    RankingResult res;
    res.envelope = envelope;
    const std::size_t R = alternatives.size();
    if (k > static_cast<int>(R) && R > 0)
        spdlog::warn("stage3 {}: k = {} exceeds the {} qualified alternatives; returning all", envelope, k, R);
    res.k = std::min<int>(k, static_cast<int>(R));
    if (R == 0) return res;

    std::vector<RankingRow> rows(R);
    std::vector<std::vector<double>> scores(R, std::vector<double>(3, 0.0));
    const auto& groups = metric_groups();
    for (std::size_t g = 0; g < 3; ++g) {
        std::vector<std::vector<double>> benefits;
        std::vector<bool> degenerate;
        for (const CriterionRef& c : groups[g]) {
            std::vector<double> raw;
            for (const auto& a : alternatives) raw.push_back(metric_value(a.window(c.window), c.metric));
            for (double v : raw)
                if (!std::isfinite(v)) throw std::invalid_argument("non-finite metric in the decision matrix");
            degenerate.push_back(is_degenerate(raw));
            benefits.push_back(scale_invert(raw));
        }
        res.weights[g] = entropy_weights(benefits, degenerate, strict_entropy);
        const auto s = group_score(benefits, res.weights[g].weights);
        for (std::size_t r = 0; r < R; ++r) scores[r][g] = s[r];
    }
    const auto norm = normalize_columns(scores);
    const auto tp = topsis(norm);
    const auto fixed = weighted_score(norm);
    const auto uniform = weighted_score(norm, {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
    for (std::size_t r = 0; r < R; ++r) {
        RankingRow& row = rows[r];
        row.bus = alternatives[r].bus;
        row.envelope = alternatives[r].envelope;
        for (std::size_t g = 0; g < 3; ++g) {
            row.group[g] = scores[r][g];
            row.normalized[g] = norm[r][g];
        }
        row.s_plus = tp.s_plus[r];
        row.s_minus = tp.s_minus[r];
        row.closeness = tp.closeness[r];
        row.fixed_score = fixed[r];
        row.uniform_score = uniform[r];
    }

    const auto order = order_by(tp.closeness, rows);
    res.spearman_fixed = spearman(tp.closeness, fixed);
    res.spearman_uniform = spearman(tp.closeness, uniform);
    const auto top = top_buses(order, rows, res.k);
    res.overlap_fixed = overlap(top, top_buses(order_by(fixed, rows), rows, res.k));
    res.overlap_uniform = overlap(top, top_buses(order_by(uniform, rows), rows, res.k));

    for (std::size_t i = 0; i < order.size(); ++i) {
        RankingRow row = rows[order[i]];
        row.rank = static_cast<int>(i) + 1;
        row.shortlisted = static_cast<int>(i) < res.k;
        res.rows.push_back(row);
    }
    return res;
}

std::vector<PooledRow> pooled_ranking(const std::vector<CriteriaRow>& rows, bool strict_entropy) {
    const RankingResult all = rank_alternatives(rows, static_cast<int>(rows.size()), strict_entropy, "pooled");
    std::map<int, PooledRow> by_bus;
    for (const auto& r : all.rows) {
        auto [it, fresh] = by_bus.try_emplace(r.bus, PooledRow{r.bus, r.closeness, 0.0, 0});
        PooledRow& p = it->second;
        p.min_closeness = std::min(p.min_closeness, r.closeness);
        p.mean_closeness += r.closeness;
        ++p.envelopes;
    }
    std::vector<PooledRow> out;
    for (auto& [bus, p] : by_bus) {
        p.mean_closeness /= p.envelopes;
        out.push_back(p);
    }
    std::stable_sort(out.begin(), out.end(), [](const PooledRow& a, const PooledRow& b) {
        if (a.min_closeness != b.min_closeness) return a.min_closeness > b.min_closeness;
        return a.bus < b.bus;
    });
    return out;
}

}  // namespace gridsiter
