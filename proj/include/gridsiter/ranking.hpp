#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "gridsiter/market.hpp"

namespace gridsiter {

inline constexpr double kRankingEpsilon = 1e-10;

/// Stage-2 metrics of one alternative (bus, envelope) in all three windows.
struct CriteriaRow {
    int bus = 0;
    std::string envelope;
    MetricRecord all, on_peak, off_peak;

    const MetricRecord& window(Window w) const;
};

struct CriterionRef {
    Window window;
    const char* metric;
};

/// G1: peak price dispersion and congestion; G2: off-peak price level;
/// G3: all-hours level, rent and volatility. All columns are cost-type.
const std::array<std::vector<CriterionRef>, 3>& metric_groups();
std::string criterion_label(const CriterionRef& c);

/// Inverted min-max: (max - x) / (max - min + ε).
std::vector<double> scale_invert(const std::vector<double>& column);

/// Range below 1e-12 marks a zero-information column.
bool is_degenerate(const std::vector<double>& raw_column);

struct EntropyWeights {
    std::vector<double> weights;
    std::vector<double> entropies;
    std::vector<double> dispersions;
    std::vector<bool> degenerate;
};

/// Entropy weights of benefit columns. Unless `strict`, degenerate columns get
/// weight 0 and the rest renormalize; a group with no informative column (or
/// zero total dispersion) falls back to uniform weights.
EntropyWeights entropy_weights(const std::vector<std::vector<double>>& benefit_columns,
                               const std::vector<bool>& degenerate, bool strict = false);

/// Σ_j w_j B_rj per alternative.
std::vector<double> group_score(const std::vector<std::vector<double>>& benefit_columns,
                                 const std::vector<double>& weights);

/// Column-wise g / sqrt(Σ g² + ε) of an R×G matrix given as rows.
std::vector<std::vector<double>> normalize_columns(const std::vector<std::vector<double>>& rows);

struct TopsisResult {
    std::vector<double> s_plus, s_minus, closeness;
};

/// CC = S⁻ / (S⁺ + S⁻); 0.5 for every alternative when S⁺ + S⁻ = 0.
TopsisResult topsis(const std::vector<std::vector<double>>& normalized);

inline constexpr std::array<double, 3> kFixedWeights{0.70, 0.20, 0.10};

/// Σ_g w_g ĝ_rg per alternative.
std::vector<double> weighted_score(const std::vector<std::vector<double>>& normalized,
                                   const std::array<double, 3>& weights = kFixedWeights);

/// Spearman correlation with average ranks for ties (higher value = better rank).
double spearman(const std::vector<double>& a, const std::vector<double>& b);

struct RankingRow {
    int bus = 0;
    std::string envelope;
    std::array<double, 3> group{};       // S^G1..3
    std::array<double, 3> normalized{};  // ĝ
    double s_plus = 0.0, s_minus = 0.0, closeness = 0.0;
    double fixed_score = 0.0, uniform_score = 0.0;
    int rank = 0;
    bool shortlisted = false;
};

struct RankingResult {
    std::string envelope;
    std::vector<RankingRow> rows;  // sorted by rank
    std::array<EntropyWeights, 3> weights;
    double spearman_fixed = 1.0, spearman_uniform = 1.0;
    int overlap_fixed = 0, overlap_uniform = 0;
    int k = 0;

    std::vector<int> shortlist() const;
};

/// Full Stage-3 chain over one universe of alternatives. Ties in CC break
/// by higher S^G1, then lower bus id.
RankingResult rank_alternatives(const std::vector<CriteriaRow>& rows, int k, bool strict_entropy = false,
                                const std::string& envelope = {});

/// |A ∩ B| for two shortlists.
int overlap(const std::vector<int>& a, const std::vector<int>& b);

struct PooledRow {
    int bus = 0;
    double min_closeness = 0.0;
    double mean_closeness = 0.0;
    int envelopes = 0;
};

/// Ranks every (bus, envelope) alternative in one universe and reports the
/// minimum and mean CC per bus across envelopes.
std::vector<PooledRow> pooled_ranking(const std::vector<CriteriaRow>& rows, bool strict_entropy = false);

}  // namespace gridsiter
