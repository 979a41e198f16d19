#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gridsiter/config.hpp"
#include "gridsiter/envelope.hpp"
#include "gridsiter/grid.hpp"
#include "gridsiter/horizon.hpp"
#include "gridsiter/market.hpp"
#include "gridsiter/ranking.hpp"
#include "gridsiter/screening.hpp"

namespace gridsiter {

inline constexpr const char* kToolVersion = "0.3.0";

/// One (size, envelope) family of alternatives. The label names its output
/// files and its Stage-3 ranking universe.
struct EnvelopeCase {
    std::string label;
    double size_mw = 0.0;
    LoadTrajectory traj;
};

/// Every menu entry at every size. Labels are the menu ids for a single
/// size and `<id>_<P>mw` otherwise. Throws EnvelopeError on a bad entry.
std::vector<EnvelopeCase> expand_menu(const std::vector<MenuEntry>& menu, const std::vector<double>& sizes);

/// Union of the envelopes' peak windows; {16..19} when the list is empty.
std::set<int> peak_set(const std::vector<EnvelopeCase>& envs);

struct StudyFrame {
    std::vector<DayBlock> blocks;
    std::vector<int> sample;  // Stage-1 hours (0-based)
    std::set<int> peak;
    std::vector<int> candidates;
};

struct Stage2Scenario {
    int bus = 0;
    std::string envelope;
    ScenarioRun run;
    std::vector<MetricRecord> metrics;  // all, on-peak, off-peak; empty when excluded
};

struct Exclusion {
    std::string scenario;
    std::string stage;
    std::string reason;
};

struct NaiveRow {
    int rank = 0;
    int bus = 0;
    std::string zone;
    double mean_lmp = 0.0;
    double pass_rate = 0.0;
    long feasible = 0;
    long total = 0;
    bool pass = false;
};

struct NaiveReport {
    double size_mw = 0.0;
    double tau_pr = 0.0;
    std::vector<NaiveRow> naive;      // ascending base-case mean LMP
    std::vector<NaiveRow> framework;  // firm shortlist, in rank order
    int naive_passed() const;
};

/// Holds the loaded case, menu, study frame and Stage-1 screener of a run.
class Study {
public:
    explicit Study(RunConfig cfg);
    /// Uses the given envelopes instead of expanding the configured menu.
    Study(RunConfig cfg, std::vector<EnvelopeCase> envs);
    /// Same case and frame with all marginal costs scaled.
    Study(const Study& base, double cost_scale);
    Study(const Study&) = delete;  // the screener points into grid_
    Study& operator=(const Study&) = delete;

    const RunConfig& config() const noexcept { return cfg_; }
    const GridCase& grid() const noexcept { return grid_; }
    const std::vector<MenuEntry>& menu() const noexcept { return menu_; }
    const std::vector<EnvelopeCase>& envelopes() const noexcept { return envs_; }
    const StudyFrame& frame() const noexcept { return frame_; }
    const Screener& screener() const noexcept { return *screener_; }
    MarketOptions market_options() const;

    /// Pass-rate records for every (bus, envelope), bus-major.
    std::vector<PassRateRecord> stage1(const std::vector<EnvelopeCase>& envs, const std::vector<int>& buses) const;

    /// Market simulation of every qualified (bus, envelope) pair.
    std::vector<Stage2Scenario> stage2(const QualifiedSet& qualified, const std::vector<EnvelopeCase>& envs) const;
    ScenarioRun base_case() const;

    /// One ranking per envelope over its non-excluded scenarios.
    std::vector<RankingResult> stage3(const std::vector<Stage2Scenario>& scenarios,
                                      const std::vector<EnvelopeCase>& envs) const;

    /// Lowest base-case mean LMP candidates with a firm load of `size_mw`
    /// each, gated at τ_PR, alongside the framework's firm picks.
    NaiveReport naive(const ScenarioRun& base, double size_mw, int n, const std::vector<int>& framework_picks) const;

private:
    RunConfig cfg_;
    GridCase grid_;
    std::vector<MenuEntry> menu_;
    std::vector<EnvelopeCase> envs_;
    StudyFrame frame_;
    std::shared_ptr<const Screener> screener_;
};

/// Envelopes and qualified members read back from stage1_qualified.json.
struct QualifiedFile {
    std::vector<EnvelopeCase> envelopes;
    QualifiedSet qualified;
};
QualifiedFile parse_qualified_json(const std::string& text);

std::vector<CriteriaRow> criteria_rows(const std::vector<Stage2Scenario>& scenarios, const std::string& envelope);

struct TimeSavings {
    double t_conv = 0.0;
    double t_fast = 0.0;
    double delta = 0.0;
};

/// ΔT = T_conv − T_fast; negative inputs are rejected.
TimeSavings time_savings(double t_conv, double t_fast);

struct TimeSavingsRange {
    double low = 0.0;
    double high = 0.0;
};

/// ΔT over the endpoint combinations of [conv_lo, conv_hi] × [fast_lo, fast_hi].
TimeSavingsRange time_savings_range(double conv_lo, double conv_hi, double fast_lo, double fast_hi);

struct PipelineResult {
    int exit_code = 0;
    std::optional<std::string> failed_stage;
    std::string failure;
    std::vector<PassRateRecord> stage1;
    QualifiedSet qualified;
    ScenarioRun base;
    std::vector<Stage2Scenario> stage2;
    std::vector<RankingResult> rankings;
    std::vector<NaiveReport> naive;
    std::vector<Exclusion> exclusions;
    std::vector<std::string> files;  // written, relative to the output directory
};

/// Runs every stage, writes all artifacts and manifest.json into the
/// configured output directory. Stage failures are recorded in the manifest
/// with partial outputs kept and exit code 3.
PipelineResult run_pipeline(const RunConfig& cfg);

enum class SweepParameter { TauPr, AlphaShift, AlphaPause, CostScale };
SweepParameter parse_sweep_parameter(const std::string& name);
const char* to_string(SweepParameter p);

struct SweepRow {
    double value = 0.0;
    std::string envelope;
    int n_stage1 = 0;
    int n_stage2 = 0;  // N: survivors of both gates
    double mean_closeness = 0.0;
    std::optional<double> spearman;  // cost-scale sweeps only
    std::map<std::string, double> medians;  // "<metric>_<window>" over the envelope's scenarios
    std::string status = "ok";
};

struct SweepReport {
    SweepParameter parameter = SweepParameter::TauPr;
    std::vector<SweepRow> rows;
};

/// Re-runs the stages a parameter affects for each value. A failing value is
/// recorded in its rows and the sweep continues. Writes sweep_<param>.csv.
SweepReport sensitivity_sweep(const RunConfig& cfg, SweepParameter parameter, const std::vector<double>& values);

}  // namespace gridsiter
