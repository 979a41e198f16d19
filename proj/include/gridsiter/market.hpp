#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gridsiter/envelope.hpp"
#include "gridsiter/grid.hpp"
#include "gridsiter/horizon.hpp"
#include "gridsiter/lp.hpp"
#include "gridsiter/network.hpp"

namespace gridsiter {

struct MarketOptions {
    double reserve_fraction = 0.03;  // spinning reserve as a share of hourly demand
    double eps_mu = 1e-4;            // $/MWh binding threshold
    int cost_segments = 5;
    double decomposition_tolerance = 1e-5;  // $/MWh
    int max_network_rounds = 30;            // lazy line-limit rounds per SCUC day
    opt::SolverOptions scuc_solver;
    opt::SolverOptions sced_solver;

    MarketOptions() { scuc_solver.tol.gap_relative = 1e-3; }
};

/// Base demand plus the envelope load at one bus.
class DemandOverlay {
public:
    explicit DemandOverlay(const GridCase& grid) : grid_(&grid) {}
    DemandOverlay(const GridCase& grid, int bus_id, LoadTrajectory traj);

    const GridCase& grid() const noexcept { return *grid_; }
    std::optional<int> bus() const noexcept { return bus_; }
    /// Demand at bus position n for hour index t (MW).
    double demand(std::size_t n, int t) const;
    double total_demand(int t) const;

private:
    const GridCase* grid_;
    std::optional<int> bus_;
    std::size_t bus_pos_ = 0;
    std::optional<LoadTrajectory> traj_;
};

DemandOverlay insert_load(const GridCase& grid, int bus_id, const LoadTrajectory& traj);

/// Commitment state of a unit at the start of a day.
struct UnitState {
    bool on = false;
    int hours_in_state = 1 << 20;  // no lingering min up/down obligation
    std::optional<double> output;  // previous-hour dispatch; unset at a block start
};

std::vector<UnitState> initial_unit_states(const GridCase& grid);

struct ScucDay {
    int day = 0;
    opt::Status status = opt::Status::Infeasible;
    double objective = 0.0;
    long nodes = 0;
    int network_rounds = 0;
    std::vector<std::vector<std::uint8_t>> u, y, z;  // [unit][hour]
    std::vector<std::vector<double>> p;              // [unit][hour], MW

    bool ok() const noexcept { return !u.empty(); }
};

/// Day-ahead unit commitment for 24 hours starting at day * 24. Line limits
/// enter lazily through PTDF rows until no hour violates them. `active_lines`
/// carries lines already known to bind and is extended in place.
ScucDay run_scuc(const DemandOverlay& demand, int day, const std::vector<UnitState>& start,
                 const MarketOptions& options, std::set<int>* active_lines = nullptr);

struct HourlyMarketLog {
    int hour = 0;  // 0-based year-hour index
    double lambda_sys = 0.0;
    std::vector<double> lmp;  // per bus position, $/MWh
    std::vector<double> mu_plus, mu_minus, flow;  // per branch position
    std::vector<double> dispatch;                 // per unit, MW
    bool binding = false;
    double decomposition_residual = 0.0;
};

struct ScedDay {
    bool ok = false;
    std::string failure;
    std::vector<HourlyMarketLog> hours;
    std::vector<UnitState> end_state;
};

/// Hourly economic dispatch with commitments fixed, in the B-theta form so
/// nodal balance duals are the LMPs.
ScedDay run_sced(const DemandOverlay& demand, const ScucDay& commitment, const std::vector<UnitState>& start,
                 const MarketOptions& options);

struct ScenarioRun {
    std::optional<int> bus;
    std::string envelope;
    bool excluded = false;
    std::string reason;
    int failed_day = -1;
    std::vector<HourlyMarketLog> logs;
};

/// SCUC then SCED day by day over the study blocks; the first failure stops
/// the scenario and marks it excluded.
ScenarioRun simulate_scenario(const DemandOverlay& demand, const std::vector<DayBlock>& blocks,
                              const MarketOptions& options, const std::string& envelope = {});

/// LMP decomposition residual |λ − (λ_sys 1 − Φᵀ(μ⁺ − μ⁻))|∞ with Φ the
/// injection PTDF (slack column zero).
double decomposition_residual(const PtdfMatrix& ptdf, const HourlyMarketLog& log);

enum class Window { All, OnPeak, OffPeak };
const char* to_string(Window w);

struct MetricRecord {
    Window window = Window::All;
    double mean_lmp = 0.0;
    double p95_p5 = 0.0;
    double lmp_std = 0.0;
    double binding_hours = 0.0;
    double congestion_rent = 0.0;  // $M/day
    int hours = 0;
};

/// Linear interpolation between order statistics at rank p(n-1)+1.
double percentile(std::vector<double> values, double p);

/// Hours whose within-day hour falls in the window; on-peak is `peak_hours`.
std::vector<const HourlyMarketLog*> window_hours(const std::vector<HourlyMarketLog>& logs, Window window,
                                                 const std::set<int>& peak_hours);

/// Throws std::invalid_argument when the window has fewer than two hours.
MetricRecord compute_metrics(const std::vector<HourlyMarketLog>& logs, Window window, const std::set<int>& peak_hours,
                             const std::vector<double>& flow_limits);

struct SummaryRow {
    std::string envelope;
    Window window = Window::All;
    std::string metric;
    double median = 0.0;
    double iqr = 0.0;
    int n = 0;
    bool empty = false;  // "no qualified scenarios"
};

const std::vector<std::string>& metric_names();
double metric_value(const MetricRecord& m, const std::string& name);

/// Median and IQR per window and metric over one envelope's scenarios.
std::vector<SummaryRow> summarize(const std::string& envelope, const std::vector<std::vector<MetricRecord>>& scenarios);

}  // namespace gridsiter
