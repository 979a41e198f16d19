#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "gridsiter/envelope.hpp"
#include "gridsiter/grid.hpp"
#include "gridsiter/lp.hpp"
#include "gridsiter/network.hpp"

namespace gridsiter {

/// The fixed N-1 outage list of a run: every in-service branch that does not
/// island the network, then every generator.
struct ContingencyLibrary {
    std::vector<Contingency> items;
    std::string fingerprint;  // SHA-256 over the case fingerprint and the ordered labels

    std::size_t size() const noexcept { return items.size(); }
};

ContingencyLibrary build_contingency_library(const GridCase& grid);

/// SHA-256 of the canonical case JSON.
std::string case_fingerprint(const GridCase& grid);

/// Buses with vmin < base_kv < vmax, in case order.
std::vector<int> candidate_set(const GridCase& grid, double vmin_kv, double vmax_kv);

struct ExtraLoad {
    int bus_id = 0;
    double mw = 0.0;
};

struct OpfOptions {
    double slack_penalty = 1e5;     // $/MWh on thermal-limit slack
    double slack_tolerance = 1e-6;  // MW
    opt::SolverOptions solver;
};

struct OpfOutcome {
    int delta = 0;  // 1 iff optimal with every thermal slack within tolerance
    opt::Status status = opt::Status::Infeasible;
    double max_slack = 0.0;
    double objective = 0.0;
};

/// DC-OPF for hour index t on a (possibly contingency-reduced) view:
/// all units available in [0, pmax_t], five-segment costs, PTDF flow limits
/// with penalized slack.
OpfOutcome dcopf_feasibility(const CaseView& view, const PtdfMatrix& ptdf, int hour,
                             const std::vector<ExtraLoad>& extra, const OpfOptions& options = {});
OpfOutcome dcopf_feasibility(const CaseView& view, int hour, const std::vector<ExtraLoad>& extra,
                             const OpfOptions& options = {});

struct PassRateRecord {
    int bus = 0;
    std::string envelope;
    long feasible = 0;
    long total = 0;
    long iteration_limits = 0;
    std::string library_fingerprint;
    std::vector<int> hours;
    std::vector<std::uint8_t> bitmap;  // hour-major, contingency-minor

    double pass_rate() const { return total == 0 ? 0.0 : static_cast<double>(feasible) / static_cast<double>(total); }
    bool cell(std::size_t hour_pos, std::size_t contingency_pos, std::size_t num_contingencies) const {
        return bitmap[hour_pos * num_contingencies + contingency_pos] != 0;
    }
};

/// Holds the per-contingency views and PTDFs for repeated pass-rate sweeps.
class Screener {
public:
    Screener(const GridCase& grid, ContingencyLibrary library, OpfOptions options = {});

    const ContingencyLibrary& library() const noexcept { return library_; }
    const GridCase& grid() const noexcept { return *grid_; }

    /// Throws std::invalid_argument for an empty library or hour sample.
    PassRateRecord pass_rate(int bus, const LoadTrajectory& traj, const std::vector<int>& hours) const;

    /// δ for one cell.
    OpfOutcome cell(int bus, double load_mw, int hour, std::size_t contingency) const;

private:
    const GridCase* grid_;
    ContingencyLibrary library_;
    OpfOptions options_;
    std::vector<CaseView> views_;
    std::vector<PtdfMatrix> ptdfs_;
};

struct QualifiedSet {
    double threshold = 0.0;
    std::vector<std::pair<int, std::string>> members;  // (bus, envelope), record order
    std::map<std::string, int> counts;                // per envelope, including zeros

    bool contains(int bus, const std::string& envelope) const;
    std::vector<int> buses(const std::string& envelope) const;
};

/// Keeps records with PR >= tau. Throws std::invalid_argument when records
/// were computed against different contingency libraries.
QualifiedSet stage1_gate(const std::vector<PassRateRecord>& records, double tau);

}  // namespace gridsiter
