#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gridsiter/grid.hpp"

namespace gridsiter {

enum class ContingencyKind { Branch, Generator };

/// A single N-1 outage.
struct Contingency {
    ContingencyKind kind = ContingencyKind::Branch;
    int element_id = 0;
    bool operator==(const Contingency&) const = default;
    std::string label() const;
};

/// Read-only overlay of a case with at most one element out of service.
/// The underlying case is never modified and must outlive the view.
class CaseView {
public:
    CaseView(const GridCase& grid) : grid_(&grid) {}  // NOLINT: implicit by intent
    CaseView(const GridCase& grid, Contingency outage, std::size_t position)
        : grid_(&grid), outage_(outage), outage_pos_(position) {}

    const GridCase& grid() const noexcept { return *grid_; }
    const std::optional<Contingency>& outage() const noexcept { return outage_; }

    bool branch_in_service(std::size_t k) const;
    bool generator_available(std::size_t g) const;
    /// Hourly capacity honoring a generator outage (0 for the outaged unit).
    double generator_pmax(std::size_t g, int t) const;

private:
    const GridCase* grid_;
    std::optional<Contingency> outage_;
    std::size_t outage_pos_ = 0;
};

/// Bus susceptance matrix (per unit), full size, ordered by bus position.
/// Throws GridError("islanded or degenerate network") when the slack-reduced
/// matrix is singular.
Eigen::MatrixXd build_b_matrix(const CaseView& view);

/// Branch-by-bus injection sensitivities. Column of the slack bus is zero;
/// rows of out-of-service branches are zero.
struct PtdfMatrix {
    Eigen::MatrixXd values;
    std::size_t slack_index = 0;

    /// Branch flows (MW) for a bus injection vector balanced at the slack.
    Eigen::VectorXd flows(const Eigen::VectorXd& injection) const { return values * injection; }
};

PtdfMatrix build_ptdf(const CaseView& view, int slack_bus_id);
inline PtdfMatrix build_ptdf(const CaseView& view) { return build_ptdf(view, view.grid().slack_bus()); }

/// Branch flows (MW) obtained by solving B*theta = p/base with the slack
/// angle pinned to zero. The independent route to compare PTDF flows against.
Eigen::VectorXd solve_dc_flows(const CaseView& view, const Eigen::VectorXd& injection, int slack_bus_id);

/// Ids of in-service branches whose removal disconnects the network
/// (bridges). Parallel branches between one bus pair are never bridges.
std::set<int> island_forming_branches(const CaseView& view);

/// Returns a view with the outaged element removed. Branch outages that would
/// island the network are rejected with GridError.
CaseView apply_contingency(const GridCase& grid, const Contingency& c);

}  // namespace gridsiter
