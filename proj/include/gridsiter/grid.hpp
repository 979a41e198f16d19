#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace gridsiter {

/// Raised when a case fails validation. Carries every violated invariant,
/// not just the first one found.
class CaseError : public std::runtime_error {
public:
    explicit CaseError(std::vector<std::string> issues);
    const std::vector<std::string>& issues() const noexcept { return issues_; }

private:
    std::vector<std::string> issues_;
};

/// Network-level failure (singular susceptance matrix, islanding, bad outage).
class GridError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Coordinate {
    double longitude = 0.0;
    double latitude = 0.0;
    bool operator==(const Coordinate&) const = default;
};

struct Bus {
    int id = 0;
    double base_kv = 0.0;
    std::string zone;
    std::optional<Coordinate> coord;
    // Demand at this bus is load_scale * series(load_profile_ref). An empty
    // reference means the bus carries no base load.
    std::string load_profile_ref;
    double load_scale = 1.0;
    bool operator==(const Bus&) const = default;
};

struct Branch {
    int id = 0;
    int from_bus = 0;
    int to_bus = 0;
    double susceptance = 0.0;  // per unit, 1/x
    double flow_limit = 0.0;   // MW
    bool in_service = true;
    bool operator==(const Branch&) const = default;
};

/// Quadratic production cost c2*p^2 + c1*p + c0 ($/h at output p MW).
struct CostCurve {
    double c2 = 0.0;
    double c1 = 0.0;
    double c0 = 0.0;
    double operator()(double p) const { return (c2 * p + c1) * p + c0; }
    bool operator==(const CostCurve&) const = default;
};

struct Generator {
    int id = 0;
    int bus = 0;
    double pmin = 0.0;
    double pmax = 0.0;
    double ramp_up = 0.0;    // MW/h
    double ramp_down = 0.0;  // MW/h
    int min_up = 1;          // h
    int min_down = 1;        // h
    CostCurve cost;
    double no_load_cost = 0.0;   // $/h
    double startup_cost = 0.0;   // $
    double shutdown_cost = 0.0;  // $
    std::string renewable_profile_ref;  // optional hourly cap on pmax
    bool operator==(const Generator&) const = default;
};

struct TimeSeries {
    std::string id;
    std::vector<double> values;  // MW per hour, chronological
    bool operator==(const TimeSeries&) const = default;
};

/// Raw, unvalidated case contents. GridCase is built from this.
struct CaseData {
    double base_mva = 100.0;
    int slack_bus = 0;
    std::vector<Bus> buses;
    std::vector<Branch> branches;
    std::vector<Generator> generators;
    std::map<std::string, TimeSeries> series;
    bool operator==(const CaseData&) const = default;
};

/// Validated, immutable grid case. All hour arguments are 0-based indices
/// into the chronological horizon.
class GridCase {
public:
    /// Validates every invariant and throws CaseError listing all violations.
    explicit GridCase(CaseData data);
    GridCase(const GridCase& other);
    GridCase& operator=(const GridCase& other);
    GridCase(GridCase&&) noexcept = default;
    GridCase& operator=(GridCase&&) noexcept = default;

    const CaseData& data() const noexcept { return data_; }
    double base_mva() const noexcept { return data_.base_mva; }
    int slack_bus() const noexcept { return data_.slack_bus; }
    const std::vector<Bus>& buses() const noexcept { return data_.buses; }
    const std::vector<Branch>& branches() const noexcept { return data_.branches; }
    const std::vector<Generator>& generators() const noexcept { return data_.generators; }

    std::size_t num_buses() const noexcept { return data_.buses.size(); }
    std::size_t num_branches() const noexcept { return data_.branches.size(); }
    std::size_t num_generators() const noexcept { return data_.generators.size(); }

    /// Study horizon length in hours (common length of all series). Cases
    /// without any series have a 24 hour horizon of zero load.
    int horizon() const noexcept { return horizon_; }

    std::size_t bus_index(int bus_id) const;
    std::size_t branch_index(int branch_id) const;
    std::size_t generator_index(int gen_id) const;
    bool has_bus(int bus_id) const { return bus_pos_.count(bus_id) != 0; }
    std::size_t slack_index() const { return bus_index(data_.slack_bus); }

    /// Base demand at bus position n for hour index t (MW).
    double demand(std::size_t n, int t) const;
    /// Total base demand across all buses for hour index t (MW).
    double total_demand(int t) const;
    /// Hourly available capacity of generator position g (MW).
    double generator_pmax(std::size_t g, int t) const;
    /// Bus position of generator position g.
    std::size_t generator_bus_index(std::size_t g) const { return gen_bus_pos_[g]; }

    /// Returns a copy with all marginal cost coefficients (c1, c2) scaled.
    GridCase with_cost_scale(double factor) const;

private:
    void build_index();

    CaseData data_;
    int horizon_ = 24;
    std::unordered_map<int, std::size_t> bus_pos_;
    std::unordered_map<int, std::size_t> branch_pos_;
    std::unordered_map<int, std::size_t> gen_pos_;
    std::vector<std::size_t> gen_bus_pos_;
    std::vector<const std::vector<double>*> bus_series_;
    std::vector<const std::vector<double>*> gen_series_;
};

/// Collects every invariant violation of a case (empty when valid).
std::vector<std::string> validate_case(const CaseData& data);

}  // namespace gridsiter
