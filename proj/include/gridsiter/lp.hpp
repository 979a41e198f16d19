#pragma once

#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace gridsiter::opt {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class Sense { LessEqual, Equal, GreaterEqual };

enum class Status { Optimal, Infeasible, Unbounded, IterationLimit, NodeLimit };

const char* to_string(Status status);

struct Term {
    int var;
    double coef;
};

/// Minimization LP: variables with bounds, a linear objective and linear
/// rows `sum(coef * x) <sense> rhs`. Rows may carry a tag for dual lookup.
class LinearProgram {
public:
    int add_variable(double lower, double upper, double cost, std::string name = {});
    int add_constraint(std::span<const Term> terms, Sense sense, double rhs, std::string tag = {});
    int add_constraint(std::initializer_list<Term> terms, Sense sense, double rhs, std::string tag = {}) {
        return add_constraint(std::span<const Term>(terms.begin(), terms.size()), sense, rhs, std::move(tag));
    }

    void set_bounds(int var, double lower, double upper);
    void set_cost(int var, double cost) { cost_.at(static_cast<std::size_t>(var)) = cost; }
    void set_objective_offset(double offset) { offset_ = offset; }

    int num_variables() const noexcept { return static_cast<int>(lower_.size()); }
    int num_constraints() const noexcept { return static_cast<int>(sense_.size()); }
    double lower(int var) const { return lower_[static_cast<std::size_t>(var)]; }
    double upper(int var) const { return upper_[static_cast<std::size_t>(var)]; }
    double cost(int var) const { return cost_[static_cast<std::size_t>(var)]; }
    double objective_offset() const noexcept { return offset_; }
    const std::string& variable_name(int var) const { return names_[static_cast<std::size_t>(var)]; }

    std::span<const Term> row(int r) const;
    Sense sense(int r) const { return sense_[static_cast<std::size_t>(r)]; }
    double rhs(int r) const { return rhs_[static_cast<std::size_t>(r)]; }
    const std::string& tag(int r) const { return tags_[static_cast<std::size_t>(r)]; }
    std::optional<int> find_constraint(const std::string& tag) const;

    /// Throws std::invalid_argument on non-finite coefficients, NaN bounds,
    /// lower > upper, or out-of-range variable references.
    void validate() const;

private:
    std::vector<double> lower_, upper_, cost_;
    std::vector<std::string> names_;
    std::vector<std::size_t> row_start_{0};
    std::vector<Term> terms_;
    std::vector<Sense> sense_;
    std::vector<double> rhs_;
    std::vector<std::string> tags_;
    std::unordered_map<std::string, int> tag_index_;
    double offset_ = 0.0;
};

/// An LP plus a subset of variables restricted to {0, 1}.
class MixedIntegerProgram {
public:
    LinearProgram lp;

    /// Restricts `var` to {0,1}; its bounds are intersected with [0, 1].
    /// Fractional binaries of higher priority are branched on first.
    void mark_binary(int var, int priority = 0);
    const std::vector<int>& binaries() const noexcept { return binaries_; }
    const std::vector<int>& priorities() const noexcept { return priority_; }
    bool is_binary(int var) const;
    void validate() const;

private:
    std::vector<int> binaries_;
    std::vector<int> priority_;
    std::vector<std::uint8_t> flag_;
};

struct Tolerances {
    double feasibility = 1e-7;   // relative to 1 + |bound|
    double optimality = 1e-9;    // reduced-cost threshold
    double integrality = 1e-6;
    double gap_absolute = 1e-6;
    double gap_relative = 0.0;
    double pivot = 1e-9;
};

struct SolverOptions {
    Tolerances tol;
    long max_iterations = 200000;  // per LP solve
    long max_nodes = 100000;       // branch-and-bound
};

struct Solution {
    Status status = Status::Infeasible;
    double objective = 0.0;
    std::vector<double> x;
    /// Per row: d(objective)/d(rhs) at the final basis.
    std::vector<double> duals;
    std::vector<double> reduced_costs;
    long iterations = 0;
    long nodes = 0;

    bool optimal() const noexcept { return status == Status::Optimal; }
    /// Dual of a tagged row; throws std::out_of_range for an unknown tag.
    double dual(const LinearProgram& lp, const std::string& tag) const;
};

/// Seam for substituting an external optimizer behind the same contract.
class Solver {
public:
    virtual ~Solver() = default;
    virtual std::string name() const = 0;
    virtual Solution solve(const LinearProgram& lp, const SolverOptions& options) const = 0;
    virtual Solution solve(const MixedIntegerProgram& mip, const SolverOptions& options) const = 0;
};

/// Bounded-variable revised simplex with branch-and-bound over binaries.
class BuiltinSolver final : public Solver {
public:
    std::string name() const override { return "builtin-simplex"; }
    Solution solve(const LinearProgram& lp, const SolverOptions& options) const override;
    Solution solve(const MixedIntegerProgram& mip, const SolverOptions& options) const override;
};

const Solver& default_solver();

/// Infeasible and unbounded outcomes come back as a status, never thrown.
Solution solve_lp(const LinearProgram& lp, const SolverOptions& options = {});

/// MILP optimum within the configured gap. Duals come from re-solving the LP
/// with every binary fixed at its incumbent value.
Solution solve_milp(const MixedIntegerProgram& mip, const SolverOptions& options = {});

/// Writes the problem in CPLEX LP text format.
void write_lp_format(std::ostream& out, const LinearProgram& lp, std::span<const int> binaries = {});

/// When set, every solve_lp / solve_milp call writes its problem as
/// `<dir>/lp_<seq>.lp` until `limit` files have been written.
void set_lp_dump(const std::filesystem::path& dir, int limit = 200);
void clear_lp_dump();

}  // namespace gridsiter::opt
