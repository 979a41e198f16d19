#include "gridsiter/lp.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <stdexcept>

#include <fmt/format.h>

#include "simplex.hpp"

namespace gridsiter::opt {

const char* to_string(Status status) {
    switch (status) {
        case Status::Optimal: return "optimal";
        case Status::Infeasible: return "infeasible";
        case Status::Unbounded: return "unbounded";
        case Status::IterationLimit: return "iteration_limit";
        case Status::NodeLimit: return "node_limit";
    }
    return "unknown";
}

int LinearProgram::add_variable(double lower, double upper, double cost, std::string name) {
    lower_.push_back(lower);
    upper_.push_back(upper);
    cost_.push_back(cost);
    names_.push_back(std::move(name));
    return static_cast<int>(lower_.size()) - 1;
}

int LinearProgram::add_constraint(std::span<const Term> terms, Sense sense, double rhs, std::string tag) {
    // Merge duplicate variable references so every row is a proper sparse vector.
    const std::size_t begin = terms_.size();
    for (const Term& t : terms) {
        auto it = std::find_if(terms_.begin() + static_cast<std::ptrdiff_t>(begin), terms_.end(),
                               [&](const Term& e) { return e.var == t.var; });
        if (it != terms_.end())
            it->coef += t.coef;
        else
            terms_.push_back(t);
    }
    row_start_.push_back(terms_.size());
    sense_.push_back(sense);
    rhs_.push_back(rhs);
    const int r = static_cast<int>(sense_.size()) - 1;
    if (!tag.empty()) tag_index_.emplace(tag, r);
    tags_.push_back(std::move(tag));
    return r;
}

void LinearProgram::set_bounds(int var, double lower, double upper) {
    lower_.at(static_cast<std::size_t>(var)) = lower;
    upper_.at(static_cast<std::size_t>(var)) = upper;
}

std::span<const Term> LinearProgram::row(int r) const {
    const auto b = row_start_[static_cast<std::size_t>(r)];
    const auto e = row_start_[static_cast<std::size_t>(r) + 1];
    return {terms_.data() + b, e - b};
}

std::optional<int> LinearProgram::find_constraint(const std::string& tag) const {
    auto it = tag_index_.find(tag);
    if (it == tag_index_.end()) return std::nullopt;
    return it->second;
}

void LinearProgram::validate() const {
    const int n = num_variables();
    for (int j = 0; j < n; ++j) {
        const double lo = lower(j), hi = upper(j);
        if (std::isnan(lo) || std::isnan(hi) || lo == kInfinity || hi == -kInfinity)
            throw std::invalid_argument(fmt::format("variable {} has invalid bounds", j));
        if (lo > hi) throw std::invalid_argument(fmt::format("variable {} has lower > upper", j));
        if (!std::isfinite(cost(j))) throw std::invalid_argument(fmt::format("variable {} has non-finite cost", j));
    }
    for (int r = 0; r < num_constraints(); ++r) {
        if (!std::isfinite(rhs(r))) throw std::invalid_argument(fmt::format("row {} has non-finite rhs", r));
        for (const Term& t : row(r)) {
            if (t.var < 0 || t.var >= n)
                throw std::invalid_argument(fmt::format("row {} references unknown variable {}", r, t.var));
            if (!std::isfinite(t.coef))
                throw std::invalid_argument(fmt::format("row {} has a non-finite coefficient", r));
        }
    }
    if (!std::isfinite(offset_)) throw std::invalid_argument("non-finite objective offset");
}

void MixedIntegerProgram::mark_binary(int var, int priority) {
    if (var < 0 || var >= lp.num_variables()) throw std::invalid_argument("binary marker on unknown variable");
    if (flag_.size() < static_cast<std::size_t>(lp.num_variables())) flag_.resize(static_cast<std::size_t>(lp.num_variables()), 0);
    if (flag_[static_cast<std::size_t>(var)]) return;
    flag_[static_cast<std::size_t>(var)] = 1;
    binaries_.push_back(var);
    priority_.push_back(priority);
    lp.set_bounds(var, std::max(0.0, lp.lower(var)), std::min(1.0, lp.upper(var)));
}

bool MixedIntegerProgram::is_binary(int var) const {
    return var >= 0 && static_cast<std::size_t>(var) < flag_.size() && flag_[static_cast<std::size_t>(var)] != 0;
}

void MixedIntegerProgram::validate() const {
    lp.validate();
    for (int b : binaries_)
        if (lp.lower(b) > lp.upper(b)) throw std::invalid_argument(fmt::format("binary {} has empty domain", b));
}

double Solution::dual(const LinearProgram& lp, const std::string& tag) const {
    auto r = lp.find_constraint(tag);
    if (!r) throw std::out_of_range("unknown constraint tag: " + tag);
    return duals.at(static_cast<std::size_t>(*r));
}

// ---------------------------------------------------------------------------
// LP dump

namespace {

std::mutex dump_mutex;
std::filesystem::path dump_dir;
int dump_limit = 0;
int dump_count = 0;

void maybe_dump(const LinearProgram& lp, std::span<const int> binaries) {
    std::lock_guard lock(dump_mutex);
    if (dump_dir.empty() || dump_count >= dump_limit) return;
    const auto path = dump_dir / fmt::format("lp_{:05d}.lp", dump_count++);
    std::ofstream out(path);
    if (out) write_lp_format(out, lp, binaries);
}

}  // namespace

void set_lp_dump(const std::filesystem::path& dir, int limit) {
    std::lock_guard lock(dump_mutex);
    std::filesystem::create_directories(dir);
    dump_dir = dir;
    dump_limit = limit;
    dump_count = 0;
}

void clear_lp_dump() {
    std::lock_guard lock(dump_mutex);
    dump_dir.clear();
}

// ---------------------------------------------------------------------------
// Solves

Solution detail_solve_lp(const LinearProgram& lp, const SolverOptions& options) {
    lp.validate();
    Solution sol;
    detail::SimplexEngine engine(lp, options.tol);
    sol.status = engine.solve(options.max_iterations);
    sol.iterations = engine.iterations();
    if (sol.status == Status::Optimal) {
        sol.x = engine.structural_values();
        sol.duals = engine.row_duals();
        sol.reduced_costs = engine.structural_reduced_costs();
        sol.objective = engine.objective();
    }
    return sol;
}


Solution BuiltinSolver::solve(const LinearProgram& lp, const SolverOptions& options) const {
    return detail_solve_lp(lp, options);
}

Solution BuiltinSolver::solve(const MixedIntegerProgram& mip, const SolverOptions& options) const {
    return detail_solve_milp(mip, options);
}

const Solver& default_solver() {
    static const BuiltinSolver solver;
    return solver;
}

Solution solve_lp(const LinearProgram& lp, const SolverOptions& options) {
    maybe_dump(lp, {});
    return default_solver().solve(lp, options);
}

Solution solve_milp(const MixedIntegerProgram& mip, const SolverOptions& options) {
    maybe_dump(mip.lp, mip.binaries());
    return default_solver().solve(mip, options);
}

// ---------------------------------------------------------------------------
// CPLEX LP text format

namespace {

std::string var_name(const LinearProgram& lp, int j) {
    const std::string& n = lp.variable_name(j);
    if (n.empty()) return fmt::format("x{}", j);
    std::string out;
    for (char c : n) out += (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.') ? c : '_';
    if (!out.empty() && std::isdigit(static_cast<unsigned char>(out.front()))) out.insert(out.begin(), 'v');
    return fmt::format("{}_{}", out, j);
}

void write_terms(std::ostream& out, const LinearProgram& lp, std::span<const Term> terms) {
    bool first = true;
    int on_line = 0;
    for (const Term& t : terms) {
        if (t.coef == 0.0) continue;
        const char* sign = t.coef < 0 ? "-" : "+";
        if (first && t.coef >= 0)
            out << fmt::format("{:.17g} {}", t.coef, var_name(lp, t.var));
        else
            out << fmt::format(" {} {:.17g} {}", sign, std::abs(t.coef), var_name(lp, t.var));
        first = false;
        if (++on_line % 8 == 0) out << "\n   ";
    }
    if (first) out << "0 " << var_name(lp, 0);
}

}  // namespace

void write_lp_format(std::ostream& out, const LinearProgram& lp, std::span<const int> binaries) {
    out << "\\ gridsiter problem\nMinimize\n obj: ";
    std::vector<Term> obj;
    for (int j = 0; j < lp.num_variables(); ++j)
        if (lp.cost(j) != 0.0) obj.push_back({j, lp.cost(j)});
    if (lp.num_variables() > 0) write_terms(out, lp, obj);
    if (lp.objective_offset() != 0.0) out << fmt::format(" + {:.17g} constant", lp.objective_offset());
    out << "\nSubject To\n";
    for (int r = 0; r < lp.num_constraints(); ++r) {
        const std::string name = lp.tag(r).empty() ? fmt::format("r{}", r) : fmt::format("r{}_{}", r, lp.tag(r));
        std::string clean;
        for (char c : name) clean += (std::isalnum(static_cast<unsigned char>(c)) || c == '_') ? c : '_';
        out << " " << clean << ": ";
        write_terms(out, lp, lp.row(r));
        const char* op = lp.sense(r) == Sense::LessEqual ? "<=" : (lp.sense(r) == Sense::Equal ? "=" : ">=");
        out << fmt::format(" {} {:.17g}\n", op, lp.rhs(r));
    }
    out << "Bounds\n";
    for (int j = 0; j < lp.num_variables(); ++j) {
        const double lo = lp.lower(j), hi = lp.upper(j);
        const std::string v = var_name(lp, j);
        if (!std::isfinite(lo) && !std::isfinite(hi))
            out << " " << v << " free\n";
        else if (!std::isfinite(lo))
            out << fmt::format(" -inf <= {} <= {:.17g}\n", v, hi);
        else if (!std::isfinite(hi))
            out << fmt::format(" {} >= {:.17g}\n", v, lo);
        else
            out << fmt::format(" {:.17g} <= {} <= {:.17g}\n", lo, v, hi);
    }
    if (lp.objective_offset() != 0.0) out << " constant = 1\n";
    if (!binaries.empty()) {
        out << "Binaries\n";
        for (int b : binaries) out << " " << var_name(lp, b) << "\n";
    }
    out << "End\n";
}

}  // namespace gridsiter::opt
