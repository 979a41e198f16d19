#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "gridsiter/lp.hpp"

namespace gridsiter::opt::detail {

enum class VarState : std::uint8_t { Basic, AtLower, AtUpper, FreeZero };

struct Basis {
    std::vector<int> head;           // basic variable per basis position
    std::vector<VarState> state;     // per variable (structural then logical)
};

/// LU of the basis matrix plus a product-form eta file of column updates.
class BasisFactor {
public:
    /// Columns are given as (row, value) lists. Returns false when singular.
    bool factor(int m, const std::vector<std::vector<std::pair<int, double>>>& columns);
    void ftran(Eigen::VectorXd& v) const;
    void btran(Eigen::VectorXd& v) const;
    void update(int r, const Eigen::VectorXd& alpha);
    int num_updates() const noexcept { return static_cast<int>(etas_.size()); }

private:
    struct Eta {
        int r = 0;
        double pivot = 1.0;
        std::vector<std::pair<int, double>> entries;  // off-pivot alpha entries
    };

    int m_ = 0;
    bool dense_ = true;
    Eigen::PartialPivLU<Eigen::MatrixXd> dense_lu_;
    mutable Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> sparse_lu_;
    std::vector<Eta> etas_;
};

/// Primal bounded-variable revised simplex over rows `A x - s = 0` with
/// logical variable s_i carrying the row bounds. Structural bounds can be
/// overridden between solves (branch-and-bound).
class SimplexEngine {
public:
    SimplexEngine(const LinearProgram& lp, const Tolerances& tol);

    void set_structural_bounds(int j, double lower, double upper);
    double structural_lower(int j) const { return lo_[static_cast<std::size_t>(j)] * col_scale_[static_cast<std::size_t>(j)]; }
    double structural_upper(int j) const { return hi_[static_cast<std::size_t>(j)] * col_scale_[static_cast<std::size_t>(j)]; }

    /// Runs phase 1 / phase 2 from the given basis (or a slack basis).
    Status solve(long max_iterations, const Basis* warm = nullptr);

    std::vector<double> structural_values() const;
    std::vector<double> row_duals() const;
    std::vector<double> structural_reduced_costs() const;
    double objective() const;
    long iterations() const noexcept { return iterations_; }
    Basis basis() const { return Basis{head_, state_}; }

private:
    void build_columns(const LinearProgram& lp);
    void equilibrate();
    void column(int j, std::vector<std::pair<int, double>>& out) const;
    double dot_column(const Eigen::VectorXd& y, int j) const;
    void load_column(int j, Eigen::VectorXd& v) const;
    void slack_basis();
    bool apply_basis(const Basis& b);
    bool refactor();
    void place_nonbasic(int j);
    void compute_basic_values();
    double feas_tol(double bound) const { return tol_.feasibility * (1.0 + std::abs(bound)); }
    void finalize_duals();

    Tolerances tol_;
    int n_ = 0;  // structurals
    int m_ = 0;  // rows
    std::vector<int> col_start_;
    std::vector<int> col_row_;
    std::vector<double> col_val_;
    std::vector<double> lo_, hi_, cost_;
    // Internal problem is R A C; x = C x', s' = R s, y = R y'.
    std::vector<double> row_scale_, col_scale_;
    double offset_ = 0.0;

    std::vector<double> x_;
    std::vector<VarState> state_;
    std::vector<int> head_;
    std::vector<int> pos_;
    BasisFactor factor_;
    std::vector<double> duals_;
    std::vector<double> reduced_;
    long iterations_ = 0;
};

}  // namespace gridsiter::opt::detail

namespace gridsiter::opt {

Solution detail_solve_lp(const LinearProgram& lp, const SolverOptions& options);
Solution detail_solve_milp(const MixedIntegerProgram& mip, const SolverOptions& options);

}  // namespace gridsiter::opt
