#include "simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gridsiter::opt::detail {

namespace {

constexpr int kDenseLimit = 200;
constexpr int kRefactorInterval = 64;
constexpr int kBlandAfter = 40;        // consecutive degenerate pivots
constexpr double kDegenerateStep = 1e-12;
constexpr double kEtaDrop = 1e-14;

}  // namespace

// ---------------------------------------------------------------------------
// BasisFactor

bool BasisFactor::factor(int m, const std::vector<std::vector<std::pair<int, double>>>& columns) {
    m_ = m;
    etas_.clear();
    dense_ = m <= kDenseLimit;
    if (m == 0) return true;
    if (dense_) {
        Eigen::MatrixXd b = Eigen::MatrixXd::Zero(m, m);
        for (int c = 0; c < m; ++c)
            for (const auto& [r, v] : columns[static_cast<std::size_t>(c)]) b(r, c) += v;
        dense_lu_.compute(b);
        const auto& lu = dense_lu_.matrixLU();
        double largest = 0.0, smallest = std::numeric_limits<double>::infinity();
        for (int i = 0; i < m; ++i) {
            const double d = std::abs(lu(i, i));
            largest = std::max(largest, d);
            smallest = std::min(smallest, d);
        }
        return smallest > 1e-11 * std::max(1.0, largest);
    }
    std::vector<Eigen::Triplet<double>> triplets;
    for (int c = 0; c < m; ++c)
        for (const auto& [r, v] : columns[static_cast<std::size_t>(c)]) triplets.emplace_back(r, c, v);
    Eigen::SparseMatrix<double> b(m, m);
    b.setFromTriplets(triplets.begin(), triplets.end());
    b.makeCompressed();
    sparse_lu_.compute(b);
    return sparse_lu_.info() == Eigen::Success;
}

void BasisFactor::ftran(Eigen::VectorXd& v) const {
    if (m_ == 0) return;
    Eigen::VectorXd solved = dense_ ? Eigen::VectorXd(dense_lu_.solve(v)) : Eigen::VectorXd(sparse_lu_.solve(v));
    v.swap(solved);
    for (const Eta& e : etas_) {
        const double vr = v[e.r] / e.pivot;
        v[e.r] = vr;
        if (vr == 0.0) continue;
        for (const auto& [i, a] : e.entries) v[i] -= a * vr;
    }
}

void BasisFactor::btran(Eigen::VectorXd& v) const {
    if (m_ == 0) return;
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
        double s = v[it->r];
        for (const auto& [i, a] : it->entries) s -= a * v[i];
        v[it->r] = s / it->pivot;
    }
    Eigen::VectorXd solved =
        dense_ ? Eigen::VectorXd(dense_lu_.transpose().solve(v)) : Eigen::VectorXd(sparse_lu_.transpose().solve(v));
    v.swap(solved);
}

void BasisFactor::update(int r, const Eigen::VectorXd& alpha) {
    Eta e;
    e.r = r;
    e.pivot = alpha[r];
    for (int i = 0; i < alpha.size(); ++i)
        if (i != r && std::abs(alpha[i]) > kEtaDrop) e.entries.emplace_back(i, alpha[i]);
    etas_.push_back(std::move(e));
}

// ---------------------------------------------------------------------------
// SimplexEngine

SimplexEngine::SimplexEngine(const LinearProgram& lp, const Tolerances& tol) : tol_(tol) {
    n_ = lp.num_variables();
    m_ = lp.num_constraints();
    offset_ = lp.objective_offset();
    const auto total = static_cast<std::size_t>(n_ + m_);
    lo_.resize(total);
    hi_.resize(total);
    cost_.assign(total, 0.0);
    for (int j = 0; j < n_; ++j) {
        lo_[static_cast<std::size_t>(j)] = lp.lower(j);
        hi_[static_cast<std::size_t>(j)] = lp.upper(j);
        cost_[static_cast<std::size_t>(j)] = lp.cost(j);
    }
    for (int i = 0; i < m_; ++i) {
        const auto s = static_cast<std::size_t>(n_ + i);
        const double rhs = lp.rhs(i);
        switch (lp.sense(i)) {
            case Sense::LessEqual: lo_[s] = -kInfinity; hi_[s] = rhs; break;
            case Sense::Equal: lo_[s] = rhs; hi_[s] = rhs; break;
            case Sense::GreaterEqual: lo_[s] = rhs; hi_[s] = kInfinity; break;
        }
    }
    build_columns(lp);
    equilibrate();
    x_.assign(total, 0.0);
    state_.assign(total, VarState::AtLower);
    head_.assign(static_cast<std::size_t>(m_), 0);
    pos_.assign(total, -1);
}

void SimplexEngine::build_columns(const LinearProgram& lp) {
    std::vector<int> count(static_cast<std::size_t>(n_) + 1, 0);
    for (int i = 0; i < m_; ++i)
        for (const Term& t : lp.row(i)) ++count[static_cast<std::size_t>(t.var) + 1];
    for (int j = 0; j < n_; ++j) count[static_cast<std::size_t>(j) + 1] += count[static_cast<std::size_t>(j)];
    col_start_ = count;
    col_row_.resize(static_cast<std::size_t>(count.back()));
    col_val_.resize(static_cast<std::size_t>(count.back()));
    std::vector<int> fill(col_start_.begin(), col_start_.end() - 1);
    for (int i = 0; i < m_; ++i) {
        for (const Term& t : lp.row(i)) {
            const auto k = static_cast<std::size_t>(fill[static_cast<std::size_t>(t.var)]++);
            col_row_[k] = i;
            col_val_[k] = t.coef;
        }
    }
}

// Geometric-mean row/column scaling rounded to powers of two, so scaling
// itself introduces no rounding error.
void SimplexEngine::equilibrate() {
    row_scale_.assign(static_cast<std::size_t>(m_), 1.0);
    col_scale_.assign(static_cast<std::size_t>(n_), 1.0);
    if (col_val_.empty()) return;
    auto pow2 = [](double v) { return std::exp2(std::round(std::log2(v))); };
    std::vector<double> rmin(static_cast<std::size_t>(m_)), rmax(static_cast<std::size_t>(m_));
    for (int pass = 0; pass < 6; ++pass) {
        std::fill(rmin.begin(), rmin.end(), kInfinity);
        std::fill(rmax.begin(), rmax.end(), 0.0);
        for (int j = 0; j < n_; ++j) {
            const auto js = static_cast<std::size_t>(j);
            for (int k = col_start_[js]; k < col_start_[js + 1]; ++k) {
                const auto i = static_cast<std::size_t>(col_row_[static_cast<std::size_t>(k)]);
                const double a = std::abs(col_val_[static_cast<std::size_t>(k)]) * col_scale_[js];
                if (a == 0.0) continue;
                rmin[i] = std::min(rmin[i], a);
                rmax[i] = std::max(rmax[i], a);
            }
        }
        for (std::size_t i = 0; i < rmin.size(); ++i)
            if (rmax[i] > 0.0) row_scale_[i] = pow2(1.0 / std::sqrt(rmin[i] * rmax[i]));
        for (int j = 0; j < n_; ++j) {
            const auto js = static_cast<std::size_t>(j);
            double lo = kInfinity, hi = 0.0;
            for (int k = col_start_[js]; k < col_start_[js + 1]; ++k) {
                const auto i = static_cast<std::size_t>(col_row_[static_cast<std::size_t>(k)]);
                const double a = std::abs(col_val_[static_cast<std::size_t>(k)]) * row_scale_[i];
                if (a == 0.0) continue;
                lo = std::min(lo, a);
                hi = std::max(hi, a);
            }
            if (hi > 0.0) col_scale_[js] = pow2(1.0 / std::sqrt(lo * hi));
        }
    }
    for (int j = 0; j < n_; ++j) {
        const auto js = static_cast<std::size_t>(j);
        const double c = col_scale_[js];
        for (int k = col_start_[js]; k < col_start_[js + 1]; ++k)
            col_val_[static_cast<std::size_t>(k)] *= row_scale_[static_cast<std::size_t>(col_row_[static_cast<std::size_t>(k)])] * c;
        lo_[js] /= c;
        hi_[js] /= c;
        cost_[js] *= c;
    }
    for (int i = 0; i < m_; ++i) {
        const auto s = static_cast<std::size_t>(n_ + i);
        lo_[s] *= row_scale_[static_cast<std::size_t>(i)];
        hi_[s] *= row_scale_[static_cast<std::size_t>(i)];
    }
}

void SimplexEngine::set_structural_bounds(int j, double lower, double upper) {
    const double c = col_scale_[static_cast<std::size_t>(j)];
    lo_[static_cast<std::size_t>(j)] = lower / c;
    hi_[static_cast<std::size_t>(j)] = upper / c;
}

void SimplexEngine::column(int j, std::vector<std::pair<int, double>>& out) const {
    out.clear();
    if (j < n_) {
        for (int k = col_start_[static_cast<std::size_t>(j)]; k < col_start_[static_cast<std::size_t>(j) + 1]; ++k)
            out.emplace_back(col_row_[static_cast<std::size_t>(k)], col_val_[static_cast<std::size_t>(k)]);
    } else {
        out.emplace_back(j - n_, -1.0);
    }
}

double SimplexEngine::dot_column(const Eigen::VectorXd& y, int j) const {
    if (j >= n_) return -y[j - n_];
    double s = 0.0;
    for (int k = col_start_[static_cast<std::size_t>(j)]; k < col_start_[static_cast<std::size_t>(j) + 1]; ++k)
        s += y[col_row_[static_cast<std::size_t>(k)]] * col_val_[static_cast<std::size_t>(k)];
    return s;
}

void SimplexEngine::load_column(int j, Eigen::VectorXd& v) const {
    v.setZero(m_);
    if (j >= n_) {
        v[j - n_] = -1.0;
        return;
    }
    for (int k = col_start_[static_cast<std::size_t>(j)]; k < col_start_[static_cast<std::size_t>(j) + 1]; ++k)
        v[col_row_[static_cast<std::size_t>(k)]] += col_val_[static_cast<std::size_t>(k)];
}

void SimplexEngine::place_nonbasic(int j) {
    const auto s = static_cast<std::size_t>(j);
    const bool has_lo = std::isfinite(lo_[s]);
    const bool has_hi = std::isfinite(hi_[s]);
    VarState st = state_[s];
    if (st == VarState::AtUpper && !has_hi) st = VarState::AtLower;
    if (st == VarState::AtLower && !has_lo) st = has_hi ? VarState::AtUpper : VarState::FreeZero;
    if (st == VarState::FreeZero && has_lo) st = VarState::AtLower;
    if (st == VarState::FreeZero && has_hi) st = VarState::AtUpper;
    if (st == VarState::Basic) st = has_lo ? VarState::AtLower : (has_hi ? VarState::AtUpper : VarState::FreeZero);
    state_[s] = st;
    x_[s] = st == VarState::AtLower ? lo_[s] : (st == VarState::AtUpper ? hi_[s] : 0.0);
}

void SimplexEngine::slack_basis() {
    const int total = n_ + m_;
    std::fill(pos_.begin(), pos_.end(), -1);
    for (int j = 0; j < n_; ++j) {
        state_[static_cast<std::size_t>(j)] = VarState::AtLower;
        place_nonbasic(j);
    }
    for (int i = 0; i < m_; ++i) {
        head_[static_cast<std::size_t>(i)] = n_ + i;
        pos_[static_cast<std::size_t>(n_ + i)] = i;
        state_[static_cast<std::size_t>(n_ + i)] = VarState::Basic;
    }
    (void)total;
}

bool SimplexEngine::apply_basis(const Basis& b) {
    const auto total = static_cast<std::size_t>(n_ + m_);
    if (b.head.size() != static_cast<std::size_t>(m_) || b.state.size() != total) return false;
    std::vector<int> pos(total, -1);
    for (std::size_t k = 0; k < b.head.size(); ++k) {
        const int j = b.head[k];
        if (j < 0 || static_cast<std::size_t>(j) >= total || pos[static_cast<std::size_t>(j)] != -1) return false;
        if (b.state[static_cast<std::size_t>(j)] != VarState::Basic) return false;
        pos[static_cast<std::size_t>(j)] = static_cast<int>(k);
    }
    head_ = b.head;
    pos_ = std::move(pos);
    state_ = b.state;
    for (std::size_t j = 0; j < total; ++j) {
        if (pos_[j] >= 0) continue;
        place_nonbasic(static_cast<int>(j));
    }
    return refactor();
}

bool SimplexEngine::refactor() {
    std::vector<std::vector<std::pair<int, double>>> cols(static_cast<std::size_t>(m_));
    for (int k = 0; k < m_; ++k) column(head_[static_cast<std::size_t>(k)], cols[static_cast<std::size_t>(k)]);
    return factor_.factor(m_, cols);
}

void SimplexEngine::compute_basic_values() {
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m_);
    const int total = n_ + m_;
    for (int j = 0; j < total; ++j) {
        const auto s = static_cast<std::size_t>(j);
        if (state_[s] == VarState::Basic || x_[s] == 0.0) continue;
        if (j >= n_) {
            rhs[j - n_] += x_[s];
        } else {
            for (int k = col_start_[s]; k < col_start_[s + 1]; ++k)
                rhs[col_row_[static_cast<std::size_t>(k)]] -= col_val_[static_cast<std::size_t>(k)] * x_[s];
        }
    }
    factor_.ftran(rhs);
    for (int k = 0; k < m_; ++k) x_[static_cast<std::size_t>(head_[static_cast<std::size_t>(k)])] = rhs[k];
}

Status SimplexEngine::solve(long max_iterations, const Basis* warm) {
    iterations_ = 0;
    if (warm == nullptr || !apply_basis(*warm)) {
        slack_basis();
        if (!refactor()) return Status::IterationLimit;  // unreachable: -I is never singular
    }
    compute_basic_values();

    const int total = n_ + m_;
    Eigen::VectorXd cb(m_), y(m_), alpha(m_);
    int degenerate_run = 0;
    int slack_restarts = 0;
    bool fresh = true;  // x_B recomputed from a fresh factorization

    // Ratio-test candidates are re-derived in the second Harris pass.
    struct Block {
        int k;
        double bound;
        double rate;
    };
    std::vector<Block> blocks;
    blocks.reserve(static_cast<std::size_t>(m_));

    while (true) {
        if (iterations_ >= max_iterations) return Status::IterationLimit;

        bool infeasible = false;
        for (int k = 0; k < m_; ++k) {
            const auto j = static_cast<std::size_t>(head_[static_cast<std::size_t>(k)]);
            const double v = x_[j];
            if (v < lo_[j] - feas_tol(lo_[j])) {
                cb[k] = -1.0;
                infeasible = true;
            } else if (v > hi_[j] + feas_tol(hi_[j])) {
                cb[k] = 1.0;
                infeasible = true;
            } else {
                cb[k] = 0.0;
            }
        }
        if (!infeasible)
            for (int k = 0; k < m_; ++k) cb[k] = cost_[static_cast<std::size_t>(head_[static_cast<std::size_t>(k)])];
        y = cb;
        factor_.btran(y);

        // Pricing: Dantzig, switching to Bland's rule on degenerate stalls.
        const bool bland = degenerate_run > kBlandAfter;
        int q = -1;
        double dq = 0.0, best = 0.0;
        for (int j = 0; j < total; ++j) {
            const auto s = static_cast<std::size_t>(j);
            const VarState st = state_[s];
            if (st == VarState::Basic || lo_[s] == hi_[s]) continue;
            const double d = (infeasible ? 0.0 : cost_[s]) - dot_column(y, j);
            const bool eligible = (st == VarState::AtLower && d < -tol_.optimality) ||
                                  (st == VarState::AtUpper && d > tol_.optimality) ||
                                  (st == VarState::FreeZero && std::abs(d) > tol_.optimality);
            if (!eligible) continue;
            if (bland) {
                q = j;
                dq = d;
                break;
            }
            if (std::abs(d) > best) {
                best = std::abs(d);
                q = j;
                dq = d;
            }
        }

        if (q < 0) {
            if (!fresh) {
                if (!refactor()) {
                    slack_basis();
                    refactor();
                }
                compute_basic_values();
                fresh = true;
                continue;
            }
            if (infeasible) return Status::Infeasible;
            finalize_duals();
            return Status::Optimal;
        }

        const double dir = dq < 0.0 ? 1.0 : -1.0;
        load_column(q, alpha);
        factor_.ftran(alpha);
        const auto qs = static_cast<std::size_t>(q);
        const double flip =
            (std::isfinite(lo_[qs]) && std::isfinite(hi_[qs])) ? hi_[qs] - lo_[qs] : kInfinity;

        // Harris pass 1: largest step with bounds relaxed by the tolerance.
        blocks.clear();
        double theta_relaxed = kInfinity;
        for (int k = 0; k < m_; ++k) {
            const double a = alpha[k];
            if (std::abs(a) <= tol_.pivot) continue;
            const double rate = -dir * a;
            const auto j = static_cast<std::size_t>(head_[static_cast<std::size_t>(k)]);
            const double v = x_[j];
            double bound = 0.0, relaxed = 0.0;
            if (rate < 0.0) {
                if (infeasible && v > hi_[j] + feas_tol(hi_[j])) {
                    bound = hi_[j];
                } else if (v < lo_[j] - feas_tol(lo_[j]) || !std::isfinite(lo_[j])) {
                    continue;
                } else {
                    bound = lo_[j];
                }
                relaxed = (v - (bound - feas_tol(bound))) / -rate;
            } else {
                if (infeasible && v < lo_[j] - feas_tol(lo_[j])) {
                    bound = lo_[j];
                } else if (v > hi_[j] + feas_tol(hi_[j]) || !std::isfinite(hi_[j])) {
                    continue;
                } else {
                    bound = hi_[j];
                }
                relaxed = ((bound + feas_tol(bound)) - v) / rate;
            }
            blocks.push_back({k, bound, rate});
            theta_relaxed = std::min(theta_relaxed, relaxed);
        }

        // Pass 2: among steps within the relaxed limit, the largest pivot.
        int r = -1;
        double theta = kInfinity, leave_bound = 0.0, best_pivot = 0.0;
        int best_index = total;
        for (const Block& b : blocks) {
            const auto j = static_cast<std::size_t>(head_[static_cast<std::size_t>(b.k)]);
            double exact = b.rate < 0.0 ? (x_[j] - b.bound) / -b.rate : (b.bound - x_[j]) / b.rate;
            exact = std::max(exact, 0.0);
            if (exact > theta_relaxed) continue;
            const double piv = std::abs(alpha[b.k]);
            const bool better = bland ? static_cast<int>(j) < best_index : piv > best_pivot;
            if (better) {
                best_pivot = piv;
                best_index = static_cast<int>(j);
                r = b.k;
                theta = exact;
                leave_bound = b.bound;
            }
        }

        if (r < 0 && !std::isfinite(flip)) return infeasible ? Status::Infeasible : Status::Unbounded;

        ++iterations_;
        fresh = false;
        if (flip <= theta) {
            for (int k = 0; k < m_; ++k)
                x_[static_cast<std::size_t>(head_[static_cast<std::size_t>(k)])] -= dir * flip * alpha[k];
            x_[qs] = dir > 0.0 ? hi_[qs] : lo_[qs];
            state_[qs] = dir > 0.0 ? VarState::AtUpper : VarState::AtLower;
            degenerate_run = 0;
            continue;
        }

        for (int k = 0; k < m_; ++k)
            x_[static_cast<std::size_t>(head_[static_cast<std::size_t>(k)])] -= dir * theta * alpha[k];
        x_[qs] += dir * theta;
        const auto leaving = static_cast<std::size_t>(head_[static_cast<std::size_t>(r)]);
        x_[leaving] = leave_bound;
        state_[leaving] = leave_bound == lo_[leaving] ? VarState::AtLower : VarState::AtUpper;
        pos_[leaving] = -1;
        head_[static_cast<std::size_t>(r)] = q;
        pos_[qs] = r;
        state_[qs] = VarState::Basic;
        factor_.update(r, alpha);

        degenerate_run = theta < kDegenerateStep ? degenerate_run + 1 : 0;

        if (factor_.num_updates() >= kRefactorInterval) {
            if (!refactor()) {
                if (++slack_restarts > 3) return Status::IterationLimit;
                slack_basis();
                refactor();
            }
            compute_basic_values();
            fresh = true;
        }
    }
}

void SimplexEngine::finalize_duals() {
    Eigen::VectorXd y(m_);
    for (int k = 0; k < m_; ++k) y[k] = cost_[static_cast<std::size_t>(head_[static_cast<std::size_t>(k)])];
    factor_.btran(y);
    duals_.assign(y.data(), y.data() + m_);
    reduced_.assign(static_cast<std::size_t>(n_), 0.0);
    for (int j = 0; j < n_; ++j) {
        if (state_[static_cast<std::size_t>(j)] == VarState::Basic) continue;
        reduced_[static_cast<std::size_t>(j)] = cost_[static_cast<std::size_t>(j)] - dot_column(y, j);
    }
}

std::vector<double> SimplexEngine::structural_values() const {
    std::vector<double> x(x_.begin(), x_.begin() + n_);
    for (std::size_t j = 0; j < x.size(); ++j) x[j] *= col_scale_[j];
    return x;
}

std::vector<double> SimplexEngine::row_duals() const {
    std::vector<double> y = duals_;
    for (std::size_t i = 0; i < y.size(); ++i) y[i] *= row_scale_[i];
    return y;
}

std::vector<double> SimplexEngine::structural_reduced_costs() const {
    std::vector<double> d = reduced_;
    for (std::size_t j = 0; j < d.size(); ++j) d[j] /= col_scale_[j];
    return d;
}

double SimplexEngine::objective() const {
    double obj = offset_;
    for (int j = 0; j < n_; ++j) obj += cost_[static_cast<std::size_t>(j)] * x_[static_cast<std::size_t>(j)];
    return obj;
}

}  // namespace gridsiter::opt::detail
