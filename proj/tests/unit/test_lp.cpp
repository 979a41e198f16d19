#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/Dense>

#include "gridsiter/lp.hpp"

using namespace gridsiter::opt;

namespace {

// Brute-force optimum of a small bounded LP: every choice of n active
// constraints (rows or bounds) gives a candidate vertex.
struct VertexOracle {
    bool feasible = false;
    double objective = 0.0;
};

VertexOracle enumerate_vertices(const LinearProgram& lp, const std::vector<double>& lo, const std::vector<double>& hi) {
    const int n = lp.num_variables();
    struct Plane {
        std::vector<double> a;
        double b;
    };
    std::vector<Plane> planes;
    for (int r = 0; r < lp.num_constraints(); ++r) {
        Plane p{std::vector<double>(static_cast<std::size_t>(n), 0.0), lp.rhs(r)};
        for (const Term& t : lp.row(r)) p.a[static_cast<std::size_t>(t.var)] += t.coef;
        planes.push_back(p);
    }
    for (int j = 0; j < n; ++j) {
        Plane p{std::vector<double>(static_cast<std::size_t>(n), 0.0), lo[static_cast<std::size_t>(j)]};
        p.a[static_cast<std::size_t>(j)] = 1.0;
        planes.push_back(p);
        p.b = hi[static_cast<std::size_t>(j)];
        planes.push_back(p);
    }
    auto is_feasible = [&](const Eigen::VectorXd& x) {
        for (int j = 0; j < n; ++j)
            if (x[j] < lo[static_cast<std::size_t>(j)] - 1e-7 || x[j] > hi[static_cast<std::size_t>(j)] + 1e-7) return false;
        for (int r = 0; r < lp.num_constraints(); ++r) {
            double s = 0.0;
            for (const Term& t : lp.row(r)) s += t.coef * x[t.var];
            const double tolr = 1e-7 * (1 + std::abs(lp.rhs(r)));
            if (lp.sense(r) == Sense::LessEqual && s > lp.rhs(r) + tolr) return false;
            if (lp.sense(r) == Sense::GreaterEqual && s < lp.rhs(r) - tolr) return false;
            if (lp.sense(r) == Sense::Equal && std::abs(s - lp.rhs(r)) > tolr) return false;
        }
        return true;
    };
    VertexOracle best;
    const int k = static_cast<int>(planes.size());
    std::vector<int> pick(static_cast<std::size_t>(n));
    // Iterate over all n-subsets of planes.
    std::vector<bool> mask(static_cast<std::size_t>(k), false);
    std::fill(mask.begin(), mask.begin() + n, true);
    do {
        Eigen::MatrixXd a(n, n);
        Eigen::VectorXd b(n);
        int row = 0;
        for (int i = 0; i < k; ++i) {
            if (!mask[static_cast<std::size_t>(i)]) continue;
            for (int j = 0; j < n; ++j) a(row, j) = planes[static_cast<std::size_t>(i)].a[static_cast<std::size_t>(j)];
            b[row] = planes[static_cast<std::size_t>(i)].b;
            ++row;
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
        if (!lu.isInvertible()) continue;
        const Eigen::VectorXd x = lu.solve(b);
        if (!is_feasible(x)) continue;
        double obj = lp.objective_offset();
        for (int j = 0; j < n; ++j) obj += lp.cost(j) * x[j];
        if (!best.feasible || obj < best.objective) best = {true, obj};
    } while (std::prev_permutation(mask.begin(), mask.end()));
    return best;
}

LinearProgram random_lp(std::mt19937& rng, int n, int m) {
    std::uniform_real_distribution<double> coef(-5.0, 5.0);
    std::uniform_int_distribution<int> sense(0, 2);
    LinearProgram lp;
    for (int j = 0; j < n; ++j) lp.add_variable(-3.0 + coef(rng) * 0.2, 4.0 + coef(rng) * 0.2, coef(rng));
    for (int r = 0; r < m; ++r) {
        std::vector<Term> terms;
        for (int j = 0; j < n; ++j) terms.push_back({j, std::round(coef(rng) * 2.0) / 2.0});
        const int s = sense(rng);
        lp.add_constraint(terms, s == 0 ? Sense::LessEqual : (s == 1 ? Sense::GreaterEqual : Sense::Equal),
                          coef(rng));
    }
    return lp;
}

}  // namespace

TEST_CASE("single variable lower bound row") {
    LinearProgram lp;
    const int x = lp.add_variable(-kInfinity, kInfinity, 1.0, "x");
    lp.add_constraint({{x, 1.0}}, Sense::GreaterEqual, 3.0, "lo");
    lp.add_constraint({{x, 1.0}}, Sense::LessEqual, 10.0, "hi");
    const Solution s = solve_lp(lp);
    REQUIRE(s.optimal());
    CHECK(s.x[0] == doctest::Approx(3.0));
    CHECK(s.objective == doctest::Approx(3.0));
    CHECK(s.dual(lp, "lo") == doctest::Approx(1.0));
    CHECK(s.dual(lp, "hi") == doctest::Approx(0.0));
}

TEST_CASE("two-variable equality with a binding cap") {
    LinearProgram lp;
    const int a = lp.add_variable(0, kInfinity, 2.0, "a");
    const int b = lp.add_variable(0, kInfinity, 3.0, "b");
    lp.add_constraint({{a, 1.0}, {b, 1.0}}, Sense::Equal, 10.0, "sum");
    lp.add_constraint({{a, 1.0}}, Sense::LessEqual, 4.0, "cap");
    const Solution s = solve_lp(lp);
    REQUIRE(s.optimal());
    CHECK(s.x[0] == doctest::Approx(4.0));
    CHECK(s.x[1] == doctest::Approx(6.0));
    CHECK(s.objective == doctest::Approx(26.0));
    CHECK(s.dual(lp, "sum") == doctest::Approx(3.0));
    CHECK(s.dual(lp, "cap") == doctest::Approx(-1.0));
}

TEST_CASE("infeasible and unbounded are statuses") {
    LinearProgram inf;
    const int x = inf.add_variable(-kInfinity, kInfinity, 1.0);
    inf.add_constraint({{x, 1.0}}, Sense::GreaterEqual, 5.0);
    inf.add_constraint({{x, 1.0}}, Sense::LessEqual, 4.0);
    CHECK(solve_lp(inf).status == Status::Infeasible);

    LinearProgram unb;
    const int y = unb.add_variable(0, kInfinity, -1.0);
    unb.add_constraint({{y, 1.0}}, Sense::GreaterEqual, 1.0);
    CHECK(solve_lp(unb).status == Status::Unbounded);
}

TEST_CASE("malformed programs are rejected") {
    LinearProgram lp;
    lp.add_variable(2.0, 1.0, 0.0);
    CHECK_THROWS_AS(solve_lp(lp), std::invalid_argument);
    LinearProgram nan;
    const int v = nan.add_variable(0, 1, 0.0);
    nan.add_constraint({{v, std::nan("")}}, Sense::LessEqual, 1.0);
    CHECK_THROWS_AS(solve_lp(nan), std::invalid_argument);
}

TEST_CASE("random LPs match vertex enumeration") {
    std::mt19937 rng(20240611);
    int feasible = 0;
    for (int trial = 0; trial < 300; ++trial) {
        const int n = 2 + trial % 3;
        const int m = 1 + trial % 4;
        const LinearProgram lp = random_lp(rng, n, m);
        std::vector<double> lo, hi;
        for (int j = 0; j < n; ++j) {
            lo.push_back(lp.lower(j));
            hi.push_back(lp.upper(j));
        }
        const VertexOracle oracle = enumerate_vertices(lp, lo, hi);
        const Solution s = solve_lp(lp);
        CAPTURE(trial);
        if (!oracle.feasible) {
            CHECK(s.status == Status::Infeasible);
            continue;
        }
        ++feasible;
        REQUIRE(s.optimal());
        CHECK(s.objective == doctest::Approx(oracle.objective).epsilon(1e-6));
    }
    CHECK(feasible > 100);
}

TEST_CASE("duals equal finite-difference sensitivity of the optimum") {
    std::mt19937 rng(7);
    int checked = 0;
    for (int trial = 0; trial < 200 && checked < 60; ++trial) {
        const LinearProgram lp = random_lp(rng, 3, 3);
        const Solution base = solve_lp(lp);
        if (!base.optimal()) continue;
        for (int r = 0; r < lp.num_constraints(); ++r) {
            const double h = 1e-5;
            // Rebuild with the perturbed rhs in both directions.
            auto perturbed = [&](double delta) {
                LinearProgram p;
                for (int j = 0; j < lp.num_variables(); ++j) p.add_variable(lp.lower(j), lp.upper(j), lp.cost(j));
                for (int i = 0; i < lp.num_constraints(); ++i)
                    p.add_constraint(lp.row(i), lp.sense(i), lp.rhs(i) + (i == r ? delta : 0.0));
                return solve_lp(p);
            };
            const Solution up = perturbed(h);
            const Solution dn = perturbed(-h);
            if (!up.optimal() || !dn.optimal()) continue;
            const double right = (up.objective - base.objective) / h;
            const double left = (base.objective - dn.objective) / h;
            // At a degenerate vertex the one-sided slopes differ; the dual lies between them.
            if (std::abs(right - left) > 1e-4) continue;
            CAPTURE(trial);
            CHECK(base.duals[static_cast<std::size_t>(r)] == doctest::Approx(right).epsilon(1e-4).scale(1.0));
            ++checked;
        }
    }
    CHECK(checked >= 30);
}

TEST_CASE("larger sparse transport LP matches closed form") {
    // Supply nodes with increasing cost serve one aggregate demand: merit order.
    LinearProgram lp;
    const int n = 400;
    std::vector<Term> terms;
    for (int j = 0; j < n; ++j) {
        const int v = lp.add_variable(0.0, 1.0 + (j % 7), 10.0 + j * 0.5);
        terms.push_back({v, 1.0});
    }
    const double demand = 1000.0;
    lp.add_constraint(terms, Sense::Equal, demand, "demand");
    for (int j = 0; j + 1 < n; j += 2) lp.add_constraint({{j, 1.0}, {j + 1, -1.0}}, Sense::LessEqual, 10.0);
    const Solution s = solve_lp(lp);
    REQUIRE(s.optimal());
    double remaining = demand, cost = 0.0, marginal = 0.0;
    for (int j = 0; j < n && remaining > 1e-12; ++j) {
        const double take = std::min(remaining, 1.0 + (j % 7));
        cost += take * (10.0 + j * 0.5);
        remaining -= take;
        marginal = 10.0 + j * 0.5;
    }
    CHECK(s.objective == doctest::Approx(cost));
    CHECK(s.dual(lp, "demand") == doctest::Approx(marginal));
}

// ---------------------------------------------------------------------------
// MILP

TEST_CASE("random binary programs match exhaustive enumeration") {
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> u(-4.0, 4.0);
    int with_solution = 0;
    for (int trial = 0; trial < 40; ++trial) {
        const int nb = 3 + trial % 6;
        MixedIntegerProgram mip;
        for (int j = 0; j < nb; ++j) mip.mark_binary(mip.lp.add_variable(0, 1, u(rng)));
        const int c = mip.lp.add_variable(0.0, 5.0, u(rng) * 0.5);  // one continuous
        const int rows = 2 + trial % 3;
        for (int r = 0; r < rows; ++r) {
            std::vector<Term> t;
            for (int j = 0; j < nb; ++j) t.push_back({j, std::round(u(rng))});
            t.push_back({c, u(rng)});
            mip.lp.add_constraint(t, r % 2 == 0 ? Sense::LessEqual : Sense::GreaterEqual, u(rng));
        }
        // Oracle: enumerate binaries; the continuous variable is one-dimensional
        // so its optimum sits at an interval endpoint.
        bool found = false;
        double best = 0.0;
        for (int mask = 0; mask < (1 << nb); ++mask) {
            double lo = 0.0, hi = 5.0;
            for (int r = 0; r < mip.lp.num_constraints(); ++r) {
                double fixed = 0.0, a = 0.0;
                for (const Term& t : mip.lp.row(r)) {
                    if (t.var == c)
                        a += t.coef;
                    else
                        fixed += t.coef * ((mask >> t.var) & 1);
                }
                const double rest = mip.lp.rhs(r) - fixed;
                const bool le = mip.lp.sense(r) == Sense::LessEqual;
                if (std::abs(a) < 1e-12) {
                    if (le ? rest < -1e-9 : rest > 1e-9) lo = 1, hi = 0;
                } else if ((a > 0) == le) {
                    hi = std::min(hi, rest / a);
                } else {
                    lo = std::max(lo, rest / a);
                }
            }
            if (lo > hi + 1e-9) continue;
            double obj = 0.0;
            for (int j = 0; j < nb; ++j) obj += mip.lp.cost(j) * ((mask >> j) & 1);
            obj += std::min(mip.lp.cost(c) * lo, mip.lp.cost(c) * hi);
            if (!found || obj < best) best = obj, found = true;
        }
        const Solution s = solve_milp(mip);
        CAPTURE(trial);
        if (!found) {
            CHECK(s.status == Status::Infeasible);
            continue;
        }
        ++with_solution;
        REQUIRE(s.optimal());
        CHECK(s.objective == doctest::Approx(best).epsilon(1e-6));
        for (int j = 0; j < nb; ++j) CHECK(std::abs(s.x[static_cast<std::size_t>(j)] - std::round(s.x[static_cast<std::size_t>(j)])) < 1e-6);
    }
    CHECK(with_solution >= 25);
}

TEST_CASE("node limit is reported as a status") {
    MixedIntegerProgram mip;
    std::vector<Term> t;
    for (int j = 0; j < 20; ++j) {
        mip.mark_binary(mip.lp.add_variable(0, 1, -1.0 - 0.01 * j));
        t.push_back({j, 2.0});
    }
    mip.lp.add_constraint(t, Sense::LessEqual, 19.0);
    SolverOptions opt;
    opt.max_nodes = 2;
    const Solution s = solve_milp(mip, opt);
    CHECK((s.status == Status::NodeLimit || s.status == Status::Optimal));
}

TEST_CASE("lp format output names rows and binaries") {
    MixedIntegerProgram mip;
    const int x = mip.lp.add_variable(0, 10, 1.5, "x");
    const int y = mip.lp.add_variable(0, 1, 2.0, "y");
    mip.mark_binary(y);
    mip.lp.add_constraint({{x, 1.0}, {y, -3.0}}, Sense::GreaterEqual, 1.0, "link");
    std::ostringstream out;
    write_lp_format(out, mip.lp, mip.binaries());
    const std::string text = out.str();
    CHECK(text.find("Minimize") != std::string::npos);
    CHECK(text.find("r0_link:") != std::string::npos);
    CHECK(text.find("Binaries\n y_1") != std::string::npos);
    CHECK(text.find(">= 1") != std::string::npos);
}
