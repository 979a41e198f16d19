// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "fixtures.hpp"
#include "gridsiter/case_io.hpp"
#include "gridsiter/hashing.hpp"
#include "gridsiter/network.hpp"
#include "gridsiter/pipeline.hpp"
#include "json.hpp"
#include "scuc_oracle.hpp"

using namespace gridsiter;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Verdict {
    bool ok = true;
    std::vector<std::string> notes;

    void check(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            notes.push_back("failed: " + what);
        }
    }
    void note(const std::string& s) { notes.push_back(s); }
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void report(int id, const std::string& name, const std::function<void(Verdict&)>& body) {
    Verdict v;
    const auto t0 = Clock::now();
    try {
        body(v);
    } catch (const std::exception& e) {
        v.ok = false;
        v.notes.push_back(std::string("exception: ") + e.what());
    }
    if (!v.ok) ++failures;
    std::string detail;
    for (const auto& n : v.notes) detail += (detail.empty() ? "" : "; ") + n;
    fmt::print("{} C{:<2} {} [{:.1f} s] {}\n", v.ok ? "PASS" : "FAIL", id, name, seconds_since(t0), detail);
    std::fflush(stdout);
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / "gridsiter_acceptance" / name;
    fs::remove_all(p);
    return p;
}

RunConfig golden_config(const std::string& out) {
    RunConfig cfg = load_config("data/configs/golden.toml");
    cfg.output_dir = scratch(out);
    return cfg;
}

std::map<std::string, std::vector<int>> read_golden_shortlist(const fs::path& p) {
    std::ifstream in(p);
    if (!in) throw std::runtime_error("missing " + p.string());
    std::map<std::string, std::vector<int>> out;
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string env, rank, bus;
        std::getline(ss, env, ',');
        std::getline(ss, rank, ',');
        std::getline(ss, bus, ',');
        out[env].push_back(std::stoi(bus));
    }
    return out;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace

int main() {
    // Two golden runs feed criteria 3, 5, 6, 7, 8 and 11.
    PipelineResult golden;
    double golden_seconds = 0.0;
    std::string golden_error;
    const auto cfg_a = golden_config("golden_a");
    const auto cfg_b = golden_config("golden_b");
    try {
        const auto t0 = Clock::now();
        golden = run_pipeline(cfg_a);
        golden_seconds = seconds_since(t0);
        run_pipeline(cfg_b);
    } catch (const std::exception& e) {
        golden_error = e.what();
    }

    report(1, "envelope arithmetic", [](Verdict& v) {
        const auto t0 = Clock::now();
        const auto firm = build_envelope(EnvelopeSpec::defaults(EnvelopeKind::Firm, 1000.0));
        const auto pause = build_envelope(EnvelopeSpec::defaults(EnvelopeKind::Pause, 1000.0));
        const auto shift = build_envelope(EnvelopeSpec::defaults(EnvelopeKind::Shift, 1000.0));
        for (int tau = 1; tau <= 24; ++tau) {
            const bool peak = tau >= 16 && tau <= 19;
            v.check(firm.at(tau) == 800.0, fmt::format("firm τ={}", tau));
            v.check(std::abs(pause.at(tau) - (peak ? 680.0 : 800.0)) <= 1e-9, fmt::format("pause τ={}", tau));
            v.check(std::abs(shift.at(tau) - (peak ? 640.0 : 832.0)) <= 1e-9, fmt::format("shift τ={}", tau));
        }
        const double rel = std::abs(shift.energy() - firm.energy()) / firm.energy();
        v.check(rel <= 1e-9, "shift energy equals firm");
        const auto ramp = check_ramp(shift, 200.0);
        v.check(ramp.pass && std::abs(ramp.worst_step - 192.0) <= 1e-9, "worst shift step 192 MW");
        const double dt = seconds_since(t0);
        v.check(dt < 1.0, "runtime < 1 s");
        v.note(fmt::format("800/680/640/832 MW, energy rel diff {:.1e}, worst step {:g} MW", rel, ramp.worst_step));
    });

    report(2, "PTDF vs B-theta flows", [](Verdict& v) {
        const auto t0 = Clock::now();
        std::mt19937_64 rng(2);
        std::uniform_real_distribution<double> u(-500.0, 500.0);
        double worst = 0.0;
        for (const auto& name : fixtures::bundled_cases()) {
            const GridCase g = load_case(name);
            const auto ptdf = build_ptdf(g);
            for (int k = 0; k < 1000; ++k) {
                Eigen::VectorXd p(static_cast<Eigen::Index>(g.num_buses()));
                for (auto& x : p) x = u(rng);
                p[static_cast<Eigen::Index>(g.slack_index())] -= p.sum();
                worst = std::max(worst, (ptdf.flows(p) - solve_dc_flows(g, p, g.slack_bus())).cwiseAbs().maxCoeff());
            }
        }
        v.check(worst <= 1e-6, "max |ΔF| ≤ 1e-6 MW");
        v.check(seconds_since(t0) < 10.0, "runtime < 10 s");
        v.note(fmt::format("{} cases x 1000 injections, max |ΔF| = {:.2e} MW", fixtures::bundled_cases().size(), worst));
    });

    report(3, "LMP correctness", [&](Verdict& v) {
        const GridCase g = fixtures::congested_pair(std::vector<double>(24, 100.0));
        const auto run = simulate_scenario(DemandOverlay(g), {{0, 1}}, MarketOptions{});
        v.check(!run.excluded, "2-bus fixture solves");
        for (const auto& h : run.logs) {
            v.check(std::abs(h.lmp[0] - 10.0) <= 1e-9 && std::abs(h.lmp[1] - 50.0) <= 1e-9, "LMPs (10, 50)");
            v.check(std::abs(h.mu_plus[0] + h.mu_minus[0] - 40.0) <= 1e-9, "line dual 40");
        }
        v.check(golden.exit_code == 0 && !golden.base.logs.empty(), "golden run available");
        const GridCase grid = load_case("data/cases/grid20.json");
        const auto ptdf = build_ptdf(grid);
        double worst_res = 0.0, worst_flat = 0.0;
        long hours = 0, flat_hours = 0;
        auto scan = [&](const ScenarioRun& r) {
            for (const auto& h : r.logs) {
                ++hours;
                worst_res = std::max(worst_res, decomposition_residual(ptdf, h));
                double mu = 0.0;
                for (std::size_t k = 0; k < h.mu_plus.size(); ++k) mu = std::max({mu, h.mu_plus[k], h.mu_minus[k]});
                if (mu > 1e-7) continue;
                ++flat_hours;
                for (double l : h.lmp) worst_flat = std::max(worst_flat, std::abs(l - h.lambda_sys));
            }
        };
        scan(golden.base);
        for (const auto& sc : golden.stage2) scan(sc.run);
        v.check(worst_res <= 1e-5, "decomposition residual ≤ 1e-5");
        v.check(worst_flat <= 1e-5, "uncongested LMPs equal λ_sys within 1e-5");
        v.check(flat_hours > 0, "golden run has uncongested hours");
        v.note(fmt::format("2-bus (10, 50) / 40; {} golden hours, residual {:.1e}; {} uncongested hours, max |LMP-λ| {:.1e}",
                           hours, worst_res, flat_hours, worst_flat));
    });

    report(4, "SCUC oracle equivalence", [](Verdict& v) {
        const auto t0 = Clock::now();
        std::mt19937_64 rng(2024);
        int compared = 0, infeasible_agree = 0;
        double worst = 0.0;
        for (int k = 0; k < 30; ++k) {
            const auto inst = scuc_oracle::random_instance(rng, k);
            const double brute = scuc_oracle::enumerate(inst);
            const auto day = scuc_oracle::solve(inst);
            if (!std::isfinite(brute)) {
                v.check(!day.ok(), fmt::format("instance {} infeasible in both", k));
                infeasible_agree += day.ok() ? 0 : 1;
                continue;
            }
            v.check(day.ok(), fmt::format("instance {} solves", k));
            if (!day.ok()) continue;
            worst = std::max(worst, std::abs(day.objective - brute));
            ++compared;
        }
        v.check(worst <= 1e-6, "|MILP − enumeration| ≤ 1e-6");
        v.check(compared >= 25, "≥ 25 instances compared");
        v.check(seconds_since(t0) < 60.0, "runtime < 60 s");
        v.note(fmt::format("{} instances compared, {} infeasible in both, max |Δobj| = {:.1e}", compared, infeasible_agree,
                           worst));
    });

    report(5, "Stage-1 gate properties", [&](Verdict& v) {
        v.check(!golden.stage1.empty(), "golden Stage-1 records");
        for (const auto& r : golden.stage1) {
            v.check(r.total > 0 && r.feasible >= 0 && r.feasible <= r.total, "0 ≤ feasible ≤ total");
            v.check(r.pass_rate() == static_cast<double>(r.feasible) / static_cast<double>(r.total), "PR = feasible/total");
        }
        const auto q90 = stage1_gate(golden.stage1, 0.90);
        const auto q95 = stage1_gate(golden.stage1, 0.95);
        const auto q99 = stage1_gate(golden.stage1, 0.99);
        auto subset = [](const QualifiedSet& a, const QualifiedSet& b) {
            return std::all_of(a.members.begin(), a.members.end(),
                               [&](const auto& m) { return b.contains(m.first, m.second); });
        };
        v.check(subset(q95, q90) && subset(q99, q95), "Q(0.99) ⊆ Q(0.95) ⊆ Q(0.90)");

        std::map<std::pair<int, std::string>, double> golden_pr;
        for (const auto& r : golden.stage1) golden_pr[{r.bus, r.envelope}] = r.pass_rate();
        int pairs = 0;
        for (const auto& [key, pr] : golden_pr)
            if (key.second == "pause") {
                v.check(pr >= golden_pr.at({key.first, "firm"}), fmt::format("grid20 bus {} pause ≥ firm", key.first));
                ++pairs;
            }
        for (const char* name : {"case2", "case3", "case5"}) {
            RunConfig cfg;
            cfg.case_path = fmt::format("data/cases/{}.json", name);
            cfg.sizes_mw = {60.0};
            cfg.days = 2;
            cfg.hour_sample = "every6+peak";
            cfg.output_dir = scratch(name);
            const Study study(cfg);
            const auto recs = study.stage1(study.envelopes(), study.frame().candidates);
            std::map<int, std::map<std::string, double>> pr;
            for (const auto& r : recs) pr[r.bus][r.envelope] = r.pass_rate();
            for (const auto& [bus, m] : pr) {
                v.check(m.at("pause") >= m.at("firm"), fmt::format("{} bus {} pause ≥ firm", name, bus));
                ++pairs;
            }
        }
        v.note(fmt::format("|Q| at 0.90/0.95/0.99 = {}/{}/{}; pause ≥ firm on {} bus pairs over 4 cases",
                           q90.members.size(), q95.members.size(), q99.members.size(), pairs));
    });

    report(6, "metric identities", [&](Verdict& v) {
        int scenarios = 0;
        for (const auto& sc : golden.stage2) {
            if (sc.run.excluded) continue;
            double all = 0.0, on = 0.0, off = 0.0;
            for (const auto& m : sc.metrics) {
                if (m.window == Window::All) all = m.binding_hours;
                if (m.window == Window::OnPeak) on = m.binding_hours;
                if (m.window == Window::OffPeak) off = m.binding_hours;
            }
            v.check(all == on + off, fmt::format("B(all) = B(on) + B(off) for {}_{}", sc.bus, sc.envelope));
            ++scenarios;
        }
        v.check(scenarios > 0, "golden scenarios present");

        std::vector<double> load(24, 50.0);
        load[0] = 100.0;
        const GridCase g = fixtures::congested_pair(load);
        const auto run = simulate_scenario(DemandOverlay(g), {{0, 1}}, MarketOptions{});
        const auto m = compute_metrics(run.logs, Window::All, {16, 17, 18, 19}, {60.0});
        v.check(std::abs(m.congestion_rent - 0.0024) <= 1e-12, "rent 0.0024 $M/day");

        auto flat = [](int hour, double price) {
            HourlyMarketLog h;
            h.hour = hour;
            h.lambda_sys = price;
            h.lmp.assign(2, price);
            h.mu_plus = {0.0};
            h.mu_minus = {0.0};
            h.flow = {0.0};
            return h;
        };
        const auto s = compute_metrics({flat(0, 24.0), flat(1, 26.0)}, Window::All, {16, 17, 18, 19}, {100.0});
        v.check(std::abs(s.lmp_std - std::sqrt(2.0)) <= 1e-12, "σ = √2");
        v.note(fmt::format("{} golden scenarios; R = {:.10g} $M/day; σ − √2 = {:.1e}", scenarios, m.congestion_rent,
                           s.lmp_std - std::sqrt(2.0)));
    });

    report(7, "Stage-3 suite", [&](Verdict& v) {
        int universes = 0;
        for (const auto& r : golden.rankings) {
            if (r.rows.empty()) continue;
            ++universes;
            for (const auto& w : r.weights) {
                double sum = 0.0;
                for (double x : w.weights) sum += x;
                v.check(std::abs(sum - 1.0) <= 1e-9, "group weights sum to 1");
            }
            for (const auto& row : r.rows)
                v.check(row.closeness >= 0.0 && row.closeness <= 1.0, "CC in [0, 1]");
        }
        v.check(universes > 0, "golden rankings present");
        const auto dom = topsis({{1.0, 0.9, 0.8}, {0.2, 0.1, 0.3}});
        v.check(dom.closeness[0] == 1.0 && dom.closeness[1] == 0.0, "dominance CC = {1, 0}");
        const auto three = topsis({{1, 1, 1}, {0, 0, 0}, {0.5, 0.5, 0.5}});
        v.check(std::abs(three.closeness[0] - 1.0) <= 1e-9 && std::abs(three.closeness[1]) <= 1e-9 &&
                    std::abs(three.closeness[2] - 0.5) <= 1e-9,
                "three-point CC = {1, 0, 0.5}");
        const double fixed = weighted_score({{1.0, 0.0, 0.0}})[0];
        v.check(fixed == 0.70, "fixed-weight score of (1, 0, 0) is 0.70");
        v.note(fmt::format("{} golden universes; CC {{1, 0}}, {{{:.9f}, {:.9f}, {:.9f}}}; fixed {:.2f}", universes,
                           three.closeness[0], three.closeness[1], three.closeness[2], fixed));
    });

    report(8, "end-to-end golden run", [&](Verdict& v) {
        v.check(golden_error.empty(), "golden runs complete " + golden_error);
        v.check(golden.exit_code == 0, "exit code 0");
        v.check(golden_seconds < 300.0, "runtime < 5 min");
        const auto ma = nlohmann::json::parse(slurp(cfg_a.output_dir / "manifest.json"));
        const auto mb = nlohmann::json::parse(slurp(cfg_b.output_dir / "manifest.json"));
        v.check(ma["files"] == mb["files"], "manifest file hashes identical across runs");
        std::size_t identical = 0;
        for (const auto& f : ma["files"]) {
            const auto name = f["name"].get<std::string>();
            const bool same = slurp(cfg_a.output_dir / name) == slurp(cfg_b.output_dir / name);
            v.check(same, "byte-identical " + name);
            identical += same ? 1 : 0;
        }

        const auto expected = read_golden_shortlist("tests/golden/shortlist.csv");
        std::size_t matched = 0;
        for (const auto& r : golden.rankings) {
            const auto it = expected.find(r.envelope);
            const bool same = it != expected.end() && it->second == r.shortlist();
            v.check(same, "shortlist " + r.envelope + " matches the golden file");
            matched += same ? 1 : 0;
        }
        v.check(matched == expected.size(), "every golden envelope ranked");
        v.note(fmt::format("{:.0f} s, {} of {} files byte-identical, {} shortlists match", golden_seconds, identical,
                           ma["files"].size(), matched));
    });

    report(9, "sensitivity shapes", [](Verdict& v) {
        const auto t0 = Clock::now();
        auto golden_cfg = golden_config("sweeps");
        RunConfig sweep_cfg = load_config("data/configs/sweep.toml");
        sweep_cfg.output_dir = golden_cfg.output_dir;

        auto by_env = [](const SweepReport& rep) {
            std::map<std::string, std::vector<const SweepRow*>> out;
            for (const auto& row : rep.rows) out[row.envelope].push_back(&row);
            return out;
        };
        auto all_ok = [&](const SweepReport& rep) {
            for (const auto& row : rep.rows) v.check(row.status == "ok", "sweep row status " + row.status);
        };

        const auto tau = sensitivity_sweep(golden_cfg, SweepParameter::TauPr, {0.90, 0.95, 0.99});
        all_ok(tau);
        std::string tau_txt;
        for (const auto& [env, rows] : by_env(tau)) {
            for (std::size_t i = 1; i < rows.size(); ++i)
                v.check(rows[i]->n_stage2 <= rows[i - 1]->n_stage2, "N non-increasing in τ for " + env);
            tau_txt += fmt::format(" {}:", env);
            for (const auto* r : rows) tau_txt += fmt::format("{},", r->n_stage2);
            tau_txt.pop_back();
        }

        const auto alpha = sensitivity_sweep(sweep_cfg, SweepParameter::AlphaShift, {0.05, 0.20, 0.40, 0.60});
        all_ok(alpha);
        std::string alpha_txt;
        for (const auto& [env, rows] : by_env(alpha)) {
            for (std::size_t i = 1; i < rows.size(); ++i)
                v.check(rows[i]->n_stage2 >= rows[i - 1]->n_stage2, "N non-decreasing in α for " + env);
            for (const auto* r : rows) alpha_txt += fmt::format("{},", r->n_stage2);
        }
        if (!alpha_txt.empty()) alpha_txt.pop_back();

        const auto cost = sensitivity_sweep(golden_cfg, SweepParameter::CostScale, {1.0, 1.2});
        all_ok(cost);
        std::string rho_txt;
        for (const auto& row : cost.rows) {
            if (row.value != 1.2) continue;
            v.check(row.spearman && *row.spearman >= 0.95, "Spearman ≥ 0.95 for " + row.envelope);
            rho_txt += fmt::format(" {}:{:.3f}", row.envelope, row.spearman.value_or(-1.0));
        }
        const double dt = seconds_since(t0);
        v.check(dt < 900.0, "runtime < 15 min");
        v.note(fmt::format("N over τ 0.90/0.95/0.99 ={}; shift N over α 0.05/0.2/0.4/0.6 = {}; ρ at cost ×1.2 ={}",
                           tau_txt, alpha_txt, rho_txt));
    });

    report(10, "time-savings arithmetic", [](Verdict& v) {
        const double conservative = time_savings(5.0, 1.5).delta;
        const double midpoint = time_savings(6.5, 1.25).delta;
        const auto band = time_savings_range(5.0, 5.0, 1.0, 1.5);
        const auto full = time_savings_range(5.0, 8.0, 1.0, 1.5);
        v.check(conservative == 3.5, "3.5 years conservative");
        v.check(midpoint == 5.25, "5.25 years midpoint");
        v.check(band.low == 3.5 && band.high == 4.0, "[3.5, 4.0] band");
        v.check(full.low == 3.5 && full.high == 7.0, "[3.5, 7.0] full envelope");
        v.note(fmt::format("{:g}, {:g}, [{:g}, {:g}], [{:g}, {:g}]", conservative, midpoint, band.low, band.high, full.low,
                           full.high));
    });

    report(11, "naive baseline report", [&](Verdict& v) {
        v.check(!golden.naive.empty(), "naive report present");
        for (const auto& rep : golden.naive) {
            for (std::size_t i = 1; i < rep.naive.size(); ++i)
                v.check(rep.naive[i - 1].mean_lmp <= rep.naive[i].mean_lmp, "ascending base-case mean LMP");
            bool naive_fail = false, framework_pass = false;
            for (const auto* list : {&rep.naive, &rep.framework})
                for (const auto& r : *list) {
                    v.check(r.total > 0 && r.pass == (r.pass_rate >= rep.tau_pr), "verdict matches PR vs τ");
                    if (list == &rep.naive && !r.pass) naive_fail = true;
                    if (list == &rep.framework && r.pass) framework_pass = true;
                }
            v.check(naive_fail, "at least one naive pick fails");
            v.check(framework_pass, "at least one framework pick passes");
            std::string naive_txt, fw_txt;
            for (const auto& r : rep.naive) naive_txt += fmt::format(" {}{}", r.bus, r.pass ? "" : "✗");
            for (const auto& r : rep.framework) fw_txt += fmt::format(" {}{}", r.bus, r.pass ? "" : "✗");
            v.note(fmt::format("{:g} MW naive:{} framework:{}", rep.size_mw, naive_txt, fw_txt));
        }
    });

    fmt::print("{} of 11 criteria passed\n", 11 - failures);
    return failures == 0 ? 0 : 1;
}
