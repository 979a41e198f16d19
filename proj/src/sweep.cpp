#include <map>
#include <numeric>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "gridsiter/pipeline.hpp"
#include "outputs.hpp"

namespace gridsiter {

SweepParameter parse_sweep_parameter(const std::string& name) {
    if (name == "tau_pr" || name == "tau") return SweepParameter::TauPr;
    if (name == "alpha_shift") return SweepParameter::AlphaShift;
    if (name == "alpha_pause") return SweepParameter::AlphaPause;
    if (name == "cost_scale") return SweepParameter::CostScale;
    throw ConfigError(fmt::format("unknown sweep parameter '{}' (tau_pr, alpha_shift, alpha_pause, cost_scale)", name));
}

const char* to_string(SweepParameter p) {
    switch (p) {
        case SweepParameter::TauPr: return "tau_pr";
        case SweepParameter::AlphaShift: return "alpha_shift";
        case SweepParameter::AlphaPause: return "alpha_pause";
        case SweepParameter::CostScale: return "cost_scale";
    }
    return "?";
}

namespace {

using Key = std::pair<int, std::string>;

// Fills N, mean CC and window medians of one envelope's row.
SweepRow summarize_row(double value, const EnvelopeCase& env, int n_stage1, const std::vector<Stage2Scenario>& scenarios,
                       const RankingResult& ranking) {
    SweepRow row;
    row.value = value;
    row.envelope = env.label;
    row.n_stage1 = n_stage1;
    std::vector<std::vector<MetricRecord>> metrics;
    for (const auto& sc : scenarios)
        if (sc.envelope == env.label && !sc.run.excluded) metrics.push_back(sc.metrics);
    row.n_stage2 = static_cast<int>(metrics.size());
    if (!ranking.rows.empty()) {
        double s = 0.0;
        for (const auto& r : ranking.rows) s += r.closeness;
        row.mean_closeness = s / static_cast<double>(ranking.rows.size());
    }
    for (const auto& sr : summarize(env.label, metrics))
        if (!sr.empty) row.medians[fmt::format("{}_{}", sr.metric, to_string(sr.window))] = sr.median;
    return row;
}

std::vector<EnvelopeCase> with_alpha(const Study& study, EnvelopeKind kind, double alpha) {
    std::vector<MenuEntry> menu;
    for (auto entry : study.menu())
        if (entry.kind == kind) {
            entry.curtailment = alpha;
            menu.push_back(entry);
        }
    if (menu.empty()) throw ConfigError(fmt::format("the menu has no {} envelope to sweep", to_string(kind)));
    return expand_menu(menu, study.config().sizes_mw);
}

std::vector<EnvelopeCase> of_kind(const std::vector<EnvelopeCase>& envs, EnvelopeKind kind) {
    std::vector<EnvelopeCase> out;
    for (const auto& e : envs)
        if (e.traj.source.kind == kind) out.push_back(e);
    return out;
}

}  // namespace

SweepReport sensitivity_sweep(const RunConfig& cfg, SweepParameter parameter, const std::vector<double>& values) {
    cfg.validate();
    if (values.empty()) throw ConfigError("sweep needs at least one value");
    const Study study(cfg);
    const auto& cands = study.frame().candidates;
    SweepReport report;
    report.parameter = parameter;

    auto fail_rows = [&](double v, const std::vector<EnvelopeCase>& envs, const std::string& why) {
        spdlog::warn("sweep {} = {}: {}", to_string(parameter), v, why);
        if (envs.empty()) {
            SweepRow row;
            row.value = v;
            row.envelope = "*";
            row.status = why;
            report.rows.push_back(row);
        }
        for (const auto& e : envs) {
            SweepRow row;
            row.value = v;
            row.envelope = e.label;
            row.status = why;
            report.rows.push_back(row);
        }
    };

    if (parameter == SweepParameter::TauPr || parameter == SweepParameter::CostScale) {
        const auto& envs = study.envelopes();
        const auto records = study.stage1(envs, cands);
        if (parameter == SweepParameter::TauPr) {
            std::map<Key, Stage2Scenario> cache;
            for (double tau : values) {
                try {
                    const QualifiedSet q = stage1_gate(records, tau);
                    QualifiedSet todo;
                    for (const auto& m : q.members)
                        if (!cache.count(m)) todo.members.push_back(m);
                    for (auto& sc : study.stage2(todo, envs)) cache.emplace(Key{sc.bus, sc.envelope}, std::move(sc));
                    std::vector<Stage2Scenario> scenarios;
                    for (const auto& m : q.members) scenarios.push_back(cache.at(m));
                    const auto rankings = study.stage3(scenarios, envs);
                    for (std::size_t i = 0; i < envs.size(); ++i)
                        report.rows.push_back(
                            summarize_row(tau, envs[i], q.counts.at(envs[i].label), scenarios, rankings[i]));
                } catch (const std::exception& e) {
                    fail_rows(tau, envs, e.what());
                }
            }
        } else {
            // Stage-1 feasibility does not depend on costs, so one gate serves every scale.
            const QualifiedSet q = stage1_gate(records, cfg.tau_pr);
            std::vector<RankingResult> baseline;
            for (double scale : values) {
                try {
                    const Study scaled(study, scale);
                    const auto scenarios = scaled.stage2(q, envs);
                    const auto rankings = scaled.stage3(scenarios, envs);
                    if (baseline.empty()) {
                        if (scale == 1.0) {
                            baseline = rankings;
                        } else {
                            const auto base_sc = study.stage2(q, envs);
                            baseline = study.stage3(base_sc, envs);
                        }
                    }
                    for (std::size_t i = 0; i < envs.size(); ++i) {
                        SweepRow row = summarize_row(scale, envs[i], q.counts.at(envs[i].label), scenarios, rankings[i]);
                        std::map<int, double> base_cc;
                        for (const auto& r : baseline[i].rows) base_cc[r.bus] = r.closeness;
                        std::vector<double> a, b;
                        for (const auto& r : rankings[i].rows)
                            if (auto it = base_cc.find(r.bus); it != base_cc.end()) {
                                a.push_back(it->second);
                                b.push_back(r.closeness);
                            }
                        if (a.size() >= 2) row.spearman = spearman(a, b);
                        report.rows.push_back(row);
                    }
                } catch (const std::exception& e) {
                    fail_rows(scale, envs, e.what());
                }
            }
        }
    } else {
        const EnvelopeKind kind = parameter == SweepParameter::AlphaShift ? EnvelopeKind::Shift : EnvelopeKind::Pause;
        const auto nominal = of_kind(study.envelopes(), kind);
        for (double alpha : values) {
            try {
                const auto envs = with_alpha(study, kind, alpha);
                const auto records = study.stage1(envs, cands);
                const QualifiedSet q = stage1_gate(records, cfg.tau_pr);
                const auto scenarios = study.stage2(q, envs);
                const auto rankings = study.stage3(scenarios, envs);
                for (std::size_t i = 0; i < envs.size(); ++i)
                    report.rows.push_back(
                        summarize_row(alpha, envs[i], q.counts.at(envs[i].label), scenarios, rankings[i]));
            } catch (const std::exception& e) {
                fail_rows(alpha, nominal, e.what());
            }
        }
    }

    out::OutputDir dir(cfg.output_dir);
    dir.write(fmt::format("sweep_{}.csv", to_string(parameter)), out::sweep_csv(report));
    return report;
}

}  // namespace gridsiter
