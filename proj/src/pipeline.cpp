#include "gridsiter/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "gridsiter/case_io.hpp"
#include "gridsiter/hashing.hpp"
#include "gridsiter/parallel.hpp"
#include "json.hpp"
#include "outputs.hpp"

namespace gridsiter {

namespace fs = std::filesystem;

std::vector<EnvelopeCase> expand_menu(const std::vector<MenuEntry>& menu, const std::vector<double>& sizes) {
    std::vector<EnvelopeCase> out;
    for (double p : sizes)
        for (const auto& entry : menu) {
            const EnvelopeSpec spec = entry.instantiate(p);
            spec.validate();
            EnvelopeCase e;
            e.size_mw = spec.nameplate_mw;
            e.label = sizes.size() == 1 ? spec.id : fmt::format("{}_{:g}mw", spec.id, spec.nameplate_mw);
            e.traj = build_envelope(spec);
            out.push_back(std::move(e));
        }
    return out;
}

std::set<int> peak_set(const std::vector<EnvelopeCase>& envs) {
    std::set<int> peak;
    for (const auto& e : envs) peak.insert(e.traj.source.peak_window.begin(), e.traj.source.peak_window.end());
    if (envs.empty()) peak = {16, 17, 18, 19};
    return peak;
}

int NaiveReport::naive_passed() const {
    return static_cast<int>(std::count_if(naive.begin(), naive.end(), [](const NaiveRow& r) { return r.pass; }));
}

namespace {

StudyFrame make_frame(const GridCase& grid, const RunConfig& cfg, const std::vector<EnvelopeCase>& envs) {
    StudyFrame f;
    f.blocks = representative_days(grid.horizon() / 24, cfg.days);
    f.peak = peak_set(envs);
    f.sample = sample_hours(block_hours(f.blocks), HourSamplePolicy::parse(cfg.hour_sample), f.peak);
    f.candidates = candidate_set(grid, cfg.vmin_kv, cfg.vmax_kv);
    return f;
}

std::vector<double> flow_limits(const GridCase& grid) {
    std::vector<double> out;
    for (const auto& br : grid.branches()) out.push_back(br.flow_limit);
    return out;
}

const EnvelopeCase& find_envelope(const std::vector<EnvelopeCase>& envs, const std::string& label) {
    for (const auto& e : envs)
        if (e.label == label) return e;
    throw std::invalid_argument(fmt::format("unknown envelope '{}'", label));
}

}  // namespace

Study::Study(RunConfig cfg)
    : cfg_(std::move(cfg)), grid_(load_case(cfg_.case_path).with_cost_scale(cfg_.cost_scale)) {
    menu_ = cfg_.menu_path.empty() ? default_menu() : load_menu(cfg_.menu_path);
    envs_ = expand_menu(menu_, cfg_.sizes_mw);
    frame_ = make_frame(grid_, cfg_, envs_);
    screener_ = std::make_shared<const Screener>(grid_, build_contingency_library(grid_));
}

Study::Study(RunConfig cfg, std::vector<EnvelopeCase> envs)
    : cfg_(std::move(cfg)), grid_(load_case(cfg_.case_path).with_cost_scale(cfg_.cost_scale)), envs_(std::move(envs)) {
    frame_ = make_frame(grid_, cfg_, envs_);
    screener_ = std::make_shared<const Screener>(grid_, build_contingency_library(grid_));
}

Study::Study(const Study& base, double cost_scale)
    : cfg_(base.cfg_), grid_(base.grid_.with_cost_scale(cost_scale)), menu_(base.menu_), envs_(base.envs_),
      frame_(base.frame_) {
    cfg_.cost_scale *= cost_scale;
    screener_ = std::make_shared<const Screener>(grid_, build_contingency_library(grid_));
}

MarketOptions Study::market_options() const {
    MarketOptions o;
    o.reserve_fraction = cfg_.reserve_fraction;
    o.eps_mu = cfg_.eps_mu;
    o.scuc_solver.tol.gap_relative = cfg_.mip_gap;
    return o;
}

std::vector<PassRateRecord> Study::stage1(const std::vector<EnvelopeCase>& envs, const std::vector<int>& buses) const {
    std::vector<PassRateRecord> records(buses.size() * envs.size());
    parallel_for(records.size(), cfg_.jobs, [&](std::size_t i) {
        const auto& env = envs[i % envs.size()];
        PassRateRecord r = screener_->pass_rate(buses[i / envs.size()], env.traj, frame_.sample);
        r.envelope = env.label;
        records[i] = std::move(r);
    });
    return records;
}

std::vector<Stage2Scenario> Study::stage2(const QualifiedSet& qualified, const std::vector<EnvelopeCase>& envs) const {
    std::vector<Stage2Scenario> out(qualified.members.size());
    const MarketOptions opts = market_options();
    const std::vector<double> limits = flow_limits(grid_);
    parallel_for(out.size(), cfg_.jobs, [&](std::size_t i) {
        const auto& [bus, label] = qualified.members[i];
        const EnvelopeCase& env = find_envelope(envs, label);
        Stage2Scenario& sc = out[i];
        sc.bus = bus;
        sc.envelope = label;
        sc.run = simulate_scenario(insert_load(grid_, bus, env.traj), frame_.blocks, opts, label);
        sc.run.bus = bus;
        if (sc.run.excluded) return;
        try {
            for (Window w : {Window::All, Window::OnPeak, Window::OffPeak})
                sc.metrics.push_back(compute_metrics(sc.run.logs, w, frame_.peak, limits));
        } catch (const std::invalid_argument& e) {
            sc.metrics.clear();
            sc.run.excluded = true;
            sc.run.reason = e.what();
        }
    });
    return out;
}

ScenarioRun Study::base_case() const {
    return simulate_scenario(DemandOverlay(grid_), frame_.blocks, market_options(), "base");
}

QualifiedFile parse_qualified_json(const std::string& text) {
    using json = nlohmann::json;
    QualifiedFile out;
    try {
        const json j = json::parse(text);
        out.qualified.threshold = j.at("tau_pr").get<double>();
        for (const auto& e : j.at("envelopes")) {
            EnvelopeCase env;
            env.label = e.at("label").get<std::string>();
            env.size_mw = e.at("size_mw").get<double>();
            env.traj.source.id = env.label;
            env.traj.source.kind = parse_envelope_kind(e.at("kind").get<std::string>());
            env.traj.source.nameplate_mw = env.size_mw;
            env.traj.source.peak_window = e.at("peak_window").get<std::vector<int>>();
            const auto values = e.at("trajectory").get<std::vector<double>>();
            if (values.size() != 24) throw std::invalid_argument(fmt::format("envelope '{}' needs 24 values", env.label));
            std::copy(values.begin(), values.end(), env.traj.values.begin());
            out.envelopes.push_back(std::move(env));
        }
        for (const auto& m : j.at("members")) {
            const auto label = m.at(1).get<std::string>();
            (void)find_envelope(out.envelopes, label);
            out.qualified.members.emplace_back(m.at(0).get<int>(), label);
        }
        for (const auto& [k, v] : j.at("counts").items()) out.qualified.counts[k] = v.get<int>();
    } catch (const json::exception& e) {
        throw std::invalid_argument(fmt::format("qualified file: {}", e.what()));
    }
    return out;
}

std::vector<CriteriaRow> criteria_rows(const std::vector<Stage2Scenario>& scenarios, const std::string& envelope) {
    std::vector<CriteriaRow> rows;
    for (const auto& sc : scenarios) {
        if (sc.envelope != envelope || sc.run.excluded || sc.metrics.size() != 3) continue;
        CriteriaRow r;
        r.bus = sc.bus;
        r.envelope = envelope;
        r.all = sc.metrics[0];
        r.on_peak = sc.metrics[1];
        r.off_peak = sc.metrics[2];
        rows.push_back(r);
    }
    return rows;
}

std::vector<RankingResult> Study::stage3(const std::vector<Stage2Scenario>& scenarios,
                                         const std::vector<EnvelopeCase>& envs) const {
    std::vector<RankingResult> out;
    for (const auto& env : envs)
        out.push_back(rank_alternatives(criteria_rows(scenarios, env.label), cfg_.top_k, cfg_.strict_entropy,
                                        env.label));
    return out;
}

NaiveReport Study::naive(const ScenarioRun& base, double size_mw, int n, const std::vector<int>& framework_picks) const {
    if (base.excluded || base.logs.empty())
        throw std::runtime_error("naive baseline needs a completed base-case simulation");
    NaiveReport rep;
    rep.size_mw = size_mw;
    rep.tau_pr = cfg_.tau_pr;
    const auto& cands = frame_.candidates;
    if (n > static_cast<int>(cands.size())) {
        spdlog::warn("naive: n = {} exceeds the {} candidate buses; capped", n, cands.size());
        n = static_cast<int>(cands.size());
    }
    std::map<int, double> mean;
    for (int bus : cands) {
        const std::size_t pos = grid_.bus_index(bus);
        double s = 0.0;
        for (const auto& h : base.logs) s += h.lmp[pos];
        mean[bus] = s / static_cast<double>(base.logs.size());
    }
    std::vector<int> order = cands;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        if (mean[a] != mean[b]) return mean[a] < mean[b];
        return a < b;
    });
    order.resize(static_cast<std::size_t>(n));

    const LoadTrajectory firm = build_envelope(EnvelopeSpec::defaults(EnvelopeKind::Firm, size_mw));
    std::vector<int> buses = order;
    buses.insert(buses.end(), framework_picks.begin(), framework_picks.end());
    std::vector<PassRateRecord> records(buses.size());
    parallel_for(buses.size(), cfg_.jobs,
                 [&](std::size_t i) { records[i] = screener_->pass_rate(buses[i], firm, frame_.sample); });
    for (std::size_t i = 0; i < buses.size(); ++i) {
        NaiveRow row;
        row.bus = buses[i];
        row.zone = grid_.buses()[grid_.bus_index(row.bus)].zone;
        row.mean_lmp = mean.count(row.bus) ? mean[row.bus] : std::nan("");
        row.pass_rate = records[i].pass_rate();
        row.feasible = records[i].feasible;
        row.total = records[i].total;
        row.pass = row.pass_rate >= cfg_.tau_pr;
        if (i < order.size()) {
            row.rank = static_cast<int>(i) + 1;
            rep.naive.push_back(row);
        } else {
            row.rank = static_cast<int>(i - order.size()) + 1;
            rep.framework.push_back(row);
        }
    }
    return rep;
}

TimeSavings time_savings(double t_conv, double t_fast) {
    if (!(t_conv >= 0.0) || !(t_fast >= 0.0))
        throw std::invalid_argument(fmt::format("timelines must be non-negative (got {}, {})", t_conv, t_fast));
    return {t_conv, t_fast, t_conv - t_fast};
}

TimeSavingsRange time_savings_range(double conv_lo, double conv_hi, double fast_lo, double fast_hi) {
    if (conv_lo > conv_hi || fast_lo > fast_hi) throw std::invalid_argument("interval bounds are reversed");
    return {time_savings(conv_lo, fast_hi).delta, time_savings(conv_hi, fast_lo).delta};
}

PipelineResult run_pipeline(const RunConfig& cfg) {
    using clock = std::chrono::steady_clock;
    using ojson = nlohmann::ordered_json;
    cfg.validate();

    std::unique_ptr<Study> study;
    try {
        study = std::make_unique<Study>(cfg);
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }

    PipelineResult res;
    out::OutputDir dir(cfg.output_dir);
    ojson timings = ojson::object();
    std::vector<std::string> notes;

    auto stage = [&](const char* name, auto&& fn) {
        if (res.failed_stage) return;
        const auto t0 = clock::now();
        spdlog::info("{}: start", name);
        try {
            fn();
        } catch (const std::exception& e) {
            res.failed_stage = name;
            res.failure = e.what();
            res.exit_code = 3;
            res.exclusions.push_back({"*", name, fmt::format("stage failed: {}", e.what())});
            spdlog::error("{} failed: {}", name, e.what());
        }
        const double secs = std::chrono::duration<double>(clock::now() - t0).count();
        timings[name] = secs;
        spdlog::info("{}: {:.1f} s", name, secs);
    };

    const auto& grid = study->grid();
    const auto& envs = study->envelopes();
    const auto& frame = study->frame();

    stage("envelopes", [&] { dir.write("envelopes.csv", out::envelopes_csv(envs)); });

    stage("stage1", [&] {
        res.stage1 = study->stage1(envs, frame.candidates);
        for (const auto& r : res.stage1)
            if (r.iteration_limits > 0)
                res.exclusions.push_back({fmt::format("{}_{}", r.bus, r.envelope), "stage1",
                                          fmt::format("{} iteration-limit cells counted infeasible", r.iteration_limits)});
        res.qualified = stage1_gate(res.stage1, cfg.tau_pr);
        dir.write("stage1_passrates.csv", out::passrates_csv(res.stage1, envs));
        dir.write("stage1_heatmap.csv", out::heatmap_csv(grid, frame.candidates, res.stage1, envs));
        dir.write("stage1_qualified.json",
                  out::qualified_json(res.qualified, res.stage1, envs, cfg.hour_sample, frame.sample.size()));
        if (res.qualified.members.empty()) notes.push_back("no qualified scenarios");
    });

    ScenarioRun& base = res.base;
    stage("stage2", [&] {
        base = study->base_case();
        if (base.excluded) throw std::runtime_error(fmt::format("base case infeasible: {}", base.reason));
        dir.write("lmp_base.csv", out::lmp_csv(grid, base));
        dir.write("duals_base.csv", out::duals_csv(grid, base));
        res.stage2 = study->stage2(res.qualified, envs);
        for (const auto& sc : res.stage2) {
            const std::string tag = fmt::format("{}_{}", sc.bus, sc.envelope);
            dir.write(fmt::format("lmp_{}.csv", tag), out::lmp_csv(grid, sc.run));
            dir.write(fmt::format("duals_{}.csv", tag), out::duals_csv(grid, sc.run));
            if (sc.run.excluded) res.exclusions.push_back({tag, "stage2", sc.run.reason});
        }
        std::vector<SummaryRow> summary;
        for (const auto& env : envs) {
            std::vector<std::vector<MetricRecord>> m;
            for (const auto& sc : res.stage2)
                if (sc.envelope == env.label && !sc.run.excluded) m.push_back(sc.metrics);
            auto rows = summarize(env.label, m);
            summary.insert(summary.end(), rows.begin(), rows.end());
        }
        dir.write("stage2_metrics.csv", out::metrics_csv(res.stage2));
        dir.write("stage2_summary.csv", out::summary_csv(summary));
        std::vector<Exclusion> stage2_ex;
        for (const auto& e : res.exclusions)
            if (e.stage == "stage2") stage2_ex.push_back(e);
        dir.write("stage2_exclusions.csv", out::exclusions_csv(stage2_ex));
    });

    stage("stage3", [&] {
        res.rankings = study->stage3(res.stage2, envs);
        for (const auto& r : res.rankings) {
            dir.write(fmt::format("stage3_ranking_{}.csv", r.envelope), out::ranking_csv(r));
            dir.write(fmt::format("shortlist_{}.geojson", r.envelope), out::shortlist_geojson(grid, r));
        }
        dir.write("stage3_overlap.csv", out::overlap_csv(res.rankings));
        dir.write("stage3_diagnostics.csv", out::diagnostics_csv(res.rankings));
        if (cfg.pooled) {
            std::vector<CriteriaRow> all;
            for (const auto& env : envs) {
                auto rows = criteria_rows(res.stage2, env.label);
                all.insert(all.end(), rows.begin(), rows.end());
            }
            dir.write("stage3_pooled.csv", out::pooled_csv(pooled_ranking(all, cfg.strict_entropy)));
        }
    });

    stage("naive", [&] {
        for (double p : cfg.sizes_mw) {
            std::vector<int> picks;
            for (std::size_t i = 0; i < envs.size(); ++i)
                if (envs[i].traj.source.kind == EnvelopeKind::Firm && envs[i].size_mw == p && i < res.rankings.size())
                    picks = res.rankings[i].shortlist();
            res.naive.push_back(study->naive(base, p, cfg.top_k, picks));
        }
        dir.write("naive_baseline.csv", out::naive_csv(res.naive));
    });

    ojson m;
    m["tool"] = "gridsiter";
    m["version"] = kToolVersion;
    m["config_hash"] = sha256_hex(canonical_config(cfg));
    m["case_fingerprint"] = case_fingerprint(grid);
    m["library_fingerprint"] = study->screener().library().fingerprint;
    m["contingencies"] = study->screener().library().size();
    m["stage1_hours"] = frame.sample.size();
    m["stage2_hours"] = block_hours(frame.blocks).size();
    m["status"] = res.failed_stage ? "failed" : "ok";
    if (res.failed_stage) {
        m["failed_stage"] = *res.failed_stage;
        m["failure"] = res.failure;
    }
    m["notes"] = notes;
    m["timings_s"] = timings;
    ojson ex = ojson::array();
    for (const auto& e : res.exclusions) ex.push_back({{"scenario", e.scenario}, {"stage", e.stage}, {"reason", e.reason}});
    m["exclusions"] = ex;
    ojson files = ojson::array();
    for (const auto& f : dir.files())
        files.push_back({{"name", f}, {"sha256", sha256_file(dir.path() / f)}});
    m["files"] = files;
    res.files = dir.files();
    dir.write("manifest.json", m.dump(1) + "\n");
    res.files.push_back("manifest.json");
    return res;
}

}  // namespace gridsiter
