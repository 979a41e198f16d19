// gridsiter command-line driver.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "gridsiter/case_io.hpp"
#include "gridsiter/lp.hpp"
#include "gridsiter/pipeline.hpp"
#include "outputs.hpp"

using namespace gridsiter;
namespace fs = std::filesystem;

namespace {

constexpr int kConfigError = 2;
constexpr int kStageFailure = 3;

std::string read_text(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    if (!f) throw ConfigError(fmt::format("cannot open '{}'", p.string()));
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::vector<double> parse_values(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError(fmt::format("'{}' is not a number", item));
        }
    }
    return out;
}

struct Common {
    std::string case_path, menu_path, out_dir = ".", sample = "every4+peak";
    double tau = 0.95, vmin = 24.0, vmax = 500.0;
    std::vector<double> sizes{1000.0};
    int days = 28, jobs = 1;

    RunConfig config() const {
        RunConfig c;
        c.case_path = case_path;
        c.menu_path = menu_path;
        c.output_dir = out_dir;
        c.hour_sample = sample;
        c.tau_pr = tau;
        c.vmin_kv = vmin;
        c.vmax_kv = vmax;
        c.sizes_mw = sizes;
        c.days = days;
        c.jobs = jobs;
        return c;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Reliability-gated, flexibility-aware data-center siting on DC grid models"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);
    bool verbose = false;
    app.add_flag("-v,--verbose", verbose, "Debug logging");

    std::string config_path, dump_dir;
    int jobs = 0;
    auto* run = app.add_subcommand("run", "Run all stages from a config file");
    run->add_option("--config", config_path, "Run configuration (key = value)")->required();
    run->add_option("--jobs", jobs, "Worker threads (overrides the config)");
    run->add_option("--dump-lp", dump_dir, "Write every LP/MILP model to this directory");

    std::vector<std::string> from, to;
    int conv_hours = 24;
    auto* convert = app.add_subcommand("convert", "Convert a MATPOWER case to the JSON case format");
    convert->add_option("--from", from, "matpower <input.m>")->expected(2)->required();
    convert->add_option("--to", to, "case <output.json>")->expected(2)->required();
    convert->add_option("--hours", conv_hours, "Hours of constant demand to emit");

    std::string menu_path;
    double size = 1000.0;
    bool print = false;
    auto* envelopes = app.add_subcommand("envelopes", "Build the 24-hour envelope trajectories");
    envelopes->add_option("--menu", menu_path, "Envelope menu JSON (default: firm/pause/shift)");
    envelopes->add_option("--size", size, "Nameplate P in MW");
    envelopes->add_flag("--print", print, "Print the trajectories as CSV");

    Common s1;
    auto* stage1 = app.add_subcommand("stage1", "N-1 pass rates and the reliability gate");
    stage1->add_option("--case", s1.case_path)->required();
    stage1->add_option("--menu", s1.menu_path);
    stage1->add_option("--tau", s1.tau);
    stage1->add_option("--sample", s1.sample);
    stage1->add_option("--sizes", s1.sizes)->delimiter(',');
    stage1->add_option("--days", s1.days);
    stage1->add_option("--vmin", s1.vmin);
    stage1->add_option("--vmax", s1.vmax);
    stage1->add_option("--jobs", s1.jobs);
    stage1->add_option("--out", s1.out_dir);

    Common s2;
    std::string qualified_path;
    auto* stage2 = app.add_subcommand("stage2", "Market simulation of a qualified set");
    stage2->add_option("--case", s2.case_path)->required();
    stage2->add_option("--qualified", qualified_path, "stage1_qualified.json")->required();
    stage2->add_option("--days", s2.days);
    stage2->add_option("--jobs", s2.jobs);
    stage2->add_option("--out", s2.out_dir);

    std::string metrics_path, s3_out = ".";
    int top_k = 20;
    bool strict = false, pooled = false;
    auto* stage3 = app.add_subcommand("stage3", "Entropy-TOPSIS ranking of Stage-2 metrics");
    stage3->add_option("--metrics", metrics_path, "stage2_metrics.csv")->required();
    stage3->add_option("--k", top_k);
    stage3->add_flag("--strict-entropy", strict);
    stage3->add_flag("--pooled", pooled);
    stage3->add_option("--out", s3_out);

    std::string picks;
    int naive_n = 0;
    auto* naive = app.add_subcommand("naive", "Lowest-LMP siting baseline through the Stage-1 gate");
    naive->add_option("--config", config_path)->required();
    naive->add_option("--n", naive_n, "List length (default: top_k)");
    naive->add_option("--picks", picks, "Comma-separated framework buses to gate alongside");
    naive->add_option("--jobs", jobs);

    std::string param, values;
    auto* sweep = app.add_subcommand("sweep", "Sensitivity sweep over one parameter");
    sweep->add_option("--config", config_path)->required();
    sweep->add_option("--param", param, "tau_pr | alpha_shift | alpha_pause | cost_scale")->required();
    sweep->add_option("--values", values, "Comma-separated values")->required();
    sweep->add_option("--jobs", jobs);

    double conv = -1, fast = -1;
    std::vector<double> conv_range, fast_range;
    auto* timesave = app.add_subcommand("timesave", "Interconnection time savings in years");
    timesave->add_option("--conv", conv);
    timesave->add_option("--fast", fast);
    timesave->add_option("--conv-range", conv_range)->expected(2);
    timesave->add_option("--fast-range", fast_range)->expected(2);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kConfigError;
    }
    spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::info);
    spdlog::set_pattern("[%l] %v");

    auto load = [&] {
        RunConfig cfg = load_config(config_path);
        if (jobs > 0) cfg.jobs = jobs;
        return cfg;
    };

    try {
        if (*run) {
            const RunConfig cfg = load();
            if (!dump_dir.empty()) opt::set_lp_dump(dump_dir);
            const PipelineResult res = run_pipeline(cfg);
            fmt::print("{} files in {}\n", res.files.size(), cfg.output_dir.string());
            for (const auto& r : res.rankings) {
                std::string list;
                for (int b : r.shortlist()) list += fmt::format(" {}", b);
                fmt::print("{} shortlist:{}\n", r.envelope, list);
            }
            if (res.failed_stage) fmt::print(stderr, "stage {} failed: {}\n", *res.failed_stage, res.failure);
            return res.exit_code;
        }
        if (*convert) {
            if (from[0] != "matpower" || to[0] != "case")
                throw ConfigError("only '--from matpower <in> --to case <out>' is supported");
            std::ifstream in(from[1]);
            if (!in) throw ConfigError(fmt::format("cannot open '{}'", from[1]));
            write_case(GridCase(convert_matpower(in, conv_hours)), to[1]);
            return 0;
        }
        if (*envelopes) {
            const auto menu = menu_path.empty() ? default_menu() : load_menu(menu_path);
            const auto envs = expand_menu(menu, {size});
            const std::string csv = out::envelopes_csv(envs);
            if (print) fmt::print("{}", csv);
            return 0;
        }
        if (*stage1) {
            const RunConfig cfg = s1.config();
            cfg.validate();
            const Study study(cfg);
            const auto records = study.stage1(study.envelopes(), study.frame().candidates);
            const auto q = stage1_gate(records, cfg.tau_pr);
            out::OutputDir dir(cfg.output_dir);
            dir.write("stage1_passrates.csv", out::passrates_csv(records, study.envelopes()));
            dir.write("stage1_heatmap.csv",
                      out::heatmap_csv(study.grid(), study.frame().candidates, records, study.envelopes()));
            dir.write("stage1_qualified.json", out::qualified_json(q, records, study.envelopes(), cfg.hour_sample,
                                                                    study.frame().sample.size()));
            for (const auto& [label, n] : q.counts) fmt::print("{}: {} qualified\n", label, n);
            return 0;
        }
        if (*stage2) {
            RunConfig cfg = s2.config();
            cfg.validate();
            const QualifiedFile qf = parse_qualified_json(read_text(qualified_path));
            const Study study(cfg, qf.envelopes);
            const auto scenarios = study.stage2(qf.qualified, qf.envelopes);
            out::OutputDir dir(cfg.output_dir);
            std::vector<SummaryRow> summary;
            for (const auto& sc : scenarios) {
                const std::string tag = fmt::format("{}_{}", sc.bus, sc.envelope);
                dir.write(fmt::format("lmp_{}.csv", tag), out::lmp_csv(study.grid(), sc.run));
                dir.write(fmt::format("duals_{}.csv", tag), out::duals_csv(study.grid(), sc.run));
                if (sc.run.excluded) fmt::print("excluded {}: {}\n", tag, sc.run.reason);
            }
            for (const auto& env : qf.envelopes) {
                std::vector<std::vector<MetricRecord>> m;
                for (const auto& sc : scenarios)
                    if (sc.envelope == env.label && !sc.run.excluded) m.push_back(sc.metrics);
                auto rows = summarize(env.label, m);
                summary.insert(summary.end(), rows.begin(), rows.end());
            }
            dir.write("stage2_metrics.csv", out::metrics_csv(scenarios));
            dir.write("stage2_summary.csv", out::summary_csv(summary));
            return 0;
        }
        if (*stage3) {
            const auto rows = out::read_metrics_csv(read_text(metrics_path));
            std::vector<std::string> labels;
            for (const auto& r : rows)
                if (std::find(labels.begin(), labels.end(), r.envelope) == labels.end()) labels.push_back(r.envelope);
            std::vector<RankingResult> rankings;
            out::OutputDir dir(s3_out);
            for (const auto& label : labels) {
                std::vector<CriteriaRow> mine;
                for (const auto& r : rows)
                    if (r.envelope == label) mine.push_back(r);
                rankings.push_back(rank_alternatives(mine, top_k, strict, label));
                dir.write(fmt::format("stage3_ranking_{}.csv", label), out::ranking_csv(rankings.back()));
                std::string list;
                for (int b : rankings.back().shortlist()) list += fmt::format(" {}", b);
                fmt::print("{} shortlist:{}\n", label, list);
            }
            dir.write("stage3_overlap.csv", out::overlap_csv(rankings));
            dir.write("stage3_diagnostics.csv", out::diagnostics_csv(rankings));
            if (pooled) dir.write("stage3_pooled.csv", out::pooled_csv(pooled_ranking(rows, strict)));
            return 0;
        }
        if (*naive) {
            const RunConfig cfg = load();
            cfg.validate();
            const Study study(cfg);
            const ScenarioRun base = study.base_case();
            std::vector<int> framework;
            if (!picks.empty())
                for (double b : parse_values(picks)) framework.push_back(static_cast<int>(b));
            std::vector<NaiveReport> reports;
            for (double p : cfg.sizes_mw)
                reports.push_back(study.naive(base, p, naive_n > 0 ? naive_n : cfg.top_k, framework));
            out::OutputDir dir(cfg.output_dir);
            dir.write("naive_baseline.csv", out::naive_csv(reports));
            fmt::print("{}", out::naive_csv(reports));
            return 0;
        }
        if (*sweep) {
            const RunConfig cfg = load();
            const SweepReport rep = sensitivity_sweep(cfg, parse_sweep_parameter(param), parse_values(values));
            fmt::print("{}", out::sweep_csv(rep));
            bool failed = false;
            for (const auto& r : rep.rows) failed |= r.status != "ok";
            return failed ? kStageFailure : 0;
        }
        if (*timesave) {
            if (!conv_range.empty() || !fast_range.empty()) {
                if (conv_range.size() != 2 || fast_range.size() != 2)
                    throw ConfigError("range mode needs both --conv-range and --fast-range");
                const auto r = time_savings_range(conv_range[0], conv_range[1], fast_range[0], fast_range[1]);
                fmt::print("delta_t_years,{},{}\n", out::num(r.low), out::num(r.high));
            } else {
                const auto t = time_savings(conv, fast);
                fmt::print("delta_t_years,{}\n", out::num(t.delta));
            }
            return 0;
        }
    } catch (const ConfigError& e) {
        fmt::print(stderr, "config error: {}\n", e.what());
        return kConfigError;
    } catch (const CaseError& e) {
        fmt::print(stderr, "case error: {}\n", e.what());
        return kConfigError;
    } catch (const ParseError& e) {
        fmt::print(stderr, "parse error: {}\n", e.what());
        return kConfigError;
    } catch (const EnvelopeError& e) {
        fmt::print(stderr, "envelope error: {}\n", e.what());
        return kConfigError;
    } catch (const std::invalid_argument& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kConfigError;
    } catch (const std::exception& e) {
        fmt::print(stderr, "stage failure: {}\n", e.what());
        return kStageFailure;
    }
    return 0;
}
