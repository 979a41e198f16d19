#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "gridsiter/case_io.hpp"
#include "gridsiter/network.hpp"
#include "gridsiter/pipeline.hpp"

namespace py = pybind11;
using namespace gridsiter;

namespace {

std::vector<double> envelope(const std::string& kind, double nameplate_mw, std::optional<double> utilization,
                             std::optional<std::vector<int>> peak_window, std::optional<double> curtailment,
                             std::optional<double> makeup, std::optional<double> ramp_bound) {
    auto spec = EnvelopeSpec::defaults(parse_envelope_kind(kind), nameplate_mw);
    if (utilization) spec.utilization = *utilization;
    if (peak_window) spec.peak_window = *peak_window;
    if (curtailment) spec.curtailment = *curtailment;
    if (makeup) spec.makeup = *makeup;
    if (ramp_bound) spec.ramp_bound = *ramp_bound;
    const auto traj = build_envelope(spec);
    return {traj.values.begin(), traj.values.end()};
}

py::dict ramp(const std::vector<double>& values, double bound) {
    if (values.size() != 24) throw std::invalid_argument("a trajectory has 24 hourly values");
    LoadTrajectory t;
    std::copy(values.begin(), values.end(), t.values.begin());
    const auto r = check_ramp(t, bound);
    py::dict d;
    d["pass"] = r.pass;
    d["worst_step"] = r.worst_step;
    d["worst_hour"] = r.worst_hour;
    return d;
}

RunConfig config_from(const std::filesystem::path& path, std::optional<std::filesystem::path> output_dir,
                      std::optional<int> jobs) {
    RunConfig cfg = load_config(path);
    if (output_dir) cfg.output_dir = *output_dir;
    if (jobs) cfg.jobs = *jobs;
    return cfg;
}

py::dict run(const std::filesystem::path& config, std::optional<std::filesystem::path> output_dir,
             std::optional<int> jobs) {
    const RunConfig cfg = config_from(config, output_dir, jobs);
    PipelineResult res;
    {
        py::gil_scoped_release release;
        res = run_pipeline(cfg);
    }
    py::dict d;
    d["exit_code"] = res.exit_code;
    d["failed_stage"] = res.failed_stage;
    d["output_dir"] = cfg.output_dir;
    d["files"] = res.files;
    d["qualified"] = res.qualified.counts;
    py::dict shortlists, closeness;
    for (const auto& r : res.rankings) {
        shortlists[py::str(r.envelope)] = r.shortlist();
        py::dict cc;
        for (const auto& row : r.rows) cc[py::int_(row.bus)] = row.closeness;
        closeness[py::str(r.envelope)] = cc;
    }
    d["shortlists"] = shortlists;
    d["closeness"] = closeness;
    py::list excl;
    for (const auto& e : res.exclusions) excl.append(py::make_tuple(e.scenario, e.stage, e.reason));
    d["exclusions"] = excl;
    return d;
}

py::list sweep(const std::filesystem::path& config, const std::string& parameter, const std::vector<double>& values,
               std::optional<std::filesystem::path> output_dir, std::optional<int> jobs) {
    const RunConfig cfg = config_from(config, output_dir, jobs);
    const SweepParameter p = parse_sweep_parameter(parameter);
    SweepReport rep;
    {
        py::gil_scoped_release release;
        rep = sensitivity_sweep(cfg, p, values);
    }
    py::list rows;
    for (const auto& r : rep.rows) {
        py::dict d;
        d["value"] = r.value;
        d["envelope"] = r.envelope;
        d["n_stage1"] = r.n_stage1;
        d["n"] = r.n_stage2;
        d["mean_cc"] = r.mean_closeness;
        d["spearman"] = r.spearman;
        d["medians"] = r.medians;
        d["status"] = r.status;
        rows.append(d);
    }
    return rows;
}

py::dict topsis_py(const std::vector<std::vector<double>>& normalized) {
    const auto t = topsis(normalized);
    py::dict d;
    d["s_plus"] = t.s_plus;
    d["s_minus"] = t.s_minus;
    d["closeness"] = t.closeness;
    return d;
}

}  // namespace

PYBIND11_MODULE(_gridsiter, m) {
    m.doc() = "Reliability-gated siting screen for large flexible loads";
    m.attr("__version__") = kToolVersion;

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<EnvelopeError>(m, "EnvelopeError", PyExc_ValueError);

    m.def("envelope", &envelope, py::arg("kind"), py::arg("nameplate_mw"), py::arg("utilization") = py::none(),
          py::arg("peak_window") = py::none(), py::arg("curtailment") = py::none(), py::arg("makeup") = py::none(),
          py::arg("ramp_bound") = py::none(), "24 hourly MW values of a firm, pause or shift envelope.");
    m.def("check_ramp", &ramp, py::arg("values"), py::arg("bound"));

    m.def(
        "ptdf",
        [](const std::filesystem::path& case_path) { return build_ptdf(load_case(case_path)).values; },
        py::arg("case_path"), "Branch-by-bus PTDF matrix (slack column zero).");
    m.def(
        "dc_flows",
        [](const std::filesystem::path& case_path, const Eigen::VectorXd& injection) {
            const GridCase g = load_case(case_path);
            return solve_dc_flows(g, injection, g.slack_bus());
        },
        py::arg("case_path"), py::arg("injection"), "Branch flows from B-theta for a balanced injection (MW).");
    m.def(
        "candidates",
        [](const std::filesystem::path& case_path, double vmin_kv, double vmax_kv) {
            return candidate_set(load_case(case_path), vmin_kv, vmax_kv);
        },
        py::arg("case_path"), py::arg("vmin_kv") = 24.0, py::arg("vmax_kv") = 500.0);

    m.def("topsis", &topsis_py, py::arg("normalized"));
    m.def("spearman", &spearman, py::arg("a"), py::arg("b"));
    m.def(
        "time_savings", [](double conv, double fast) { return time_savings(conv, fast).delta; }, py::arg("t_conv"),
        py::arg("t_fast"));
    m.def(
        "time_savings_range",
        [](double conv_lo, double conv_hi, double fast_lo, double fast_hi) {
            const auto r = time_savings_range(conv_lo, conv_hi, fast_lo, fast_hi);
            return py::make_tuple(r.low, r.high);
        },
        py::arg("conv_lo"), py::arg("conv_hi"), py::arg("fast_lo"), py::arg("fast_hi"));

    m.def("run", &run, py::arg("config"), py::arg("output_dir") = py::none(), py::arg("jobs") = py::none(),
          "Runs the full pipeline from a config file and writes every artifact.");
    m.def("sweep", &sweep, py::arg("config"), py::arg("parameter"), py::arg("values"),
          py::arg("output_dir") = py::none(), py::arg("jobs") = py::none());
}
