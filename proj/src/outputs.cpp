#include "outputs.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>
#include "json.hpp"

namespace gridsiter::out {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

std::string num(double v) {
    if (v == 0.0) return "0";  // folds -0
    return fmt::format("{:.10g}", v);
}

OutputDir::OutputDir(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

void OutputDir::write(const std::string& name, const std::string& content) {
    const fs::path p = dir_ / name;
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error(fmt::format("cannot write '{}'", p.string()));
    f << content;
    if (!f) throw std::runtime_error(fmt::format("write failed for '{}'", p.string()));
    files_.push_back(name);
}

std::string envelopes_csv(const std::vector<EnvelopeCase>& envs) {
    std::string s = "hour";
    for (const auto& e : envs) s += "," + e.label;
    s += "\n";
    for (int tau = 1; tau <= 24; ++tau) {
        s += std::to_string(tau);
        for (const auto& e : envs) s += "," + num(e.traj.at(tau));
        s += "\n";
    }
    return s;
}

namespace {

double size_of(const std::vector<EnvelopeCase>& envs, const std::string& label) {
    for (const auto& e : envs)
        if (e.label == label) return e.size_mw;
    return 0.0;
}

}  // namespace

std::string passrates_csv(const std::vector<PassRateRecord>& records, const std::vector<EnvelopeCase>& envs) {
    std::string s = "bus,envelope,size_mw,PR,feasible,total,iteration_limits\n";
    for (const auto& r : records)
        s += fmt::format("{},{},{},{},{},{},{}\n", r.bus, r.envelope, num(size_of(envs, r.envelope)),
                         num(r.pass_rate()), r.feasible, r.total, r.iteration_limits);
    return s;
}

std::string heatmap_csv(const GridCase& grid, const std::vector<int>& candidates,
                        const std::vector<PassRateRecord>& records, const std::vector<EnvelopeCase>& envs) {
    std::map<std::pair<int, std::string>, double> pr;
    for (const auto& r : records) pr[{r.bus, r.envelope}] = r.pass_rate();
    std::string s = "bus,zone,lon,lat";
    for (const auto& e : envs) s += ",PR_" + e.label;
    s += "\n";
    for (int bus : candidates) {
        const Bus& b = grid.buses()[grid.bus_index(bus)];
        s += fmt::format("{},{},{},{}", bus, b.zone, b.coord ? num(b.coord->longitude) : "",
                         b.coord ? num(b.coord->latitude) : "");
        for (const auto& e : envs) {
            auto it = pr.find({bus, e.label});
            s += "," + (it == pr.end() ? std::string() : num(it->second));
        }
        s += "\n";
    }
    return s;
}

std::string qualified_json(const QualifiedSet& q, const std::vector<PassRateRecord>& records,
                           const std::vector<EnvelopeCase>& envs, const std::string& hour_sample,
                           std::size_t num_hours) {
    ojson j;
    j["tau_pr"] = q.threshold;
    j["library_fingerprint"] = records.empty() ? std::string() : records.front().library_fingerprint;
    j["hour_sample"] = hour_sample;
    j["hours"] = num_hours;
    ojson e = ojson::array();
    for (const auto& env : envs) {
        ojson x;
        x["label"] = env.label;
        x["kind"] = to_string(env.traj.source.kind);
        x["size_mw"] = env.size_mw;
        x["trajectory"] = std::vector<double>(env.traj.values.begin(), env.traj.values.end());
        x["peak_window"] = env.traj.source.peak_window;
        e.push_back(x);
    }
    j["envelopes"] = e;
    ojson members = ojson::object();
    for (const auto& env : envs) members[env.label] = q.buses(env.label);
    j["qualified"] = members;
    ojson list = ojson::array();
    for (const auto& [bus, label] : q.members) list.push_back(ojson::array({bus, label}));
    j["members"] = list;
    ojson counts = ojson::object();
    for (const auto& [k, v] : q.counts) counts[k] = v;
    j["counts"] = counts;
    return j.dump(1) + "\n";
}

std::string lmp_csv(const GridCase& grid, const ScenarioRun& run) {
    std::string s = "t,lambda_sys";
    for (const Bus& b : grid.buses()) s += fmt::format(",lmp_{}", b.id);
    s += "\n";
    for (const auto& h : run.logs) {
        s += fmt::format("{},{}", h.hour + 1, num(h.lambda_sys));
        for (double v : h.lmp) s += "," + num(v);
        s += "\n";
    }
    return s;
}

std::string duals_csv(const GridCase& grid, const ScenarioRun& run) {
    std::string s = "t,line,mu_plus,mu_minus,flow,f_max\n";
    for (const auto& h : run.logs)
        for (std::size_t k = 0; k < grid.num_branches(); ++k) {
            const Branch& br = grid.branches()[k];
            s += fmt::format("{},{},{},{},{},{}\n", h.hour + 1, br.id, num(h.mu_plus[k]), num(h.mu_minus[k]),
                             num(h.flow[k]), num(br.flow_limit));
        }
    return s;
}

std::string metrics_csv(const std::vector<Stage2Scenario>& scenarios) {
    std::string s = "bus,envelope,window,mean_lmp,p95_p5,lmp_std,binding_hours,congestion_rent,hours\n";
    for (const auto& sc : scenarios)
        for (const auto& m : sc.metrics)
            s += fmt::format("{},{},{},{},{},{},{},{},{}\n", sc.bus, sc.envelope, to_string(m.window), num(m.mean_lmp),
                             num(m.p95_p5), num(m.lmp_std), num(m.binding_hours), num(m.congestion_rent), m.hours);
    return s;
}

std::string summary_csv(const std::vector<SummaryRow>& rows) {
    std::string s = "envelope,window,metric,median,iqr,n,note\n";
    for (const auto& r : rows) {
        if (r.empty)
            s += fmt::format("{},{},{},,,0,no qualified scenarios\n", r.envelope, to_string(r.window), r.metric);
        else
            s += fmt::format("{},{},{},{},{},{},\n", r.envelope, to_string(r.window), r.metric, num(r.median),
                             num(r.iqr), r.n);
    }
    return s;
}

std::string exclusions_csv(const std::vector<Exclusion>& rows) {
    std::string s = "scenario,stage,reason\n";
    for (const auto& r : rows) s += fmt::format("{},{},\"{}\"\n", r.scenario, r.stage, r.reason);
    return s;
}

std::string ranking_csv(const RankingResult& r) {
    std::string s = "rank,bus,S_G1,S_G2,S_G3,g1_hat,g2_hat,g3_hat,S_plus,S_minus,CC,shortlist,S_fix,S_uniform";
    const auto& groups = metric_groups();
    for (const auto& g : groups)
        for (const auto& c : g) s += ",w_" + criterion_label(c);
    s += "\n";
    for (const auto& row : r.rows) {
        s += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{}", row.rank, row.bus, num(row.group[0]),
                         num(row.group[1]), num(row.group[2]), num(row.normalized[0]), num(row.normalized[1]),
                         num(row.normalized[2]), num(row.s_plus), num(row.s_minus), num(row.closeness),
                         row.shortlisted ? 1 : 0, num(row.fixed_score), num(row.uniform_score));
        for (const auto& w : r.weights)
            for (double x : w.weights) s += "," + num(x);
        s += "\n";
    }
    return s;
}

std::string shortlist_geojson(const GridCase& grid, const RankingResult& r) {
    ojson fc;
    fc["type"] = "FeatureCollection";
    fc["envelope"] = r.envelope;
    fc["k"] = r.k;
    ojson feats = ojson::array();
    for (const auto& row : r.rows) {
        const Bus& b = grid.buses()[grid.bus_index(row.bus)];
        ojson f;
        f["type"] = "Feature";
        if (b.coord)
            f["geometry"] = {{"type", "Point"}, {"coordinates", {b.coord->longitude, b.coord->latitude}}};
        else
            f["geometry"] = nullptr;
        f["properties"] = {{"bus", row.bus},
                           {"zone", b.zone},
                           {"rank", row.rank},
                           {"closeness", row.closeness},
                           {"shortlisted", row.shortlisted},
                           {"class", row.shortlisted ? "amber" : "blue"}};
        feats.push_back(f);
    }
    fc["features"] = feats;
    return fc.dump(1) + "\n";
}

std::string overlap_csv(const std::vector<RankingResult>& rankings) {
    std::string s = "envelope_a,envelope_b,k,overlap\n";
    for (std::size_t a = 0; a < rankings.size(); ++a)
        for (std::size_t b = a + 1; b < rankings.size(); ++b)
            s += fmt::format("{},{},{},{}\n", rankings[a].envelope, rankings[b].envelope,
                             std::min(rankings[a].k, rankings[b].k),
                             overlap(rankings[a].shortlist(), rankings[b].shortlist()));
    return s;
}

std::string diagnostics_csv(const std::vector<RankingResult>& rankings) {
    std::string s =
        "envelope,alternatives,k,spearman_cc_fixed,spearman_cc_uniform,topk_overlap_fixed,topk_overlap_uniform,"
        "group,criterion,weight,entropy,dispersion,degenerate\n";
    const auto& groups = metric_groups();
    for (const auto& r : rankings) {
        for (std::size_t g = 0; g < 3; ++g) {
            const auto& w = r.weights[g];
            for (std::size_t c = 0; c < groups[g].size(); ++c) {
                const bool have = c < w.weights.size();
                s += fmt::format("{},{},{},{},{},{},{},G{},{},{},{},{},{}\n", r.envelope, r.rows.size(), r.k,
                                 num(r.spearman_fixed), num(r.spearman_uniform), r.overlap_fixed, r.overlap_uniform,
                                 g + 1, criterion_label(groups[g][c]), have ? num(w.weights[c]) : "",
                                 have ? num(w.entropies[c]) : "", have ? num(w.dispersions[c]) : "",
                                 have ? (w.degenerate[c] ? 1 : 0) : 0);
            }
        }
    }
    return s;
}

std::string pooled_csv(const std::vector<PooledRow>& rows) {
    std::string s = "bus,min_CC,mean_CC,envelopes\n";
    for (const auto& r : rows)
        s += fmt::format("{},{},{},{}\n", r.bus, num(r.min_closeness), num(r.mean_closeness), r.envelopes);
    return s;
}

std::string naive_csv(const std::vector<NaiveReport>& reports) {
    std::string s = "size_mw,list,rank,bus,zone,base_mean_lmp,PR,feasible,total,verdict\n";
    for (const auto& rep : reports) {
        for (const auto& r : rep.naive)
            s += fmt::format("{},naive,{},{},{},{},{},{},{},{}\n", num(rep.size_mw), r.rank, r.bus, r.zone,
                             num(r.mean_lmp), num(r.pass_rate), r.feasible, r.total, r.pass ? "pass" : "fail");
        for (const auto& r : rep.framework)
            s += fmt::format("{},framework,{},{},{},{},{},{},{},{}\n", num(rep.size_mw), r.rank, r.bus, r.zone,
                             num(r.mean_lmp), num(r.pass_rate), r.feasible, r.total, r.pass ? "pass" : "fail");
    }
    return s;
}

std::string sweep_csv(const SweepReport& report) {
    std::vector<std::string> keys;
    for (const auto& row : report.rows)
        for (const auto& [k, v] : row.medians)
            if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);
    std::sort(keys.begin(), keys.end());
    std::string s = "parameter,value,envelope,N_stage1,N,mean_CC,spearman";
    for (const auto& k : keys) s += ",median_" + k;
    s += ",status\n";
    for (const auto& row : report.rows) {
        s += fmt::format("{},{},{},{},{},{},{}", to_string(report.parameter), num(row.value), row.envelope,
                         row.n_stage1, row.n_stage2, num(row.mean_closeness),
                         row.spearman ? num(*row.spearman) : std::string());
        for (const auto& k : keys) {
            auto it = row.medians.find(k);
            s += "," + (it == row.medians.end() ? std::string() : num(it->second));
        }
        s += fmt::format(",\"{}\"\n", row.status);
    }
    return s;
}

std::vector<CriteriaRow> read_metrics_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line.rfind("bus,envelope,window,", 0) != 0)
        throw std::invalid_argument("metrics file lacks the bus,envelope,window header");
    std::map<std::pair<std::string, int>, CriteriaRow> rows;
    std::vector<std::pair<std::string, int>> order;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) f.push_back(cell);
        if (f.size() != 9) throw std::invalid_argument(fmt::format("metrics line {}: expected 9 fields", lineno));
        MetricRecord m;
        try {
            m.mean_lmp = std::stod(f[3]);
            m.p95_p5 = std::stod(f[4]);
            m.lmp_std = std::stod(f[5]);
            m.binding_hours = std::stod(f[6]);
            m.congestion_rent = std::stod(f[7]);
            m.hours = std::stoi(f[8]);
        } catch (const std::exception&) {
            throw std::invalid_argument(fmt::format("metrics line {}: non-numeric field", lineno));
        }
        const int bus = std::stoi(f[0]);
        const auto key = std::make_pair(f[1], bus);
        auto [it, fresh] = rows.try_emplace(key);
        if (fresh) order.push_back(key);
        it->second.bus = bus;
        it->second.envelope = f[1];
        if (f[2] == "all") {
            m.window = Window::All;
            it->second.all = m;
        } else if (f[2] == "on_peak") {
            m.window = Window::OnPeak;
            it->second.on_peak = m;
        } else if (f[2] == "off_peak") {
            m.window = Window::OffPeak;
            it->second.off_peak = m;
        } else {
            throw std::invalid_argument(fmt::format("metrics line {}: unknown window '{}'", lineno, f[2]));
        }
    }
    std::vector<CriteriaRow> out;
    for (const auto& k : order) out.push_back(rows[k]);
    return out;
}

}  // namespace gridsiter::out
