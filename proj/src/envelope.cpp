#include "gridsiter/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "json.hpp"

namespace gridsiter {

using nlohmann::json;

const char* to_string(EnvelopeKind kind) {
    switch (kind) {
        case EnvelopeKind::Firm: return "firm";
        case EnvelopeKind::Pause: return "pause";
        case EnvelopeKind::Shift: return "shift";
    }
    return "firm";
}

EnvelopeKind parse_envelope_kind(const std::string& text) {
    if (text == "firm") return EnvelopeKind::Firm;
    if (text == "pause") return EnvelopeKind::Pause;
    if (text == "shift") return EnvelopeKind::Shift;
    throw EnvelopeError(fmt::format("unknown envelope kind '{}'", text));
}

RampViolation::RampViolation(int from, int to, double s, double b)
    : EnvelopeError(fmt::format("ramp violation between hours {} and {}: step {:.6g} MW exceeds bound {:.6g} MW/h",
                                from, to, s, b)),
      hour_from(from),
      hour_to(to),
      step(s),
      bound(b) {}

EnvelopeSpec EnvelopeSpec::defaults(EnvelopeKind kind, double nameplate_mw) {
    EnvelopeSpec s;
    s.id = to_string(kind);
    s.kind = kind;
    s.nameplate_mw = nameplate_mw;
    s.curtailment = kind == EnvelopeKind::Pause ? 0.15 : (kind == EnvelopeKind::Shift ? 0.20 : 0.0);
    s.ramp_bound = 0.2 * nameplate_mw;
    return s;
}

bool EnvelopeSpec::in_peak(int tau) const {
    return std::find(peak_window.begin(), peak_window.end(), tau) != peak_window.end();
}

void EnvelopeSpec::validate() const {
    if (!(nameplate_mw >= 0.0) || !std::isfinite(nameplate_mw))
        throw EnvelopeError(fmt::format("envelope '{}': nameplate must be finite and >= 0", id));
    if (!(utilization > 0.0 && utilization <= 1.0))
        throw EnvelopeError(fmt::format("envelope '{}': utilization must lie in (0, 1]", id));
    if (!(curtailment >= 0.0 && curtailment < 1.0))
        throw EnvelopeError(fmt::format("envelope '{}': curtailment must lie in [0, 1)", id));
    if (!(makeup >= 0.0 && makeup <= 1.0))
        throw EnvelopeError(fmt::format("envelope '{}': make-up must lie in [0, 1]", id));
    if (!(ramp_bound >= 0.0)) throw EnvelopeError(fmt::format("envelope '{}': ramp bound must be >= 0", id));
    std::set<int> hours;
    for (int h : peak_window) {
        if (h < 1 || h > 24) throw EnvelopeError(fmt::format("envelope '{}': peak hour {} outside 1..24", id, h));
        if (!hours.insert(h).second) throw EnvelopeError(fmt::format("envelope '{}': duplicate peak hour {}", id, h));
    }
    if (kind != EnvelopeKind::Firm && hours.empty())
        throw EnvelopeError(fmt::format("envelope '{}': peak window is empty", id));
    if (kind == EnvelopeKind::Shift && hours.size() == 24)
        throw EnvelopeError(fmt::format("envelope '{}': shift needs at least one off-peak hour", id));
}

double LoadTrajectory::energy() const { return std::accumulate(values.begin(), values.end(), 0.0); }

int map_hour(long t, long horizon) {
    if (t < 1 || t > horizon) throw std::out_of_range(fmt::format("hour {} outside 1..{}", t, horizon));
    return static_cast<int>(1 + (t - 1) % 24);
}

LoadTrajectory build_envelope(const EnvelopeSpec& spec) {
    spec.validate();
    LoadTrajectory traj;
    traj.source = spec;
    const double base = spec.utilization * spec.nameplate_mw;
    const double peak = (1.0 - spec.curtailment) * base;
    const auto n_peak = static_cast<double>(spec.peak_window.size());
    const double offpeak = base + spec.makeup * spec.curtailment * base * n_peak / (24.0 - n_peak);
    for (int tau = 1; tau <= 24; ++tau) {
        double d = base;
        if (spec.kind == EnvelopeKind::Pause && spec.in_peak(tau)) d = peak;
        if (spec.kind == EnvelopeKind::Shift) d = spec.in_peak(tau) ? peak : offpeak;
        traj.values[static_cast<std::size_t>(tau - 1)] = d;
    }
    const RampCheck rc = check_ramp(traj, spec.ramp_bound);
    if (!rc.pass) throw RampViolation(rc.worst_hour - 1, rc.worst_hour, rc.worst_step, spec.ramp_bound);
    return traj;
}

RampCheck check_ramp(const LoadTrajectory& traj, double ramp_bound) {
    RampCheck rc;
    for (int tau = 2; tau <= 24; ++tau) {
        const double step = std::abs(traj.at(tau) - traj.at(tau - 1));
        if (step > rc.worst_step) {
            rc.worst_step = step;
            rc.worst_hour = tau;
        }
    }
    rc.pass = rc.worst_step <= ramp_bound;
    return rc;
}

EnvelopeSpec MenuEntry::instantiate(double p) const {
    const double size = nameplate_mw.value_or(p);
    EnvelopeSpec s = EnvelopeSpec::defaults(kind, size);
    s.id = id.empty() ? to_string(kind) : id;
    if (utilization) s.utilization = *utilization;
    if (peak_window) s.peak_window = *peak_window;
    if (curtailment) s.curtailment = *curtailment;
    if (makeup) s.makeup = *makeup;
    if (ramp_fraction) s.ramp_bound = *ramp_fraction * size;
    if (ramp_bound) s.ramp_bound = *ramp_bound;
    return s;
}

std::vector<MenuEntry> parse_menu(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw EnvelopeError(fmt::format("menu is not valid JSON: {}", e.what()));
    }
    if (!doc.is_array()) throw EnvelopeError("menu must be a JSON array of envelope records");
    static const std::set<std::string> allowed{"id",       "kind",   "nameplate_mw",        "utilization",
                                               "peak_window", "curtailment", "makeup", "ramp_bound_mw_per_h",
                                               "ramp_fraction"};
    std::vector<MenuEntry> out;
    std::set<std::string> ids;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const json& rec = doc[i];
        const std::string where = fmt::format("menu[{}]", i);
        if (!rec.is_object()) throw EnvelopeError(where + ": expected an object");
        for (const auto& [key, value] : rec.items())
            if (!allowed.count(key)) throw EnvelopeError(fmt::format("{}: unknown key '{}'", where, key));
        auto num = [&](const char* key) -> std::optional<double> {
            if (!rec.contains(key)) return std::nullopt;
            if (!rec[key].is_number()) throw EnvelopeError(fmt::format("{}.{}: expected a number", where, key));
            return rec[key].get<double>();
        };
        MenuEntry e;
        if (!rec.contains("kind") || !rec["kind"].is_string())
            throw EnvelopeError(where + ".kind: missing or not a string");
        e.kind = parse_envelope_kind(rec["kind"].get<std::string>());
        e.id = rec.contains("id") ? rec["id"].get<std::string>() : std::string(to_string(e.kind));
        if (e.id.empty() || e.id.find_first_of("/\\ ,") != std::string::npos)
            throw EnvelopeError(where + ".id: must be non-empty without spaces, commas or slashes");
        if (!ids.insert(e.id).second) throw EnvelopeError(fmt::format("{}.id: duplicate id '{}'", where, e.id));
        e.nameplate_mw = num("nameplate_mw");
        e.utilization = num("utilization");
        e.curtailment = num("curtailment");
        e.makeup = num("makeup");
        e.ramp_bound = num("ramp_bound_mw_per_h");
        e.ramp_fraction = num("ramp_fraction");
        if (rec.contains("peak_window")) {
            const json& pw = rec["peak_window"];
            if (!pw.is_array()) throw EnvelopeError(where + ".peak_window: expected an array of hours");
            std::vector<int> hours;
            for (const auto& h : pw) {
                if (!h.is_number_integer()) throw EnvelopeError(where + ".peak_window: hours must be integers");
                hours.push_back(h.get<int>());
            }
            e.peak_window = hours;
        }
        // Surface invalid parameters at load time with a representative size.
        e.instantiate(e.nameplate_mw.value_or(1000.0)).validate();
        out.push_back(std::move(e));
    }
    if (out.empty()) throw EnvelopeError("menu is empty");
    return out;
}

std::vector<MenuEntry> load_menu(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw EnvelopeError(fmt::format("cannot open menu '{}'", path.string()));
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_menu(ss.str());
}

std::vector<MenuEntry> default_menu() {
    std::vector<MenuEntry> menu(3);
    menu[0].id = "firm";
    menu[0].kind = EnvelopeKind::Firm;
    menu[1].id = "pause";
    menu[1].kind = EnvelopeKind::Pause;
    menu[2].id = "shift";
    menu[2].kind = EnvelopeKind::Shift;
    return menu;
}

std::string trajectories_csv(const std::vector<LoadTrajectory>& trajs) {
    std::string out = "hour";
    for (const auto& t : trajs) out += "," + t.source.id;
    out += "\n";
    for (int tau = 1; tau <= 24; ++tau) {
        out += std::to_string(tau);
        for (const auto& t : trajs) out += fmt::format(",{:.6f}", t.at(tau));
        out += "\n";
    }
    return out;
}

}  // namespace gridsiter
