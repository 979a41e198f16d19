#include "gridsiter/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "gridsiter/horizon.hpp"

namespace gridsiter {

namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Drops a trailing comment that is not inside a string.
std::string strip_comment(const std::string& line) {
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') quoted = !quoted;
        if (line[i] == '#' && !quoted) return line.substr(0, i);
    }
    return line;
}

double parse_number(const std::string& text, int line, const std::string& key) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != text.size() || !std::isfinite(v))
        throw ConfigError(fmt::format("line {}: '{}' expects a number, got '{}'", line, key, text));
    return v;
}

std::string parse_string(const std::string& text, int line, const std::string& key) {
    if (text.size() < 2 || text.front() != '"' || text.back() != '"')
        throw ConfigError(fmt::format("line {}: '{}' expects a quoted string", line, key));
    return text.substr(1, text.size() - 2);
}

bool parse_bool(const std::string& text, int line, const std::string& key) {
    if (text == "true") return true;
    if (text == "false") return false;
    throw ConfigError(fmt::format("line {}: '{}' expects true or false", line, key));
}

int parse_int(const std::string& text, int line, const std::string& key) {
    const double v = parse_number(text, line, key);
    if (v != std::floor(v) || std::abs(v) > 1e9)
        throw ConfigError(fmt::format("line {}: '{}' expects an integer", line, key));
    return static_cast<int>(v);
}

std::vector<double> parse_array(const std::string& text, int line, const std::string& key) {
    if (text.size() < 2 || text.front() != '[' || text.back() != ']')
        throw ConfigError(fmt::format("line {}: '{}' expects an array like [1000.0]", line, key));
    std::vector<double> out;
    std::stringstream ss(text.substr(1, text.size() - 2));
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        out.push_back(parse_number(item, line, key));
    }
    return out;
}

fs::path resolve(const std::string& p, const fs::path& base) {
    fs::path path(p);
    if (path.is_relative() && !base.empty()) path = base / path;
    return path.lexically_normal();
}

}  // namespace

void RunConfig::validate() const {
    std::vector<std::string> issues;
    if (case_path.empty())
        issues.push_back("case is required");
    else if (!fs::exists(case_path))
        issues.push_back(fmt::format("case file '{}' does not exist", case_path.string()));
    if (!menu_path.empty() && !fs::exists(menu_path))
        issues.push_back(fmt::format("menu file '{}' does not exist", menu_path.string()));
    if (sizes_mw.empty()) issues.push_back("sizes_mw must list at least one size");
    for (double p : sizes_mw)
        if (!(p > 0.0)) issues.push_back(fmt::format("size {} MW must be positive", p));
    if (!(tau_pr >= 0.0)) issues.push_back("tau_pr must be non-negative");
    if (!(eps_mu >= 0.0)) issues.push_back("eps_mu must be non-negative");
    if (!(vmin_kv < vmax_kv)) issues.push_back("vmin_kv must be below vmax_kv");
    if (top_k < 1) issues.push_back("top_k must be at least 1");
    try {
        (void)HourSamplePolicy::parse(hour_sample);
    } catch (const std::exception& e) {
        issues.push_back(e.what());
    }
    if (days < 0) issues.push_back("days must be non-negative");
    if (!(reserve_fraction >= 0.0 && reserve_fraction < 1.0)) issues.push_back("reserve_fraction must lie in [0, 1)");
    if (jobs < 1) issues.push_back("jobs must be at least 1");
    if (!(cost_scale > 0.0)) issues.push_back("cost_scale must be positive");
    if (!(mip_gap >= 0.0)) issues.push_back("mip_gap must be non-negative");
    if (issues.empty()) return;
    std::string msg = "invalid configuration:";
    for (const auto& s : issues) msg += "\n  " + s;
    throw ConfigError(msg);
}

RunConfig parse_config(const std::string& text, const fs::path& base_dir) {
    RunConfig cfg;
    std::set<std::string> seen;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const std::string s = trim(strip_comment(raw));
        if (s.empty()) continue;
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ConfigError(fmt::format("line {}: expected 'key = value'", line));
        const std::string key = trim(s.substr(0, eq));
        const std::string val = trim(s.substr(eq + 1));
        if (!seen.insert(key).second) throw ConfigError(fmt::format("line {}: duplicate key '{}'", line, key));
        if (key == "case") cfg.case_path = resolve(parse_string(val, line, key), base_dir);
        else if (key == "menu") cfg.menu_path = resolve(parse_string(val, line, key), base_dir);
        else if (key == "sizes_mw") cfg.sizes_mw = parse_array(val, line, key);
        else if (key == "tau_pr") cfg.tau_pr = parse_number(val, line, key);
        else if (key == "eps_mu") cfg.eps_mu = parse_number(val, line, key);
        else if (key == "vmin_kv") cfg.vmin_kv = parse_number(val, line, key);
        else if (key == "vmax_kv") cfg.vmax_kv = parse_number(val, line, key);
        else if (key == "top_k") cfg.top_k = parse_int(val, line, key);
        else if (key == "hour_sample") cfg.hour_sample = parse_string(val, line, key);
        else if (key == "days") cfg.days = parse_int(val, line, key);
        else if (key == "reserve_fraction") cfg.reserve_fraction = parse_number(val, line, key);
        else if (key == "output_dir") cfg.output_dir = resolve(parse_string(val, line, key), base_dir);
        else if (key == "jobs") cfg.jobs = parse_int(val, line, key);
        else if (key == "strict_entropy") cfg.strict_entropy = parse_bool(val, line, key);
        else if (key == "pooled") cfg.pooled = parse_bool(val, line, key);
        else if (key == "cost_scale") cfg.cost_scale = parse_number(val, line, key);
        else if (key == "mip_gap") cfg.mip_gap = parse_number(val, line, key);
        else throw ConfigError(fmt::format("line {}: unknown key '{}'", line, key));
    }
    return cfg;
}

RunConfig load_config(const fs::path& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError(fmt::format("cannot open config '{}'", path.string()));
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str(), path.parent_path());
}

std::string canonical_config(const RunConfig& cfg) {
    std::string sizes;
    for (double p : cfg.sizes_mw) sizes += fmt::format("{}{:.17g}", sizes.empty() ? "" : ",", p);
    // jobs and output_dir do not affect results and stay out of the hash.
    return fmt::format(
        "case={}\nmenu={}\nsizes_mw=[{}]\ntau_pr={:.17g}\neps_mu={:.17g}\nvmin_kv={:.17g}\nvmax_kv={:.17g}\n"
        "top_k={}\nhour_sample={}\ndays={}\nreserve_fraction={:.17g}\nstrict_entropy={}\npooled={}\n"
        "cost_scale={:.17g}\nmip_gap={:.17g}\n",
        cfg.case_path.filename().string(), cfg.menu_path.filename().string(), sizes, cfg.tau_pr, cfg.eps_mu,
        cfg.vmin_kv, cfg.vmax_kv, cfg.top_k, cfg.hour_sample, cfg.days, cfg.reserve_fraction, cfg.strict_entropy,
        cfg.pooled, cfg.cost_scale, cfg.mip_gap);
}

}  // namespace gridsiter
