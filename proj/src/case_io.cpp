#include "gridsiter/case_io.hpp"

#include <algorithm>
#include <set>
#include <limits>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <map>
#include <regex>
#include <sstream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "json.hpp"

namespace gridsiter {

using nlohmann::json;

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(fmt::format("cannot open '{}'", path.string()));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Line number (1-based) of a byte offset within text.
std::size_t line_of(const std::string& text, std::size_t byte) {
    byte = std::min(byte, text.size());
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

void reject_unknown(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw ParseError(fmt::format("{}: expected an object", where));
    for (const auto& [key, value] : obj.items()) {
        bool ok = std::any_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; });
        if (!ok) throw ParseError(fmt::format("{}: unknown key '{}'", where, key));
    }
}

double number(const json& obj, const std::string& where, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) throw ParseError(fmt::format("{}.{}: missing required field", where, key));
    if (!it->is_number()) throw ParseError(fmt::format("{}.{}: expected a number", where, key));
    return it->get<double>();
}

double number_or(const json& obj, const std::string& where, const char* key, double fallback) {
    return obj.contains(key) ? number(obj, where, key) : fallback;
}

int integer(const json& obj, const std::string& where, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) throw ParseError(fmt::format("{}.{}: missing required field", where, key));
    if (!it->is_number_integer()) throw ParseError(fmt::format("{}.{}: expected an integer", where, key));
    return it->get<int>();
}

int integer_or(const json& obj, const std::string& where, const char* key, int fallback) {
    return obj.contains(key) ? integer(obj, where, key) : fallback;
}

std::string string_or(const json& obj, const std::string& where, const char* key, std::string fallback) {
    auto it = obj.find(key);
    if (it == obj.end()) return fallback;
    if (!it->is_string()) throw ParseError(fmt::format("{}.{}: expected a string", where, key));
    return it->get<std::string>();
}

CaseData parse_case_data(const json& root) {
    reject_unknown(root, "case", {"base_mva", "slack_bus", "buses", "branches", "generators", "series"});
    CaseData data;
    data.base_mva = number(root, "case", "base_mva");
    data.slack_bus = integer(root, "case", "slack_bus");

    for (const char* key : {"buses", "branches", "generators"}) {
        if (!root.contains(key) || !root.at(key).is_array())
            throw ParseError(fmt::format("case.{}: expected an array", key));
    }

    const auto& buses = root.at("buses");
    for (std::size_t i = 0; i < buses.size(); ++i) {
        const std::string where = fmt::format("buses[{}]", i);
        const json& b = buses[i];
        reject_unknown(b, where, {"id", "base_kv", "zone", "coord", "load_profile_ref", "load_scale"});
        Bus bus;
        bus.id = integer(b, where, "id");
        bus.base_kv = number(b, where, "base_kv");
        bus.zone = string_or(b, where, "zone", "");
        if (b.contains("coord")) {
            const json& c = b.at("coord");
            if (!c.is_array() || c.size() != 2 || !c[0].is_number() || !c[1].is_number())
                throw ParseError(fmt::format("{}.coord: expected [longitude, latitude]", where));
            bus.coord = Coordinate{c[0].get<double>(), c[1].get<double>()};
        }
        bus.load_profile_ref = string_or(b, where, "load_profile_ref", "");
        bus.load_scale = number_or(b, where, "load_scale", 1.0);
        data.buses.push_back(std::move(bus));
    }

    const auto& branches = root.at("branches");
    for (std::size_t i = 0; i < branches.size(); ++i) {
        const std::string where = fmt::format("branches[{}]", i);
        const json& b = branches[i];
        reject_unknown(b, where, {"id", "from_bus", "to_bus", "susceptance", "flow_limit", "status"});
        Branch br;
        br.id = integer(b, where, "id");
        br.from_bus = integer(b, where, "from_bus");
        br.to_bus = integer(b, where, "to_bus");
        br.susceptance = number(b, where, "susceptance");
        br.flow_limit = number(b, where, "flow_limit");
        const std::string status = string_or(b, where, "status", "in");
        if (status != "in" && status != "out")
            throw ParseError(fmt::format("{}.status: expected \"in\" or \"out\"", where));
        br.in_service = status == "in";
        data.branches.push_back(br);
    }

    const auto& gens = root.at("generators");
    for (std::size_t i = 0; i < gens.size(); ++i) {
        const std::string where = fmt::format("generators[{}]", i);
        const json& g = gens[i];
        reject_unknown(g, where,
                       {"id", "bus", "pmin", "pmax", "ramp_up", "ramp_down", "min_up", "min_down", "cost_quad",
                        "no_load_cost", "startup_cost", "shutdown_cost", "renewable_profile_ref"});
        Generator gen;
        gen.id = integer(g, where, "id");
        gen.bus = integer(g, where, "bus");
        gen.pmin = number(g, where, "pmin");
        gen.pmax = number(g, where, "pmax");
        gen.ramp_up = number_or(g, where, "ramp_up", gen.pmax);
        gen.ramp_down = number_or(g, where, "ramp_down", gen.pmax);
        gen.min_up = integer_or(g, where, "min_up", 1);
        gen.min_down = integer_or(g, where, "min_down", 1);
        if (g.contains("cost_quad")) {
            const json& c = g.at("cost_quad");
            if (!c.is_array() || c.size() != 3 || !std::all_of(c.begin(), c.end(), [](const json& v) { return v.is_number(); }))
                throw ParseError(fmt::format("{}.cost_quad: expected [c2, c1, c0]", where));
            gen.cost = CostCurve{c[0].get<double>(), c[1].get<double>(), c[2].get<double>()};
        }
        gen.no_load_cost = number_or(g, where, "no_load_cost", 0.0);
        gen.startup_cost = number_or(g, where, "startup_cost", 0.0);
        gen.shutdown_cost = number_or(g, where, "shutdown_cost", 0.0);
        gen.renewable_profile_ref = string_or(g, where, "renewable_profile_ref", "");
        data.generators.push_back(std::move(gen));
    }

    if (root.contains("series")) {
        const json& series = root.at("series");
        if (!series.is_object()) throw ParseError("case.series: expected an object");
        for (const auto& [key, values] : series.items()) {
            const std::string where = fmt::format("series.{}", key);
            if (!values.is_array()) throw ParseError(fmt::format("{}: expected an array of numbers", where));
            TimeSeries ts;
            ts.id = key;
            ts.values.reserve(values.size());
            for (std::size_t t = 0; t < values.size(); ++t) {
                if (!values[t].is_number()) throw ParseError(fmt::format("{}[{}]: expected a number", where, t));
                ts.values.push_back(values[t].get<double>());
            }
            data.series.emplace(key, std::move(ts));
        }
    }
    return data;
}

}  // namespace

GridCase parse_case(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(fmt::format("line {}: {}", line_of(text, e.byte), e.what()));
    }
    return GridCase(parse_case_data(root));
}

GridCase load_case(const std::filesystem::path& path) {
    const std::string text = read_file(path);
    try {
        return parse_case(text);
    } catch (const ParseError& e) {
        throw ParseError(fmt::format("{}: {}", path.string(), e.what()));
    }
}

std::string case_to_json(const CaseData& data, int indent) {
    json root = json::object();
    root["base_mva"] = data.base_mva;
    root["slack_bus"] = data.slack_bus;
    json buses = json::array();
    for (const Bus& b : data.buses) {
        json j = {{"id", b.id}, {"base_kv", b.base_kv}, {"zone", b.zone}};
        if (b.coord) j["coord"] = {b.coord->longitude, b.coord->latitude};
        j["load_profile_ref"] = b.load_profile_ref;
        j["load_scale"] = b.load_scale;
        buses.push_back(std::move(j));
    }
    root["buses"] = std::move(buses);
    json branches = json::array();
    for (const Branch& br : data.branches) {
        branches.push_back({{"id", br.id},
                            {"from_bus", br.from_bus},
                            {"to_bus", br.to_bus},
                            {"susceptance", br.susceptance},
                            {"flow_limit", br.flow_limit},
                            {"status", br.in_service ? "in" : "out"}});
    }
    root["branches"] = std::move(branches);
    json gens = json::array();
    for (const Generator& g : data.generators) {
        gens.push_back({{"id", g.id},
                        {"bus", g.bus},
                        {"pmin", g.pmin},
                        {"pmax", g.pmax},
                        {"ramp_up", g.ramp_up},
                        {"ramp_down", g.ramp_down},
                        {"min_up", g.min_up},
                        {"min_down", g.min_down},
                        {"cost_quad", {g.cost.c2, g.cost.c1, g.cost.c0}},
                        {"no_load_cost", g.no_load_cost},
                        {"startup_cost", g.startup_cost},
                        {"shutdown_cost", g.shutdown_cost},
                        {"renewable_profile_ref", g.renewable_profile_ref}});
    }
    root["generators"] = std::move(gens);
    json series = json::object();
    for (const auto& [key, ts] : data.series) series[key] = ts.values;
    root["series"] = std::move(series);
    return root.dump(indent);
}

void write_case(const GridCase& grid, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError(fmt::format("cannot write '{}'", path.string()));
    out << case_to_json(grid.data()) << '\n';
}

// ---------------------------------------------------------------------------
// MATPOWER

namespace {

using Matrix = std::vector<std::vector<double>>;

std::string strip_comments(std::istream& in) {
    std::string out, line;
    while (std::getline(in, line)) {
        auto pct = line.find('%');
        if (pct != std::string::npos) line.erase(pct);
        out += line;
        out += '\n';
    }
    return out;
}

Matrix parse_matrix(const std::string& text, const std::string& name) {
    const std::regex head("mpc\\." + name + "\\s*=\\s*\\[");
    std::smatch m;
    if (!std::regex_search(text, m, head)) return {};
    const std::size_t start = static_cast<std::size_t>(m.position(0) + m.length(0));
    const std::size_t stop = text.find(']', start);
    if (stop == std::string::npos) throw ParseError(fmt::format("mpc.{}: unterminated matrix", name));
    Matrix rows;
    std::vector<double> row;
    std::string token;
    auto flush_token = [&] {
        if (token.empty()) return;
        try {
            row.push_back(std::stod(token));
        } catch (const std::exception&) {
            throw ParseError(fmt::format("mpc.{}: bad number '{}' near line {}", name, token, line_of(text, start)));
        }
        token.clear();
    };
    for (std::size_t i = start; i < stop; ++i) {
        const char c = text[i];
        if (c == ';' || c == '\n') {
            flush_token();
            if (!row.empty()) rows.push_back(std::move(row));
            row.clear();
        } else if (c == ' ' || c == '\t' || c == ',' || c == '\r') {
            flush_token();
        } else {
            token += c;
        }
    }
    flush_token();
    if (!row.empty()) rows.push_back(std::move(row));
    return rows;
}

double scalar(const std::string& text, const std::string& name, double fallback) {
    const std::regex re("mpc\\." + name + "\\s*=\\s*([-+0-9.eE]+)");
    std::smatch m;
    if (!std::regex_search(text, m, re)) return fallback;
    return std::stod(m[1].str());
}

double col(const std::vector<double>& row, std::size_t k, const char* table, double fallback = 0.0) {
    if (k < row.size()) return row[k];
    if (std::isnan(fallback)) throw ParseError(fmt::format("mpc.{}: row has only {} columns", table, row.size()));
    return fallback;
}

}  // namespace

CaseData convert_matpower(std::istream& in, int hours) {
    if (hours <= 0 || hours % 24 != 0) throw ParseError("series length must be a positive multiple of 24");
    const std::string text = strip_comments(in);
    const double nan = std::numeric_limits<double>::quiet_NaN();

    CaseData data;
    data.base_mva = scalar(text, "baseMVA", 100.0);
    const Matrix bus = parse_matrix(text, "bus");
    const Matrix gen = parse_matrix(text, "gen");
    const Matrix branch = parse_matrix(text, "branch");
    const Matrix gencost = parse_matrix(text, "gencost");
    if (bus.empty()) throw ParseError("mpc.bus: missing or empty");

    std::set<int> isolated;
    bool have_slack = false;
    for (const auto& row : bus) {
        Bus b;
        b.id = static_cast<int>(col(row, 0, "bus", nan));
        const int type = static_cast<int>(col(row, 1, "bus", nan));
        if (type == 4) {
            isolated.insert(b.id);
            continue;
        }
        if (type == 3 && !have_slack) {
            data.slack_bus = b.id;
            have_slack = true;
        }
        const double pd = col(row, 2, "bus", nan);
        b.base_kv = col(row, 9, "bus", nan);
        b.zone = fmt::format("{}", static_cast<int>(col(row, 10, "bus", 1.0)));
        if (pd > 0.0) {
            const std::string key = fmt::format("load_{}", b.id);
            data.series.emplace(key, TimeSeries{key, std::vector<double>(static_cast<std::size_t>(hours), pd)});
            b.load_profile_ref = key;
        } else if (pd < 0.0) {
            spdlog::warn("bus {}: negative demand {} MW dropped (series must be non-negative)", b.id, pd);
        }
        data.buses.push_back(std::move(b));
    }
    if (!have_slack && !data.buses.empty()) data.slack_bus = data.buses.front().id;

    int next_branch = 1;
    for (const auto& row : branch) {
        const int f = static_cast<int>(col(row, 0, "branch", nan));
        const int t = static_cast<int>(col(row, 1, "branch", nan));
        if (isolated.count(f) || isolated.count(t)) continue;
        const double x = col(row, 3, "branch", nan);
        double tap = col(row, 8, "branch", 0.0);
        if (tap == 0.0) tap = 1.0;
        const double rate = col(row, 5, "branch", 0.0);
        Branch br;
        br.id = next_branch++;
        br.from_bus = f;
        br.to_bus = t;
        br.susceptance = x != 0.0 ? 1.0 / (x * tap) : 0.0;
        br.flow_limit = rate > 0.0 ? rate : 1e5;  // RATE_A = 0 means unlimited
        br.in_service = col(row, 10, "branch", 1.0) > 0.0;
        data.branches.push_back(br);
    }

    int next_gen = 1;
    for (std::size_t k = 0; k < gen.size(); ++k) {
        const auto& row = gen[k];
        if (col(row, 7, "gen", 1.0) <= 0.0) continue;
        Generator g;
        g.id = next_gen++;
        g.bus = static_cast<int>(col(row, 0, "gen", nan));
        g.pmax = col(row, 8, "gen", nan);
        g.pmin = std::max(0.0, col(row, 9, "gen", 0.0));
        const double ramp30 = col(row, 18, "gen", 0.0);
        g.ramp_up = g.ramp_down = ramp30 > 0.0 ? 2.0 * ramp30 : g.pmax;
        if (k < gencost.size()) {
            const auto& c = gencost[k];
            const int model = static_cast<int>(col(c, 0, "gencost", nan));
            g.startup_cost = col(c, 1, "gencost", 0.0);
            g.shutdown_cost = col(c, 2, "gencost", 0.0);
            const int ncost = static_cast<int>(col(c, 3, "gencost", 0.0));
            if (model == 2) {
                std::vector<double> coeffs;
                for (int i = 0; i < ncost; ++i) coeffs.push_back(col(c, 4 + static_cast<std::size_t>(i), "gencost", nan));
                // Highest order first; keep the trailing (c2, c1, c0).
                while (coeffs.size() < 3) coeffs.insert(coeffs.begin(), 0.0);
                const std::size_t s = coeffs.size();
                g.cost = CostCurve{coeffs[s - 3], coeffs[s - 2], coeffs[s - 1]};
            } else if (model == 1 && ncost >= 2) {
                // Piecewise linear: keep the chord through the end points.
                const double p0 = col(c, 4, "gencost", nan), f0 = col(c, 5, "gencost", nan);
                const std::size_t last = 4 + 2 * static_cast<std::size_t>(ncost - 1);
                const double p1 = col(c, last, "gencost", nan), f1 = col(c, last + 1, "gencost", nan);
                const double slope = p1 != p0 ? (f1 - f0) / (p1 - p0) : 0.0;
                g.cost = CostCurve{0.0, slope, f0 - slope * p0};
            }
        }
        data.generators.push_back(std::move(g));
    }
    return data;
}

}  // namespace gridsiter
