#include "gridsiter/grid.hpp"

#include <cmath>
#include <numeric>
#include <set>

#include <fmt/format.h>

namespace gridsiter {

namespace {

std::string join_issues(const std::vector<std::string>& issues) {
    std::string out = "invalid case:";
    for (const auto& issue : issues) {
        out += "\n  - ";
        out += issue;
    }
    return out;
}

// Union-find over bus positions; enough for the connectivity invariant.
class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }
    void unite(std::size_t a, std::size_t b) { parent_[find(a)] = find(b); }

private:
    std::vector<std::size_t> parent_;
};

}  // namespace

CaseError::CaseError(std::vector<std::string> issues)
    : std::runtime_error(join_issues(issues)), issues_(std::move(issues)) {}

std::vector<std::string> validate_case(const CaseData& data) {
    std::vector<std::string> issues;
    if (!(data.base_mva > 0.0) || !std::isfinite(data.base_mva))
        issues.push_back(fmt::format("base_mva must be positive (got {})", data.base_mva));

    std::unordered_map<int, std::size_t> bus_pos;
    for (std::size_t i = 0; i < data.buses.size(); ++i) {
        const Bus& b = data.buses[i];
        if (!bus_pos.emplace(b.id, i).second)
            issues.push_back(fmt::format("duplicate bus id {}", b.id));
        if (!(b.base_kv > 0.0) || !std::isfinite(b.base_kv))
            issues.push_back(fmt::format("bus {}: base_kv must be positive (got {})", b.id, b.base_kv));
        if (!b.load_profile_ref.empty() && data.series.count(b.load_profile_ref) == 0)
            issues.push_back(fmt::format("bus {}: unknown load profile '{}'", b.id, b.load_profile_ref));
        if (!(b.load_scale >= 0.0) || !std::isfinite(b.load_scale))
            issues.push_back(fmt::format("bus {}: load_scale must be finite and >= 0", b.id));
    }
    if (data.buses.empty()) issues.emplace_back("case has no buses");
    if (bus_pos.count(data.slack_bus) == 0)
        issues.push_back(fmt::format("slack bus {} does not exist", data.slack_bus));

    std::set<int> branch_ids;
    for (const Branch& br : data.branches) {
        if (!branch_ids.insert(br.id).second)
            issues.push_back(fmt::format("duplicate branch id {}", br.id));
        if (br.from_bus == br.to_bus)
            issues.push_back(fmt::format("branch {}: from_bus equals to_bus ({})", br.id, br.from_bus));
        if (bus_pos.count(br.from_bus) == 0 || bus_pos.count(br.to_bus) == 0)
            issues.push_back(fmt::format("branch {}: references unknown bus", br.id));
        if (!(br.flow_limit > 0.0))
            issues.push_back(fmt::format("branch {}: flow_limit must be positive (got {})", br.id, br.flow_limit));
        if (br.susceptance == 0.0 || !std::isfinite(br.susceptance))
            issues.push_back(fmt::format("branch {}: susceptance must be finite and nonzero", br.id));
    }

    std::set<int> gen_ids;
    for (const Generator& g : data.generators) {
        if (!gen_ids.insert(g.id).second)
            issues.push_back(fmt::format("duplicate generator id {}", g.id));
        if (bus_pos.count(g.bus) == 0)
            issues.push_back(fmt::format("generator {}: unknown bus {}", g.id, g.bus));
        if (!(g.pmin >= 0.0 && g.pmin <= g.pmax) || !std::isfinite(g.pmax))
            issues.push_back(fmt::format("generator {}: requires 0 <= pmin <= pmax (got {}, {})", g.id, g.pmin, g.pmax));
        if (!(g.ramp_up >= 0.0) || !(g.ramp_down >= 0.0))
            issues.push_back(fmt::format("generator {}: ramp rates must be >= 0", g.id));
        if (g.min_up < 1 || g.min_down < 1)
            issues.push_back(fmt::format("generator {}: min_up and min_down must be >= 1", g.id));
        const double coeffs[] = {g.cost.c2, g.cost.c1, g.cost.c0, g.no_load_cost, g.startup_cost, g.shutdown_cost};
        for (double c : coeffs) {
            if (!std::isfinite(c)) {
                issues.push_back(fmt::format("generator {}: non-finite cost coefficient", g.id));
                break;
            }
        }
        if (!g.renewable_profile_ref.empty() && data.series.count(g.renewable_profile_ref) == 0)
            issues.push_back(fmt::format("generator {}: unknown renewable profile '{}'", g.id, g.renewable_profile_ref));
    }

    std::size_t length = 0;
    for (const auto& [key, ts] : data.series) {
        if (ts.id != key) issues.push_back(fmt::format("series key '{}' does not match id '{}'", key, ts.id));
        if (ts.values.empty() || ts.values.size() % 24 != 0)
            issues.push_back(fmt::format("series '{}': length {} is not a positive multiple of 24", key, ts.values.size()));
        if (length == 0) length = ts.values.size();
        else if (ts.values.size() != length)
            issues.push_back(fmt::format("series '{}': length {} differs from horizon {}", key, ts.values.size(), length));
        for (std::size_t t = 0; t < ts.values.size(); ++t) {
            if (!std::isfinite(ts.values[t]) || ts.values[t] < 0.0) {
                issues.push_back(fmt::format("series '{}': value at hour {} must be finite and >= 0", key, t + 1));
                break;
            }
        }
    }

    // Connectivity of the in-service graph over the distinct bus ids.
    if (!bus_pos.empty()) {
        DisjointSets sets(data.buses.size());
        for (const Branch& br : data.branches) {
            auto f = bus_pos.find(br.from_bus);
            auto t = bus_pos.find(br.to_bus);
            if (br.in_service && f != bus_pos.end() && t != bus_pos.end()) sets.unite(f->second, t->second);
        }
        const std::size_t first = bus_pos.at(data.buses[0].id);
        const std::size_t root = sets.find(first);
        for (std::size_t i = 1; i < data.buses.size(); ++i) {
            const std::size_t pos = bus_pos.at(data.buses[i].id);
            if (sets.find(pos) != root) {
                issues.push_back(fmt::format("graph not connected (bus {} is isolated from bus {})",
                                             data.buses[i].id, data.buses[0].id));
                break;
            }
        }
    }
    return issues;
}

GridCase::GridCase(CaseData data) : data_(std::move(data)) {
    auto issues = validate_case(data_);
    if (!issues.empty()) throw CaseError(std::move(issues));
    build_index();
}

GridCase::GridCase(const GridCase& other) : data_(other.data_) { build_index(); }

GridCase& GridCase::operator=(const GridCase& other) {
    if (this != &other) {
        data_ = other.data_;
        build_index();
    }
    return *this;
}

void GridCase::build_index() {
    bus_pos_.clear();
    branch_pos_.clear();
    gen_pos_.clear();
    for (std::size_t i = 0; i < data_.buses.size(); ++i) bus_pos_[data_.buses[i].id] = i;
    for (std::size_t i = 0; i < data_.branches.size(); ++i) branch_pos_[data_.branches[i].id] = i;
    for (std::size_t i = 0; i < data_.generators.size(); ++i) gen_pos_[data_.generators[i].id] = i;

    horizon_ = data_.series.empty() ? 24 : static_cast<int>(data_.series.begin()->second.values.size());
    bus_series_.assign(data_.buses.size(), nullptr);
    for (std::size_t i = 0; i < data_.buses.size(); ++i) {
        const auto& ref = data_.buses[i].load_profile_ref;
        if (!ref.empty()) bus_series_[i] = &data_.series.at(ref).values;
    }
    gen_series_.assign(data_.generators.size(), nullptr);
    gen_bus_pos_.resize(data_.generators.size());
    for (std::size_t g = 0; g < data_.generators.size(); ++g) {
        gen_bus_pos_[g] = bus_pos_.at(data_.generators[g].bus);
        const auto& ref = data_.generators[g].renewable_profile_ref;
        if (!ref.empty()) gen_series_[g] = &data_.series.at(ref).values;
    }
}

std::size_t GridCase::bus_index(int bus_id) const {
    auto it = bus_pos_.find(bus_id);
    if (it == bus_pos_.end()) throw GridError(fmt::format("unknown bus id {}", bus_id));
    return it->second;
}

std::size_t GridCase::branch_index(int branch_id) const {
    auto it = branch_pos_.find(branch_id);
    if (it == branch_pos_.end()) throw GridError(fmt::format("unknown branch id {}", branch_id));
    return it->second;
}

std::size_t GridCase::generator_index(int gen_id) const {
    auto it = gen_pos_.find(gen_id);
    if (it == gen_pos_.end()) throw GridError(fmt::format("unknown generator id {}", gen_id));
    return it->second;
}

double GridCase::demand(std::size_t n, int t) const {
    const auto* s = bus_series_[n];
    if (s == nullptr) return 0.0;
    return data_.buses[n].load_scale * (*s)[static_cast<std::size_t>(t)];
}

double GridCase::total_demand(int t) const {
    double total = 0.0;
    for (std::size_t n = 0; n < data_.buses.size(); ++n) total += demand(n, t);
    return total;
}

double GridCase::generator_pmax(std::size_t g, int t) const {
    const auto* s = gen_series_[g];
    const double pmax = data_.generators[g].pmax;
    if (s == nullptr) return pmax;
    return std::min(pmax, (*s)[static_cast<std::size_t>(t)]);
}

GridCase GridCase::with_cost_scale(double factor) const {
    CaseData copy = data_;
    for (auto& g : copy.generators) {
        g.cost.c1 *= factor;
        g.cost.c2 *= factor;
    }
    return GridCase(std::move(copy));
}

}  // namespace gridsiter
