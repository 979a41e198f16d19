#include "gridsiter/horizon.hpp"

#include <algorithm>
#include <stdexcept>

#include <fmt/format.h>

namespace gridsiter {

std::vector<DayBlock> representative_days(int case_days, int days) {
    if (case_days <= 0) throw std::invalid_argument("case has no whole days");
    if (days <= 0 || days >= case_days) return {DayBlock{0, case_days}};
    const int blocks = std::min(4, days);
    std::vector<DayBlock> out;
    for (int b = 0; b < blocks; ++b) {
        const int len = days / blocks + (b < days % blocks ? 1 : 0);
        int start = static_cast<int>(static_cast<long>(b) * case_days / blocks);
        start = std::min(start, case_days - len);
        if (!out.empty()) start = std::max(start, out.back().first_day + out.back().num_days);
        out.push_back({start, len});
    }
    return out;
}

std::vector<int> block_hours(const std::vector<DayBlock>& blocks) {
    std::vector<int> hours;
    for (const DayBlock& b : blocks)
        for (int h = b.first_day * 24; h < (b.first_day + b.num_days) * 24; ++h) hours.push_back(h);
    return hours;
}

HourSamplePolicy HourSamplePolicy::parse(const std::string& text) {
    HourSamplePolicy p;
    if (text == "full") {
        p.full = true;
        p.include_peak = false;
        p.stride = 1;
        return p;
    }
    std::string rest = text;
    p.include_peak = false;
    const std::string suffix = "+peak";
    if (rest.size() > suffix.size() && rest.compare(rest.size() - suffix.size(), suffix.size(), suffix) == 0) {
        p.include_peak = true;
        rest.resize(rest.size() - suffix.size());
    }
    if (rest.rfind("every", 0) != 0 || rest.size() == 5)
        throw std::invalid_argument(fmt::format("unknown hour sample policy '{}'", text));
    const std::string digits = rest.substr(5);
    if (!std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; }) || digits.size() > 2)
        throw std::invalid_argument(fmt::format("unknown hour sample policy '{}'", text));
    p.stride = std::stoi(digits);
    if (p.stride < 1 || p.stride > 24) throw std::invalid_argument("hour sample stride must lie in 1..24");
    return p;
}

std::string HourSamplePolicy::str() const {
    if (full) return "full";
    return fmt::format("every{}{}", stride, include_peak ? "+peak" : "");
}

std::vector<int> sample_hours(const std::vector<int>& study_hours, const HourSamplePolicy& policy,
                              const std::set<int>& peak_hours) {
    std::vector<int> out;
    for (int h : study_hours) {
        const int tau = 1 + h % 24;
        const bool take = policy.full || (tau - 1) % policy.stride == 0 ||
                          (policy.include_peak && peak_hours.count(tau) != 0);
        if (take) out.push_back(h);
    }
    return out;
}

}  // namespace gridsiter
