#pragma once

#include <set>
#include <string>
#include <vector>

namespace gridsiter {

/// A run of consecutive days of the case horizon (0-based day index).
struct DayBlock {
    int first_day = 0;
    int num_days = 0;
    bool operator==(const DayBlock&) const = default;
};

/// Representative study days: up to four evenly spaced blocks of consecutive
/// days (one per season). `days <= 0` or `days >= case_days` selects every day.
std::vector<DayBlock> representative_days(int case_days, int days);

/// 0-based hour indices covered by the blocks, chronological.
std::vector<int> block_hours(const std::vector<DayBlock>& blocks);

/// Hour subsampling used by the Stage-1 sweep.
struct HourSamplePolicy {
    bool full = false;
    int stride = 4;
    bool include_peak = true;

    /// Accepts "full", "every<N>" and "every<N>+peak".
    static HourSamplePolicy parse(const std::string& text);
    std::string str() const;
};

/// Hours from `study_hours` whose within-day hour τ satisfies the policy:
/// (τ - 1) divisible by the stride, or τ in `peak_hours` when requested.
std::vector<int> sample_hours(const std::vector<int>& study_hours, const HourSamplePolicy& policy,
                              const std::set<int>& peak_hours);

}  // namespace gridsiter
