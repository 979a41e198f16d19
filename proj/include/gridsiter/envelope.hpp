#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gridsiter {

enum class EnvelopeKind { Firm, Pause, Shift };

const char* to_string(EnvelopeKind kind);
EnvelopeKind parse_envelope_kind(const std::string& text);

class EnvelopeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when consecutive hours differ by more than the ramp bound.
class RampViolation : public EnvelopeError {
public:
    RampViolation(int hour_from, int hour_to, double step, double bound);
    int hour_from;
    int hour_to;
    double step;
    double bound;
};

struct EnvelopeSpec {
    std::string id;  // label used in file names and reports
    EnvelopeKind kind = EnvelopeKind::Firm;
    double nameplate_mw = 0.0;
    double utilization = 0.8;
    std::vector<int> peak_window{16, 17, 18, 19};  // within-day hours 1..24
    double curtailment = 0.0;
    double makeup = 1.0;
    double ramp_bound = 0.0;  // MW/h

    /// Study defaults for a kind at nameplate P (ramp bound 0.2 P).
    static EnvelopeSpec defaults(EnvelopeKind kind, double nameplate_mw);

    bool in_peak(int tau) const;
    /// Throws EnvelopeError naming the first violated invariant.
    void validate() const;
};

struct RampCheck {
    bool pass = true;
    double worst_step = 0.0;
    int worst_hour = 0;  // τ of the later hour in the worst step; 0 when flat
};

struct LoadTrajectory {
    std::array<double, 24> values{};
    EnvelopeSpec source;

    /// Load at within-day hour τ in 1..24.
    double at(int tau) const { return values.at(static_cast<std::size_t>(tau - 1)); }
    double energy() const;
};

/// Within-day hour of a 1-based year-hour t in 1..horizon.
int map_hour(long t, long horizon);

/// Builds the 24-hour trajectory; throws RampViolation on a ramp breach.
LoadTrajectory build_envelope(const EnvelopeSpec& spec);

/// Steps τ-1 → τ for τ = 2..24 (no wrap-around from hour 24 to hour 1).
RampCheck check_ramp(const LoadTrajectory& traj, double ramp_bound);

/// One menu record; unset fields take the kind's defaults.
struct MenuEntry {
    std::string id;
    EnvelopeKind kind = EnvelopeKind::Firm;
    std::optional<double> nameplate_mw;
    std::optional<double> utilization;
    std::optional<std::vector<int>> peak_window;
    std::optional<double> curtailment;
    std::optional<double> makeup;
    std::optional<double> ramp_bound;
    std::optional<double> ramp_fraction;

    /// Spec for nameplate P (the entry's own nameplate wins when set).
    EnvelopeSpec instantiate(double nameplate_mw) const;
};

std::vector<MenuEntry> parse_menu(const std::string& json_text);
std::vector<MenuEntry> load_menu(const std::filesystem::path& path);
/// The three default envelopes.
std::vector<MenuEntry> default_menu();

/// CSV with columns hour,<label>... for the given trajectories.
std::string trajectories_csv(const std::vector<LoadTrajectory>& trajs);

}  // namespace gridsiter
