#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace gridsiter {

/// Bad key, value or reference in a run configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::filesystem::path case_path;
    std::filesystem::path menu_path;  // empty: built-in firm/pause/shift menu
    std::vector<double> sizes_mw{1000.0};
    double tau_pr = 0.95;
    double eps_mu = 1e-4;
    double vmin_kv = 24.0;
    double vmax_kv = 500.0;
    int top_k = 20;
    std::string hour_sample = "every4+peak";
    int days = 28;  // representative days; 0 = whole case horizon
    double reserve_fraction = 0.03;
    std::filesystem::path output_dir = "out";
    int jobs = 1;
    bool strict_entropy = false;
    bool pooled = false;
    double cost_scale = 1.0;
    double mip_gap = 1e-3;  // relative SCUC optimality gap

    /// Checks value ranges and that referenced files exist.
    void validate() const;
};

/// Parses the flat `key = value` format (a TOML subset: strings, numbers,
/// booleans, numeric arrays, `#` comments). Relative paths resolve against
/// `base_dir`. Unknown keys are errors.
RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

/// Canonical text of every field; its SHA-256 is the manifest config hash.
std::string canonical_config(const RunConfig& cfg);

}  // namespace gridsiter
