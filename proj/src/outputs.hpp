#pragma once

// CSV / JSON / GeoJSON renderers for run artifacts. Every renderer is a pure
// function of its inputs so repeated runs produce identical bytes.

#include <filesystem>
#include <string>
#include <vector>

#include "gridsiter/pipeline.hpp"

namespace gridsiter::out {

std::string num(double v);

/// Writes files into one directory and remembers what was written.
class OutputDir {
public:
    explicit OutputDir(std::filesystem::path dir);
    void write(const std::string& name, const std::string& content);
    const std::filesystem::path& path() const noexcept { return dir_; }
    const std::vector<std::string>& files() const noexcept { return files_; }

private:
    std::filesystem::path dir_;
    std::vector<std::string> files_;
};

std::string envelopes_csv(const std::vector<EnvelopeCase>& envs);
std::string passrates_csv(const std::vector<PassRateRecord>& records, const std::vector<EnvelopeCase>& envs);
std::string heatmap_csv(const GridCase& grid, const std::vector<int>& candidates,
                        const std::vector<PassRateRecord>& records, const std::vector<EnvelopeCase>& envs);
std::string qualified_json(const QualifiedSet& q, const std::vector<PassRateRecord>& records,
                           const std::vector<EnvelopeCase>& envs, const std::string& hour_sample,
                           std::size_t num_hours);

std::string lmp_csv(const GridCase& grid, const ScenarioRun& run);
std::string duals_csv(const GridCase& grid, const ScenarioRun& run);
std::string metrics_csv(const std::vector<Stage2Scenario>& scenarios);
std::string summary_csv(const std::vector<SummaryRow>& rows);
std::string exclusions_csv(const std::vector<Exclusion>& rows);

std::string ranking_csv(const RankingResult& r);
std::string shortlist_geojson(const GridCase& grid, const RankingResult& r);
std::string overlap_csv(const std::vector<RankingResult>& rankings);
std::string diagnostics_csv(const std::vector<RankingResult>& rankings);
std::string pooled_csv(const std::vector<PooledRow>& rows);

std::string naive_csv(const std::vector<NaiveReport>& reports);
std::string sweep_csv(const SweepReport& report);

/// Inverse of metrics_csv for the stage3 subcommand.
std::vector<CriteriaRow> read_metrics_csv(const std::string& text);

}  // namespace gridsiter::out
