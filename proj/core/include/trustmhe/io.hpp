#pragma once

#include <span>
#include <string>
#include <vector>

#include "trustmhe/simloop.hpp"
#include "trustmhe/stats.hpp"

namespace trustmhe {

// Fixed-point decimal via std::to_chars: locale-independent, shortest
// faithful digits for the precision, "inf"/"nan" for non-finite values.
std::string fmt_fixed(double v, int precision);

// Trace file: a versioned comment header, a column header, then one CSV
// row per forecast round: sim_time_s, omega, weighted_ade_m, ego_x,
// ego_y, ego_v, min_dist_m, crash_count. Rounds the estimator could not
// score print "warmup" for the error column; an agent-free run prints
// "inf" for min_dist_m. Byte-stable for identical runs.
std::string trace_to_text(const RunRecord& rec);
void write_text_file(const std::string& path, const std::string& text);

// Results table: JSON Lines. Every line is self-contained: a
// record_version field, the config hash, the run metrics, and the full
// config echo (the run is reconstructible from the echo alone). Aborted
// runs carry `aborted: true` plus the diagnostic instead of metrics.
std::string record_to_line(const RunRecord& rec, const ExperimentConfig& cfg);
std::string aborted_record_to_line(const ExperimentConfig& cfg, const std::string& reason);

struct LoadedRecord {
  StatsRun run;  // meaningful only when !aborted
  bool aborted{false};
  std::string abort_reason;
  std::string config_hash;
};

// Parses a results table. Throws std::invalid_argument naming the first
// malformed line. Blank lines are allowed.
std::vector<LoadedRecord> parse_records(const std::string& jsonl_text);
std::vector<LoadedRecord> load_records(const std::string& path);

// Machine-readable form of summarize()'s output.
std::string report_to_json_text(const std::vector<GroupReport>& groups);

// Box-plot quantile table for one metric (Crashes, Progress, Success,
// Min.Dist.): CSV with group, arm, n, min, q1, median, q3, max, mean.
// Min.Dist. rows cover successful runs only.
std::string plot_data_csv(std::span<const StatsRun> runs, GroupKey group_by,
                          const std::string& metric);

}  // namespace trustmhe
