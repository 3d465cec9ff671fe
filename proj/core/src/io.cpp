#include "trustmhe/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "trustmhe/config.hpp"

namespace trustmhe {

using ordered_json = nlohmann::ordered_json;

std::string fmt_fixed(double v, int precision) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v < 0.0 ? "-inf" : "inf";
  char buf[512];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed,
                           precision);
  return std::string(buf, res.ptr);
}

std::string trace_to_text(const RunRecord& rec) {
  std::string out;
  out.reserve(64 * (rec.trace.size() + 2));
  out += "# trustmhe trace v1\n";
  out += "sim_time_s,omega,weighted_ade_m,ego_x,ego_y,ego_v,min_dist_m,crash_count\n";
  for (const TraceRow& row : rec.trace) {
    out += fmt_fixed(row.t, 3);
    out += ',';
    out += fmt_fixed(row.omega, 6);
    out += ',';
    out += row.ade ? fmt_fixed(*row.ade, 6) : "warmup";
    out += ',';
    out += fmt_fixed(row.x, 6);
    out += ',';
    out += fmt_fixed(row.y, 6);
    out += ',';
    out += fmt_fixed(row.v, 6);
    out += ',';
    out += fmt_fixed(row.min_dist, 6);
    out += ',';
    out += std::to_string(row.crashes);
    out += '\n';
  }
  return out;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  f.flush();
  if (!f) throw std::runtime_error("write failed: " + path);
}

namespace {

ordered_json config_echo(const ExperimentConfig& cfg) {
  return ordered_json::parse(config_to_text(cfg));
}

ordered_json record_skeleton(const ExperimentConfig& cfg, bool aborted) {
  ordered_json doc;
  doc["record_version"] = 1;
  doc["config_hash"] = config_hash_hex(cfg);
  doc["aborted"] = aborted;
  return doc;
}

}  // namespace

std::string record_to_line(const RunRecord& rec, const ExperimentConfig& cfg) {
  ordered_json doc = record_skeleton(cfg, false);
  doc["crashes"] = rec.crashes;
  doc["progress"] = rec.progress;
  doc["success"] = rec.success;
  if (std::isfinite(rec.min_dist))
    doc["min_dist"] = rec.min_dist;
  else
    doc["min_dist"] = "inf";
  doc["wall_s"] = rec.wall_s;
  doc["latency_exact"] = rec.latency_exact;
  doc["final_omega"] = rec.final_omega;
  doc["config"] = config_echo(cfg);
  return doc.dump();
}

std::string aborted_record_to_line(const ExperimentConfig& cfg,
                                   const std::string& reason) {
  ordered_json doc = record_skeleton(cfg, true);
  doc["abort_reason"] = reason;
  doc["config"] = config_echo(cfg);
  return doc.dump();
}

namespace {

[[noreturn]] void bad_line(std::size_t line_no, const std::string& what) {
  throw std::invalid_argument("records line " + std::to_string(line_no) + ": " +
                              what);
}

LoadedRecord parse_record_line(const std::string& line, std::size_t line_no) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(line);
  } catch (const std::exception& e) {
    bad_line(line_no, std::string("not valid JSON (") + e.what() + ")");
  }
  if (!doc.is_object()) bad_line(line_no, "record is not an object");
  if (!doc.contains("record_version") ||
      !doc["record_version"].is_number_integer() ||
      doc["record_version"].get<int>() != 1)
    bad_line(line_no, "unsupported record_version (want 1)");

  LoadedRecord out;
  try {
    out.config_hash = doc.at("config_hash").get<std::string>();
    out.aborted = doc.value("aborted", false);
    const ordered_json& cfg = doc.at("config");
    out.run.enabled = cfg.at("trustmhe").at("enabled").get<bool>();
    out.run.t_est = cfg.at("trustmhe").at("t_est").get<int>();
    out.run.mode = cfg.at("mode").get<std::string>();
    out.run.noise = cfg.at("planner").at("sigma_steer").get<double>();
    out.run.scenario = cfg.at("scenario").get<std::string>();
    if (out.aborted) {
      out.abort_reason = doc.value("abort_reason", "");
      return out;
    }
    out.run.crashes = doc.at("crashes").get<int>();
    out.run.progress = doc.at("progress").get<double>();
    out.run.success = doc.at("success").get<bool>();
    const ordered_json& md = doc.at("min_dist");
    if (md.is_string()) {
      if (md.get<std::string>() != "inf")
        bad_line(line_no, "min_dist string must be \"inf\"");
      out.run.min_dist = std::numeric_limits<double>::infinity();
    } else {
      out.run.min_dist = md.get<double>();
    }
  } catch (const std::invalid_argument&) {
    throw;
  } catch (const std::exception& e) {
    bad_line(line_no, std::string("missing or ill-typed field (") + e.what() + ")");
  }
  return out;
}

}  // namespace

std::vector<LoadedRecord> parse_records(const std::string& jsonl_text) {
  std::vector<LoadedRecord> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= jsonl_text.size()) {
    std::size_t nl = jsonl_text.find('\n', pos);
    std::string line = jsonl_text.substr(
        pos, nl == std::string::npos ? std::string::npos : nl - pos);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") != std::string::npos)
      out.push_back(parse_record_line(line, line_no));
    if (nl == std::string::npos) break;
    pos = nl + 1;
  }
  return out;
}

std::vector<LoadedRecord> load_records(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_records(ss.str());
}

std::string report_to_json_text(const std::vector<GroupReport>& groups) {
  ordered_json doc;
  doc["report_version"] = 1;
  ordered_json arr = ordered_json::array();
  for (const GroupReport& g : groups) {
    ordered_json jg;
    jg["key"] = g.key;
    ordered_json summaries = ordered_json::array();
    for (const MetricSummary& s : g.summaries) {
      ordered_json js;
      js["metric"] = s.metric;
      js["arm"] = s.arm;
      js["runs"] = s.runs;
      js["mean"] = s.mean;
      js["median"] = s.median;
      js["std_dev"] = s.std_dev;
      js["min"] = s.min;
      js["max"] = s.max;
      summaries.push_back(std::move(js));
    }
    jg["summaries"] = std::move(summaries);
    ordered_json tests = ordered_json::array();
    for (const TestLine& t : g.tests) {
      ordered_json jt;
      jt["metric"] = t.metric;
      jt["test"] = t.test;
      jt["skipped"] = t.skipped;
      if (t.skipped) {
        jt["note"] = t.note;
      } else {
        jt["statistic"] = t.statistic;
        jt["p"] = t.p;
        jt["exact"] = t.exact;
      }
      tests.push_back(std::move(jt));
    }
    jg["tests"] = std::move(tests);
    arr.push_back(std::move(jg));
  }
  doc["groups"] = std::move(arr);
  return doc.dump(2) + "\n";
}

namespace {

// R-7 linear interpolation, the spreadsheet/matplotlib convention.
double quantile_sorted(const std::vector<double>& v, double q) {
  if (v.empty()) return 0.0;
  double h = q * static_cast<double>(v.size() - 1);
  std::size_t lo = static_cast<std::size_t>(h);
  if (lo + 1 >= v.size()) return v.back();
  double frac = h - static_cast<double>(lo);
  return v[lo] + frac * (v[lo + 1] - v[lo]);
}

}  // namespace

std::string plot_data_csv(std::span<const StatsRun> runs, GroupKey group_by,
                          const std::string& metric) {
  auto pick = [&metric](const StatsRun& r,
                        std::vector<double>& dst) {
    if (metric == "Crashes") {
      dst.push_back(static_cast<double>(r.crashes));
    } else if (metric == "Progress") {
      dst.push_back(r.progress);
    } else if (metric == "Success") {
      dst.push_back(r.success ? 1.0 : 0.0);
    } else if (metric == "Min.Dist.") {
      if (r.success) dst.push_back(r.min_dist);
    } else {
      throw std::invalid_argument("unknown plot metric: " + metric);
    }
  };

  // Same facet membership as summarize(): with t_est grouping the
  // disabled runs are the shared baseline in every facet.
  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> facets;
  if (group_by == GroupKey::t_est) {
    for (const StatsRun& r : runs)
      if (r.enabled) pick(r, facets[facet_label(group_by, r)].first);
    if (facets.empty()) facets["all"];
    for (const StatsRun& r : runs)
      if (!r.enabled)
        for (auto& [label, arms] : facets) pick(r, arms.second);
  } else {
    for (const StatsRun& r : runs) {
      auto& arms = facets[facet_label(group_by, r)];
      pick(r, r.enabled ? arms.first : arms.second);
    }
  }

  std::string out;
  out += "# trustmhe plot-data v1\n";
  out += "group,arm,n,min,q1,median,q3,max,mean\n";
  auto emit = [&out](const std::string& label, const char* arm,
                     std::vector<double>& vals) {
    if (vals.empty()) return;
    std::sort(vals.begin(), vals.end());
    double mean = 0.0;
    for (double v : vals) mean += v;
    mean /= static_cast<double>(vals.size());
    out += label;
    out += ',';
    out += arm;
    out += ',';
    out += std::to_string(vals.size());
    for (double q : {vals.front(), quantile_sorted(vals, 0.25),
                     quantile_sorted(vals, 0.5), quantile_sorted(vals, 0.75),
                     vals.back(), mean}) {
      out += ',';
      out += fmt_fixed(q, 6);
    }
    out += '\n';
  };
  for (auto& [label, arms] : facets) {
    emit(label, "enabled", arms.first);
    emit(label, "disabled", arms.second);
  }
  return out;
}

}  // namespace trustmhe
