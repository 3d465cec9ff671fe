// Command-line front end: single runs, seeded sweeps over the experiment
// matrix, and statistics reports over the accumulated results table.

#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "trustmhe/config.hpp"
#include "trustmhe/io.hpp"
#include "trustmhe/simloop.hpp"
#include "trustmhe/stats.hpp"

namespace fs = std::filesystem;
using namespace trustmhe;

namespace {

std::string default_out_dir() {
  const char* env = std::getenv("TRUSTMHE_OUT");
  return (env && *env) ? env : ".";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Base config text -> overrides -> validated config.
ExperimentConfig resolve_config(const std::string& config_path,
                                const std::vector<std::string>& sets) {
  std::string text = config_path.empty() ? default_config_text() : read_file(config_path);
  for (const std::string& s : sets) text = apply_override(text, s);
  return parse_config(text);
}

void append_line(const std::string& path, const std::string& line) {
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw std::runtime_error("cannot open for appending: " + path);
  out << line << '\n';
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<std::string> split_csv(const std::string& text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t comma = text.find(',', start);
    std::string item = text.substr(
        start, comma == std::string::npos ? std::string::npos : comma - start);
    if (!item.empty()) out.push_back(item);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

int cmd_run(const std::string& config_path, const std::vector<std::string>& sets,
            std::optional<std::uint64_t> seed, std::optional<int> jobs,
            const std::string& out_dir) {
  std::vector<std::string> all_sets = sets;
  if (seed) all_sets.push_back("seed=" + std::to_string(*seed));
  if (jobs) all_sets.push_back("planner.threads=" + std::to_string(*jobs));
  ExperimentConfig cfg = resolve_config(config_path, all_sets);

  fs::create_directories(out_dir);
  const std::string records_path = (fs::path(out_dir) / "records.jsonl").string();
  const std::string hash = config_hash_hex(cfg);

  RunRecord rec;
  try {
    rec = run_experiment(cfg);
  } catch (const std::exception& e) {
    append_line(records_path, aborted_record_to_line(cfg, e.what()));
    std::cerr << "error: run aborted: " << e.what() << "\n";
    return 1;
  }

  const std::string trace_path = (fs::path(out_dir) / ("trace_" + hash + ".csv")).string();
  write_text_file(trace_path, trace_to_text(rec));
  append_line(records_path, record_to_line(rec, cfg));

  std::cout << "run " << to_string(cfg.scenario) << " seed=" << cfg.seed
            << " trustmhe=" << (cfg.trustmhe_enabled ? "on" : "off")
            << " crashes=" << rec.crashes
            << " progress=" << fmt_fixed(rec.progress, 1)
            << " min_dist=" << fmt_fixed(rec.min_dist, 3)
            << " final_omega=" << fmt_fixed(rec.final_omega, 3)
            << " wall_s=" << fmt_fixed(rec.wall_s, 2) << "\n"
            << "trace: " << trace_path << "\n"
            << "record: " << records_path << "\n";
  return 0;
}

struct SweepJob {
  ExperimentConfig cfg;
  std::string label;
};

int cmd_sweep(const std::string& config_path, const std::vector<std::string>& sets,
              const std::string& scenarios_csv, const std::string& modes_csv,
              const std::string& noises_csv, const std::string& arms_csv,
              int seeds, std::uint64_t seed_base, int jobs,
              const std::string& out_dir) {
  const auto scenarios = split_csv(scenarios_csv);
  const auto modes = split_csv(modes_csv);
  const auto noises = split_csv(noises_csv);
  const auto arms = split_csv(arms_csv);
  if (scenarios.empty() || modes.empty() || noises.empty() || arms.empty() || seeds < 1) {
    std::cerr << "error: every sweep axis needs at least one value\n";
    return 2;
  }

  fs::create_directories(out_dir);
  const std::string records_path = (fs::path(out_dir) / "records.jsonl").string();

  // Hashes of completed runs: those rows are final. Aborted rows retry.
  std::set<std::string> done;
  if (fs::exists(records_path))
    for (const LoadedRecord& r : load_records(records_path))
      if (!r.aborted) done.insert(r.config_hash);

  std::vector<SweepJob> jobs_list;
  int poisoned = 0;
  int skipped = 0;
  for (const std::string& scen : scenarios)
    for (const std::string& mode : modes)
      for (const std::string& noise : noises)
        for (const std::string& arm : arms)
          for (int i = 0; i < seeds; ++i) {
            std::vector<std::string> combo = sets;
            combo.push_back("scenario=" + scen);
            combo.push_back("mode=" + mode);
            combo.push_back("planner.sigma_steer=" + noise);
            if (arm == "off") {
              combo.push_back("trustmhe.enabled=false");
            } else {
              combo.push_back("trustmhe.enabled=true");
              combo.push_back("trustmhe.t_est=" + arm);
            }
            combo.push_back("seed=" + std::to_string(seed_base + static_cast<std::uint64_t>(i)));
            std::string label = scen + "/" + mode + "/noise=" + noise + "/arm=" + arm +
                                "/seed=" + std::to_string(seed_base + static_cast<std::uint64_t>(i));
            try {
              ExperimentConfig cfg = resolve_config(config_path, combo);
              if (done.count(config_hash_hex(cfg))) {
                ++skipped;
                continue;
              }
              jobs_list.push_back({std::move(cfg), std::move(label)});
            } catch (const std::exception& e) {
              // A combination that never makes a valid config cannot be
              // recorded (there is nothing to echo); flag it and move on.
              std::cerr << "error: " << label << ": " << e.what() << "\n";
              ++poisoned;
            }
          }

  std::cout << "sweep: " << jobs_list.size() << " runs to execute, " << skipped
            << " already done, " << poisoned << " invalid\n";

  std::mutex io_mutex;
  std::atomic<std::size_t> next{0};
  std::atomic<int> aborted{0};
  std::atomic<int> completed{0};

  auto worker = [&]() {
    while (true) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= jobs_list.size()) return;
      const SweepJob& job = jobs_list[idx];
      std::string line;
      std::string status;
      try {
        RunRecord rec = run_experiment(job.cfg);
        line = record_to_line(rec, job.cfg);
        status = "crashes=" + std::to_string(rec.crashes) +
                 " progress=" + fmt_fixed(rec.progress, 1);
        completed.fetch_add(1);
      } catch (const std::exception& e) {
        line = aborted_record_to_line(job.cfg, e.what());
        status = std::string("ABORTED: ") + e.what();
        aborted.fetch_add(1);
      }
      std::lock_guard<std::mutex> lock(io_mutex);
      append_line(records_path, line);
      std::cout << "[" << (completed.load() + aborted.load()) << "/"
                << jobs_list.size() << "] " << job.label << " " << status << "\n";
    }
  };

  const int pool = std::max(1, jobs);
  std::vector<std::thread> threads;
  threads.reserve(static_cast<std::size_t>(pool) - 1);
  for (int i = 1; i < pool; ++i) threads.emplace_back(worker);
  worker();
  for (std::thread& t : threads) t.join();

  std::cout << "sweep finished: " << completed.load() << " completed, "
            << aborted.load() << " aborted, " << poisoned << " invalid, "
            << skipped << " skipped\n"
            << "records: " << records_path << "\n";
  return (aborted.load() > 0 || poisoned > 0) ? 3 : 0;
}

int cmd_stats(const std::string& records_path, const std::string& group_by,
              const std::string& out_dir) {
  std::vector<LoadedRecord> loaded = load_records(records_path);
  std::vector<StatsRun> runs;
  int aborted = 0;
  for (const LoadedRecord& r : loaded) {
    if (r.aborted)
      ++aborted;
    else
      runs.push_back(r.run);
  }
  if (aborted > 0)
    std::cerr << "note: skipping " << aborted << " aborted row(s)\n";
  if (runs.empty()) {
    std::cerr << "error: no completed runs in " << records_path << "\n";
    return 2;
  }

  const GroupKey key = group_key_from_string(group_by);
  const auto groups = summarize(runs, key);
  std::cout << format_report(groups);

  fs::create_directories(out_dir);
  const std::string report_path = (fs::path(out_dir) / "report.json").string();
  write_text_file(report_path, report_to_json_text(groups));

  const std::pair<const char*, const char*> metrics[] = {
      {"Crashes", "crashes"},
      {"Progress", "progress"},
      {"Success", "success"},
      {"Min.Dist.", "min_dist"},
  };
  std::cout << "report: " << report_path << "\n";
  for (const auto& [metric, slug] : metrics) {
    const std::string path =
        (fs::path(out_dir) / ("plot_" + std::string(slug) + ".csv")).string();
    write_text_file(path, plot_data_csv(runs, key, metric));
    std::cout << "plot-data: " << path << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"trust-gated forecast blending experiment harness"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> sets;
  std::string out_dir = default_out_dir();

  auto* run = app.add_subcommand("run", "execute one closed-loop episode");
  std::optional<std::uint64_t> run_seed;
  std::optional<int> run_jobs;
  run->add_option("--config", config_path, "config file (JSON); defaults built in");
  run->add_option("--set", sets, "override, dotted.path=value")->take_all();
  run->add_option("--seed", run_seed, "run seed (overrides config and --set)");
  run->add_option("--jobs", run_jobs, "planner rollout threads");
  run->add_option("--out", out_dir, "output directory (default $TRUSTMHE_OUT or .)");

  auto* sweep = app.add_subcommand("sweep", "run the seeded experiment matrix");
  std::string scenarios_csv = "junction";
  std::string modes_csv = "balanced";
  std::string noises_csv = "0.1";
  std::string arms_csv = "off,1,3,5,15,30";
  int seeds = 30;
  std::uint64_t seed_base = 100;
  int jobs = 1;
  sweep->add_option("--config", config_path, "base config file (JSON)");
  sweep->add_option("--set", sets, "override applied to every run")->take_all();
  sweep->add_option("--scenarios", scenarios_csv, "comma-separated scenario names");
  sweep->add_option("--modes", modes_csv, "comma-separated planner modes");
  sweep->add_option("--noises", noises_csv, "comma-separated steering sigmas");
  sweep->add_option("--arms", arms_csv, "comma-separated arms: off or a horizon");
  sweep->add_option("--seeds", seeds, "seeds per combination");
  sweep->add_option("--seed-base", seed_base, "first seed value");
  sweep->add_option("--jobs", jobs, "parallel workers");
  sweep->add_option("--out", out_dir, "output directory (default $TRUSTMHE_OUT or .)");

  auto* stats = app.add_subcommand("stats", "summarize a results table");
  std::string records_path;
  std::string group_by = "none";
  stats->add_option("--records", records_path, "results table (records.jsonl)");
  stats->add_option("--group-by", group_by, "facet key: t_est|mode|noise|scenario")
      ->check(CLI::IsMember({"none", "t_est", "mode", "noise", "scenario"}));
  stats->add_option("--out", out_dir, "output directory (default $TRUSTMHE_OUT or .)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path, sets, run_seed, run_jobs, out_dir);
    if (sweep->parsed())
      return cmd_sweep(config_path, sets, scenarios_csv, modes_csv, noises_csv,
                       arms_csv, seeds, seed_base, jobs, out_dir);
    if (records_path.empty())
      records_path = (fs::path(out_dir) / "records.jsonl").string();
    return cmd_stats(records_path, group_by, out_dir);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
