#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "trustmhe/costs.hpp"
#include "trustmhe/predictors.hpp"
#include "trustmhe/scenario.hpp"

namespace trustmhe {

// Which forecast source feeds the planner's social cost. `blended` is the
// production path; the pure arms are bit-exact references for it.
enum class CostSource { blended, ai_only, cv_only };

CostSource cost_source_from_string(const std::string& name);
const char* to_string(CostSource s);

struct ExperimentConfig {
  ScenarioId scenario{ScenarioId::junction};
  PlannerMode mode{PlannerMode::balanced};
  std::uint64_t seed{0};

  bool trustmhe_enabled{true};
  int t_est{5};           // trust estimation lookback, in prediction ticks
  double beta_est{0.25};  // trust-update momentum
  double alpha_est{1.0};  // error-to-sigmoid scale [1/m]
  bool strict_ade{true};  // divide the error by modality count as well

  double dt_state{0.005};  // physics step [s]
  int replan_every{20};    // state ticks per replan
  int predict_every{50};   // state ticks per forecast round

  int k_pla{200};          // planner rollouts
  int t_pla{50};           // plan steps
  double lambda{0.02};
  double momentum{0.75};
  double sigma_steer{0.1};
  int threads{1};

  OracleParams oracle{};
  DegradationSchedule degradation{};
  bool constant_turn_fallback{false};

  CostSource cost_source{CostSource::blended};
  std::optional<double> omega_override{};  // pins the blend weight (diagnostics)

  // Throws std::invalid_argument naming the offending field.
  void validate() const;
};

struct DueTasks {
  bool physics{true};
  bool replan{false};
  bool predict{false};
  bool trustmhe{false};  // rides the prediction grid
};

// Multi-rate schedule on the fine tick: physics every tick, replanning
// every `replan_every` ticks, forecasting (and the trust update) every
// `predict_every` ticks. Everything is due at t = 0.
DueTasks schedule_tick(std::int64_t t, int replan_every, int predict_every);

// Per-agent contact debouncer. A crash opens when the boxes touch
// (distance exactly 0) and can only reopen after the separation has
// exceeded `clearance` again, so one sustained scrape counts once.
class CrashCounter {
 public:
  explicit CrashCounter(double clearance = 0.5) : clearance_(clearance) {}

  // Feeds one distance sample; true when a new crash opened.
  bool observe(int agent_id, double distance);
  int total() const { return total_; }

 private:
  double clearance_;
  int total_{0};
  std::unordered_map<int, bool> open_;
};

// One row per forecast round, sampled after that tick's physics.
struct TraceRow {
  double t{0.0};       // [s]
  double omega{1.0};   // blend weight the planner would use now
  std::optional<double> ade{};  // this round's scored error, if any
  double x{0.0};
  double y{0.0};
  double v{0.0};
  double min_dist{std::numeric_limits<double>::infinity()};  // run minimum so far
  int crashes{0};      // run total so far
};

struct RunRecord {
  int crashes{0};
  double progress{0.0};  // percent of the route arclength reached
  bool success{false};   // crashes == 0
  double min_dist{std::numeric_limits<double>::infinity()};
  double wall_s{0.0};
  bool latency_exact{true};  // every handoff matched the forward-simulated state bit for bit
  double final_omega{1.0};
  std::vector<TraceRow> trace;
};

// Runs one closed-loop episode: forecast -> trust update -> plan (from the
// ego state predicted one replan interval ahead) -> track -> physics ->
// metrics. Fully deterministic in the config, including the seed.
RunRecord run_experiment(const ExperimentConfig& cfg);

// Same loop on a caller-supplied scenario; cfg.scenario is ignored.
RunRecord run_experiment(const ExperimentConfig& cfg, const ScenarioConfig& scen);

}  // namespace trustmhe
