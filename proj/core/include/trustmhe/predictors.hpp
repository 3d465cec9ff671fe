#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "trustmhe/traffic.hpp"
#include "trustmhe/types.hpp"

namespace trustmhe {

// Straight-line constant-velocity prediction: one modality, confidence 1,
// point t at pos + t*dt*v*(cos yaw, sin yaw), constant reported sigma.
PredictionSet predict_constant_velocity(const AgentState& agent, std::int64_t generated_at,
                                        int horizon, double dt, double sigma = 0.1);

// Fallback predictor. By default it is the stateless function above; with
// `constant_turn` it estimates a yaw rate from the previous sighting of
// each agent and rolls the heading forward at that rate. With no history
// (or an unchanged heading) the output is identical to the pure variant.
class CvPredictor {
 public:
  explicit CvPredictor(bool constant_turn = false, double sigma = 0.1)
      : constant_turn_(constant_turn), sigma_(sigma) {}

  PredictionSet predict(const AgentState& agent, double now_s, std::int64_t generated_at,
                        int horizon, double dt);

 private:
  struct Sighting {
    double t;
    double yaw;
  };
  bool constant_turn_;
  double sigma_;
  std::unordered_map<int, Sighting> last_;
};

// Prediction-quality fault injection. The window is half-open: a batch
// generated at time t is degraded iff onset_s <= t < offset_s. The default
// (empty window) never activates.
struct DegradationSchedule {
  double onset_s{0.0};
  double offset_s{0.0};
  double sigma_deg{0.0};        // random-walk scale per prediction step [m]
  double heading_bias{0.0};     // trajectory rotation about the agent [rad]
  bool shuffle_confidences{false};

  bool active(double t) const { return t >= onset_s && t < offset_s; }
};

struct OracleParams {
  int k_pre{6};
  int horizon{50};
  double dt{0.25};           // prediction step [s]
  double base_noise{0.05};   // modality-1 random-walk scale per step [m]
  double lat_spread{1.0};    // lateral offset std of alternative modalities [m]
  double lon_spread{2.0};    // longitudinal offset std [m]
  double speed_spread{0.15}; // displacement scaling std, around 1
  double conf_ratio{0.55};   // geometric confidence decay per modality
  double sigma{0.3};         // reported per-point position std [m]
};

// Multimodal predictor that reads the scripted future: it advances a copy
// of the traffic world on the fine tick and samples it on the prediction
// grid, so modality 1 with zero base noise reproduces the realized motion
// bit for bit. Alternative modalities fan out laterally/longitudinally and
// rescale the displacement. The degradation schedule rotates trajectories,
// adds a random walk, and optionally shuffles confidences.
class OraclePredictor {
 public:
  OraclePredictor(const OracleParams& params, const DegradationSchedule& schedule,
                  std::uint64_t master_seed);

  // One PredictionSet per requested id, in the given order. Every id must
  // be active in `world`. `pred_tick` keys the noise substreams, so equal
  // (seed, id, pred_tick) triples give identical output.
  std::vector<PredictionSet> predict(const TrafficWorld& world, std::span<const int> ids,
                                     std::int64_t pred_tick) const;

  const OracleParams& params() const { return params_; }
  const DegradationSchedule& schedule() const { return schedule_; }

 private:
  OracleParams params_;
  DegradationSchedule schedule_;
  std::uint64_t seed_;
};

}  // namespace trustmhe
