#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "trustmhe/dynamics.hpp"
#include "trustmhe/geometry.hpp"
#include "trustmhe/route.hpp"
#include "trustmhe/types.hpp"

namespace trustmhe {

// Soft one-sided wall. Flat and tiny for arguments well below the shift,
// then rises about linearly with slope `penalty` per unit argument.
struct PenaltyParams {
  double penalty = 100.0;
  double scale = 25.0;
  double shift = 7.5;
  double exp_cap = 700.0;  // argument cap inside the exponential
};

double penalty_bound(double arg, const PenaltyParams& p = {});

// Closeness kernel: 1 at arg = 0, halves at arg = 1, quadratic falloff.
inline double penalty_closeness(double arg) { return 1.0 / (1.0 + arg * arg); }

enum class PlannerMode { conservative, balanced, aggressive };

PlannerMode planner_mode_from_string(const std::string& name);
const char* to_string(PlannerMode m);

struct CostWeights {
  double bound = 2.0;         // corridor violation
  double traffic = 2.0;       // predicted-agent closeness
  double yaw = 1.0;           // heading misalignment
  double yaw_rate = 1.0;      // reserved; multiplies no running term
  double progress = 2.0;      // lookahead-window advance
  double input_smooth = 1.0;  // input change between steps
  double lat_smooth = 1.0;    // lateral offset change between steps
  double yaw_sum = 1.0;       // reserved; multiplies no running term
  double offset = 1.0;        // lateral offset magnitude
  double speed = 2.0;         // deviation from desired speed
  double decay = 0.05;        // per-step exponential cost decay

  static CostWeights mode(PlannerMode m);
};

// Predicted footprints of one agent over the planning horizon, flattened
// per modality: boxes[k * horizon + t] is modality k at plan step t.
struct AgentPrediction {
  int agent_id{0};
  std::size_t horizon{0};
  std::vector<double> confidence;  // normalized, one per modality
  std::vector<BoxShape> boxes;
};

// Maps prediction points onto the plan-step time grid. plan_offset is the
// time from the batch generation instant to plan step 0; points beyond the
// prediction horizon clamp to the last point.
AgentPrediction make_agent_prediction(const PredictionSet& set, std::size_t horizon,
                                      double plan_dt, double pred_dt, double plan_offset);

// Corridor cost: both penalty primitives applied to the distances past the
// lower and upper lateral bounds.
double boundary_cost(double d_lat, double lat_lo, double lat_hi, double weight,
                     const PenaltyParams& pen);

// Confidence-weighted proximity of the ego footprint to every predicted
// agent footprint at plan step t: per modality, penalty_bound(-d) walls off
// contact and penalty_closeness(d_bar - d) shapes the approach.
double traffic_cost(const BoxShape& ego, std::span<const AgentPrediction> agents, std::size_t t,
                    double d_bar, double weight, const PenaltyParams& pen);

// Convex combination of the primary and fallback traffic costs. Throws
// std::domain_error outside [0, 1].
double blended_traffic_cost(double omega, double primary, double fallback);

// Everything the running cost needs for one planning tick. Prediction
// boxes and decay factors are precomputed here so rollouts stay allocation
// free.
struct PlanContext {
  const Route* route = nullptr;
  CostWeights weights;
  PenaltyParams penalty;
  VehicleParams vehicle;
  double dt = 0.1;             // plan step [s]
  double v_des_cap = 15.0;     // scenario speed target cap [m/s]
  double d_bar = 10.0;         // closeness scale [m]
  double margin = 0.125;       // ego length inflation per end [m]
  double window_anchor_s = 0.0;
  std::size_t anchor_seg = 0;  // projection hint at plan start
  double init_d_lat = 0.0;     // lateral offset before the first step
  ControlInput init_input;     // input before the first step
  double omega = 1.0;
  bool blend = false;          // false: primary predictions only
  std::vector<AgentPrediction> primary;
  std::vector<AgentPrediction> fallback;
  std::vector<double> decay;   // decay[t] = exp(-t * weights.decay)

  void prepare(std::size_t horizon);  // fills decay
};

// Mutable sweep state threaded through consecutive steps of one rollout.
struct StepCarry {
  double d_lat_prev = 0.0;
  ControlInput u_prev;
  std::size_t hint = 0;
};

// Cost of being in state x and applying (already clamped) input u at plan
// step t. Updates the carry for the next step.
double running_cost_step(const EgoState& x, ControlInput u, std::size_t t, StepCarry& carry,
                         const PlanContext& ctx);

// Total discounted cost of applying `inputs` from s0. Inputs are clamped
// exactly like the dynamics will clamp them.
double rollout_cost(const EgoState& s0, std::span<const ControlInput> inputs,
                    const PlanContext& ctx);

}  // namespace trustmhe
