#pragma once

#include <vector>

#include "trustmhe/dynamics.hpp"
#include "trustmhe/types.hpp"

namespace trustmhe {

// A committed plan: `start` holds at activation time t0, states[i] holds
// at t0 + (i+1)*dt. Queries between knots interpolate linearly (angles
// along the shorter arc) and clamp at both ends.
struct TrackedPlan {
  double t0{0.0};
  double dt{0.1};
  EgoState start;
  std::vector<EgoState> states;
};

EgoState plan_state_at(const TrackedPlan& plan, double t);

struct TrackerParams {
  double lookahead_s{0.6};    // pure-pursuit preview time
  double min_lookahead{1.0};  // floor on the preview distance [m]
  double steer_gain{4.0};     // steering-rate P gain [1/s]
  double speed_gain{1.5};     // accel P gain [1/s]
  double stale_after_s{0.2};  // two replan intervals
};

// Pure-pursuit steering toward the time-interpolated preview point plus
// proportional speed control, clamped to the input limits. A plan older
// than `stale_after_s` triggers emergency braking: full deceleration,
// zero steer rate.
ControlInput track_trajectory(const EgoState& ego, const TrackedPlan& plan, double now_s,
                              const TrackerParams& tp, const VehicleParams& vp);

}  // namespace trustmhe
