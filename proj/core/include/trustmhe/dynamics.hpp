#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "trustmhe/angles.hpp"
#include "trustmhe/types.hpp"

namespace trustmhe {

struct VehicleParams {
  double wheelbase = 2.5;        // [m]
  double steer_max = 0.6;        // [rad]
  double steer_rate_max = 0.4;   // [rad/s]
  double accel_max = 4.0;        // [m/s^2], symmetric
  double v_max = 30.0;           // [m/s]
  double width = 1.9;            // [m]
  double length = 4.5;           // [m]
};

// Inputs are clamped, never rejected: the sampler is free to propose
// anything and the model applies what the actuators can do.
inline ControlInput clamp_input(ControlInput u, const VehicleParams& p) {
  u.steer_rate = std::clamp(u.steer_rate, -p.steer_rate_max, p.steer_rate_max);
  u.accel = std::clamp(u.accel, -p.accel_max, p.accel_max);
  return u;
}

// One forward-Euler step of the kinematic single-track model. All
// derivatives are evaluated at the pre-step state. Steering and speed are
// clamped to their ranges afterwards; speed never goes negative.
inline EgoState step(const EgoState& s, ControlInput u, const VehicleParams& p, double dt) {
  u = clamp_input(u, p);
  EgoState n;
  n.x = s.x + dt * s.v * std::cos(s.yaw);
  n.y = s.y + dt * s.v * std::sin(s.yaw);
  n.steer = std::clamp(s.steer + dt * u.steer_rate, -p.steer_max, p.steer_max);
  n.v = std::clamp(s.v + dt * u.accel, 0.0, p.v_max);
  n.yaw = wrap_angle(s.yaw + dt * (s.v / p.wheelbase) * std::tan(s.steer));
  return n;
}

// States after each input: result[t] is the state once inputs[0..t] have
// been applied, so result.size() == inputs.size().
inline std::vector<EgoState> rollout(const EgoState& start, const std::vector<ControlInput>& inputs,
                                     const VehicleParams& p, double dt) {
  std::vector<EgoState> out;
  out.reserve(inputs.size());
  EgoState s = start;
  for (const ControlInput& u : inputs) {
    s = step(s, u, p, dt);
    out.push_back(s);
  }
  return out;
}

}  // namespace trustmhe
