#include "trustmhe/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "trustmhe/angles.hpp"

namespace trustmhe {

namespace {

EgoState lerp_state(const EgoState& a, const EgoState& b, double u) {
  EgoState out;
  out.x = a.x + u * (b.x - a.x);
  out.y = a.y + u * (b.y - a.y);
  out.v = a.v + u * (b.v - a.v);
  out.steer = a.steer + u * (b.steer - a.steer);
  out.yaw = wrap_angle(a.yaw + u * angle_diff(b.yaw, a.yaw));
  return out;
}

}  // namespace

EgoState plan_state_at(const TrackedPlan& plan, double t) {
  if (!(plan.dt > 0.0)) throw std::invalid_argument("plan dt must be positive");
  if (plan.states.empty()) return plan.start;
  const double tau = (t - plan.t0) / plan.dt;
  if (tau <= 0.0) return plan.start;
  const auto n = static_cast<double>(plan.states.size());
  if (tau >= n) return plan.states.back();
  const auto idx = static_cast<std::size_t>(tau);  // knot below, start == knot 0
  const double u = tau - static_cast<double>(idx);
  const EgoState& a = idx == 0 ? plan.start : plan.states[idx - 1];
  const EgoState& b = plan.states[idx];
  return lerp_state(a, b, u);
}

ControlInput track_trajectory(const EgoState& ego, const TrackedPlan& plan, double now_s,
                              const TrackerParams& tp, const VehicleParams& vp) {
  if (plan.states.empty() || now_s - plan.t0 > tp.stale_after_s)
    return {0.0, -vp.accel_max};

  const EgoState ref = plan_state_at(plan, now_s);
  const EgoState look = plan_state_at(plan, now_s + tp.lookahead_s);

  ControlInput u;
  const double dx = look.x - ego.x;
  const double dy = look.y - ego.y;
  const double dist = std::hypot(dx, dy);
  double steer_des = 0.0;
  if (dist > std::max(tp.min_lookahead, 1e-6)) {
    const double alpha = angle_diff(std::atan2(dy, dx), ego.yaw);
    steer_des = std::atan(2.0 * vp.wheelbase * std::sin(alpha) / dist);
  } else {
    // Preview collapsed onto the ego (plan end or standstill): hold the
    // planned steering instead of chasing a degenerate geometry.
    steer_des = ref.steer;
  }
  steer_des = std::clamp(steer_des, -vp.steer_max, vp.steer_max);
  u.steer_rate = tp.steer_gain * (steer_des - ego.steer);
  u.accel = tp.speed_gain * (ref.v - ego.v);
  return clamp_input(u, vp);
}

}  // namespace trustmhe
