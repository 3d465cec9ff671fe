#include "trustmhe/costs.hpp"

#include <cmath>
#include <stdexcept>

#include "trustmhe/angles.hpp"

namespace trustmhe {

namespace {

// Overflow-safe logistic: the exponential is always taken of a
// non-positive value.
double logistic(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

double penalty_bound(double arg, const PenaltyParams& p) {
  // log1p keeps relative accuracy when the softplus term underflows the
  // naive 1 + x sum; the cap bounds the exponential for extreme arguments.
  const double w = std::min(arg - p.shift, p.exp_cap);
  return p.penalty * (logistic(p.scale * arg) + std::log1p(p.scale * std::exp(w)));
}

PlannerMode planner_mode_from_string(const std::string& name) {
  if (name == "conservative") return PlannerMode::conservative;
  if (name == "balanced") return PlannerMode::balanced;
  if (name == "aggressive") return PlannerMode::aggressive;
  throw std::invalid_argument("unknown planner mode: " + name);
}

const char* to_string(PlannerMode m) {
  switch (m) {
    case PlannerMode::conservative: return "conservative";
    case PlannerMode::balanced: return "balanced";
    case PlannerMode::aggressive: return "aggressive";
  }
  return "?";
}

CostWeights CostWeights::mode(PlannerMode m) {
  CostWeights w;  // defaults are the balanced row
  switch (m) {
    case PlannerMode::conservative:
      w.progress = 1.0;
      w.speed = 1.0;
      break;
    case PlannerMode::balanced:
      break;
    case PlannerMode::aggressive:
      w.bound = 1.0;
      w.traffic = 1.0;
      break;
  }
  return w;
}

AgentPrediction make_agent_prediction(const PredictionSet& set, std::size_t horizon,
                                      double plan_dt, double pred_dt, double plan_offset) {
  AgentPrediction out;
  out.agent_id = set.agent_id;
  out.horizon = horizon;
  out.confidence.reserve(set.modalities.size());
  out.boxes.reserve(set.modalities.size() * horizon);
  const double w = set.origin.width;
  const double l = set.origin.length;
  for (const TrajectoryModality& m : set.modalities) {
    out.confidence.push_back(m.confidence);
    const std::size_t n = m.points.size();
    for (std::size_t t = 0; t < horizon; ++t) {
      const double at = plan_offset + static_cast<double>(t) * plan_dt;
      const auto j = static_cast<std::size_t>(
          std::max(0.0, std::round(at / pred_dt)));
      if (j == 0) {
        out.boxes.push_back(make_box_shape(
            {{set.origin.x, set.origin.y}, set.origin.yaw, l, w}));
      } else {
        const GaussianPoint& g = m.points[std::min(j, n) - 1];
        out.boxes.push_back(make_box_shape({{g.mx, g.my}, g.yaw, l, w}));
      }
    }
  }
  return out;
}

double boundary_cost(double d_lat, double lat_lo, double lat_hi, double weight,
                     const PenaltyParams& pen) {
  const double below = lat_lo - d_lat;
  const double above = d_lat - lat_hi;
  return weight * (penalty_bound(below, pen) + penalty_closeness(below) +
                   penalty_bound(above, pen) + penalty_closeness(above));
}

double traffic_cost(const BoxShape& ego, std::span<const AgentPrediction> agents, std::size_t t,
                    double d_bar, double weight, const PenaltyParams& pen) {
  double acc = 0.0;
  for (const AgentPrediction& a : agents) {
    const std::size_t k_count = a.confidence.size();
    for (std::size_t k = 0; k < k_count; ++k) {
      const BoxShape& box = a.boxes[k * a.horizon + t];
      const double d = box_distance(ego, box);
      acc += a.confidence[k] * (penalty_bound(-d, pen) + penalty_closeness(d_bar - d));
    }
  }
  return weight * acc;
}

double blended_traffic_cost(double omega, double primary, double fallback) {
  if (!(omega >= 0.0 && omega <= 1.0))
    throw std::domain_error("blend weight outside [0, 1]");
  return omega * primary + (1.0 - omega) * fallback;
}

void PlanContext::prepare(std::size_t horizon) {
  decay.resize(horizon);
  for (std::size_t t = 0; t < horizon; ++t)
    decay[t] = std::exp(-static_cast<double>(t) * weights.decay);
}

double running_cost_step(const EgoState& x, ControlInput u, std::size_t t, StepCarry& carry,
                         const PlanContext& ctx) {
  const Route& route = *ctx.route;
  const RouteProjection proj = route.project_near({x.x, x.y}, carry.hint);
  const auto [lat_lo, lat_hi] = route.lat_bounds(proj.seg_index);

  // Safety: corridor walls and proximity to predicted traffic.
  const double bound = boundary_cost(proj.d_lat, lat_lo, lat_hi, ctx.weights.bound, ctx.penalty);
  double traffic = 0.0;
  if (!ctx.primary.empty() || !ctx.fallback.empty()) {
    const BoxShape ego = make_box_shape(
        {{x.x, x.y}, x.yaw, ctx.vehicle.length + 2.0 * ctx.margin, ctx.vehicle.width});
    if (!ctx.blend || ctx.omega == 1.0) {
      traffic = traffic_cost(ego, ctx.primary, t, ctx.d_bar, ctx.weights.traffic, ctx.penalty);
    } else if (ctx.omega == 0.0) {
      traffic = traffic_cost(ego, ctx.fallback, t, ctx.d_bar, ctx.weights.traffic, ctx.penalty);
    } else {
      traffic = blended_traffic_cost(
          ctx.omega,
          traffic_cost(ego, ctx.primary, t, ctx.d_bar, ctx.weights.traffic, ctx.penalty),
          traffic_cost(ego, ctx.fallback, t, ctx.d_bar, ctx.weights.traffic, ctx.penalty));
    }
  }

  // Alignment and progress along the route.
  const double dyaw = angle_diff(x.yaw, proj.psi_ref);
  const double yaw = ctx.weights.yaw * dyaw * dyaw;
  const double window = static_cast<double>(route.window_segments());
  const double advanced =
      std::clamp((proj.s - ctx.window_anchor_s) / route.spacing(), 0.0, window);
  const double progress = ctx.weights.progress * (1.0 - advanced / window);

  // Comfort: input and lateral-offset smoothness between steps.
  const double dsr = u.steer_rate - carry.u_prev.steer_rate;
  const double dac = u.accel - carry.u_prev.accel;
  const double dlat = proj.d_lat - carry.d_lat_prev;
  const double comfort =
      ctx.weights.input_smooth * (dsr * dsr + dac * dac) + ctx.weights.lat_smooth * dlat * dlat;

  // Nominal driving: stay near the centerline at the curvature-limited
  // desired speed, never backwards.
  const double kappa = std::abs(route.curvature(proj.seg_index));
  const double v_des = kappa > 1e-12 ? std::min(ctx.v_des_cap, 2.0 / std::sqrt(kappa))
                                     : ctx.v_des_cap;
  const double dv = x.v - v_des;
  const double norm = ctx.weights.offset * proj.d_lat * proj.d_lat +
                      ctx.weights.speed * (dv * dv + penalty_bound(-x.v, ctx.penalty));

  carry.d_lat_prev = proj.d_lat;
  carry.u_prev = u;
  carry.hint = proj.seg_index;

  return ctx.decay[t] * (bound + traffic + yaw + progress + comfort + norm);
}

double rollout_cost(const EgoState& s0, std::span<const ControlInput> inputs,
                    const PlanContext& ctx) {
  StepCarry carry{ctx.init_d_lat, ctx.init_input, ctx.anchor_seg};
  EgoState x = s0;
  double total = 0.0;
  for (std::size_t t = 0; t < inputs.size(); ++t) {
    const ControlInput u = clamp_input(inputs[t], ctx.vehicle);
    total += running_cost_step(x, u, t, carry, ctx);
    x = step(x, u, ctx.vehicle, ctx.dt);
  }
  return total;
}

}  // namespace trustmhe
