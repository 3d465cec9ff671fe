#include "trustmhe/predictors.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "trustmhe/angles.hpp"
#include "trustmhe/rng.hpp"

namespace trustmhe {

namespace {

void check_grid(int horizon, double dt) {
  if (horizon < 1) throw std::invalid_argument("prediction horizon must be >= 1");
  if (!(dt > 0.0)) throw std::invalid_argument("prediction dt must be positive");
}

}  // namespace

PredictionSet predict_constant_velocity(const AgentState& agent, std::int64_t generated_at,
                                        int horizon, double dt, double sigma) {
  check_grid(horizon, dt);
  PredictionSet set;
  set.agent_id = agent.id;
  set.generated_at = generated_at;
  set.origin = agent;
  TrajectoryModality m;
  m.confidence = 1.0;
  m.points.reserve(static_cast<std::size_t>(horizon));
  const Vec2 dir{std::cos(agent.yaw), std::sin(agent.yaw)};
  for (int t = 1; t <= horizon; ++t) {
    GaussianPoint g;
    g.mx = agent.x + t * dt * agent.v * dir.x;
    g.my = agent.y + t * dt * agent.v * dir.y;
    g.sx = sigma;
    g.sy = sigma;
    g.rho = 0.0;
    g.yaw = agent.yaw;
    m.points.push_back(g);
  }
  set.modalities.push_back(std::move(m));
  return set;
}

PredictionSet CvPredictor::predict(const AgentState& agent, double now_s,
                                   std::int64_t generated_at, int horizon, double dt) {
  check_grid(horizon, dt);
  double rate = 0.0;
  if (constant_turn_) {
    auto it = last_.find(agent.id);
    if (it != last_.end() && now_s > it->second.t)
      rate = angle_diff(agent.yaw, it->second.yaw) / (now_s - it->second.t);
    last_[agent.id] = {now_s, agent.yaw};
  }
  if (rate == 0.0) return predict_constant_velocity(agent, generated_at, horizon, dt, sigma_);

  PredictionSet set;
  set.agent_id = agent.id;
  set.generated_at = generated_at;
  set.origin = agent;
  TrajectoryModality m;
  m.confidence = 1.0;
  m.points.reserve(static_cast<std::size_t>(horizon));
  double x = agent.x;
  double y = agent.y;
  double yaw = agent.yaw;
  for (int t = 1; t <= horizon; ++t) {
    x += agent.v * std::cos(yaw) * dt;
    y += agent.v * std::sin(yaw) * dt;
    yaw = wrap_angle(yaw + rate * dt);
    GaussianPoint g;
    g.mx = x;
    g.my = y;
    g.sx = sigma_;
    g.sy = sigma_;
    g.rho = 0.0;
    g.yaw = yaw;
    m.points.push_back(g);
  }
  set.modalities.push_back(std::move(m));
  return set;
}

OraclePredictor::OraclePredictor(const OracleParams& params, const DegradationSchedule& schedule,
                                 std::uint64_t master_seed)
    : params_(params), schedule_(schedule), seed_(master_seed) {
  check_grid(params_.horizon, params_.dt);
  if (params_.k_pre < 1) throw std::invalid_argument("modality count must be >= 1");
  if (!(params_.conf_ratio > 0.0 && params_.conf_ratio <= 1.0))
    throw std::invalid_argument("confidence ratio must be in (0, 1]");
  if (!(params_.sigma > 0.0)) throw std::invalid_argument("reported sigma must be positive");
  if (!(params_.base_noise >= 0.0) || !(params_.lat_spread >= 0.0) ||
      !(params_.lon_spread >= 0.0) || !(params_.speed_spread >= 0.0))
    throw std::invalid_argument("noise scales must be >= 0");
  if (!(schedule_.sigma_deg >= 0.0))
    throw std::invalid_argument("degradation noise must be >= 0");
}

std::vector<PredictionSet> OraclePredictor::predict(const TrafficWorld& world,
                                                    std::span<const int> ids,
                                                    std::int64_t pred_tick) const {
  const double steps = params_.dt / world.dt();
  const auto fine_per = static_cast<std::int64_t>(std::llround(steps));
  if (fine_per < 1 || std::abs(steps - static_cast<double>(fine_per)) > 1e-9)
    throw std::invalid_argument("prediction dt must be an integer multiple of the world dt");

  const std::size_t n = ids.size();
  const std::size_t horizon = static_cast<std::size_t>(params_.horizon);
  std::vector<AgentState> last(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto s = world.agent_state(ids[i]);
    if (!s) throw std::invalid_argument("agent " + std::to_string(ids[i]) +
                                        " is not active at prediction time");
    last[i] = *s;
  }

  // Scripted ground truth: run a private copy of the world forward and
  // sample it on the prediction grid. Agents that despawn mid-horizon hold
  // their final pose.
  std::vector<std::vector<AgentState>> future(n, std::vector<AgentState>(horizon));
  TrafficWorld clone = world;
  for (std::size_t t = 0; t < horizon; ++t) {
    for (std::int64_t f = 0; f < fine_per; ++f) clone.step();
    for (std::size_t i = 0; i < n; ++i) {
      if (auto s = clone.agent_state(ids[i])) last[i] = *s;
      future[i][t] = last[i];
    }
  }

  const bool degraded = schedule_.active(world.time());
  const double cb = std::cos(schedule_.heading_bias);
  const double sb = std::sin(schedule_.heading_bias);

  std::vector<PredictionSet> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const AgentState origin = *world.agent_state(ids[i]);
    const Vec2 pos0{origin.x, origin.y};
    const std::uint64_t key = agent_tick_index(ids[i], pred_tick);
    auto noise = substream(seed_, Stream::oracle_noise, key);
    auto shape = substream(seed_, Stream::modality_shape, key);

    PredictionSet set;
    set.agent_id = ids[i];
    set.generated_at = world.tick();
    set.origin = origin;
    set.modalities.resize(static_cast<std::size_t>(params_.k_pre));

    // Modality 1: ground truth plus an accumulating position walk.
    {
      TrajectoryModality& m = set.modalities[0];
      m.points.resize(horizon);
      double wx = 0.0;
      double wy = 0.0;
      for (std::size_t t = 0; t < horizon; ++t) {
        wx += params_.base_noise * gaussian(noise);
        wy += params_.base_noise * gaussian(noise);
        m.points[t] = {future[i][t].x + wx, future[i][t].y + wy,
                       params_.sigma, params_.sigma, 0.0, future[i][t].yaw};
      }
    }
    // Alternatives: displacement rescaling plus a ramped frame offset.
    const Vec2 u{std::cos(origin.yaw), std::sin(origin.yaw)};
    const Vec2 nrm{-u.y, u.x};
    for (int k = 1; k < params_.k_pre; ++k) {
      const double off_lat = params_.lat_spread * gaussian(shape);
      const double off_lon = params_.lon_spread * gaussian(shape);
      const double scale = params_.speed_spread * gaussian(shape);
      TrajectoryModality& m = set.modalities[static_cast<std::size_t>(k)];
      m.points.resize(horizon);
      for (std::size_t t = 0; t < horizon; ++t) {
        const double ramp = static_cast<double>(t + 1) / static_cast<double>(horizon);
        const Vec2 gt{future[i][t].x, future[i][t].y};
        const Vec2 p = gt + scale * (gt - pos0) + ramp * (off_lon * u + off_lat * nrm);
        m.points[t] = {p.x, p.y, params_.sigma, params_.sigma, 0.0, future[i][t].yaw};
      }
    }

    if (degraded) {
      double wx = 0.0;
      double wy = 0.0;
      std::vector<Vec2> walk(horizon);
      for (std::size_t t = 0; t < horizon; ++t) {
        wx += schedule_.sigma_deg * gaussian(noise);
        wy += schedule_.sigma_deg * gaussian(noise);
        walk[t] = {wx, wy};
      }
      for (TrajectoryModality& m : set.modalities)
        for (std::size_t t = 0; t < horizon; ++t) {
          GaussianPoint& g = m.points[t];
          const Vec2 r = Vec2{g.mx, g.my} - pos0;
          g.mx = pos0.x + cb * r.x - sb * r.y + walk[t].x;
          g.my = pos0.y + sb * r.x + cb * r.y + walk[t].y;
          g.yaw = wrap_angle(g.yaw + schedule_.heading_bias);
        }
    }

    // Geometric confidences, highest on the ground-truth modality unless
    // the schedule shuffles them.
    double c = 1.0;
    for (int k = 0; k < params_.k_pre; ++k) {
      set.modalities[static_cast<std::size_t>(k)].confidence = c;
      c *= params_.conf_ratio;
    }
    if (degraded && schedule_.shuffle_confidences && params_.k_pre > 1) {
      for (int k = params_.k_pre - 1; k > 0; --k) {
        const int j = static_cast<int>(uniform01(noise) * (k + 1));
        std::swap(set.modalities[static_cast<std::size_t>(k)].confidence,
                  set.modalities[static_cast<std::size_t>(std::min(j, k))].confidence);
      }
    }
    normalize_confidences(set);
    out.push_back(std::move(set));
  }
  return out;
}

}  // namespace trustmhe
