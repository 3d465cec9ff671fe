#include "trustmhe/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <unordered_set>

namespace trustmhe {

namespace {

void validate_script(const AgentScript& s) {
  const std::string tag = "agent " + std::to_string(s.id) + ": ";
  if (!(s.width > 0.0) || !(s.length > 0.0))
    throw std::invalid_argument(tag + "width and length must be positive");
  const bool has_path = !s.path.empty();
  const bool has_replay = !s.replay.empty();
  if (has_path == has_replay)
    throw std::invalid_argument(tag + "exactly one of path or replay must be set");
  if (has_path) {
    if (s.path.size() < 2) throw std::invalid_argument(tag + "path needs at least 2 points");
    if (!(s.desired_speed >= 4.0 && s.desired_speed <= 30.0))
      throw std::invalid_argument(tag + "desired speed outside [4, 30] m/s");
    if (!(s.desired_gap > 0.0) || !(s.max_accel > 0.0) || !(s.max_decel > 0.0))
      throw std::invalid_argument(tag + "longitudinal parameters must be positive");
    if (!(s.start_s >= 0.0)) throw std::invalid_argument(tag + "start_s must be >= 0");
    if (s.start_speed && !(*s.start_speed >= 0.0))
      throw std::invalid_argument(tag + "start speed must be >= 0");
    if (!(s.spawn_time >= 0.0)) throw std::invalid_argument(tag + "spawn time must be >= 0");
  } else {
    if (s.replay.size() < 2) throw std::invalid_argument(tag + "replay needs at least 2 waypoints");
    for (std::size_t i = 1; i < s.replay.size(); ++i)
      if (!(s.replay[i].t > s.replay[i - 1].t))
        throw std::invalid_argument(tag + "replay times must be strictly increasing");
    if (s.follow_group >= 0)
      throw std::invalid_argument(tag + "replay agents cannot join a follow group");
  }
}

}  // namespace

TrafficWorld::TrafficWorld(std::vector<AgentScript> scripts, double dt)
    : scripts_(std::move(scripts)), dt_(dt) {
  if (!(dt_ > 0.0)) throw std::invalid_argument("traffic dt must be positive");
  std::unordered_set<int> ids;
  for (const AgentScript& s : scripts_) {
    validate_script(s);
    if (!ids.insert(s.id).second)
      throw std::invalid_argument("duplicate agent id " + std::to_string(s.id));
  }
  for (std::size_t i = 0; i < scripts_.size(); ++i)
    for (std::size_t j = i + 1; j < scripts_.size(); ++j) {
      const AgentScript& a = scripts_[i];
      const AgentScript& b = scripts_[j];
      if (a.follow_group >= 0 && a.follow_group == b.follow_group && a.path != b.path)
        throw std::invalid_argument("follow group " + std::to_string(a.follow_group) +
                                    " members must share one path");
    }

  bodies_.reserve(scripts_.size());
  for (const AgentScript& s : scripts_) {
    Body b;
    if (!s.replay.empty()) {
      b.replay = true;
    } else {
      b.path = Polyline(s.path);
      if (!(s.start_s < b.path.length()))
        throw std::invalid_argument("agent " + std::to_string(s.id) +
                                    ": start_s beyond path end");
      b.s = s.start_s;
      b.v = s.start_speed.value_or(s.desired_speed);
    }
    bodies_.push_back(std::move(b));
  }
}

bool TrafficWorld::active(std::size_t i) const {
  const AgentScript& s = scripts_[i];
  const Body& b = bodies_[i];
  if (b.replay) {
    const double t = time();
    return t >= s.replay.front().t && t <= s.replay.back().t;
  }
  return !b.done && time() >= s.spawn_time;
}

double TrafficWorld::lead_gap(std::size_t i) const {
  const AgentScript& self = scripts_[i];
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < scripts_.size(); ++j) {
    if (j == i || !active(j)) continue;
    const AgentScript& other = scripts_[j];
    if (other.follow_group != self.follow_group) continue;
    const double ds = bodies_[j].s - bodies_[i].s;
    if (ds <= 0.0) continue;
    best = std::min(best, ds - 0.5 * (self.length + other.length));
  }
  return best;
}

void TrafficWorld::step() {
  // Gaps are evaluated against the pre-step positions of every agent so
  // the update is order-independent within a tick.
  std::vector<double> gaps(scripts_.size(), std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < scripts_.size(); ++i)
    if (!bodies_[i].replay && scripts_[i].follow_group >= 0 && active(i))
      gaps[i] = lead_gap(i);

  for (std::size_t i = 0; i < scripts_.size(); ++i) {
    Body& b = bodies_[i];
    if (b.replay || !active(i)) continue;
    const AgentScript& s = scripts_[i];
    const double ratio = b.v / s.desired_speed;
    double a = 1.0 - ratio * ratio;
    if (std::isfinite(gaps[i])) {
      const double gap = std::max(gaps[i], 0.1);
      a -= (s.desired_gap / gap) * (s.desired_gap / gap);
    }
    a = std::clamp(a * s.max_accel, -s.max_decel, s.max_accel);
    // Semi-implicit Euler: the updated speed moves the position, which
    // keeps the gap controller from oscillating at this step size.
    b.v = std::clamp(b.v + a * dt_, 0.0, 30.0);
    b.s += b.v * dt_;
    if (b.s >= b.path.length()) b.done = true;
  }
  ++tick_;
}

AgentState TrafficWorld::state_of(std::size_t i) const {
  const AgentScript& s = scripts_[i];
  const Body& b = bodies_[i];
  AgentState out;
  out.id = s.id;
  out.width = s.width;
  out.length = s.length;
  if (b.replay) {
    const double t = time();
    std::size_t k = 1;
    while (k + 1 < s.replay.size() && s.replay[k].t < t) ++k;
    const TimedWaypoint& w0 = s.replay[k - 1];
    const TimedWaypoint& w1 = s.replay[k];
    const double span = w1.t - w0.t;
    const double u = std::clamp((t - w0.t) / span, 0.0, 1.0);
    const Vec2 p = w0.pos + u * (w1.pos - w0.pos);
    const Vec2 d = w1.pos - w0.pos;
    out.x = p.x;
    out.y = p.y;
    out.v = norm(d) / span;
    out.yaw = (norm2(d) > 0.0) ? std::atan2(d.y, d.x) : 0.0;
  } else {
    const Vec2 p = b.path.position_at(b.s);
    out.x = p.x;
    out.y = p.y;
    out.v = b.v;
    out.yaw = b.path.yaw_at(b.s);
  }
  return out;
}

std::vector<AgentState> TrafficWorld::agent_states() const {
  std::vector<AgentState> out;
  out.reserve(scripts_.size());
  for (std::size_t i = 0; i < scripts_.size(); ++i)
    if (active(i)) out.push_back(state_of(i));
  return out;
}

std::optional<AgentState> TrafficWorld::agent_state(int id) const {
  for (std::size_t i = 0; i < scripts_.size(); ++i)
    if (scripts_[i].id == id && active(i)) return state_of(i);
  return std::nullopt;
}

}  // namespace trustmhe
