#pragma once

#include <optional>
#include <vector>

#include "trustmhe/route.hpp"
#include "trustmhe/types.hpp"

namespace trustmhe {

struct TimedWaypoint {
  double t{0.0};  // [s]
  Vec2 pos;
};

// One scripted traffic participant. Exactly one behavior must be set:
// either `path` (route follower) or `replay` (timed waypoint playback).
//
// Route followers track `desired_speed` along their polyline and, when
// `follow_group` >= 0, keep a longitudinal gap to the nearest group member
// ahead. Members of one follow group must share the same path so that
// arclength comparisons are meaningful. Replay agents are active between
// their first and last waypoint times and ignore the longitudinal model.
struct AgentScript {
  int id{0};
  double width{2.0};   // [m]
  double length{5.0};  // [m]
  double spawn_time{0.0};  // [s], route followers only

  std::vector<Vec2> path;
  double start_s{0.0};                  // initial arclength [m]
  std::optional<double> start_speed;    // defaults to desired_speed
  double desired_speed{8.0};            // [m/s], within [4, 30]
  double desired_gap{8.0};              // bumper-to-bumper [m]
  double max_accel{2.0};                // [m/s^2]
  double max_decel{4.0};                // [m/s^2]
  int follow_group{-1};

  std::vector<TimedWaypoint> replay;
};

// Scripted traffic, advanced on the fine physics tick. Agents never react
// to the ego vehicle; avoiding them is entirely the planner's problem.
// The world is a value type: copying it yields an independent future,
// which is how ground-truth lookahead predictions are produced.
class TrafficWorld {
 public:
  TrafficWorld(std::vector<AgentScript> scripts, double dt);

  void step();
  double time() const { return static_cast<double>(tick_) * dt_; }
  std::int64_t tick() const { return tick_; }
  double dt() const { return dt_; }

  // Active agents in script order.
  std::vector<AgentState> agent_states() const;
  std::optional<AgentState> agent_state(int id) const;
  std::size_t script_count() const { return scripts_.size(); }
  const std::vector<AgentScript>& scripts() const { return scripts_; }

 private:
  struct Body {
    bool replay{false};
    Polyline path;
    double s{0.0};
    double v{0.0};
    bool done{false};
  };

  bool active(std::size_t i) const;
  AgentState state_of(std::size_t i) const;
  double lead_gap(std::size_t i) const;

  std::vector<AgentScript> scripts_;
  std::vector<Body> bodies_;
  double dt_{0.005};
  std::int64_t tick_{0};
};

}  // namespace trustmhe
