#include "trustmhe/scenario.hpp"

#include <cmath>
#include <stdexcept>

#include "trustmhe/rng.hpp"

namespace trustmhe {

ScenarioId scenario_from_string(const std::string& name) {
  if (name == "overtaking") return ScenarioId::overtaking;
  if (name == "junction") return ScenarioId::junction;
  if (name == "urban") return ScenarioId::urban;
  throw std::invalid_argument("unknown scenario: " + name);
}

const char* to_string(ScenarioId id) {
  switch (id) {
    case ScenarioId::overtaking: return "overtaking";
    case ScenarioId::junction: return "junction";
    case ScenarioId::urban: return "urban";
  }
  return "?";
}

namespace {

double jitter(std::uint64_t seed, int agent_id, double lo, double hi) {
  auto rng = substream(seed, Stream::scenario_jitter, static_cast<std::uint64_t>(agent_id));
  return uniform_range(rng, lo, hi);
}

// Second independent draw for agents that jitter two quantities.
std::pair<double, double> jitter2(std::uint64_t seed, int agent_id, double lo1, double hi1,
                                  double lo2, double hi2) {
  auto rng = substream(seed, Stream::scenario_jitter, static_cast<std::uint64_t>(agent_id));
  const double a = uniform_range(rng, lo1, hi1);
  const double b = uniform_range(rng, lo2, hi2);
  return {a, b};
}

// Crossing agent aimed to reach its conflict point (dist meters along its
// path) at the target time: spawns late or starts part-way in, whichever
// the speed requires.
AgentScript crosser(int id, std::vector<Vec2> path, double dist, double speed,
                    double target_time) {
  AgentScript s;
  s.id = id;
  s.path = std::move(path);
  s.desired_speed = speed;
  const double travel = dist / speed;
  if (travel <= target_time) {
    s.spawn_time = target_time - travel;
    s.start_s = 0.0;
  } else {
    s.spawn_time = 0.0;
    s.start_s = dist - speed * target_time;
  }
  return s;
}

ScenarioConfig make_overtaking(std::uint64_t seed) {
  Route route({{0.0, 0.0}, {600.0, 0.0}}, -1.75, 5.25, 80);
  EgoState ego;
  ego.v = 8.0;

  std::vector<Vec2> lane = {{0.0, 0.0}, {700.0, 0.0}};
  std::vector<Vec2> oncoming = {{700.0, 3.5}, {-60.0, 3.5}};

  std::vector<AgentScript> agents;
  {
    AgentScript lead;
    lead.id = 1;
    lead.path = lane;
    lead.start_s = 40.0;
    lead.desired_speed = 5.5 + jitter(seed, 1, -0.5, 0.5);
    lead.follow_group = 1;
    lead.desired_gap = 10.0;
    agents.push_back(lead);
  }
  {
    auto [ds, v] = jitter2(seed, 2, -20.0, 20.0, -0.5, 0.5);
    AgentScript lead;
    lead.id = 2;
    lead.path = lane;
    lead.start_s = 230.0 + ds;
    lead.desired_speed = 5.0 + v;
    lead.follow_group = 1;
    lead.desired_gap = 10.0;
    agents.push_back(lead);
  }
  const double spawn_targets[3] = {0.0, 14.0, 30.0};
  const double start_positions[3] = {420.0, 300.0, 250.0};
  for (int i = 0; i < 3; ++i) {
    const int id = 3 + i;
    auto [v, dt] = jitter2(seed, id, -1.0, 1.0, -3.0, 3.0);
    AgentScript on;
    on.id = id;
    on.path = oncoming;
    on.desired_speed = 8.0 + v;
    on.spawn_time = std::max(0.0, spawn_targets[i] + dt);
    on.start_s = start_positions[i];
    agents.push_back(on);
  }

  return ScenarioConfig{"overtaking", std::move(route), ego, std::move(agents),
                        100.0, 12.0, 50.0, 10.0, 0.125};
}

ScenarioConfig make_junction(std::uint64_t seed) {
  Route route({{-60.0, 0.0}, {140.0, 0.0}}, -2.0, 2.0, 80);
  EgoState ego;
  ego.x = -60.0;
  ego.v = 7.0;

  // Agent 1 crosses well ahead of the ego and mostly supplies prediction
  // evidence on the approach. Agent 2 turns left out of the cross street
  // early and cuts the corner, holding a line that overlaps the ego's lane
  // by about a meter while the two pass head-on; clearing it takes an
  // early, deliberate move to the right edge. The turn finishes while the
  // ego is still well back, so extrapolated motion reveals the overlap in
  // time for the move only if the planner is actually listening to it.
  std::vector<AgentScript> agents;
  {
    auto [v, t] = jitter2(seed, 1, -1.0, 1.0, -0.4, 0.4);
    agents.push_back(
        crosser(1, {{0.0, 55.0}, {0.0, -65.0}}, 55.0, 7.5 + v, 4.5 + t));
  }
  {
    auto [v, t] = jitter2(seed, 2, -0.4, 0.4, -0.25, 0.25);
    agents.push_back(crosser(2,
                             {{0.0, -45.0},
                              {0.0, -6.0},
                              {-0.7, -3.2},
                              {-2.2, -0.9},
                              {-4.0, 0.7},
                              {-5.0, 1.45},
                              {-75.0, 1.45}},
                             48.3, 5.8 + v, 1.8 + t));
  }

  return ScenarioConfig{"junction", std::move(route), ego, std::move(agents),
                        100.0, 8.0, 80.0, 10.0, 0.125};
}

ScenarioConfig make_urban(std::uint64_t seed) {
  // Two straights joined by a 20 m fillet at the corner.
  std::vector<Vec2> center = {{0.0, 0.0}, {70.0, 0.0}};
  for (int i = 1; i <= 9; ++i) {
    const double th = 3.14159265358979323846 / 2.0 * i / 10.0;
    center.push_back({70.0 + 20.0 * std::sin(th), 20.0 - 20.0 * std::cos(th)});
  }
  center.push_back({90.0, 20.0});
  center.push_back({90.0, 110.0});
  Route route(center, -1.75, 1.75, 80);
  EgoState ego;
  ego.v = 6.0;

  std::vector<Vec2> first_leg_oncoming = {{100.0, 3.3}, {-40.0, 3.3}};

  std::vector<AgentScript> agents;
  {
    AgentScript lead;
    lead.id = 1;
    lead.path = center;
    lead.start_s = 25.0;
    lead.desired_speed = 4.5 + jitter(seed, 1, 0.0, 0.7);
    lead.follow_group = 1;
    lead.desired_gap = 8.0;
    agents.push_back(lead);
  }
  {
    AgentScript lead;
    lead.id = 2;
    lead.path = center;
    lead.start_s = 50.0;
    lead.desired_speed = 5.0 + jitter(seed, 2, 0.0, 0.7);
    lead.follow_group = 1;
    lead.desired_gap = 8.0;
    agents.push_back(lead);
  }
  for (int i = 0; i < 2; ++i) {
    const int id = 3 + i;
    auto [v, dt] = jitter2(seed, id, -0.7, 0.7, 0.0, i == 0 ? 2.0 : 3.0);
    AgentScript on;
    on.id = id;
    on.path = first_leg_oncoming;
    on.desired_speed = 6.0 + v;
    on.spawn_time = (i == 0 ? 0.0 : 9.0) + dt;
    agents.push_back(on);
  }
  {
    auto [v, t] = jitter2(seed, 5, -1.0, 1.0, -1.0, 1.0);
    agents.push_back(
        crosser(5, {{80.0, -40.0}, {80.0, 70.0}}, 40.0, 7.0 + v, 10.0 + t));
  }
  {
    auto [v, t] = jitter2(seed, 6, -1.0, 1.0, -1.5, 1.5);
    agents.push_back(
        crosser(6, {{40.0, 55.0}, {130.0, 55.0}}, 50.0, 7.0 + v, 20.0 + t));
  }
  {
    const double t0 = 12.0 + jitter(seed, 7, 0.0, 2.0);
    AgentScript walk;
    walk.id = 7;
    walk.replay = {{t0, {115.0, 35.0}}, {t0 + 8.0, {75.0, 35.0}}};
    agents.push_back(walk);
  }
  {
    auto [v, dt] = jitter2(seed, 8, 0.0, 0.5, 0.0, 2.0);
    AgentScript lead;
    lead.id = 8;
    lead.path = {{90.0, 30.0}, {90.0, 130.0}};
    lead.desired_speed = 4.2 + v;
    lead.spawn_time = 12.0 + dt;
    agents.push_back(lead);
  }

  return ScenarioConfig{"urban", std::move(route), ego, std::move(agents),
                        35.0, 8.0, 50.0, 10.0, 0.125};
}

}  // namespace

ScenarioConfig make_scenario(ScenarioId id, std::uint64_t seed) {
  switch (id) {
    case ScenarioId::overtaking: return make_overtaking(seed);
    case ScenarioId::junction: return make_junction(seed);
    case ScenarioId::urban: return make_urban(seed);
  }
  throw std::invalid_argument("unknown scenario id");
}

}  // namespace trustmhe
