#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "trustmhe/route.hpp"
#include "trustmhe/traffic.hpp"
#include "trustmhe/types.hpp"

namespace trustmhe {

struct ScenarioConfig {
  std::string name;
  Route route;
  EgoState ego_spawn;
  std::vector<AgentScript> agents;
  double duration_s{100.0};
  double v_des_cap{15.0};        // ego desired-speed cap [m/s]
  double attention_radius{50.0}; // agents beyond it are neither predicted nor measured as attended [m]
  double d_bar{10.0};            // inter-agent closeness scale [m]
  double margin{0.125};          // ego length inflation per end in the traffic cost [m]
};

enum class ScenarioId { overtaking, junction, urban };

ScenarioId scenario_from_string(const std::string& name);
const char* to_string(ScenarioId id);

// Builds one of the three built-in scenarios. The seed perturbs agent
// speeds and spawn timings through a dedicated jitter stream, so each
// seed is a distinct but reproducible episode of the same situation.
ScenarioConfig make_scenario(ScenarioId id, std::uint64_t seed);

}  // namespace trustmhe
