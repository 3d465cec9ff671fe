#include "trustmhe/config.hpp"

#include <stdexcept>
#include <string>

#include "doctest.h"
#include "trustmhe/simloop.hpp"

using namespace trustmhe;

namespace {

// The message carried by the exception a call throws.
template <typename Fn>
std::string thrown_message(Fn&& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

ExperimentConfig sample_config() {
  ExperimentConfig c;
  c.scenario = ScenarioId::urban;
  c.mode = PlannerMode::conservative;
  c.seed = 424242;
  c.trustmhe_enabled = false;
  c.t_est = 15;
  c.beta_est = 0.5;
  c.alpha_est = 2.0;
  c.strict_ade = false;
  c.k_pla = 64;
  c.t_pla = 40;
  c.lambda = 0.05;
  c.momentum = 0.5;
  c.sigma_steer = 0.25;
  c.threads = 4;
  c.oracle.base_noise = 0.1;
  c.degradation.onset_s = 10.0;
  c.degradation.offset_s = 40.0;
  c.degradation.heading_bias = 0.5;
  c.degradation.shuffle_confidences = true;
  c.constant_turn_fallback = true;
  c.cost_source = CostSource::blended;
  c.omega_override = 0.25;
  return c;
}

}  // namespace

TEST_CASE("config text round-trips every field") {
  ExperimentConfig c = sample_config();
  const std::string text = config_to_text(c);
  ExperimentConfig back = parse_config(text);
  CHECK(config_to_text(back) == text);
  CHECK(config_hash(back) == config_hash(c));

  CHECK(back.scenario == ScenarioId::urban);
  CHECK(back.mode == PlannerMode::conservative);
  CHECK(back.seed == 424242);
  CHECK(!back.trustmhe_enabled);
  CHECK(back.t_est == 15);
  CHECK(back.strict_ade == false);
  CHECK(back.threads == 4);
  CHECK(back.constant_turn_fallback);
  REQUIRE(back.omega_override.has_value());
  CHECK(*back.omega_override == 0.25);
}

TEST_CASE("defaults parse back to themselves and minimal input means defaults") {
  const std::string text = default_config_text();
  ExperimentConfig base;
  CHECK(config_to_text(parse_config(text)) == text);
  CHECK(config_hash(parse_config(text)) == config_hash(base));

  ExperimentConfig min = parse_config("{\"schema_version\": 1}");
  CHECK(config_hash(min) == config_hash(base));
  CHECK(!min.omega_override.has_value());
}

TEST_CASE("unknown keys are rejected by their full dotted path") {
  CHECK(thrown_message([] {
          parse_config("{\"schema_version\":1,\"planner\":{\"sigma\":0.2}}");
        }) == "unknown config key: planner.sigma");
  CHECK(thrown_message([] {
          parse_config("{\"schema_version\":1,\"bogus\":3}");
        }) == "unknown config key: bogus");
  CHECK(thrown_message([] {
          parse_config("{\"schema_version\":1,\"trustmhe\":{\"tEst\":5}}");
        }) == "unknown config key: trustmhe.tEst");
}

TEST_CASE("schema version is mandatory and pinned") {
  CHECK(thrown_message([] { parse_config("{}"); }) ==
        "missing required key: schema_version");
  CHECK(thrown_message([] { parse_config("{\"schema_version\":2}"); }) ==
        "config key schema_version: only version 1 is supported");
  CHECK(thrown_message([] { parse_config("{\"schema_version\":\"1\"}"); }) ==
        "config key schema_version: only version 1 is supported");
}

TEST_CASE("malformed input is diagnosed before field handling") {
  CHECK_THROWS_AS(parse_config("{nope"), std::invalid_argument);
  CHECK(thrown_message([] { parse_config("{nope"); })
            .find("config is not valid JSON") == 0);
  CHECK(thrown_message([] { parse_config("[1,2]"); }) ==
        "config root must be a JSON object");
}

TEST_CASE("type mismatches name the offending key") {
  CHECK(thrown_message([] {
          parse_config("{\"schema_version\":1,\"trustmhe\":{\"t_est\":2.5}}");
        }) == "config key trustmhe.t_est: expected an integer");
  CHECK(thrown_message([] {
          parse_config("{\"schema_version\":1,\"trustmhe\":{\"enabled\":1}}");
        }) == "config key trustmhe.enabled: expected a boolean");
  CHECK(thrown_message([] {
          parse_config("{\"schema_version\":1,\"seed\":-5}");
        }) == "config key seed: expected a non-negative integer");
  CHECK(thrown_message([] {
          parse_config("{\"schema_version\":1,\"trustmhe\":{\"omega_override\":\"x\"}}");
        }) == "config key trustmhe.omega_override: expected a number or null");
  CHECK(thrown_message([] {
          parse_config("{\"schema_version\":1,\"planner\":3}");
        }) == "config key planner: expected an object");
  // Enumerations surface the parse failure under the key's path.
  CHECK(thrown_message([] {
          parse_config("{\"schema_version\":1,\"scenario\":\"nowhere\"}");
        }).find("config key scenario:") == 0);
}

TEST_CASE("parsing ends with semantic validation") {
  CHECK(thrown_message([] {
          parse_config("{\"schema_version\":1,\"trustmhe\":{\"t_est\":0}}");
        }) == "t_est must be >= 1");
  // The forecast grid must stay commensurate with the physics step.
  CHECK(thrown_message([] {
          parse_config("{\"schema_version\":1,\"intervals\":{\"predict_every\":40}}");
        }) == "predict_every * dt_state must equal oracle.dt");
}

TEST_CASE("omega override distinguishes null from a pinned value") {
  ExperimentConfig a =
      parse_config("{\"schema_version\":1,\"trustmhe\":{\"omega_override\":null}}");
  CHECK(!a.omega_override.has_value());
  ExperimentConfig b =
      parse_config("{\"schema_version\":1,\"trustmhe\":{\"omega_override\":0.5}}");
  REQUIRE(b.omega_override.has_value());
  CHECK(*b.omega_override == 0.5);
}

TEST_CASE("overrides rewrite one dotted path at a time") {
  std::string text = default_config_text();
  text = apply_override(text, "seed=7");
  text = apply_override(text, "trustmhe.t_est=3");
  text = apply_override(text, "scenario=urban");  // unquoted strings pass through
  text = apply_override(text, "planner.sigma_steer=0.2");
  ExperimentConfig c = parse_config(text);
  CHECK(c.seed == 7);
  CHECK(c.t_est == 3);
  CHECK(c.scenario == ScenarioId::urban);
  CHECK(c.sigma_steer == 0.2);
}

TEST_CASE("overrides can fill in sections the base text omits") {
  std::string text = apply_override("{\"schema_version\":1}", "degradation.onset_s=1.5");
  text = apply_override(text, "degradation.shuffle_confidences=true");
  ExperimentConfig c = parse_config(text);
  CHECK(c.degradation.onset_s == 1.5);
  CHECK(c.degradation.shuffle_confidences);
}

TEST_CASE("bad overrides are rejected where the mistake is") {
  CHECK_THROWS_AS(apply_override("{}", "no_equals_sign"), std::invalid_argument);
  CHECK_THROWS_AS(apply_override("{}", "=5"), std::invalid_argument);
  CHECK(thrown_message([] {
          apply_override("{\"seed\":1}", "seed.nested=2");
        }) == "override path crosses a non-object: seed.nested");
  CHECK(thrown_message([] {
          apply_override("{}", "planner..x=1");
        }) == "override path has an empty segment: planner..x");
  // A typo'd path only surfaces when the rewritten text is parsed.
  std::string text = apply_override(default_config_text(), "planner.sigma=0.2");
  CHECK(thrown_message([&] { parse_config(text); }) ==
        "unknown config key: planner.sigma");
}

TEST_CASE("config hashes are stable, sensitive, and hex-rendered") {
  ExperimentConfig a, b;
  CHECK(config_hash(a) == config_hash(b));
  b.seed = 1;
  CHECK(config_hash(a) != config_hash(b));
  b = a;
  b.sigma_steer = 0.11;
  CHECK(config_hash(a) != config_hash(b));

  const std::string hex = config_hash_hex(a);
  CHECK(hex.size() == 16);
  CHECK(hex.find_first_not_of("0123456789abcdef") == std::string::npos);
}
