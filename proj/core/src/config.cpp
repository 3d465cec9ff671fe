#include "trustmhe/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace trustmhe {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json to_document(const ExperimentConfig& c) {
  ordered_json j;
  j["schema_version"] = 1;
  j["scenario"] = to_string(c.scenario);
  j["mode"] = to_string(c.mode);
  j["seed"] = c.seed;
  j["cost_source"] = to_string(c.cost_source);

  auto& t = j["trustmhe"];
  t["enabled"] = c.trustmhe_enabled;
  t["t_est"] = c.t_est;
  t["beta_est"] = c.beta_est;
  t["alpha_est"] = c.alpha_est;
  t["strict_ade"] = c.strict_ade;
  if (c.omega_override)
    t["omega_override"] = *c.omega_override;
  else
    t["omega_override"] = nullptr;

  auto& iv = j["intervals"];
  iv["dt_state"] = c.dt_state;
  iv["replan_every"] = c.replan_every;
  iv["predict_every"] = c.predict_every;

  auto& p = j["planner"];
  p["rollouts"] = c.k_pla;
  p["horizon"] = c.t_pla;
  p["lambda"] = c.lambda;
  p["momentum"] = c.momentum;
  p["sigma_steer"] = c.sigma_steer;
  p["threads"] = c.threads;

  auto& o = j["oracle"];
  o["k_pre"] = c.oracle.k_pre;
  o["horizon"] = c.oracle.horizon;
  o["dt"] = c.oracle.dt;
  o["base_noise"] = c.oracle.base_noise;
  o["lat_spread"] = c.oracle.lat_spread;
  o["lon_spread"] = c.oracle.lon_spread;
  o["speed_spread"] = c.oracle.speed_spread;
  o["conf_ratio"] = c.oracle.conf_ratio;
  o["sigma"] = c.oracle.sigma;

  auto& d = j["degradation"];
  d["onset_s"] = c.degradation.onset_s;
  d["offset_s"] = c.degradation.offset_s;
  d["sigma_deg"] = c.degradation.sigma_deg;
  d["heading_bias"] = c.degradation.heading_bias;
  d["shuffle_confidences"] = c.degradation.shuffle_confidences;

  j["fallback"]["constant_turn"] = c.constant_turn_fallback;
  return j;
}

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw std::invalid_argument("config key " + path + ": " + what);
}

// Typed field extraction; absent keys keep the default already in `out`.
struct Reader {
  const ordered_json& obj;
  std::string prefix;

  const ordered_json* find(const char* key) const {
    auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
  }
  std::string path(const char* key) const { return prefix + key; }

  void number(const char* key, double& out) const {
    if (const auto* v = find(key)) {
      if (!v->is_number()) fail(path(key), "expected a number");
      out = v->get<double>();
    }
  }
  void integer(const char* key, int& out) const {
    if (const auto* v = find(key)) {
      if (!v->is_number_integer()) fail(path(key), "expected an integer");
      out = v->get<int>();
    }
  }
  void boolean(const char* key, bool& out) const {
    if (const auto* v = find(key)) {
      if (!v->is_boolean()) fail(path(key), "expected a boolean");
      out = v->get<bool>();
    }
  }
  template <typename Enum, typename Parse>
  void enumeration(const char* key, Enum& out, Parse parse) const {
    if (const auto* v = find(key)) {
      if (!v->is_string()) fail(path(key), "expected a string");
      try {
        out = parse(v->get<std::string>());
      } catch (const std::invalid_argument& e) {
        fail(path(key), e.what());
      }
    }
  }
};

void reject_unknown(const ordered_json& obj, const std::string& prefix,
                    std::initializer_list<const char*> known) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* k : known) ok = ok || (it.key() == k);
    if (!ok) throw std::invalid_argument("unknown config key: " + prefix + it.key());
  }
}

const ordered_json* section(const ordered_json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end()) return nullptr;
  if (!it->is_object()) fail(key, "expected an object");
  return &*it;
}

}  // namespace

std::string config_to_text(const ExperimentConfig& cfg) { return to_document(cfg).dump(2); }

std::string default_config_text() { return config_to_text(ExperimentConfig{}); }

ExperimentConfig parse_config(const std::string& json_text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw std::invalid_argument("config root must be a JSON object");

  reject_unknown(doc, "", {"schema_version", "scenario", "mode", "seed", "cost_source",
                           "trustmhe", "intervals", "planner", "oracle", "degradation",
                           "fallback"});

  auto ver = doc.find("schema_version");
  if (ver == doc.end()) throw std::invalid_argument("missing required key: schema_version");
  if (!ver->is_number_integer() || ver->get<int>() != 1)
    throw std::invalid_argument("config key schema_version: only version 1 is supported");

  ExperimentConfig c;
  Reader root{doc, ""};
  root.enumeration("scenario", c.scenario, scenario_from_string);
  root.enumeration("mode", c.mode, planner_mode_from_string);
  root.enumeration("cost_source", c.cost_source, cost_source_from_string);
  if (const auto* v = root.find("seed")) {
    if (!v->is_number_unsigned() && !v->is_number_integer())
      fail("seed", "expected a non-negative integer");
    if (v->is_number_integer() && v->get<std::int64_t>() < 0)
      fail("seed", "expected a non-negative integer");
    c.seed = v->get<std::uint64_t>();
  }

  if (const auto* t = section(doc, "trustmhe")) {
    reject_unknown(*t, "trustmhe.",
                   {"enabled", "t_est", "beta_est", "alpha_est", "strict_ade", "omega_override"});
    Reader r{*t, "trustmhe."};
    r.boolean("enabled", c.trustmhe_enabled);
    r.integer("t_est", c.t_est);
    r.number("beta_est", c.beta_est);
    r.number("alpha_est", c.alpha_est);
    r.boolean("strict_ade", c.strict_ade);
    if (const auto* v = r.find("omega_override")) {
      if (v->is_null()) {
        c.omega_override.reset();
      } else if (v->is_number()) {
        c.omega_override = v->get<double>();
      } else {
        fail("trustmhe.omega_override", "expected a number or null");
      }
    }
  }

  if (const auto* iv = section(doc, "intervals")) {
    reject_unknown(*iv, "intervals.", {"dt_state", "replan_every", "predict_every"});
    Reader r{*iv, "intervals."};
    r.number("dt_state", c.dt_state);
    r.integer("replan_every", c.replan_every);
    r.integer("predict_every", c.predict_every);
  }

  if (const auto* p = section(doc, "planner")) {
    reject_unknown(*p, "planner.",
                   {"rollouts", "horizon", "lambda", "momentum", "sigma_steer", "threads"});
    Reader r{*p, "planner."};
    r.integer("rollouts", c.k_pla);
    r.integer("horizon", c.t_pla);
    r.number("lambda", c.lambda);
    r.number("momentum", c.momentum);
    r.number("sigma_steer", c.sigma_steer);
    r.integer("threads", c.threads);
  }

  if (const auto* o = section(doc, "oracle")) {
    reject_unknown(*o, "oracle.",
                   {"k_pre", "horizon", "dt", "base_noise", "lat_spread", "lon_spread",
                    "speed_spread", "conf_ratio", "sigma"});
    Reader r{*o, "oracle."};
    r.integer("k_pre", c.oracle.k_pre);
    r.integer("horizon", c.oracle.horizon);
    r.number("dt", c.oracle.dt);
    r.number("base_noise", c.oracle.base_noise);
    r.number("lat_spread", c.oracle.lat_spread);
    r.number("lon_spread", c.oracle.lon_spread);
    r.number("speed_spread", c.oracle.speed_spread);
    r.number("conf_ratio", c.oracle.conf_ratio);
    r.number("sigma", c.oracle.sigma);
  }

  if (const auto* d = section(doc, "degradation")) {
    reject_unknown(*d, "degradation.",
                   {"onset_s", "offset_s", "sigma_deg", "heading_bias", "shuffle_confidences"});
    Reader r{*d, "degradation."};
    r.number("onset_s", c.degradation.onset_s);
    r.number("offset_s", c.degradation.offset_s);
    r.number("sigma_deg", c.degradation.sigma_deg);
    r.number("heading_bias", c.degradation.heading_bias);
    r.boolean("shuffle_confidences", c.degradation.shuffle_confidences);
  }

  if (const auto* f = section(doc, "fallback")) {
    reject_unknown(*f, "fallback.", {"constant_turn"});
    Reader r{*f, "fallback."};
    r.boolean("constant_turn", c.constant_turn_fallback);
  }

  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string apply_override(const std::string& json_text, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw std::invalid_argument("override must look like dotted.path=value: " + assignment);
  const std::string path = assignment.substr(0, eq);
  const std::string value_text = assignment.substr(eq + 1);

  ordered_json value = ordered_json::parse(value_text, nullptr, false);
  if (value.is_discarded() || value.is_object() || value.is_array())
    value = value_text;  // plain strings (scenario names etc.) arrive unquoted

  ordered_json doc;
  try {
    doc = ordered_json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
  }

  ordered_json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot - start);
    if (key.empty())
      throw std::invalid_argument("override path has an empty segment: " + path);
    if (dot == std::string::npos) {
      (*node)[key] = value;
      break;
    }
    node = &(*node)[key];
    if (!node->is_object() && !node->is_null())
      throw std::invalid_argument("override path crosses a non-object: " + path);
    start = dot + 1;
  }
  return doc.dump(2);
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
  const std::string text = to_document(cfg).dump();
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char byte : text) {
    h ^= byte;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string config_hash_hex(const ExperimentConfig& cfg) {
  static const char* digits = "0123456789abcdef";
  std::uint64_t h = config_hash(cfg);
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[static_cast<std::size_t>(i)] = digits[h & 0xF];
    h >>= 4;
  }
  return s;
}

}  // namespace trustmhe
