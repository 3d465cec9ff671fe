#include "trustmhe/predictors.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "trustmhe/angles.hpp"

using namespace trustmhe;

namespace {

constexpr double kPi = 3.14159265358979323846;

AgentScript straight(int id, double speed, double start_s = 0.0, double len = 500.0) {
  AgentScript s;
  s.id = id;
  s.path = {{0.0, 0.0}, {len, 0.0}};
  s.desired_speed = speed;
  s.start_s = start_s;
  return s;
}

OracleParams quiet_params(int k = 3, int horizon = 8) {
  OracleParams p;
  p.k_pre = k;
  p.horizon = horizon;
  p.dt = 0.25;
  p.base_noise = 0.0;
  p.lat_spread = 0.0;
  p.lon_spread = 0.0;
  p.speed_spread = 0.0;
  return p;
}

}  // namespace

TEST_CASE("constant velocity prediction marches along the heading") {
  AgentState a;
  a.id = 1;
  a.yaw = kPi / 2;
  a.v = 5.0;
  auto set = predict_constant_velocity(a, 0, 3, 0.1);
  validate_prediction_set(set, 3);
  REQUIRE(set.modalities.size() == 1);
  CHECK(set.modalities[0].confidence == 1.0);
  const auto& pts = set.modalities[0].points;
  CHECK(std::abs(pts[0].mx) < 1e-12);
  CHECK(pts[0].my == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(pts[1].my == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(pts[2].my == doctest::Approx(1.5).epsilon(1e-12));
  for (const auto& g : pts) {
    CHECK(g.yaw == a.yaw);
    CHECK(g.sx == 0.1);
    CHECK(g.sy == 0.1);
    CHECK(g.rho == 0.0);
  }
}

TEST_CASE("static agents predict in place and diagonals stay diagonal") {
  AgentState stopped;
  stopped.id = 2;
  stopped.x = 3.0;
  stopped.y = -4.0;
  stopped.v = 0.0;
  auto set = predict_constant_velocity(stopped, 0, 4, 0.25);
  for (const auto& g : set.modalities[0].points) {
    CHECK(g.mx == 3.0);
    CHECK(g.my == -4.0);
  }

  AgentState diag;
  diag.id = 3;
  diag.yaw = kPi / 4;
  diag.v = std::sqrt(2.0);
  auto d = predict_constant_velocity(diag, 0, 2, 1.0);
  CHECK(d.modalities[0].points[0].mx == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(d.modalities[0].points[0].my == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(d.modalities[0].points[1].mx == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(d.modalities[0].points[1].my == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("fallback predictions are a pure function of the agent state") {
  AgentState a;
  a.id = 4;
  a.x = 1.25;
  a.y = -2.5;
  a.yaw = 0.3;
  a.v = 7.0;
  auto s1 = predict_constant_velocity(a, 5, 10, 0.25);
  auto s2 = predict_constant_velocity(a, 5, 10, 0.25);
  for (std::size_t t = 0; t < 10; ++t) {
    CHECK(s1.modalities[0].points[t].mx == s2.modalities[0].points[t].mx);
    CHECK(s1.modalities[0].points[t].my == s2.modalities[0].points[t].my);
  }
}

TEST_CASE("constant-turn fallback needs history and then curves") {
  CvPredictor pure(false);
  CvPredictor turning(true);
  AgentState a;
  a.id = 1;
  a.yaw = 0.0;
  a.v = 2.0;

  // First sighting: no rate estimate yet, identical to the pure variant.
  auto p0 = pure.predict(a, 0.0, 0, 3, 0.5);
  auto t0 = turning.predict(a, 0.0, 0, 3, 0.5);
  for (std::size_t t = 0; t < 3; ++t) {
    CHECK(t0.modalities[0].points[t].mx == p0.modalities[0].points[t].mx);
    CHECK(t0.modalities[0].points[t].my == p0.modalities[0].points[t].my);
  }

  // Second sighting one second later with a new heading: rate = 0.2 rad/s.
  a.yaw = 0.2;
  auto t1 = turning.predict(a, 1.0, 200, 3, 0.5);
  double x = a.x;
  double y = a.y;
  double yaw = a.yaw;
  const double rate = 0.2;
  for (std::size_t t = 0; t < 3; ++t) {
    x += a.v * std::cos(yaw) * 0.5;
    y += a.v * std::sin(yaw) * 0.5;
    yaw = wrap_angle(yaw + rate * 0.5);
    CHECK(t1.modalities[0].points[t].mx == x);
    CHECK(t1.modalities[0].points[t].my == y);
    CHECK(t1.modalities[0].points[t].yaw == yaw);
  }
  // The curved path bends left of the straight-line one.
  auto p1 = pure.predict(a, 1.0, 200, 3, 0.5);
  CHECK(t1.modalities[0].points[2].my > p1.modalities[0].points[2].my);
}

TEST_CASE("quiet oracle reproduces the realized future bit for bit") {
  TrafficWorld world({straight(1, 8.0, 10.0), straight(2, 6.0, 40.0)}, 0.05);
  for (int i = 0; i < 30; ++i) world.step();

  OraclePredictor oracle(quiet_params(), DegradationSchedule{}, 42);
  const std::vector<int> ids = {1, 2};
  auto sets = oracle.predict(world, ids, 3);
  REQUIRE(sets.size() == 2);

  TrafficWorld replay = world;
  for (int t = 0; t < 8; ++t) {
    for (int f = 0; f < 5; ++f) replay.step();
    for (std::size_t i = 0; i < 2; ++i) {
      auto truth = replay.agent_state(ids[i]);
      REQUIRE(truth.has_value());
      for (const auto& m : sets[i].modalities) {
        CHECK(m.points[static_cast<std::size_t>(t)].mx == truth->x);
        CHECK(m.points[static_cast<std::size_t>(t)].my == truth->y);
      }
    }
  }
  for (const auto& set : sets) validate_prediction_set(set, 8);
}

TEST_CASE("oracle confidences decay geometrically and sum to one") {
  TrafficWorld world({straight(1, 8.0)}, 0.05);
  OracleParams p = quiet_params(6);
  OraclePredictor oracle(p, DegradationSchedule{}, 7);
  auto sets = oracle.predict(world, std::vector<int>{1}, 0);
  REQUIRE(sets.size() == 1);
  double sum = 0.0;
  for (std::size_t k = 0; k < 6; ++k) {
    const double c = sets[0].modalities[k].confidence;
    sum += c;
    if (k > 0) CHECK(c < sets[0].modalities[k - 1].confidence);
    if (k > 0)
      CHECK(c / sets[0].modalities[k - 1].confidence == doctest::Approx(0.55).epsilon(1e-12));
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("oracle output is reproducible per seed and varies across ticks") {
  TrafficWorld world({straight(1, 8.0)}, 0.05);
  OracleParams p;
  p.k_pre = 4;
  p.horizon = 6;
  p.dt = 0.25;
  OraclePredictor a(p, DegradationSchedule{}, 1234);
  OraclePredictor b(p, DegradationSchedule{}, 1234);
  auto sa = a.predict(world, std::vector<int>{1}, 11);
  auto sb = b.predict(world, std::vector<int>{1}, 11);
  for (std::size_t k = 0; k < 4; ++k)
    for (std::size_t t = 0; t < 6; ++t) {
      CHECK(sa[0].modalities[k].points[t].mx == sb[0].modalities[k].points[t].mx);
      CHECK(sa[0].modalities[k].points[t].my == sb[0].modalities[k].points[t].my);
    }
  auto sc = a.predict(world, std::vector<int>{1}, 12);
  bool any_differs = false;
  for (std::size_t t = 0; t < 6; ++t)
    if (sc[0].modalities[0].points[t].mx != sa[0].modalities[0].points[t].mx)
      any_differs = true;
  CHECK(any_differs);
}

TEST_CASE("heading bias swings trajectories about the agent") {
  TrafficWorld world({straight(1, 8.0, 100.0)}, 0.05);
  DegradationSchedule deg;
  deg.onset_s = 0.0;
  deg.offset_s = 1000.0;
  deg.heading_bias = kPi / 2;
  OracleParams p = quiet_params(2, 10);
  OraclePredictor clean(p, DegradationSchedule{}, 5);
  OraclePredictor biased(p, deg, 5);

  auto c = clean.predict(world, std::vector<int>{1}, 0);
  auto d = biased.predict(world, std::vector<int>{1}, 0);
  const auto& ce = c[0].modalities[0].points.back();
  const auto& de = d[0].modalities[0].points.back();
  const double travel = 8.0 * 10 * 0.25;
  const double displacement = std::hypot(de.mx - ce.mx, de.my - ce.my);
  CHECK(displacement > travel * std::sin(kPi / 4));
  // Rotation is about the agent position: the first point barely moves,
  // the endpoint lands a quarter turn to the left.
  CHECK(de.mx == doctest::Approx(100.0).epsilon(1e-9));
  CHECK(de.my == doctest::Approx(travel).epsilon(1e-6));
  CHECK(wrap_angle(de.yaw - ce.yaw) == doctest::Approx(kPi / 2).epsilon(1e-12));
}

TEST_CASE("degradation window is half open on its offset") {
  DegradationSchedule deg;
  deg.onset_s = 1.0;
  deg.offset_s = 2.0;
  deg.heading_bias = 1.0;
  CHECK_FALSE(deg.active(0.5));
  CHECK(deg.active(1.0));
  CHECK(deg.active(1.999));
  CHECK_FALSE(deg.active(2.0));

  // End to end: the same world state predicted inside and outside the
  // window differs only inside it.
  TrafficWorld world({straight(1, 8.0, 50.0)}, 0.25);
  OracleParams p = quiet_params(2, 4);
  OraclePredictor oracle(p, deg, 9);
  auto before = oracle.predict(world, std::vector<int>{1}, 0);
  CHECK(before[0].modalities[0].points[0].my == 0.0);
  for (int i = 0; i < 4; ++i) world.step();  // t = 1.0
  auto inside = oracle.predict(world, std::vector<int>{1}, 4);
  CHECK(inside[0].modalities[0].points.back().my > 1.0);
  for (int i = 0; i < 4; ++i) world.step();  // t = 2.0
  auto after = oracle.predict(world, std::vector<int>{1}, 8);
  CHECK(after[0].modalities[0].points.back().my == 0.0);
}

TEST_CASE("confidence shuffle permutes but preserves the set") {
  TrafficWorld world({straight(1, 8.0)}, 0.05);
  DegradationSchedule deg;
  deg.onset_s = 0.0;
  deg.offset_s = 1000.0;
  deg.shuffle_confidences = true;
  OracleParams p = quiet_params(5);
  OraclePredictor clean(p, DegradationSchedule{}, 21);
  OraclePredictor shuffled(p, deg, 21);

  auto base = clean.predict(world, std::vector<int>{1}, 0);
  std::vector<double> expect;
  for (const auto& m : base[0].modalities) expect.push_back(m.confidence);
  std::sort(expect.begin(), expect.end());

  bool any_reordered = false;
  for (std::int64_t tick = 0; tick < 16; ++tick) {
    auto got = shuffled.predict(world, std::vector<int>{1}, tick);
    std::vector<double> conf;
    for (const auto& m : got[0].modalities) conf.push_back(m.confidence);
    if (!std::is_sorted(conf.rbegin(), conf.rend())) any_reordered = true;
    std::sort(conf.begin(), conf.end());
    for (std::size_t i = 0; i < conf.size(); ++i)
      CHECK(conf[i] == doctest::Approx(expect[i]).epsilon(1e-12));
  }
  CHECK(any_reordered);
}

TEST_CASE("agents that despawn mid-horizon hold their final pose") {
  // 20 m of path at 8 m/s: gone after 2.5 s, horizon covers 4 s.
  TrafficWorld world({straight(1, 8.0, 0.0, 20.0)}, 0.05);
  OracleParams p = quiet_params(2, 16);
  OraclePredictor oracle(p, DegradationSchedule{}, 3);
  auto sets = oracle.predict(world, std::vector<int>{1}, 0);
  const auto& pts = sets[0].modalities[0].points;
  REQUIRE(pts.size() == 16);
  CHECK(pts[15].mx == pts[14].mx);
  CHECK(pts[15].my == pts[14].my);
  CHECK(pts[15].mx < 20.5);
}

TEST_CASE("oracle rejects inactive agents and bad grids") {
  TrafficWorld world({straight(1, 8.0)}, 0.05);
  OraclePredictor oracle(quiet_params(), DegradationSchedule{}, 0);
  CHECK_THROWS_AS((void)oracle.predict(world, std::vector<int>{99}, 0), std::invalid_argument);

  TrafficWorld coarse({straight(1, 8.0)}, 0.4);  // 0.25 / 0.4 is not integral
  CHECK_THROWS_AS((void)oracle.predict(coarse, std::vector<int>{1}, 0), std::invalid_argument);

  OracleParams bad = quiet_params();
  bad.k_pre = 0;
  CHECK_THROWS_AS(OraclePredictor(bad, DegradationSchedule{}, 0), std::invalid_argument);
  bad = quiet_params();
  bad.sigma = 0.0;
  CHECK_THROWS_AS(OraclePredictor(bad, DegradationSchedule{}, 0), std::invalid_argument);
}
