#include "trustmhe/stats.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"

using namespace trustmhe;

namespace {

std::vector<double> dv(std::initializer_list<double> xs) { return xs; }

const GroupReport& find_group(const std::vector<GroupReport>& groups,
                              const std::string& key) {
  for (const GroupReport& g : groups)
    if (g.key == key) return g;
  REQUIRE_MESSAGE(false, "missing group " << key);
  return groups.front();
}

const MetricSummary& find_summary(const GroupReport& g, const std::string& metric,
                                  const std::string& arm) {
  for (const MetricSummary& s : g.summaries)
    if (s.metric == metric && s.arm == arm) return s;
  REQUIRE_MESSAGE(false, "missing summary " << metric << "/" << arm);
  return g.summaries.front();
}

const TestLine& find_test(const GroupReport& g, const std::string& metric) {
  for (const TestLine& t : g.tests)
    if (t.metric == metric) return t;
  REQUIRE_MESSAGE(false, "missing test line " << metric);
  return g.tests.front();
}

StatsRun run_of(bool enabled, int crashes, double progress, double min_dist,
                int t_est = 5) {
  StatsRun r;
  r.enabled = enabled;
  r.t_est = t_est;
  r.crashes = crashes;
  r.progress = progress;
  r.success = crashes == 0;
  r.min_dist = min_dist;
  return r;
}

}  // namespace

TEST_CASE("proportion test reproduces the reference values digit for digit") {
  // 52/144 vs 364/720 and 0/10 vs 10/10, checked against an independent
  // implementation of the same continuity-corrected formula.
  TestResult r = chi2_yates(52, 144, 364, 720);
  CHECK(r.statistic == doctest::Approx(9.458344780219772).epsilon(1e-13));
  CHECK(r.p == doctest::Approx(0.002101906579702408).epsilon(1e-12));

  TestResult x = chi2_yates(0, 10, 10, 10);
  CHECK(x.statistic == doctest::Approx(16.2).epsilon(1e-13));
  CHECK(x.p == doctest::Approx(5.699411623331848e-05).epsilon(1e-12));
}

TEST_CASE("proportion test on identical proportions is exactly null") {
  TestResult r = chi2_yates(5, 10, 5, 10);
  CHECK(r.statistic == 0.0);
  CHECK(r.p == 1.0);
  // Cells whose deviation is swallowed by the correction clamp to zero
  // rather than going negative.
  TestResult c = chi2_yates(3, 10, 4, 10);
  CHECK(c.statistic == 0.0);
  CHECK(c.p == 1.0);
}

TEST_CASE("proportion test is symmetric under swapping the arms") {
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> n_dist(2, 40);
  for (int i = 0; i < 200; ++i) {
    int na = n_dist(rng), nb = n_dist(rng);
    int sa = std::uniform_int_distribution<int>(0, na)(rng);
    int sb = std::uniform_int_distribution<int>(0, nb)(rng);
    if ((sa == 0 && sb == 0) || (sa == na && sb == nb)) continue;
    TestResult ab = chi2_yates(sa, na, sb, nb);
    TestResult ba = chi2_yates(sb, nb, sa, na);
    CHECK(ab.statistic == doctest::Approx(ba.statistic).epsilon(1e-12));
    CHECK(ab.p == doctest::Approx(ba.p).epsilon(1e-12));
    CHECK(ab.p >= 0.0);
    CHECK(ab.p <= 1.0);
  }
}

TEST_CASE("proportion test refuses degenerate margins") {
  CHECK_THROWS_AS(chi2_yates(10, 10, 10, 10), std::invalid_argument);  // no failures
  CHECK_THROWS_AS(chi2_yates(0, 10, 0, 10), std::invalid_argument);    // no successes
  CHECK_THROWS_AS(chi2_yates(0, 0, 5, 10), std::invalid_argument);     // empty arm
  CHECK_THROWS_AS(chi2_yates(5, 4, 1, 10), std::invalid_argument);     // inconsistent
  CHECK_THROWS_AS(chi2_yates(-1, 10, 1, 10), std::invalid_argument);
}

TEST_CASE("upper incomplete gamma matches tabulated values") {
  // The two chi-squared(1) critical points, plus interior points covering
  // the series branch and the continued-fraction branch.
  CHECK(gamma_q(0.5, 3.841458820694124 / 2) == doctest::Approx(0.05).epsilon(1e-9));
  CHECK(gamma_q(0.5, 6.6348966010212145 / 2) == doctest::Approx(0.01).epsilon(1e-9));
  CHECK(gamma_q(2.0, 3.0) == doctest::Approx(0.1991482734714558).epsilon(1e-12));
  CHECK(gamma_q(5.5, 2.0) == doctest::Approx(0.969917023878774).epsilon(1e-12));
  CHECK(gamma_q(0.5, 0.0) == doctest::Approx(1.0));
}

TEST_CASE("upper incomplete gamma at a=1/2 equals the Gaussian tail identity") {
  for (double x = 0.05; x < 25.0; x += 0.173) {
    double lhs = gamma_q(0.5, x / 2.0);
    double rhs = std::erfc(std::sqrt(x / 2.0));
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("rank test enumerates small problems exactly") {
  // Pooled {0,0,1 | 2,3,4}: the first sample precedes every second-sample
  // value, so U = 0; 2 of the 20 conditional arrangements are as extreme.
  auto a = dv({0, 0, 1});
  auto b = dv({2, 3, 4});
  TestResult r = mann_whitney_u(a, b);
  CHECK(r.statistic == 0.0);
  CHECK(r.exact);
  CHECK(r.p == doctest::Approx(0.1).epsilon(1e-12));

  auto c = dv({1, 2});
  TestResult s = mann_whitney_u(c, c);
  CHECK(s.statistic == 2.0);
  CHECK(s.p == 1.0);
}

TEST_CASE("rank test on identical samples accepts the null outright") {
  auto a = dv({3, 3, 3, 3, 3, 3, 3, 3});
  TestResult r = mann_whitney_u(a, a);
  CHECK(r.p == 1.0);
  std::vector<double> big(30, 7.25);
  TestResult n = mann_whitney_u(big, big);  // approximation branch, zero variance
  CHECK(n.p == 1.0);
}

TEST_CASE("rank statistics of the two orderings partition the comparisons") {
  std::mt19937 rng(5);
  std::uniform_int_distribution<int> n_dist(1, 25);
  std::uniform_int_distribution<int> v_dist(0, 9);
  for (int i = 0; i < 200; ++i) {
    std::vector<double> a(n_dist(rng)), b(n_dist(rng));
    for (double& v : a) v = v_dist(rng);
    for (double& v : b) v = v_dist(rng);
    TestResult ab = mann_whitney_u(a, b);
    TestResult ba = mann_whitney_u(b, a);
    CHECK(ab.statistic + ba.statistic ==
          doctest::Approx(double(a.size()) * double(b.size())).epsilon(1e-12));
    CHECK(ab.p == doctest::Approx(ba.p).epsilon(1e-12));
    CHECK(ab.p >= 0.0);
    CHECK(ab.p <= 1.0);
  }
}

TEST_CASE("rank test rejects empty samples") {
  std::vector<double> empty, one{1.0};
  CHECK_THROWS_AS(mann_whitney_u(empty, one), std::invalid_argument);
  CHECK_THROWS_AS(mann_whitney_u(one, empty), std::invalid_argument);
}

TEST_CASE("exact enumeration and the approximation agree to 0.02 on small samples") {
  // Tied integer samples, n in [8, 12]; exact p values frozen from a
  // brute-force enumeration over all pooled arrangements.
  struct Case {
    std::vector<double> a, b;
    double u, p;
  };
  const Case cases[] = {
      {{7, 4, 6, 6, 1, 0, 2, 2, 6, 7, 0, 3}, {7, 2, 7, 1, 4, 7, 3, 3, 3, 6, 3},
       55.5, 0.5291980196408788},
      {{4, 4, 4, 4, 7, 6, 6, 5, 4, 2, 7, 3}, {1, 6, 1, 6, 4, 0, 0, 3, 0, 1},
       96.0, 0.014403553103243505},
      {{6, 7, 6, 5, 3, 4, 2, 3, 3, 1}, {7, 0, 0, 1, 7, 5, 7, 1, 5, 2, 3, 0},
       72.5, 0.41502151099674317},
      {{1, 4, 2, 7, 7, 1, 4, 7, 6, 5, 5}, {1, 6, 4, 1, 2, 5, 6, 5, 5, 7, 6, 3},
       70.5, 0.7973615427512318},
      {{0, 5, 3, 4, 2, 1, 1, 3, 6, 3, 3}, {4, 7, 3, 4, 3, 4, 3, 5, 4, 5},
       28.0, 0.05392723891175904},
      {{3, 2, 1, 0, 3, 6, 0, 3, 7, 7, 1, 0}, {6, 1, 3, 4, 7, 1, 6, 5},
       32.5, 0.23937445423513534},
  };
  for (const Case& c : cases) {
    TestResult exact = mann_whitney_u(c.a, c.b);
    CHECK(exact.exact);
    CHECK(exact.statistic == doctest::Approx(c.u).epsilon(1e-12));
    CHECK(exact.p == doctest::Approx(c.p).epsilon(1e-12));
    TestResult approx = mann_whitney_u_approx(c.a, c.b);
    CHECK(std::abs(exact.p - approx.p) <= 0.02);
  }
}

TEST_CASE("rank test picks the branch by problem size") {
  std::vector<double> a(20), b20(20), b21(21);
  std::mt19937 rng(3);
  std::normal_distribution<double> g(0.0, 1.0);
  for (double& v : a) v = g(rng);
  for (double& v : b20) v = g(rng);
  for (double& v : b21) v = g(rng);
  CHECK(mann_whitney_u(a, b20).exact);       // 400 comparisons: still exact
  CHECK(!mann_whitney_u(a, b21).exact);      // 420: approximation
}

TEST_CASE("rank test detects a one-sigma location shift at n = 50") {
  std::mt19937 rng(17);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> a(50), b(50);
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = g(rng);
    b[i] = g(rng) + 1.0;
  }
  TestResult r = mann_whitney_u(a, b);
  CHECK(!r.exact);
  CHECK(r.p < 0.01);
}

TEST_CASE("summary splits metrics by arm and screens the distance by outcome") {
  std::vector<StatsRun> runs;
  runs.push_back(run_of(true, 0, 99.0, 3.0));
  runs.push_back(run_of(true, 0, 98.0, 4.0));
  runs.push_back(run_of(true, 1, 97.0, 0.01));  // crashed: distance excluded
  runs.push_back(run_of(false, 2, 95.0, 0.02));
  runs.push_back(run_of(false, 0, 96.0, 5.0));
  runs.push_back(run_of(false, 3, 94.0, 0.03));

  auto groups = summarize(runs, GroupKey::none);
  REQUIRE(groups.size() == 1);
  const GroupReport& g = find_group(groups, "all");

  const MetricSummary& ec = find_summary(g, "Crashes", "enabled");
  CHECK(ec.runs == 3);
  CHECK(ec.mean == doctest::Approx(1.0 / 3.0));
  const MetricSummary& emd = find_summary(g, "Min.Dist.", "enabled");
  CHECK(emd.runs == 2);  // successful runs only
  CHECK(emd.min == doctest::Approx(3.0));
  const MetricSummary& dmd = find_summary(g, "Min.Dist.", "disabled");
  CHECK(dmd.runs == 1);
  CHECK(dmd.mean == doctest::Approx(5.0));
  const MetricSummary& es = find_summary(g, "Success", "enabled");
  CHECK(es.mean == doctest::Approx(2.0 / 3.0));

  const TestLine& crashes = find_test(g, "Crashes");
  CHECK(!crashes.skipped);
  CHECK(crashes.test == "mann-whitney-u");
  const TestLine& dist = find_test(g, "Min.Dist.");
  CHECK(dist.skipped);  // one successful disabled run is not enough
  CHECK(dist.note == "fewer than 2 successful runs in an arm");
  const TestLine& succ = find_test(g, "Success");
  CHECK(succ.test == "chi2-yates");
  CHECK(!succ.skipped);
}

TEST_CASE("summary skips the tests when an arm is nearly empty") {
  std::vector<StatsRun> runs;
  runs.push_back(run_of(true, 0, 99.0, 3.0));
  runs.push_back(run_of(true, 0, 98.0, 4.0));
  runs.push_back(run_of(false, 1, 90.0, 0.5));
  auto groups = summarize(runs, GroupKey::none);
  REQUIRE(groups.size() == 1);
  REQUIRE(groups[0].tests.size() == 1);
  CHECK(groups[0].tests[0].skipped);
  CHECK(groups[0].tests[0].note == "fewer than 2 runs in an arm; tests skipped");
}

TEST_CASE("summary marks a degenerate success table instead of testing it") {
  std::vector<StatsRun> runs;
  for (int i = 0; i < 3; ++i) runs.push_back(run_of(true, 0, 99.0 - i, 3.0));
  for (int i = 0; i < 3; ++i) runs.push_back(run_of(false, 0, 98.0 - i, 4.0));
  auto groups = summarize(runs, GroupKey::none);
  const TestLine& succ = find_test(groups[0], "Success");
  CHECK(succ.skipped);
  CHECK(succ.note == "degenerate margins (all runs share one outcome)");
  // Identical crash counts: the rank test accepts rather than skips.
  const TestLine& crashes = find_test(groups[0], "Crashes");
  CHECK(!crashes.skipped);
  CHECK(crashes.p == doctest::Approx(1.0));
}

TEST_CASE("grouping by horizon shares the disabled pool across facets") {
  std::vector<StatsRun> runs;
  for (int i = 0; i < 3; ++i) runs.push_back(run_of(true, i, 99.0 - i, 3.0, 1));
  for (int i = 0; i < 4; ++i) runs.push_back(run_of(true, i, 98.0 - i, 3.0, 5));
  for (int i = 0; i < 5; ++i) runs.push_back(run_of(false, i, 97.0 - i, 2.0, 1));
  auto groups = summarize(runs, GroupKey::t_est);
  REQUIRE(groups.size() == 2);
  const GroupReport& g1 = find_group(groups, "t_est=1");
  const GroupReport& g5 = find_group(groups, "t_est=5");
  CHECK(find_summary(g1, "Crashes", "enabled").runs == 3);
  CHECK(find_summary(g5, "Crashes", "enabled").runs == 4);
  // The same 5 disabled runs appear in both facets.
  CHECK(find_summary(g1, "Crashes", "disabled").runs == 5);
  CHECK(find_summary(g5, "Crashes", "disabled").runs == 5);
}

TEST_CASE("grouping by mode and scenario keys the facets by value") {
  std::vector<StatsRun> runs;
  StatsRun a = run_of(true, 0, 99.0, 3.0);
  a.mode = "cautious";
  StatsRun b = run_of(false, 1, 90.0, 0.5);
  b.mode = "balanced";
  runs = {a, b};
  auto by_mode = summarize(runs, GroupKey::mode);
  REQUIRE(by_mode.size() == 2);
  CHECK(by_mode[0].key == "mode=balanced");
  CHECK(by_mode[1].key == "mode=cautious");
  CHECK(facet_label(GroupKey::scenario, a) == "scenario=junction");
  CHECK(facet_label(GroupKey::noise, a) == "noise=0.1");
  CHECK(group_key_from_string("t_est") == GroupKey::t_est);
  CHECK(group_key_from_string("none") == GroupKey::none);
  CHECK_THROWS_AS(group_key_from_string("bogus"), std::invalid_argument);
}

TEST_CASE("report rendering stays plain text with stable markers") {
  std::vector<StatsRun> runs;
  for (int i = 0; i < 4; ++i) runs.push_back(run_of(true, 0, 99.0 - 0.1 * i, 3.0 + i));
  for (int i = 0; i < 4; ++i) runs.push_back(run_of(false, i, 90.0 - i, 1.0 + i));
  auto groups = summarize(runs, GroupKey::none);
  std::string text = format_report(groups);
  CHECK(text.find("== all ==") != std::string::npos);
  CHECK(text.find("Crashes") != std::string::npos);
  CHECK(text.find("mann-whitney-u") != std::string::npos);
  CHECK(text.find("(exact)") != std::string::npos);  // 4x4 problems enumerate
}
