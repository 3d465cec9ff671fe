#pragma once

#include <limits>
#include <span>
#include <string>
#include <vector>

namespace trustmhe {

struct TestResult {
  double statistic{0.0};  // U of the first sample, or the chi-squared value
  double p{1.0};          // two-sided
  bool exact{false};      // true when the enumeration branch produced p
};

// Two-sided Mann-Whitney rank test with midrank tie handling. Small
// problems (n_a * n_b <= 400) get the exact conditional permutation
// distribution over the observed pooled values; larger ones use the
// normal approximation with tie-corrected variance and a 0.5 continuity
// correction. Throws std::invalid_argument on an empty sample.
TestResult mann_whitney_u(std::span<const double> a, std::span<const double> b);

// The approximation branch on its own, regardless of problem size.
// Exposed so the exact/approximate agreement can be checked directly.
TestResult mann_whitney_u_approx(std::span<const double> a, std::span<const double> b);

// 2x2 proportion test with Yates's continuity correction, the correction
// clamped at zero per cell. p from the chi-squared distribution with one
// degree of freedom. Throws std::invalid_argument on inconsistent counts
// or a zero margin (the test is undefined there).
TestResult chi2_yates(int success_a, int n_a, int success_b, int n_b);

// Regularized upper incomplete gamma Q(a, x): series expansion for
// x < a + 1, Lentz continued fraction otherwise.
double gamma_q(double a, double x);

struct MetricSummary {
  std::string metric;
  std::string arm;  // "enabled" | "disabled"
  int runs{0};
  double mean{0.0};
  double median{0.0};
  double std_dev{0.0};  // sample convention (n - 1); 0 when runs < 2
  double min{0.0};
  double max{0.0};
};

// One completed run as the statistics pipeline sees it.
struct StatsRun {
  bool enabled{true};
  int t_est{5};
  std::string mode{"balanced"};
  double noise{0.1};
  std::string scenario{"junction"};
  int crashes{0};
  double progress{0.0};
  bool success{false};
  double min_dist{std::numeric_limits<double>::infinity()};
};

enum class GroupKey { none, t_est, mode, noise, scenario };

GroupKey group_key_from_string(const std::string& name);
const char* to_string(GroupKey key);

// The facet a run falls into under a grouping, e.g. "t_est=5" or "all".
std::string facet_label(GroupKey key, const StatsRun& run);

struct TestLine {
  std::string metric;
  std::string test;  // "mann-whitney-u" | "chi2-yates"
  double statistic{0.0};
  double p{1.0};
  bool exact{false};
  bool skipped{false};
  std::string note;  // reason when skipped
};

struct GroupReport {
  std::string key;  // "all", "t_est=5", "mode=balanced", ...
  std::vector<MetricSummary> summaries;
  std::vector<TestLine> tests;
};

// Per-group arm summaries and hypothesis tests: rank tests on Crashes,
// Progress and Min.Dist. (the latter over successful runs only), the
// proportion test on Success. Groups with fewer than 2 runs in either arm
// keep their summaries but skip the tests with a note. Grouping by t_est
// replicates the disabled pool into every enabled facet, since the
// disabled arm has no horizon of its own.
std::vector<GroupReport> summarize(std::span<const StatsRun> runs, GroupKey group_by);

// Fixed-width text rendering of the report (locale-independent).
std::string format_report(const std::vector<GroupReport>& groups);

}  // namespace trustmhe
