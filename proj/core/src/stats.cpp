#include "trustmhe/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <stdexcept>

namespace trustmhe {

namespace {

// Midranks of the pooled samples plus the rank sum of sample a.
struct Ranked {
  std::vector<double> pooled;    // sorted values
  std::vector<double> midrank;   // midrank[i] for pooled[i]
  double rank_sum_a{0.0};
  double tie_term{0.0};          // sum over tie groups of t^3 - t
};

Ranked rank_pooled(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size() + b.size();
  std::vector<std::pair<double, bool>> all;  // value, belongs-to-a
  all.reserve(n);
  for (double v : a) all.push_back({v, true});
  for (double v : b) all.push_back({v, false});
  std::sort(all.begin(), all.end(),
            [](const auto& l, const auto& r) { return l.first < r.first; });

  Ranked out;
  out.pooled.reserve(n);
  out.midrank.resize(n);
  for (const auto& [v, in_a] : all) out.pooled.push_back(v);

  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && all[j].first == all[i].first) ++j;
    const double t = static_cast<double>(j - i);
    const double mid = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
    for (std::size_t k = i; k < j; ++k) {
      out.midrank[k] = mid;
      if (all[k].second) out.rank_sum_a += mid;
    }
    out.tie_term += t * t * t - t;
    i = j;
  }
  return out;
}

double normal_two_sided(double u, double n_a, double n_b, double tie_term) {
  const double n = n_a + n_b;
  const double mu = 0.5 * n_a * n_b;
  const double var =
      (n_a * n_b / 12.0) * ((n * n * n - n - tie_term) / (n * (n - 1.0)));
  if (!(var > 0.0)) return 1.0;  // every pooled value identical
  const double z = std::max(0.0, std::abs(u - mu) - 0.5) / std::sqrt(var);
  return std::min(1.0, std::erfc(z / std::sqrt(2.0)));
}

// Exact conditional distribution of the rank sum: a subset-sum count over
// the doubled midranks (integers), taken over the smaller sample's size.
double exact_two_sided(const Ranked& r, double u_a, std::size_t n_a, std::size_t n_b) {
  const std::size_t n = r.pooled.size();
  const std::size_t m = std::min(n_a, n_b);
  std::vector<long long> doubled(n);
  long long s_max = 0;
  for (std::size_t i = 0; i < n; ++i) {
    doubled[i] = std::llround(2.0 * r.midrank[i]);
    s_max += doubled[i];
  }
  // f[j][s] = number of size-j subsets with doubled rank sum s.
  std::vector<std::vector<double>> f(m + 1,
                                     std::vector<double>(static_cast<std::size_t>(s_max) + 1, 0.0));
  f[0][0] = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto d = static_cast<std::size_t>(doubled[i]);
    const std::size_t j_hi = std::min(m, i + 1);
    for (std::size_t j = j_hi; j >= 1; --j) {
      auto& row = f[j];
      const auto& prev = f[j - 1];
      for (std::size_t s = static_cast<std::size_t>(s_max); s >= d; --s) {
        if (prev[s - d] != 0.0) row[s] += prev[s - d];
      }
    }
  }

  // |U - mean| is identical from either side, so score subsets of size m.
  const double nn = static_cast<double>(n);
  const double mm = static_cast<double>(m);
  const double mean_u = 0.5 * mm * (nn - mm);
  const double dev_obs =
      std::abs(u_a - 0.5 * static_cast<double>(n_a) * static_cast<double>(n_b));

  double hits = 0.0;
  double total = 0.0;
  for (std::size_t s = 0; s <= static_cast<std::size_t>(s_max); ++s) {
    const double count = f[m][s];
    if (count == 0.0) continue;
    total += count;
    const double u = 0.5 * static_cast<double>(s) - 0.5 * mm * (mm + 1.0);
    if (std::abs(u - mean_u) >= dev_obs - 1e-9) hits += count;
  }
  return std::min(1.0, hits / total);
}

double sq(double v) { return v * v; }

MetricSummary make_summary(const std::string& metric, const std::string& arm,
                           std::vector<double> values) {
  MetricSummary s;
  s.metric = metric;
  s.arm = arm;
  s.runs = static_cast<int>(values.size());
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  s.min = values.front();
  s.max = values.back();
  const std::size_t n = values.size();
  s.median = (n % 2 == 1) ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);
  if (n >= 2) {
    double acc = 0.0;
    for (double v : values) acc += sq(v - s.mean);
    s.std_dev = std::sqrt(acc / static_cast<double>(n - 1));
  }
  return s;
}

struct ArmData {
  std::vector<double> crashes;
  std::vector<double> progress;
  std::vector<double> min_dist_ok;  // successful runs only
  int successes{0};
  int runs{0};
};

TestLine rank_line(const std::string& metric, std::span<const double> a,
                   std::span<const double> b, const char* small_note) {
  TestLine line;
  line.metric = metric;
  line.test = "mann-whitney-u";
  if (a.size() < 2 || b.size() < 2) {
    line.skipped = true;
    line.note = small_note;
    return line;
  }
  const TestResult r = mann_whitney_u(a, b);
  line.statistic = r.statistic;
  line.p = r.p;
  line.exact = r.exact;
  return line;
}

}  // namespace

TestResult mann_whitney_u(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("rank test requires non-empty samples");
  const Ranked r = rank_pooled(a, b);
  const double n_a = static_cast<double>(a.size());
  const double u_a = r.rank_sum_a - 0.5 * n_a * (n_a + 1.0);

  TestResult out;
  out.statistic = u_a;
  if (a.size() * b.size() <= 400) {
    out.exact = true;
    out.p = exact_two_sided(r, u_a, a.size(), b.size());
  } else {
    out.p = normal_two_sided(u_a, n_a, static_cast<double>(b.size()), r.tie_term);
  }
  return out;
}

TestResult mann_whitney_u_approx(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("rank test requires non-empty samples");
  const Ranked r = rank_pooled(a, b);
  const double n_a = static_cast<double>(a.size());
  TestResult out;
  out.statistic = r.rank_sum_a - 0.5 * n_a * (n_a + 1.0);
  out.p = normal_two_sided(out.statistic, n_a, static_cast<double>(b.size()), r.tie_term);
  return out;
}

TestResult chi2_yates(int success_a, int n_a, int success_b, int n_b) {
  if (n_a <= 0 || n_b <= 0 || success_a < 0 || success_b < 0 || success_a > n_a ||
      success_b > n_b)
    throw std::invalid_argument("inconsistent contingency counts");
  const double o[2][2] = {{static_cast<double>(success_a), static_cast<double>(n_a - success_a)},
                          {static_cast<double>(success_b), static_cast<double>(n_b - success_b)}};
  const double row[2] = {o[0][0] + o[0][1], o[1][0] + o[1][1]};
  const double col[2] = {o[0][0] + o[1][0], o[0][1] + o[1][1]};
  if (col[0] == 0.0 || col[1] == 0.0)
    throw std::invalid_argument("chi-squared margin is zero; test undefined");
  const double n = row[0] + row[1];

  double stat = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const double e = row[i] * col[j] / n;
      stat += sq(std::max(std::abs(o[i][j] - e) - 0.5, 0.0)) / e;
    }

  TestResult out;
  out.statistic = stat;
  out.p = gamma_q(0.5, 0.5 * stat);
  return out;
}

double gamma_q(double a, double x) {
  if (!(a > 0.0) || x < 0.0) throw std::invalid_argument("gamma_q domain: a > 0, x >= 0");
  if (x == 0.0) return 1.0;
  const double log_prefix = -x + a * std::log(x) - std::lgamma(a);
  if (x < a + 1.0) {
    // Lower series, complemented.
    double ap = a;
    double del = 1.0 / a;
    double sum = del;
    for (int i = 0; i < 500; ++i) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::abs(del) < std::abs(sum) * 1e-16) break;
    }
    return std::clamp(1.0 - sum * std::exp(log_prefix), 0.0, 1.0);
  }
  // Lentz continued fraction for the upper tail.
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  return std::clamp(std::exp(log_prefix) * h, 0.0, 1.0);
}

GroupKey group_key_from_string(const std::string& name) {
  if (name == "none" || name.empty()) return GroupKey::none;
  if (name == "t_est") return GroupKey::t_est;
  if (name == "mode") return GroupKey::mode;
  if (name == "noise") return GroupKey::noise;
  if (name == "scenario") return GroupKey::scenario;
  throw std::invalid_argument("unknown group key: " + name);
}

const char* to_string(GroupKey key) {
  switch (key) {
    case GroupKey::none: return "none";
    case GroupKey::t_est: return "t_est";
    case GroupKey::mode: return "mode";
    case GroupKey::noise: return "noise";
    case GroupKey::scenario: return "scenario";
  }
  return "?";
}

std::string facet_label(GroupKey key, const StatsRun& run) {
  char buf[64];
  switch (key) {
    case GroupKey::none: return "all";
    case GroupKey::t_est:
      std::snprintf(buf, sizeof buf, "t_est=%d", run.t_est);
      return buf;
    case GroupKey::mode: return "mode=" + run.mode;
    case GroupKey::noise:
      std::snprintf(buf, sizeof buf, "noise=%g", run.noise);
      return buf;
    case GroupKey::scenario: return "scenario=" + run.scenario;
  }
  return "all";
}

std::vector<GroupReport> summarize(std::span<const StatsRun> runs, GroupKey group_by) {
  if (runs.empty()) throw std::invalid_argument("no runs to summarize");

  // Facet -> arm pools. With t_est grouping the disabled runs join every
  // facet: they are the shared baseline the horizons are compared against.
  std::map<std::string, std::pair<ArmData, ArmData>> facets;  // enabled, disabled
  auto feed = [](ArmData& arm, const StatsRun& r) {
    arm.runs += 1;
    arm.crashes.push_back(static_cast<double>(r.crashes));
    arm.progress.push_back(r.progress);
    if (r.success) {
      arm.successes += 1;
      arm.min_dist_ok.push_back(r.min_dist);
    }
  };

  if (group_by == GroupKey::t_est) {
    for (const StatsRun& r : runs)
      if (r.enabled) feed(facets[facet_label(group_by, r)].first, r);
    if (facets.empty()) facets["all"];  // disabled-only input: one facet
    for (const StatsRun& r : runs)
      if (!r.enabled)
        for (auto& [label, arms] : facets) feed(arms.second, r);
  } else {
    for (const StatsRun& r : runs) {
      auto& arms = facets[facet_label(group_by, r)];
      feed(r.enabled ? arms.first : arms.second, r);
    }
  }

  std::vector<GroupReport> out;
  for (auto& [label, arms] : facets) {
    GroupReport rep;
    rep.key = label;
    auto& [ena, dis] = arms;

    for (const auto* side : {&ena, &dis}) {
      const std::string arm = (side == &ena) ? "enabled" : "disabled";
      if (side->runs == 0) continue;
      rep.summaries.push_back(make_summary("Crashes", arm, side->crashes));
      rep.summaries.push_back(make_summary("Progress", arm, side->progress));
      std::vector<double> succ(static_cast<std::size_t>(side->runs), 0.0);
      for (int i = 0; i < side->successes; ++i) succ[static_cast<std::size_t>(i)] = 1.0;
      rep.summaries.push_back(make_summary("Success", arm, std::move(succ)));
      rep.summaries.push_back(make_summary("Min.Dist.", arm, side->min_dist_ok));
    }

    if (ena.runs < 2 || dis.runs < 2) {
      TestLine line;
      line.test = "all";
      line.metric = "all";
      line.skipped = true;
      line.note = "fewer than 2 runs in an arm; tests skipped";
      rep.tests.push_back(line);
    } else {
      rep.tests.push_back(rank_line("Crashes", ena.crashes, dis.crashes, ""));
      rep.tests.push_back(rank_line("Progress", ena.progress, dis.progress, ""));
      rep.tests.push_back(rank_line("Min.Dist.", ena.min_dist_ok, dis.min_dist_ok,
                                    "fewer than 2 successful runs in an arm"));
      TestLine succ_line;
      succ_line.metric = "Success";
      succ_line.test = "chi2-yates";
      try {
        const TestResult r = chi2_yates(ena.successes, ena.runs, dis.successes, dis.runs);
        succ_line.statistic = r.statistic;
        succ_line.p = r.p;
      } catch (const std::invalid_argument&) {
        succ_line.skipped = true;
        succ_line.note = "degenerate margins (all runs share one outcome)";
      }
      rep.tests.push_back(succ_line);
    }
    out.push_back(std::move(rep));
  }
  return out;
}

std::string format_report(const std::vector<GroupReport>& groups) {
  std::string s;
  char buf[256];
  auto row = [&](const char* fmt, auto... args) {
    std::snprintf(buf, sizeof buf, fmt, args...);
    s += buf;
    s += '\n';
  };

  for (const GroupReport& g : groups) {
    row("== %s ==", g.key.c_str());
    row("%-10s %-9s %5s %10s %10s %10s %10s %10s", "metric", "arm", "n", "mean", "median",
        "std", "min", "max");
    for (const MetricSummary& m : g.summaries)
      row("%-10s %-9s %5d %10.4f %10.4f %10.4f %10.4f %10.4f", m.metric.c_str(), m.arm.c_str(),
          m.runs, m.mean, m.median, m.std_dev, m.min, m.max);
    for (const TestLine& t : g.tests) {
      if (t.skipped)
        row("%-10s %-15s skipped: %s", t.metric.c_str(), t.test.c_str(), t.note.c_str());
      else
        row("%-10s %-15s stat=%.6f p=%.6f%s", t.metric.c_str(), t.test.c_str(), t.statistic,
            t.p, t.exact ? " (exact)" : "");
    }
    s += '\n';
  }
  return s;
}

}  // namespace trustmhe
