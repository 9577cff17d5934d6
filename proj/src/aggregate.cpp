#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include "json.hpp"
#include "plurality/harness.hpp"

namespace plurality {

namespace {

const std::vector<std::pair<std::string, std::string>>& milestone_columns() {
  static const std::vector<std::pair<std::string, std::string>> cols{
      {milestone::kFirstPhase0, "t_first_phase0"},   {milestone::kPhase0Complete, "t_phase0_complete"},
      {milestone::kLeaderElected, "t_leader_elected"}, {milestone::kWinnerFirst, "t_winner_first"},
      {milestone::kConverged, "t_converged"},
  };
  return cols;
}

std::string fmt(double d) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6g", d);
  return buf;
}

double num(const std::string& s) { return s.empty() ? 0.0 : std::stod(s); }

}  // namespace

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : (v[h - 1] + v[h]) / 2.0;
}

double percentile(std::vector<double> v, double q) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(v.size())));
  return v[std::clamp<std::size_t>(rank, 1, v.size()) - 1];
}

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  LinearFit f;
  f.points = std::min(x.size(), y.size());
  if (f.points == 0) return f;
  const double n = static_cast<double>(f.points);
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < f.points; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < f.points; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  f.slope = sxx > 0 ? sxy / sxx : 0.0;
  f.intercept = my - f.slope * mx;
  double sse = 0;
  for (std::size_t i = 0; i < f.points; ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    sse += r * r;
  }
  f.r2 = syy > 0 ? 1.0 - sse / syy : (sse == 0 ? 1.0 : 0.0);
  return f;
}

Summary aggregate(const std::vector<ResultsRow>& rows) {
  Summary s;
  std::map<std::string, std::vector<const ResultsRow*>> by_config;
  std::vector<std::string> order;
  for (const auto& row : rows) {
    const std::string key = row.get("fingerprint") + "\x1f" + row.get("experiment");
    if (!by_config.count(key)) order.push_back(key);
    by_config[key].push_back(&row);
  }
  std::sort(order.begin(), order.end());
  for (const auto& key : order) {
    const auto& group = by_config[key];
    const ResultsRow& first = *group.front();
    ConfigSummary c;
    c.fingerprint = first.get("fingerprint");
    c.experiment = first.get("experiment");
    c.variant = first.get("variant");
    c.n = static_cast<std::uint32_t>(num(first.get("n")));
    c.k = static_cast<std::uint32_t>(num(first.get("k")));
    c.dist = first.get("dist");
    c.alpha = num(first.get("alpha"));
    c.x_max = static_cast<std::uint64_t>(num(first.get("x_max")));
    std::vector<double> tournaments;
    for (const auto* r : group) {
      ++c.trials;
      if (r->get("correct") == "true") ++c.correct;
      if (r->get("timeout") == "true") ++c.timeouts;
      c.violations += static_cast<std::uint64_t>(num(r->get("violations")));
      tournaments.push_back(num(r->get("tournaments_started")));
    }
    c.correct_rate = c.trials ? static_cast<double>(c.correct) / c.trials : 0.0;
    c.median_tournaments = median(tournaments);
    for (const auto& [name, column] : milestone_columns()) {
      MilestoneStats m;
      m.name = name;
      std::vector<double> times;
      for (const auto* r : group) {
        const std::string& v = r->get(column);
        if (!v.empty()) times.push_back(num(v));
      }
      m.reached = static_cast<std::uint32_t>(times.size());
      m.median = median(times);
      m.p95 = percentile(times, 0.95);
      c.milestones.push_back(m);
    }
    s.configs.push_back(std::move(c));
  }

  auto converged_median = [](const ConfigSummary& c) { return c.milestones.back(); };
  // Convergence time against k at fixed (variant, n, dist), and against n/x_max at fixed (variant, n).
  std::map<std::string, std::map<double, std::vector<double>>> vs_k, vs_ratio;
  for (const auto& c : s.configs) {
    const auto conv = converged_median(c);
    if (conv.reached == 0) continue;
    vs_k["variant=" + c.variant + ";n=" + std::to_string(c.n) + ";dist=" + c.dist][c.k].push_back(conv.median);
    if (c.x_max > 0) {
      vs_ratio["variant=" + c.variant + ";n=" + std::to_string(c.n)][static_cast<double>(c.n) / c.x_max].push_back(
          conv.median);
    }
  }
  auto emit = [&](const std::map<std::string, std::map<double, std::vector<double>>>& groups, const char* axis) {
    for (const auto& [group, points] : groups) {
      if (points.size() < 2) continue;
      std::vector<double> xs, ys;
      for (const auto& [x, medians] : points) {
        for (const double y : medians) {
          xs.push_back(x);
          ys.push_back(y);
        }
      }
      LinearFit f = fit_line(xs, ys);
      f.group = group;
      f.x = axis;
      s.fits.push_back(std::move(f));
    }
  };
  emit(vs_k, "k");
  emit(vs_ratio, "n/x_max");
  return s;
}

bool write_summary_csv(std::ostream& os, const Summary& s) {
  os << "fingerprint,experiment,variant,n,k,dist,alpha,x_max,trials,correct,correct_rate,timeouts,violations,"
        "median_tournaments";
  for (const auto& [name, column] : milestone_columns()) {
    os << ',' << column << "_reached," << column << "_median," << column << "_p95";
  }
  os << '\n';
  for (const auto& c : s.configs) {
    os << c.fingerprint << ',' << csv_escape(c.experiment) << ',' << c.variant << ',' << c.n << ',' << c.k << ','
       << c.dist << ',' << fmt(c.alpha) << ',' << c.x_max << ',' << c.trials << ',' << c.correct << ','
       << fmt(c.correct_rate) << ',' << c.timeouts << ',' << c.violations << ',' << fmt(c.median_tournaments);
    for (const auto& m : c.milestones) os << ',' << m.reached << ',' << fmt(m.median) << ',' << fmt(m.p95);
    os << '\n';
  }
  os.flush();
  return static_cast<bool>(os);
}

bool write_fits_csv(std::ostream& os, const Summary& s) {
  os << "group,x,points,intercept,slope,r2\n";
  for (const auto& f : s.fits) {
    os << csv_escape(f.group) << ',' << f.x << ',' << f.points << ',' << fmt(f.intercept) << ',' << fmt(f.slope)
       << ',' << fmt(f.r2) << '\n';
  }
  os.flush();
  return static_cast<bool>(os);
}

bool write_summary_json(std::ostream& os, const Summary& s) {
  nlohmann::ordered_json doc;
  doc["configs"] = nlohmann::ordered_json::array();
  for (const auto& c : s.configs) {
    nlohmann::ordered_json o;
    o["fingerprint"] = c.fingerprint;
    o["experiment"] = c.experiment;
    o["variant"] = c.variant;
    o["n"] = c.n;
    o["k"] = c.k;
    o["dist"] = c.dist;
    o["alpha"] = c.alpha;
    o["x_max"] = c.x_max;
    o["trials"] = c.trials;
    o["correct"] = c.correct;
    o["correct_rate"] = c.correct_rate;
    o["timeouts"] = c.timeouts;
    o["violations"] = c.violations;
    o["median_tournaments"] = c.median_tournaments;
    o["milestones"] = nlohmann::ordered_json::array();
    for (const auto& m : c.milestones) {
      o["milestones"].push_back({{"name", m.name}, {"reached", m.reached}, {"median", m.median}, {"p95", m.p95}});
    }
    doc["configs"].push_back(std::move(o));
  }
  doc["fits"] = nlohmann::ordered_json::array();
  for (const auto& f : s.fits) {
    doc["fits"].push_back({{"group", f.group},
                           {"x", f.x},
                           {"points", f.points},
                           {"intercept", f.intercept},
                           {"slope", f.slope},
                           {"r2", f.r2}});
  }
  os << doc.dump(2) << '\n';
  os.flush();
  return static_cast<bool>(os);
}

}  // namespace plurality
