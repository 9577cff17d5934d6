// Statistical examples at n = 10^4. Each runs 100 seeds.
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "doctest.h"
#include "plurality/engine.hpp"

using namespace plurality;

namespace {

ProtocolConfig config(Variant variant, std::vector<std::uint32_t> x) {
  ProtocolConfig c;
  c.variant = variant;
  c.k = static_cast<std::uint32_t>(x.size());
  c.n = std::accumulate(x.begin(), x.end(), 0u);
  c.x = std::move(x);
  c.validate();
  return c;
}

// Average ranks (1-based), ties share the mean rank.
std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    for (std::size_t t = i; t <= j; ++t) r[idx[t]] = (static_cast<double>(i + j) / 2.0) + 1.0;
    i = j + 1;
  }
  return r;
}

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  const auto ra = ranks(a), rb = ranks(b);
  const double n = static_cast<double>(a.size());
  const double mean = (n + 1) / 2;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (ra[i] - mean) * (rb[i] - mean);
    saa += (ra[i] - mean) * (ra[i] - mean);
    sbb += (rb[i] - mean) * (rb[i] - mean);
  }
  return sab / std::sqrt(saa * sbb);
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : (v[h - 1] + v[h]) / 2;
}

}  // namespace

TEST_CASE("rank correlation helper") {
  CHECK(spearman({1, 2, 3, 4}, {10, 20, 30, 40}) == doctest::Approx(1));
  CHECK(spearman({1, 2, 3, 4}, {4, 3, 2, 1}) == doctest::Approx(-1));
  CHECK(ranks({5, 1, 5, 2}) == std::vector<double>{3.5, 1, 3.5, 2});
}

TEST_CASE("ordered variant with four opinions and bias one") {
  const ProtocolConfig c = make_config(Variant::Ordered, 10000, 4, {DistributionFamily::BiasOne, {}, 0});
  int correct = 0;
  double gap_ok = 0, snapshots = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const TrialResult r = run_trial(c, seed);
    correct += r.correct;
    gap_ok += static_cast<double>(r.phase_gap_ok);
    snapshots += static_cast<double>(r.snapshots);
  }
  MESSAGE("correct " << correct << "/100, phase-gap healthy snapshots " << gap_ok / snapshots);
  CHECK(correct >= 95);
  CHECK(gap_ok / snapshots >= 0.99);
}

TEST_CASE("pruning keeps only the large opinions") {
  const ProtocolConfig c = config(Variant::Improved, {6000, 3000, 500, 400, 100});
  int ok = 0;
  std::vector<std::vector<OpinionId>> survivors;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    Simulation sim(c, seed);
    while (!sim.finished() && !sim.result().handoff) sim.run_until(sim.interactions() + c.n);
    REQUIRE(sim.result().handoff);
    const auto& s = sim.result().handoff->surviving;
    survivors.push_back(s);
    ok += std::all_of(s.begin(), s.end(), [](OpinionId o) { return o <= 2; });
  }
  MESSAGE("survivors within {1, 2} in " << ok << "/100 seeds");
  CHECK(ok >= 95);
}

TEST_CASE("a small candidate opinion is found within one setup phase") {
  const ProtocolConfig c = config(Variant::Unordered, {9950, 50});
  int ok = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    Simulation sim(c, seed);
    while (!sim.finished() && sim.result().challengers.size() < 2 && sim.result().tournaments_started < 3) {
      sim.run_until(sim.interactions() + c.n);
    }
    const auto& ch = sim.result().challengers;
    ok += std::find(ch.begin(), ch.end(), OpinionId{2}) != ch.end();
  }
  MESSAGE("small opinion challenged in one of the first two tournaments in " << ok << "/100 seeds");
  CHECK(ok >= 95);
}

TEST_CASE("junta clocks of larger opinions reach the first hour sooner") {
  const std::vector<std::uint32_t> x{4000, 2500, 1500, 1000, 500, 300, 200};
  const ProtocolConfig c = config(Variant::Improved, x);
  std::vector<std::vector<double>> crossings(x.size());
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    Simulation sim(c, seed);
    while (!sim.finished() && !sim.result().handoff) sim.run_until(sim.interactions() + c.n);
    const auto& first = sim.result().first_hour_crossing;
    for (std::size_t i = 0; i < x.size(); ++i) {
      crossings[i].push_back(first[i] ? static_cast<double>(first[i]) : std::numeric_limits<double>::infinity());
    }
  }
  const double n = c.n;
  std::vector<double> predicted, observed;
  for (std::size_t i = 0; i < x.size(); ++i) {
    predicted.push_back(n * n / x[i] * std::log2(n));
    observed.push_back(median_of(crossings[i]));
    MESSAGE("x=" << x[i] << " median first hour crossing " << observed.back() / n << " parallel time");
  }
  const double rho = spearman(predicted, observed);
  MESSAGE("rank correlation " << rho);
  CHECK(rho >= 0.9);
}
