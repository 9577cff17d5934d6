#include "plurality/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

namespace plurality {

const char* to_string(DistributionFamily f) {
  switch (f) {
    case DistributionFamily::Explicit: return "explicit";
    case DistributionFamily::Uniform: return "uniform";
    case DistributionFamily::BiasOne: return "bias-one";
    case DistributionFamily::OneDominant: return "one-dominant";
  }
  return "?";
}

DistributionFamily parse_distribution_family(const std::string& s) {
  if (s == "explicit") return DistributionFamily::Explicit;
  if (s == "uniform") return DistributionFamily::Uniform;
  if (s == "bias-one") return DistributionFamily::BiasOne;
  if (s == "one-dominant") return DistributionFamily::OneDominant;
  throw ConfigError("dist: unknown family '" + s +
                    "' (expected explicit, uniform, bias-one or one-dominant)");
}

std::vector<std::uint32_t> largest_remainder(const std::vector<double>& weights, std::uint32_t total) {
  std::vector<std::uint32_t> out(weights.size(), 0);
  if (weights.empty()) return out;
  const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (sum <= 0) throw ConfigError("dist: weights must have a positive sum");
  std::vector<double> rem(weights.size());
  std::uint64_t assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double exact = weights[i] / sum * total;
    out[i] = static_cast<std::uint32_t>(std::floor(exact));
    rem[i] = exact - out[i];
    assigned += out[i];
  }
  std::vector<std::size_t> order(weights.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return rem[a] > rem[b]; });
  for (std::size_t i = 0; assigned < total; ++i, ++assigned) ++out[order[i % order.size()]];
  return out;
}

std::vector<std::uint32_t> make_distribution(const DistributionSpec& spec, std::uint32_t n, std::uint32_t k) {
  switch (spec.family) {
    case DistributionFamily::Explicit:
      return spec.x;
    case DistributionFamily::Uniform:
      if (k == 0) throw ConfigError("k: must be at least 1");
      return largest_remainder(std::vector<double>(k, 1.0), n);
    case DistributionFamily::BiasOne: {
      if (k < 2) throw ConfigError("k: bias-one needs at least 2 opinions");
      // x_1 = q + 1, x_2 = q, the rest share n - 2q - 1 with each at most q.
      const std::uint64_t q = (static_cast<std::uint64_t>(n) - 1 + k - 1) / k;
      if (2 * q + 1 > n) {
        throw ConfigError("dist: bias-one with n=" + std::to_string(n) + ", k=" + std::to_string(k) +
                          " is infeasible (x_1 = x_2 + 1 leaves a negative remainder; use odd n for k=2)");
      }
      std::vector<std::uint32_t> x{static_cast<std::uint32_t>(q + 1), static_cast<std::uint32_t>(q)};
      if (k > 2) {
        auto rest = largest_remainder(std::vector<double>(k - 2, 1.0), static_cast<std::uint32_t>(n - 2 * q - 1));
        x.insert(x.end(), rest.begin(), rest.end());
      } else if (2 * q + 1 != n) {
        throw ConfigError("dist: bias-one with k=2 needs odd n (got n=" + std::to_string(n) + ")");
      }
      return x;
    }
    case DistributionFamily::OneDominant: {
      if (!(spec.alpha > 0 && spec.alpha <= 1)) throw ConfigError("alpha: must lie in (0, 1]");
      const auto top = static_cast<std::uint32_t>(std::llround(spec.alpha * n));
      std::vector<std::uint32_t> x{top};
      if (k > 1) {
        auto rest = largest_remainder(std::vector<double>(k - 1, 1.0), n - top);
        x.insert(x.end(), rest.begin(), rest.end());
      } else if (top != n) {
        throw ConfigError("alpha: with k=1 the single opinion must hold all n agents");
      }
      return x;
    }
  }
  throw ConfigError("dist: unsupported family");
}

void ProtocolConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  if (n < 2) fail("n: population size must be at least 2");
  if (n > (1u << 30)) fail("n: population size above 2^30 is not supported");
  if (k < 1) fail("k: must be at least 1");
  if (k > 65535) fail("k: at most 65535 opinions are supported");
  if (x.size() != k) fail("x: has " + std::to_string(x.size()) + " entries but k=" + std::to_string(k));
  const std::uint64_t sum = std::accumulate(x.begin(), x.end(), std::uint64_t{0});
  if (sum != n) fail("x: supports sum to " + std::to_string(sum) + " but n=" + std::to_string(n));
  if (variant != Variant::Improved && 40ull * k > n) {
    fail("k exceeds n/40 (k=" + std::to_string(k) + ", n=" + std::to_string(n) + ")");
  }
  if (!allow_tie && plurality_opinion() == 0) {
    fail("x: the largest support is shared by several opinions; set allow_tie for tie experiments");
  }
  if (!(psi_factor > 0)) fail("psi_factor: must be positive");
  if (psi != 0 && psi < 4) fail("psi: must be at least 4");
  if (psi > 60000) fail("psi: must be at most 60000");
  if (!(c_M > 0)) fail("c_M: must be positive");
  if (maj_round_ticks < 1) fail("maj_round_ticks: must be at least 1");
  if (maj_broadcast_rounds < 1) fail("maj_broadcast_rounds: must be at least 1");
  if (!(c_L > 0)) fail("c_L: must be positive");
  if (setup_hold < 1 || setup_hold > 255) fail("setup_hold: must lie in [1, 255]");
  if (m < 1 || m > 8000) fail("m: must lie in [1, 8000]");
  if (c < 2 || c > 100) fail("c: phase floor must lie in [2, 100]");
  if (ell_max > 60) fail("ell_max: must be at most 60");
  const DerivedParams p = derive(*this);
  if (p.maj_rounds <= p.maj_broadcast_rounds) fail("c_M: too few majority sub-rounds for the broadcast rounds");
  if (p.le_rounds > 250) fail("c_L: more than 250 leader-election rounds");
  if (p.match_hold > 255) fail("maj_round_ticks: phase 6 would exceed 255 clock cycles");
}

OpinionId ProtocolConfig::plurality_opinion() const {
  if (x.empty()) return 0;
  const auto it = std::max_element(x.begin(), x.end());
  if (std::count(x.begin(), x.end(), *it) != 1) return 0;
  return static_cast<OpinionId>(it - x.begin() + 1);
}

std::string ProtocolConfig::canonical() const {
  std::ostringstream os;
  auto num = [](double d) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", d);
    return std::string(buf);
  };
  os << "variant=" << to_string(variant) << ";n=" << n << ";k=" << k << ";x=";
  for (std::size_t i = 0; i < x.size(); ++i) os << (i ? "," : "") << x[i];
  os << ";psi_factor=" << num(psi_factor) << ";psi=" << psi << ";c_M=" << num(c_M)
     << ";maj_round_ticks=" << maj_round_ticks << ";maj_broadcast_rounds=" << maj_broadcast_rounds
     << ";c_L=" << num(c_L) << ";setup_hold=" << setup_hold << ";m=" << m << ";c=" << c
     << ";ell_max=" << ell_max << ";max_interactions=" << max_interactions
     << ";snapshot_interval=" << snapshot_interval << ";allow_tie=" << (allow_tie ? 1 : 0);
  return os.str();
}

ProtocolConfig make_config(Variant variant, std::uint32_t n, std::uint32_t k, const DistributionSpec& dist) {
  ProtocolConfig c;
  c.variant = variant;
  c.n = n;
  c.x = make_distribution(dist, n, k);
  c.k = static_cast<std::uint32_t>(c.x.size());
  c.validate();
  return c;
}

DerivedParams derive(const ProtocolConfig& c) {
  DerivedParams p;
  p.variant = c.variant;
  p.n = c.n;
  p.k = c.k;
  p.log_n = std::max(1u, ceil_log2(c.n));
  p.psi = c.psi != 0 ? c.psi
                     : std::max<std::uint32_t>(4, static_cast<std::uint32_t>(std::ceil(c.psi_factor * p.log_n)));
  p.init_target = static_cast<std::uint32_t>(std::ceil(5.0 * std::log2(static_cast<double>(c.n))));
  p.maj_rounds = static_cast<std::uint32_t>(std::ceil(c.c_M * p.log_n));
  p.maj_round_ticks = c.maj_round_ticks;
  p.maj_broadcast_rounds = c.maj_broadcast_rounds;
  p.match_hold = std::max<std::uint32_t>(1, (p.maj_rounds * p.maj_round_ticks + p.psi - 1) / p.psi);
  p.setup_hold = c.setup_hold;
  p.majority.max_exponent = static_cast<std::uint8_t>(p.log_n);
  p.majority.rounds = p.maj_rounds;
  p.majority.broadcast_rounds = p.maj_broadcast_rounds;
  p.le_rounds = static_cast<std::uint32_t>(std::ceil(c.c_L * p.log_n));
  if (c.ell_max != 0) {
    p.ell_max = c.ell_max;
  } else {
    const double ll = std::floor(std::log2(std::log2(static_cast<double>(std::max<std::uint32_t>(c.n, 4)))));
    p.ell_max = static_cast<std::uint32_t>(std::max(1.0, ll - 2.0));
  }
  p.junta_clock.m = static_cast<std::uint16_t>(c.m);
  p.junta_clock.window = static_cast<std::uint16_t>(4 * c.m);
  p.phase_floor = c.variant == Variant::Improved ? -static_cast<int>(c.c) : -1;
  const std::uint64_t ln = p.log_n;
  p.max_interactions = c.max_interactions != 0 ? c.max_interactions : 200ull * c.n * (c.k + ln * ln);
  p.snapshot_interval = c.snapshot_interval != 0 ? c.snapshot_interval : c.n;
  return p;
}

}  // namespace plurality
