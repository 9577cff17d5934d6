#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "plurality/subprotocols.hpp"
#include "plurality/types.hpp"

namespace plurality {

enum class DistributionFamily : std::uint8_t { Explicit, Uniform, BiasOne, OneDominant };

const char* to_string(DistributionFamily f);
DistributionFamily parse_distribution_family(const std::string& s);

struct DistributionSpec {
  DistributionFamily family = DistributionFamily::Uniform;
  std::vector<std::uint32_t> x;  // Explicit only
  double alpha = 0.5;            // OneDominant only: x_1 = round(alpha * n)
};

/// Builds the support vector (index 0 holds opinion 1). Rounding is repaired
/// by largest remainder with ties going to the lower opinion index.
std::vector<std::uint32_t> make_distribution(const DistributionSpec& spec, std::uint32_t n, std::uint32_t k);

/// Largest-remainder apportionment of `total` proportional to `weights`.
std::vector<std::uint32_t> largest_remainder(const std::vector<double>& weights, std::uint32_t total);

struct ProtocolConfig {
  Variant variant = Variant::Ordered;
  std::uint32_t n = 0;
  std::uint32_t k = 0;
  std::vector<std::uint32_t> x;  // x[i] is the support of opinion i+1

  // Leaderless clock: psi = psi_factor * ceil(log2 n) unless psi is set.
  double psi_factor = 2.0;
  std::uint32_t psi = 0;
  // Majority: ceil(c_M * ceil(log2 n)) sub-rounds of maj_round_ticks clock ticks,
  // the last maj_broadcast_rounds of which are broadcast rounds.
  double c_M = 2.0;
  std::uint32_t maj_round_ticks = 12;
  std::uint32_t maj_broadcast_rounds = 3;
  // Leader election: ceil(c_L * ceil(log2 n)) rounds of half a clock cycle.
  double c_L = 2.0;
  // Clock cycles spent in phase 0 once the leader is known (unordered, improved).
  std::uint32_t setup_hold = 2;
  // Junta clock ticks per hour, and the phase floor -c of the improved variant.
  std::uint32_t m = 32;
  std::uint32_t c = 8;
  // 0 selects floor(log2 log2 n) - 2, clamped to at least 1.
  std::uint32_t ell_max = 0;

  std::uint64_t max_interactions = 0;   // 0: 200 n (k + ceil(log2 n)^2)
  std::uint64_t snapshot_interval = 0;  // 0: n
  bool allow_tie = false;

  /// Throws ConfigError naming the offending field.
  void validate() const;
  /// Opinion with the strictly largest support, or 0 on a tie.
  OpinionId plurality_opinion() const;
  /// Canonical key=value text; equal configs give equal text.
  std::string canonical() const;
};

/// Builds a validated config from a distribution.
ProtocolConfig make_config(Variant variant, std::uint32_t n, std::uint32_t k, const DistributionSpec& dist);

/// Every constant the transition functions read, resolved from a config.
struct DerivedParams {
  Variant variant = Variant::Ordered;
  std::uint32_t n = 0;
  std::uint32_t k = 0;
  std::uint32_t log_n = 0;          // ceil(log2 n)
  std::uint32_t psi = 0;
  std::uint32_t init_target = 0;    // ceil(5 log2 n)
  std::uint32_t maj_rounds = 0;
  std::uint32_t maj_round_ticks = 0;
  std::uint32_t maj_broadcast_rounds = 0;
  std::uint32_t match_hold = 1;     // clock cycles spent in phase 6
  std::uint32_t setup_hold = 1;
  MajorityParams majority;
  std::uint32_t le_rounds = 0;
  std::uint32_t ell_max = 1;
  JuntaClockParams junta_clock;
  int phase_floor = -1;             // -1, or -c for the improved variant
  std::uint64_t max_interactions = 0;
  std::uint64_t snapshot_interval = 0;
};

DerivedParams derive(const ProtocolConfig& config);

}  // namespace plurality
