#pragma once

// Ground-truth labels for the pruning checks. Agents never compute these.

#include <cstdint>
#include <vector>

#include "plurality/types.hpp"

namespace plurality {

struct SignificanceThresholds {
  double c_s = 10.0;     // insignificant iff x_j <= x_max / c_s
  double epsilon = 0.1;  // guarantee needs x_max > n^(1/2 + epsilon)
};

struct OpinionClasses {
  std::vector<OpinionId> significant;
  std::vector<OpinionId> insignificant;
};

OpinionClasses classify_opinions(const std::vector<std::uint32_t>& x, const SignificanceThresholds& t);

/// True when x_max > n^(1/2 + epsilon), the regime the pruning guarantee covers.
bool within_guarantee(const std::vector<std::uint32_t>& x, double epsilon);

/// Smallest c_s (times 1.01) that labels every opinion observed to survive
/// pruning as significant. `survivors[t]` lists the survivors of trial t.
double fit_c_s(const std::vector<std::uint32_t>& x, const std::vector<std::vector<OpinionId>>& survivors);

}  // namespace plurality
