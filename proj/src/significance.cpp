#include "plurality/significance.hpp"

#include <algorithm>
#include <cmath>

namespace plurality {

OpinionClasses classify_opinions(const std::vector<std::uint32_t>& x, const SignificanceThresholds& t) {
  OpinionClasses c;
  if (x.empty()) return c;
  const double x_max = *std::max_element(x.begin(), x.end());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto id = static_cast<OpinionId>(i + 1);
    (x[i] <= x_max / t.c_s ? c.insignificant : c.significant).push_back(id);
  }
  return c;
}

bool within_guarantee(const std::vector<std::uint32_t>& x, double epsilon) {
  if (x.empty()) return false;
  double n = 0;
  for (const auto v : x) n += v;
  return *std::max_element(x.begin(), x.end()) > std::pow(n, 0.5 + epsilon);
}

double fit_c_s(const std::vector<std::uint32_t>& x, const std::vector<std::vector<OpinionId>>& survivors) {
  if (x.empty()) return 1.0;
  const double x_max = *std::max_element(x.begin(), x.end());
  double ratio = 1.0;
  for (const auto& trial : survivors) {
    for (const auto id : trial) {
      if (id >= 1 && id <= x.size() && x[id - 1] > 0) ratio = std::max(ratio, x_max / x[id - 1]);
    }
  }
  return ratio * 1.01;
}

}  // namespace plurality
