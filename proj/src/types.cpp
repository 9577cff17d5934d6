#include "plurality/types.hpp"

namespace plurality {

const char* to_string(Role r) {
  switch (r) {
    case Role::Collector: return "Collector";
    case Role::Player: return "Player";
    case Role::Clock: return "Clock";
    case Role::Tracker: return "Tracker";
  }
  return "?";
}

const char* to_string(Variant v) {
  switch (v) {
    case Variant::Ordered: return "ordered";
    case Variant::Unordered: return "unordered";
    case Variant::Improved: return "improved";
  }
  return "?";
}

const char* to_string(PlayerOpinion p) {
  switch (p) {
    case PlayerOpinion::U: return "U";
    case PlayerOpinion::A: return "A";
    case PlayerOpinion::B: return "B";
  }
  return "?";
}

Variant parse_variant(const std::string& s) {
  if (s == "ordered") return Variant::Ordered;
  if (s == "unordered") return Variant::Unordered;
  if (s == "improved") return Variant::Improved;
  throw ConfigError("variant: unknown value '" + s + "' (expected ordered, unordered or improved)");
}

unsigned ceil_log2(std::uint64_t n) {
  unsigned r = 0;
  while (r < 64 && (std::uint64_t{1} << r) < n) ++r;
  return r;
}

unsigned floor_log2(std::uint64_t n) {
  unsigned r = 0;
  while (n > 1) {
    n >>= 1;
    ++r;
  }
  return r;
}

}  // namespace plurality
