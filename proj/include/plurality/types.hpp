#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace plurality {

/// Opinions are numbered 1..k; 0 means "no opinion".
using OpinionId = std::uint16_t;

enum class Role : std::uint8_t { Collector, Player, Clock, Tracker };

enum class PlayerOpinion : std::uint8_t { U, A, B };

enum class Variant : std::uint8_t { Ordered, Unordered, Improved };

const char* to_string(Role r);
const char* to_string(Variant v);
const char* to_string(PlayerOpinion p);
Variant parse_variant(const std::string& s);

/// Raised for invalid configurations; the message names the offending field.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a transition observes a state outside its encoding.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// ceil(log2(n)) for n >= 1; 0 for n <= 1.
unsigned ceil_log2(std::uint64_t n);
/// floor(log2(n)) for n >= 1.
unsigned floor_log2(std::uint64_t n);

}  // namespace plurality
