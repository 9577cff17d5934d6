#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "plurality/config.hpp"
#include "plurality/protocol.hpp"
#include "plurality/rng.hpp"

namespace plurality {

using AgentId = std::uint32_t;

/// Ordered pair of distinct agents, each of the n(n-1) pairs equally likely.
std::pair<AgentId, AgentId> sample_pair(Rng& rng, std::uint32_t n);

struct InteractionClock {
  std::uint64_t interactions = 0;
  double parallel_time(std::uint32_t n) const { return static_cast<double>(interactions) / n; }
};

namespace milestone {
inline constexpr const char* kFirstPhase0 = "first-phase-0";
inline constexpr const char* kPhase0Complete = "phase-0-complete";
inline constexpr const char* kLeaderElected = "leader-elected";
inline constexpr const char* kWinnerFirst = "winner-bit-first-set";
inline constexpr const char* kConverged = "all-agents-converged";
std::string tournament_start(std::uint32_t j);
}  // namespace milestone

struct Violation {
  std::uint64_t interaction = 0;
  std::string description;
  bool operator==(const Violation&) const = default;
};

struct HandoffReport {
  std::vector<OpinionId> surviving;      // opinions with a token-holding Collector
  std::vector<std::uint64_t> tokens;     // tokens[i] belongs to opinion i+1
  std::array<std::uint32_t, 4> roles{};  // indexed by Role
  bool operator==(const HandoffReport&) const = default;
};

/// Token totals and role counts of a population.
HandoffReport handoff_check(const std::vector<AgentState>& agents, std::uint32_t k);

struct TrialResult {
  std::uint64_t rng_seed = 0;
  std::uint32_t n = 0;
  OpinionId winner = 0;  // 0: none
  bool correct = false;
  bool timeout = false;
  std::uint64_t interactions_total = 0;
  std::vector<std::pair<std::string, std::uint64_t>> milestones;  // in order of occurrence
  std::vector<Violation> invariant_violations;

  std::uint32_t tournaments_started = 0;
  std::vector<OpinionId> challengers;  // challenger opinion of each tournament that had one
  std::array<std::uint32_t, 4> roles_at_first_phase0{};
  std::optional<HandoffReport> handoff;             // at phase-0-complete
  std::vector<std::uint64_t> first_hour_crossing;   // improved: per opinion, 0 if none
  std::vector<std::uint32_t> junta_at_first_phase0;  // improved: junta members per opinion
  std::uint32_t leaders_at_election = 0;
  std::uint32_t match_checks = 0;
  std::uint32_t match_failures = 0;
  std::uint64_t snapshots = 0;
  std::uint64_t phase_gap_ok = 0;

  std::optional<std::uint64_t> milestone(const std::string& name) const;
  double parallel_time() const { return n ? static_cast<double>(interactions_total) / n : 0.0; }
  bool operator==(const TrialResult&) const = default;
};

/// One trial, stepped one interaction at a time.
class Simulation {
 public:
  Simulation(const ProtocolConfig& config, std::uint64_t seed);

  /// Performs one interaction; returns false once the trial has finished.
  bool step();
  /// Steps until finished or until `interactions` total interactions.
  void run_until(std::uint64_t interactions);
  void run();

  bool finished() const { return finished_; }
  std::uint64_t interactions() const { return clock_.interactions; }
  const std::vector<AgentState>& agents() const { return agents_; }
  const DerivedParams& params() const { return params_; }
  const ProtocolConfig& config() const { return config_; }
  const TrialResult& result() const { return result_; }

 private:
  struct Observed {
    std::int8_t phase;
    bool winner;
    bool challenger;
    bool le_done;
  };
  static Observed observe(const AgentState& a) { return {a.phase, a.winner, a.challenger, a.le_done}; }
  void on_change(AgentId id, const Observed& before);
  void on_phase_checkpoint(int phase, std::uint32_t tournament);
  void snapshot();
  void mark(const std::string& name);
  void violation(std::string description);
  void finish(OpinionId winner, bool timeout);

  ProtocolConfig config_;
  DerivedParams params_;
  Rng rng_;
  InteractionClock clock_;
  std::vector<AgentState> agents_;
  TrialResult result_;
  bool finished_ = false;

  std::uint32_t negative_ = 0;
  std::uint32_t winners_ = 0;
  std::vector<std::uint32_t> winners_by_opinion_;
  std::vector<std::uint32_t> phase0_entries_;
  std::array<std::uint32_t, 10> checked_{};
  std::uint32_t last_challenge_tournament_ = 0;
  bool expected_b_ = false;
  bool leader_seen_ = false;
  bool token_violation_logged_ = false;
};

/// Runs one trial to convergence or the interaction cap.
TrialResult run_trial(const ProtocolConfig& config, std::uint64_t seed);

// ---------------------------------------------------------------------------
// State-budget audit

struct RoleBudget {
  Role role;
  std::uint64_t representable = 0;  // role-specific encodings
  std::uint64_t observed = 0;       // distinct role-specific states in the snapshot
};

struct StateBudgetReport {
  std::uint64_t shared = 0;            // |S_shared|
  std::array<RoleBudget, 4> roles{};   // indexed by Role
  std::uint64_t max_states_used = 0;   // |S_shared| * max over roles
  std::uint64_t constant = 0;          // C
  std::uint64_t bound = 0;             // C (k + log n) or C (k loglog n + log n)
  std::uint64_t encoding_violations = 0;  // live values outside their encoding
  bool ok = false;
};

/// Documented constants C for the two bounds.
inline constexpr std::uint64_t kSimpleStateConstant = 1ull << 21;
inline constexpr std::uint64_t kImprovedStateConstant = 1ull << 21;

StateBudgetReport audit_state_budget(const std::vector<AgentState>& snapshot, const ProtocolConfig& config);

}  // namespace plurality
