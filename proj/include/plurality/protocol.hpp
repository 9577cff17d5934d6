#pragma once

#include <cstdint>
#include <vector>

#include "plurality/config.hpp"
#include "plurality/rng.hpp"
#include "plurality/subprotocols.hpp"

namespace plurality {

/// Per-phase flag bits; cleared whenever the agent's phase changes.
enum AgentFlag : std::uint8_t {
  kInitiated = 1,        // has initiated an interaction during initialization
  kPhaseEntered = 2,     // Tracker: phase-entry bookkeeping done
  kConclusionB = 4,      // Conclusion rule for a B player applied
  kConclusionA = 8,      // Conclusion rule for an A/U player applied
};

/// One agent. Only the fields of the current role are live; the others hold
/// their default values.
struct AgentState {
  // shared
  Role role = Role::Collector;
  std::int8_t phase = -1;
  std::uint8_t flags = 0;
  bool le_done = false;  // the leader is known to exist (unordered, improved)

  // Collector
  OpinionId opinion = 0;
  std::uint8_t tokens = 0;
  std::int8_t load = 0;
  bool defender = false;
  bool challenger = false;
  bool winner = false;
  bool eliminated = false;

  // Clock
  std::uint16_t count = 0;
  std::uint8_t hold = 0;  // completed cycles inside a held phase (0 or 6)

  // Tracker: tc is the tournament counter (ordered) or the candidate slot
  // holding an opinion id, 0 when empty (unordered, improved).
  std::uint16_t tc = 0;
  bool announced = false;
  bool exhausted = false;
  bool leader = false;
  bool le_synced = false;
  LeaderElectionState le;

  // Player
  PlayerOpinion player_opinion = PlayerOpinion::U;
  MajorityState maj;

  // Improved variant, live while phase < 0
  JuntaState junta;

  bool operator==(const AgentState&) const = default;
};

/// Circular "v is ahead of u" on the phase ring: 1 <= (p_v - p_u) mod 10 <= 5.
bool phase_ahead(int p_u, int p_v);

/// Marks that a leader exists; a Tracker drops its leader-election fields.
void learn_leader_known(AgentState& a);

/// Changes the agent's phase, clearing the per-phase flags and running the
/// role's phase-entry and phase-exit bookkeeping.
void set_phase(AgentState& a, int phase, const DerivedParams& p);

/// Collector becomes Clock, Tracker or Player with probability 1/3 each.
void assign_random_role(AgentState& a, const DerivedParams& p, Rng& rng);

/// Initialization for agents in phase -1 (ordered and unordered variants).
void init_transition(AgentState& u, AgentState& v, const DerivedParams& p, Rng& rng);

/// Clock agent u: counting during initialization, then the leaderless clock.
void clock_transition(AgentState& u, AgentState& v, const DerivedParams& p);

/// Tracker in phase 0, first time in the phase: tc += 1, saturating at k+1.
void tracker_transition(AgentState& u, const DerivedParams& p);

/// Setup / Cancellation / Lineup / Match / Conclusion and the phase broadcast.
void tournament_transition(AgentState& u, AgentState& v, const DerivedParams& p, Rng& rng);

/// Winner trigger and winner epidemic. Returns true if either agent is (now) a winner.
bool final_broadcast_transition(AgentState& u, AgentState& v, const DerivedParams& p);

/// Leader election, candidate sampling and challenger announcement (unordered, improved).
void unordered_setup_transition(AgentState& u, AgentState& v, const DerivedParams& p, Rng& rng);

/// Improved variant initialization for agents with phase < 0.
void modified_init_transition(AgentState& u, AgentState& v, const DerivedParams& p, Rng& rng);

/// Both are pre-phase Collectors holding the same opinion.
bool meaningful_interaction_gate(const AgentState& u, const AgentState& v);

/// Majority sub-round index announced by a Clock in phase 6.
std::uint32_t clock_majority_round(const AgentState& clock, const DerivedParams& p);

/// Initial population: agent i holds the opinion of the block it falls in.
std::vector<AgentState> initial_population(const ProtocolConfig& config, const DerivedParams& p);

/// Full transition for an ordered pair (u initiates).
void interact(AgentState& u, AgentState& v, const DerivedParams& p, Rng& rng);

}  // namespace plurality
