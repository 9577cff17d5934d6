#pragma once

#include <cstdint>
#include <optional>
#include <utility>

#include "plurality/rng.hpp"
#include "plurality/types.hpp"

namespace plurality {

// ---------------------------------------------------------------------------
// Leaderless phase clock

struct ClockStep {
  std::uint32_t count_u;
  std::uint32_t count_v;
  bool ticked_u;
  bool ticked_v;
  bool operator==(const ClockStep&) const = default;
};

/// The circularly-behind counter increments mod psi; on equal counts the
/// initiator increments. v is ahead of u iff 1 <= (count_v - count_u) mod psi < psi/2.
/// Throws InvariantViolation if a count is outside [0, psi).
ClockStep leaderless_clock_step(std::uint32_t count_u, std::uint32_t count_v, std::uint32_t psi);

// ---------------------------------------------------------------------------
// Discrete load balancing

inline constexpr int kMaxLoad = 10;

/// (floor((a+b)/2), ceil((a+b)/2)) with floor toward -inf and ceil toward +inf.
std::pair<int, int> load_balance_step(int load_u, int load_v);

// ---------------------------------------------------------------------------
// Exact majority by synchronized cancellation / doubling
//
// A player holds sign * 2^-exponent (or 0). Cancel rounds annihilate opposite
// values of equal exponent; split rounds let a nonzero value share itself with
// an empty partner, both ending at exponent + 1. The signed sum is conserved,
// so once one sign has died out the other is the true majority. Broadcast
// rounds spread which signs are still present.

enum class MajorityRound : std::uint8_t { Cancel, Split, Broadcast };

struct MajorityState {
  std::int8_t sign = 0;          // +1 for A, -1 for B, 0 when empty
  std::uint8_t exponent = 0;     // magnitude is 2^-exponent
  std::uint8_t index = 0;        // current sub-round, never decreases
  bool split_done = false;       // at most one split per sub-round
  bool seen_a = false;
  bool seen_b = false;
  PlayerOpinion output = PlayerOpinion::A;

  int bias() const { return sign; }
  bool operator==(const MajorityState&) const = default;
};

struct MajorityParams {
  std::uint8_t max_exponent = 14;
  std::uint32_t rounds = 31;           // sub-rounds, broadcast ones included
  std::uint32_t broadcast_rounds = 3;  // trailing broadcast sub-rounds
};

MajorityState majority_init(PlayerOpinion input);

/// Kind of the sub-round a player is in.
MajorityRound majority_round_of(const MajorityState& s, const MajorityParams& params);

/// Moves a player forward to sub-round `index` (a lower index is ignored). A
/// new sub-round clears the split flag; entering broadcast records the player's sign.
MajorityState majority_enter_round(MajorityState s, std::uint32_t index, const MajorityParams& params);

/// One interaction between two players after both have moved to `round_signal`.
/// Players still in different sub-rounds do not interact.
std::pair<MajorityState, MajorityState> majority_step(MajorityState u, MajorityState v, std::uint32_t round_signal,
                                                      const MajorityParams& params);

/// Kind of sub-round `index` in a schedule of `total` sub-rounds whose last
/// `broadcast` sub-rounds are broadcast rounds; earlier ones alternate Cancel, Split.
MajorityRound majority_round_kind(std::uint32_t index, std::uint32_t total, std::uint32_t broadcast);

// ---------------------------------------------------------------------------
// Junta election and junta-driven phase clock

struct JuntaState {
  std::uint8_t level = 0;
  bool active = true;
  bool is_junta = false;
  std::uint16_t p = 0;  // phase counter modulo JuntaClockParams::window
  bool operator==(const JuntaState&) const = default;
};

struct JuntaClockParams {
  std::uint16_t m = 32;        // ticks per hour
  std::uint16_t window = 128;  // p is stored modulo window (a multiple of m, >= 4m)
};

/// Initiator-driven level climbing. Level 0 advances only against another
/// level-0 agent; higher levels advance against same-or-higher levels. Any
/// other encounter deactivates u. Reaching ell_max makes u a junta member.
JuntaState junta_step(JuntaState u, const JuntaState& v, unsigned ell_max);

struct JuntaClockStep {
  JuntaState u;
  std::optional<unsigned> hour_crossed;  // new hour index modulo window/m
  unsigned hours_advanced = 0;           // number of hour boundaries passed
};

/// Junta initiator: p_u <- max(p_u, p_v + 1); others: p_u <- max(p_u, p_v),
/// with max taken in the circular order of the window.
JuntaClockStep junta_clock_step(JuntaState u, const JuntaState& v, const JuntaClockParams& params);

// ---------------------------------------------------------------------------
// Leader election by synchronized coin-flip elimination rounds

struct LeaderElectionState {
  bool contender = true;
  bool heads = false;   // this round's coin
  bool signal = false;  // "some contender flipped heads this round"
  bool done = false;
  std::uint8_t round = 0;
  bool operator==(const LeaderElectionState&) const = default;
};

/// Fresh contender at round 0 with its first coin flipped.
LeaderElectionState leader_election_init(Rng& rng, unsigned rounds);

/// Closes the current round (a tails contender that heard a heads signal
/// drops out) and opens the next one, or marks completion after `rounds`.
LeaderElectionState leader_election_next_round(LeaderElectionState s, Rng& rng, unsigned rounds);

/// Spreads the heads signal between two agents in the same round.
std::pair<LeaderElectionState, LeaderElectionState> leader_election_exchange(
    LeaderElectionState u, LeaderElectionState v);

/// Both agents catch up to round `round_signal`, then exchange signals.
std::pair<LeaderElectionState, LeaderElectionState> leader_election_step(
    LeaderElectionState u, LeaderElectionState v, unsigned round_signal, Rng& rng, unsigned rounds);

}  // namespace plurality
