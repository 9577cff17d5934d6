#pragma once

// Self-contained drivers that run one subprotocol on its own population with
// globally synchronized rounds. Used to check subprotocol contracts in isolation.

#include <cstdint>
#include <vector>

#include "plurality/subprotocols.hpp"

namespace plurality {

struct MajoritySchedule {
  std::uint32_t rounds = 0;            // total sub-rounds, broadcast ones included
  std::uint32_t broadcast_rounds = 3;
  std::uint64_t round_interactions = 0;
  MajorityParams params;
};

/// rounds = 2 ceil(log2 m) + 1 + broadcast, each lasting 4 ceil(log2 m) parallel time.
MajoritySchedule default_majority_schedule(std::uint32_t m);

struct MajorityRun {
  std::uint32_t outputs_a = 0;
  std::uint32_t outputs_b = 0;
  std::uint32_t survivors_a = 0;  // positive values left when broadcasting starts
  std::uint32_t survivors_b = 0;
  bool unanimous = false;
  PlayerOpinion consensus = PlayerOpinion::U;  // U when players disagree
};

/// m players, a of them with input A, b with input B, the rest U.
MajorityRun run_majority(std::uint32_t a, std::uint32_t b, std::uint32_t m, const MajoritySchedule& schedule,
                         std::uint64_t seed);

struct JuntaRun {
  std::uint32_t junta_size = 0;
  std::uint32_t still_active = 0;
  std::uint64_t settled_at = 0;  // interaction at which the last active agent stopped; 0 if never
};

/// x agents of one opinion interacting only among themselves.
JuntaRun run_junta(std::uint32_t x, unsigned ell_max, std::uint64_t interactions, std::uint64_t seed);

struct LeaderElectionRun {
  std::uint32_t leaders = 0;
  std::vector<std::uint32_t> contenders_after_round;  // index r: contenders when round r+1 begins
};

LeaderElectionRun run_leader_election(std::uint32_t trackers, unsigned rounds, std::uint64_t round_interactions,
                                      std::uint64_t seed);

}  // namespace plurality
