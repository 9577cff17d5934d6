#include "plurality/standalone.hpp"

#include <algorithm>

#include "plurality/engine.hpp"

namespace plurality {

MajoritySchedule default_majority_schedule(std::uint32_t m) {
  const std::uint32_t lg = std::max(1u, ceil_log2(m));
  MajoritySchedule s;
  s.broadcast_rounds = 3;
  s.rounds = 2 * lg + 1 + s.broadcast_rounds;
  s.round_interactions = 4ull * lg * m;
  s.params.max_exponent = static_cast<std::uint8_t>(lg);
  s.params.rounds = s.rounds;
  s.params.broadcast_rounds = s.broadcast_rounds;
  return s;
}

MajorityRun run_majority(std::uint32_t a, std::uint32_t b, std::uint32_t m, const MajoritySchedule& schedule,
                         std::uint64_t seed) {
  if (a + b > m) throw ConfigError("m: fewer players than A and B inputs");
  Rng rng(seed);
  std::vector<MajorityState> players(m, majority_init(PlayerOpinion::U));
  std::fill_n(players.begin(), a, majority_init(PlayerOpinion::A));
  std::fill_n(players.begin() + a, b, majority_init(PlayerOpinion::B));
  MajorityRun run;
  for (std::uint32_t r = 0; r < schedule.rounds; ++r) {
    const MajorityRound kind = majority_round_kind(r, schedule.rounds, schedule.broadcast_rounds);
    if (kind == MajorityRound::Broadcast && r + schedule.broadcast_rounds == schedule.rounds) {
      for (const auto& s : players) {
        run.survivors_a += s.sign > 0;
        run.survivors_b += s.sign < 0;
      }
    }
    for (std::uint64_t t = 0; t < schedule.round_interactions; ++t) {
      const auto [i, j] = sample_pair(rng, m);
      const auto [x, y] = majority_step(players[i], players[j], r, schedule.params);
      players[i] = x;
      players[j] = y;
    }
  }
  for (auto& s : players) {
    s = majority_enter_round(s, schedule.rounds - 1, schedule.params);
    (s.output == PlayerOpinion::A ? run.outputs_a : run.outputs_b) += 1;
  }
  run.unanimous = run.outputs_a == m || run.outputs_b == m;
  run.consensus = !run.unanimous ? PlayerOpinion::U : run.outputs_a == m ? PlayerOpinion::A : PlayerOpinion::B;
  return run;
}

JuntaRun run_junta(std::uint32_t x, unsigned ell_max, std::uint64_t interactions, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<JuntaState> agents(x);
  std::uint32_t active = x;
  JuntaRun run;
  for (std::uint64_t t = 0; t < interactions && active > 0; ++t) {
    const auto [i, j] = sample_pair(rng, x);
    const bool was_active = agents[i].active;
    agents[i] = junta_step(agents[i], agents[j], ell_max);
    if (was_active && !agents[i].active && --active == 0) run.settled_at = t + 1;
  }
  for (const auto& a : agents) run.junta_size += a.is_junta;
  run.still_active = active;
  return run;
}

LeaderElectionRun run_leader_election(std::uint32_t trackers, unsigned rounds, std::uint64_t round_interactions,
                                      std::uint64_t seed) {
  Rng rng(seed);
  std::vector<LeaderElectionState> agents;
  agents.reserve(trackers);
  for (std::uint32_t i = 0; i < trackers; ++i) agents.push_back(leader_election_init(rng, rounds));
  LeaderElectionRun run;
  if (trackers >= 2) {
    for (unsigned r = 0; r < rounds; ++r) {
      for (std::uint64_t t = 0; t < round_interactions; ++t) {
        const auto [i, j] = sample_pair(rng, trackers);
        const auto [x, y] = leader_election_step(agents[i], agents[j], r, rng, rounds);
        agents[i] = x;
        agents[j] = y;
      }
      for (auto& a : agents) {
        while (!a.done && a.round <= r) a = leader_election_next_round(a, rng, rounds);
      }
      std::uint32_t c = 0;
      for (const auto& a : agents) c += a.contender;
      run.contenders_after_round.push_back(c);
    }
  }
  for (auto& a : agents) {
    while (!a.done) a = leader_election_next_round(a, rng, rounds);
    run.leaders += a.contender && a.done;
  }
  return run;
}

}  // namespace plurality
