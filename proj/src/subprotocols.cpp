#include "plurality/subprotocols.hpp"

#include <algorithm>
#include <string>

namespace plurality {

ClockStep leaderless_clock_step(std::uint32_t count_u, std::uint32_t count_v, std::uint32_t psi) {
  if (psi < 2 || count_u >= psi || count_v >= psi) {
    throw InvariantViolation("clock count out of range: (" + std::to_string(count_u) + ", " +
                             std::to_string(count_v) + ") with psi " + std::to_string(psi));
  }
  ClockStep r{count_u, count_v, false, false};
  const std::uint32_t d = (count_v + psi - count_u) % psi;
  // v ahead (or equal): u is behind and moves; otherwise v is behind.
  if (d < (psi + 1) / 2) {
    r.count_u = (count_u + 1) % psi;
    r.ticked_u = r.count_u == 0;
  } else {
    r.count_v = (count_v + 1) % psi;
    r.ticked_v = r.count_v == 0;
  }
  return r;
}

std::pair<int, int> load_balance_step(int load_u, int load_v) {
  const int sum = load_u + load_v;
  // floor division toward -inf
  const int lo = sum >= 0 ? sum / 2 : -((-sum + 1) / 2);
  return {lo, sum - lo};
}

namespace {

void refresh_output(MajorityState& s, MajorityRound kind) {
  if (kind == MajorityRound::Broadcast) {
    s.output = (s.seen_b && !s.seen_a) ? PlayerOpinion::B : PlayerOpinion::A;
  } else if (s.sign > 0) {
    s.output = PlayerOpinion::A;
  } else if (s.sign < 0) {
    s.output = PlayerOpinion::B;
  }
}

}  // namespace

MajorityState majority_init(PlayerOpinion input) {
  MajorityState s;
  switch (input) {
    case PlayerOpinion::A: s.sign = 1; s.output = PlayerOpinion::A; break;
    case PlayerOpinion::B: s.sign = -1; s.output = PlayerOpinion::B; break;
    case PlayerOpinion::U: s.sign = 0; s.output = PlayerOpinion::A; break;
  }
  return s;
}

MajorityRound majority_round_of(const MajorityState& s, const MajorityParams& params) {
  return majority_round_kind(s.index, params.rounds, params.broadcast_rounds);
}

MajorityState majority_enter_round(MajorityState s, std::uint32_t index, const MajorityParams& params) {
  index = std::min(index, params.rounds - 1);
  if (index <= s.index) return s;
  s.index = static_cast<std::uint8_t>(index);
  s.split_done = false;
  const MajorityRound kind = majority_round_of(s, params);
  if (kind == MajorityRound::Broadcast) {
    s.seen_a = s.seen_a || s.sign > 0;
    s.seen_b = s.seen_b || s.sign < 0;
  }
  refresh_output(s, kind);
  return s;
}

std::pair<MajorityState, MajorityState> majority_step(MajorityState u, MajorityState v, std::uint32_t round_signal,
                                                      const MajorityParams& params) {
  u = majority_enter_round(u, round_signal, params);
  v = majority_enter_round(v, round_signal, params);
  if (u.index != v.index) return {u, v};
  const MajorityRound kind = majority_round_of(u, params);
  switch (kind) {
    case MajorityRound::Cancel:
      if (u.sign != 0 && u.sign == -v.sign && u.exponent == v.exponent) {
        u.sign = v.sign = 0;
        u.exponent = v.exponent = 0;
      }
      break;
    case MajorityRound::Split: {
      MajorityState* full = u.sign != 0 ? &u : &v;
      MajorityState* empty = u.sign != 0 ? &v : &u;
      if (full->sign != 0 && empty->sign == 0 && !full->split_done && !empty->split_done &&
          full->exponent < params.max_exponent) {
        empty->sign = full->sign;
        full->exponent = empty->exponent = static_cast<std::uint8_t>(full->exponent + 1);
        full->split_done = empty->split_done = true;
      }
      break;
    }
    case MajorityRound::Broadcast: {
      const bool a = u.seen_a || v.seen_a;
      const bool b = u.seen_b || v.seen_b;
      u.seen_a = v.seen_a = a;
      u.seen_b = v.seen_b = b;
      break;
    }
  }
  refresh_output(u, kind);
  refresh_output(v, kind);
  return {u, v};
}

MajorityRound majority_round_kind(std::uint32_t index, std::uint32_t total, std::uint32_t broadcast) {
  if (index + broadcast >= total) return MajorityRound::Broadcast;
  return index % 2 == 0 ? MajorityRound::Cancel : MajorityRound::Split;
}

JuntaState junta_step(JuntaState u, const JuntaState& v, unsigned ell_max) {
  if (!u.active) return u;
  const bool climbs = u.level == 0 ? v.level == 0 : v.level >= u.level;
  if (!climbs) {
    u.active = false;
    return u;
  }
  u.level = static_cast<std::uint8_t>(std::min<unsigned>(u.level + 1u, ell_max));
  if (u.level >= ell_max) {
    u.is_junta = true;
    u.active = false;
  }
  return u;
}

JuntaClockStep junta_clock_step(JuntaState u, const JuntaState& v, const JuntaClockParams& params) {
  const std::uint32_t w = params.window;
  const std::uint32_t half = w / 2;
  const std::uint32_t d = (v.p + w - u.p) % w;
  std::uint32_t next = u.p;
  if (u.is_junta) {
    if (d < half) next = (v.p + 1u) % w;
  } else if (d >= 1 && d < half) {
    next = v.p;
  }
  const std::uint32_t advance = (next + w - u.p) % w;
  JuntaClockStep r;
  r.hours_advanced = (u.p % params.m + advance) / params.m;
  u.p = static_cast<std::uint16_t>(next);
  r.u = u;
  if (r.hours_advanced > 0) r.hour_crossed = (next / params.m) % (w / params.m);
  return r;
}

LeaderElectionState leader_election_init(Rng& rng, unsigned rounds) {
  LeaderElectionState s;
  if (rounds == 0) {
    s.done = true;
    return s;
  }
  s.heads = rng.coin();
  s.signal = s.heads;
  return s;
}

LeaderElectionState leader_election_next_round(LeaderElectionState s, Rng& rng, unsigned rounds) {
  if (s.done) return s;
  if (s.contender && !s.heads && s.signal) s.contender = false;
  s.round = static_cast<std::uint8_t>(s.round + 1);
  s.heads = false;
  s.signal = false;
  if (s.round >= rounds) {
    s.done = true;
  } else if (s.contender) {
    s.heads = rng.coin();
    s.signal = s.heads;
  }
  return s;
}

std::pair<LeaderElectionState, LeaderElectionState> leader_election_exchange(
    LeaderElectionState u, LeaderElectionState v) {
  if (!u.done && !v.done && u.round == v.round) {
    const bool s = u.signal || v.signal;
    u.signal = v.signal = s;
  }
  return {u, v};
}

std::pair<LeaderElectionState, LeaderElectionState> leader_election_step(
    LeaderElectionState u, LeaderElectionState v, unsigned round_signal, Rng& rng, unsigned rounds) {
  const unsigned target = std::min(round_signal, rounds);
  while (!u.done && u.round < target) u = leader_election_next_round(u, rng, rounds);
  while (!v.done && v.round < target) v = leader_election_next_round(v, rng, rounds);
  return leader_election_exchange(u, v);
}

}  // namespace plurality
