// SimpleAlgorithm: initialization, clock synchronization, tracker, tournament
// and final broadcast, plus the composed transition for all variants.
#include <algorithm>

#include "plurality/protocol.hpp"

namespace plurality {

namespace {

bool epoch_ahead(const AgentState& u, const AgentState& v) {
  if (phase_ahead(u.phase, v.phase)) return true;
  return u.phase == v.phase && v.hold > u.hold;
}

void clock_tick(AgentState& c, const DerivedParams& p) {
  if (c.phase == 6) {
    if (++c.hold < p.match_hold) return;
    set_phase(c, 7, p);
    return;
  }
  if (c.phase == 0 && p.variant != Variant::Ordered) {
    if (!c.le_done) return;
    if (++c.hold < p.setup_hold) return;
    set_phase(c, 1, p);
    return;
  }
  set_phase(c, (c.phase + 1) % 10, p);
}

void become_winner(AgentState& a, OpinionId opinion) {
  AgentState w;
  w.phase = a.phase;
  w.opinion = opinion;
  w.winner = true;
  a = w;
}

}  // namespace

void learn_leader_known(AgentState& a) {
  if (a.le_done) return;
  a.le_done = true;
  if (a.role == Role::Tracker) {
    a.le = LeaderElectionState{};
    a.le_synced = false;
  }
}

bool phase_ahead(int p_u, int p_v) {
  const int d = ((p_v - p_u) % 10 + 10) % 10;
  return d >= 1 && d <= 5;
}

void set_phase(AgentState& a, int phase, const DerivedParams& p) {
  if (a.phase == phase) return;
  const int old = a.phase;
  a.phase = static_cast<std::int8_t>(phase);
  a.flags = 0;
  if (old < 0 && phase >= 0) a.junta = JuntaState{};
  switch (a.role) {
    case Role::Clock:
      if (old < 0) a.count = 0;
      a.hold = 0;
      break;
    case Role::Tracker:
      if (p.variant != Variant::Ordered) {
        if (old == 0 && a.leader && a.le_done && !a.announced) a.exhausted = true;
        if (phase == 0 && a.le_done) {
          a.tc = 0;
          a.announced = false;
        }
      }
      if (phase == 0) tracker_transition(a, p);
      break;
    case Role::Player:
      if (old == 6) {
        a.player_opinion = a.maj.output;
        a.maj = MajorityState{};
      }
      if (phase == 0) {
        a.player_opinion = PlayerOpinion::U;
        a.maj = MajorityState{};
      } else if (phase == 6) {
        a.maj = majority_init(a.player_opinion);
      }
      break;
    case Role::Collector:
      break;
  }
}

void assign_random_role(AgentState& a, const DerivedParams& p, Rng& rng) {
  AgentState fresh;
  fresh.phase = a.phase;
  fresh.flags = a.flags;
  fresh.le_done = a.le_done;
  switch (rng.below(3)) {
    case 0:
      fresh.role = Role::Clock;
      break;
    case 1:
      fresh.role = Role::Tracker;
      fresh.tc = p.variant == Variant::Ordered ? 1 : 0;
      fresh.le = leader_election_init(rng, p.le_rounds);
      break;
    default:
      fresh.role = Role::Player;
      break;
  }
  a = fresh;
}

void init_transition(AgentState& u, AgentState& v, const DerivedParams& p, Rng& rng) {
  if (p.variant == Variant::Ordered && !(u.flags & kInitiated) && u.role == Role::Collector && u.opinion == 1) {
    u.defender = true;
  }
  u.flags |= kInitiated;
  if (v.phase == -1 && u.role == Role::Collector && v.role == Role::Collector && u.opinion == v.opinion &&
      u.tokens + v.tokens <= kMaxLoad) {
    v.tokens = static_cast<std::uint8_t>(v.tokens + u.tokens);
    u.tokens = 0;
    assign_random_role(u, p, rng);
  }
  if (v.phase == 0) set_phase(u, 0, p);
}

void clock_transition(AgentState& u, AgentState& v, const DerivedParams& p) {
  if (u.phase < 0) {
    if (v.role != Role::Collector) {
      ++u.count;
    } else if (u.count > 0) {
      --u.count;
    }
    if (u.count >= p.init_target) set_phase(u, 0, p);
    return;
  }
  if (v.role != Role::Clock || v.phase < 0) return;
  const std::uint32_t half = p.psi / 2;
  // Same half of the cycle but a later epoch: u missed a whole cycle.
  if (u.count < half && v.count < half && epoch_ahead(u, v)) {
    set_phase(u, v.phase, p);
    u.hold = v.hold;
    if (v.le_done) learn_leader_known(u);
  }
  const ClockStep s = leaderless_clock_step(u.count, v.count, p.psi);
  u.count = static_cast<std::uint16_t>(s.count_u);
  v.count = static_cast<std::uint16_t>(s.count_v);
  if (s.ticked_u) clock_tick(u, p);
  if (s.ticked_v) clock_tick(v, p);
}

void tracker_transition(AgentState& u, const DerivedParams& p) {
  if (p.variant != Variant::Ordered || u.phase != 0 || (u.flags & kPhaseEntered)) return;
  u.flags |= kPhaseEntered;
  u.tc = static_cast<std::uint16_t>(std::min<std::uint32_t>(u.tc + 1u, p.k + 1u));
}

std::uint32_t clock_majority_round(const AgentState& clock, const DerivedParams& p) {
  const std::uint32_t pos = static_cast<std::uint32_t>(clock.hold) * p.psi + clock.count;
  return std::min(pos / p.maj_round_ticks, p.maj_rounds - 1);
}

void tournament_transition(AgentState& u, AgentState& v, const DerivedParams& p, Rng& rng) {
  if (u.phase == v.phase) {
    switch (u.phase) {
      case 0:  // Setup
        if (u.role == Role::Collector) {
          if (p.variant == Variant::Ordered && v.role == Role::Tracker && u.opinion == v.tc) u.challenger = true;
          u.load = static_cast<std::int8_t>(u.defender ? u.tokens : u.challenger ? -u.tokens : 0);
        }
        if (p.variant != Variant::Ordered) unordered_setup_transition(u, v, p, rng);
        break;
      case 2:  // Cancellation
        if (u.role == Role::Collector && v.role == Role::Collector) {
          const auto [a, b] = load_balance_step(u.load, v.load);
          u.load = static_cast<std::int8_t>(a);
          v.load = static_cast<std::int8_t>(b);
        }
        break;
      case 4:  // Lineup
        if (u.role == Role::Collector && u.load != 0 && v.role == Role::Player &&
            v.player_opinion == PlayerOpinion::U) {
          v.player_opinion = u.load > 0 ? PlayerOpinion::A : PlayerOpinion::B;
          u.load = static_cast<std::int8_t>(u.load > 0 ? u.load - 1 : u.load + 1);
        }
        break;
      case 6:  // Match
        if (u.role == Role::Player && v.role == Role::Player) {
          if (u.maj.index == v.maj.index) {
            const auto [a, b] = majority_step(u.maj, v.maj, u.maj.index, p.majority);
            u.maj = a;
            v.maj = b;
          }
        } else if (u.role == Role::Player && v.role == Role::Clock) {
          u.maj = majority_enter_round(u.maj, clock_majority_round(v, p), p.majority);
        } else if (u.role == Role::Clock && v.role == Role::Player) {
          v.maj = majority_enter_round(v.maj, clock_majority_round(u, p), p.majority);
        }
        break;
      case 8:  // Conclusion
        if (u.role == Role::Collector && v.role == Role::Player) {
          const bool tracks_elimination = p.variant != Variant::Ordered;
          if (v.player_opinion == PlayerOpinion::B) {
            if (!(u.flags & kConclusionB)) {
              u.flags |= kConclusionB;
              if (tracks_elimination && u.defender && !u.challenger) u.eliminated = true;
              u.defender = u.challenger;
              u.challenger = false;
            }
          } else if (!(u.flags & kConclusionA)) {
            u.flags |= kConclusionA;
            if (tracks_elimination && u.challenger) u.eliminated = true;
            u.challenger = false;
          }
        }
        break;
      default:
        break;
    }
  }
  if (u.role != Role::Clock && phase_ahead(u.phase, v.phase)) set_phase(u, v.phase, p);
}

bool final_broadcast_transition(AgentState& u, AgentState& v, const DerivedParams& p) {
  if (u.winner || v.winner) {
    if (!u.winner) {
      become_winner(u, v.opinion);
    } else if (!v.winner) {
      become_winner(v, u.opinion);
    }
    return true;
  }
  if (u.role == Role::Tracker && v.role == Role::Tracker && u.exhausted != v.exhausted) {
    u.exhausted = v.exhausted = true;
  }
  if (u.role == Role::Tracker && v.role == Role::Collector && v.defender) {
    const bool finished = p.variant == Variant::Ordered ? u.tc == p.k + 1 : u.exhausted;
    if (finished) {
      v.winner = true;
      return true;
    }
  }
  return false;
}

std::vector<AgentState> initial_population(const ProtocolConfig& config, const DerivedParams& p) {
  std::vector<AgentState> agents;
  agents.reserve(config.n);
  for (std::size_t i = 0; i < config.x.size(); ++i) {
    AgentState a;
    a.phase = static_cast<std::int8_t>(p.phase_floor);
    a.opinion = static_cast<OpinionId>(i + 1);
    a.tokens = 1;
    agents.insert(agents.end(), config.x[i], a);
  }
  return agents;
}

void interact(AgentState& u, AgentState& v, const DerivedParams& p, Rng& rng) {
  if (final_broadcast_transition(u, v, p)) return;
  if (u.phase < 0) {
    if (p.variant == Variant::Improved) {
      modified_init_transition(u, v, p, rng);
    } else {
      if (u.role == Role::Clock) clock_transition(u, v, p);
      init_transition(u, v, p, rng);
    }
    return;
  }
  if (v.phase < 0) return;
  if (u.le_done != v.le_done) {
    learn_leader_known(u);
    learn_leader_known(v);
  }
  if (u.role == Role::Clock) clock_transition(u, v, p);
  tournament_transition(u, v, p, rng);
}

}  // namespace plurality
