// Unordered variant: leader election among Trackers, candidate sampling with
// Tracker amplification, and the leader's challenger announcement.
#include "plurality/protocol.hpp"

namespace plurality {

namespace {

void claim_leadership(AgentState& t) {
  if (t.le.done && t.le.contender && !t.leader) {
    learn_leader_known(t);
    t.leader = true;
  }
}

// Rounds last half a clock cycle. A Tracker in an even round advances on
// seeing a Clock in the third quarter of the cycle, in an odd round on seeing
// one in the first quarter; the quarter gap absorbs clocks straddling a boundary.
void observe_clock(AgentState& t, const AgentState& clock, const DerivedParams& p, Rng& rng) {
  if (t.le_done || t.le.done) return;
  const std::uint32_t half = p.psi / 2;
  const std::uint32_t quarter = p.psi / 4;
  if (!t.le_synced) {
    t.le_synced = true;
    t.le.round = clock.count < half ? 0 : 1;
    return;
  }
  const bool even = (t.le.round & 1) == 0;
  const bool boundary = even ? (clock.count >= half && clock.count < half + quarter) : clock.count < quarter;
  if (!boundary) return;
  t.le = leader_election_next_round(t.le, rng, p.le_rounds);
  claim_leadership(t);
}

// a adopts b's round if b is further along.
void catch_up(AgentState& a, const AgentState& b, const DerivedParams& p, Rng& rng) {
  if (!b.le_synced) return;
  if (!a.le_synced) {
    a.le_synced = true;
    a.le.round = b.le.round;
    if (b.le.done) {
      a.le.done = true;
      a.le.contender = false;
    }
    return;
  }
  while (!a.le.done && a.le.round < b.le.round) a.le = leader_election_next_round(a.le, rng, p.le_rounds);
  claim_leadership(a);
}

bool is_candidate(const AgentState& c) {
  return c.role == Role::Collector && !c.winner && c.tokens > 0 && !c.defender && !c.eliminated && !c.challenger;
}

void tracker_meets_collector(AgentState& t, AgentState& c) {
  if (!t.le_done) return;
  if (t.announced) {
    if (c.opinion == t.tc && c.tokens > 0 && !c.challenger && !c.defender && !c.eliminated) {
      c.challenger = true;
      c.load = static_cast<std::int8_t>(-c.tokens);
    }
    return;
  }
  if (t.tc == 0 && is_candidate(c)) {
    t.tc = c.opinion;
    if (t.leader) t.announced = true;
  }
}

void tracker_learns(AgentState& a, const AgentState& b) {
  if (!a.le_done || !b.le_done) return;
  if (b.announced) {
    if (!a.announced) {
      a.tc = b.tc;
      a.announced = true;
    }
    return;
  }
  if (!a.announced && a.tc == 0 && b.tc != 0) {
    a.tc = b.tc;
    if (a.leader) a.announced = true;
  }
}

}  // namespace

void unordered_setup_transition(AgentState& u, AgentState& v, const DerivedParams& p, Rng& rng) {
  if (u.role == Role::Tracker && v.role == Role::Clock) {
    observe_clock(u, v, p, rng);
  } else if (u.role == Role::Clock && v.role == Role::Tracker) {
    observe_clock(v, u, p, rng);
  } else if (u.role == Role::Tracker && v.role == Role::Tracker) {
    if (!u.le_done && !v.le_done) {
      catch_up(u, v, p, rng);
      catch_up(v, u, p, rng);
      const auto [a, b] = leader_election_exchange(u.le, v.le);
      u.le = a;
      v.le = b;
    }
    tracker_learns(u, v);
    tracker_learns(v, u);
  } else if (u.role == Role::Tracker && v.role == Role::Collector) {
    tracker_meets_collector(u, v);
  } else if (u.role == Role::Collector && v.role == Role::Tracker) {
    tracker_meets_collector(v, u);
  }
}

}  // namespace plurality
