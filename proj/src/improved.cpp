// ImprovedAlgorithm: per-opinion junta clocks during the modified
// initialization; opinions whose clock never ticks are pruned at phase 0.
#include <algorithm>

#include "plurality/protocol.hpp"

namespace plurality {

bool meaningful_interaction_gate(const AgentState& u, const AgentState& v) {
  return u.role == Role::Collector && v.role == Role::Collector && u.phase < 0 && v.phase < 0 &&
         u.opinion == v.opinion && !u.winner && !v.winner;
}

void modified_init_transition(AgentState& u, AgentState& v, const DerivedParams& p, Rng& rng) {
  int next = u.phase;
  if (meaningful_interaction_gate(u, v)) {
    u.junta = junta_step(u.junta, v.junta, p.ell_max);
    const JuntaClockStep step = junta_clock_step(u.junta, v.junta, p.junta_clock);
    u.junta = step.u;
    next = std::min(0, u.phase + static_cast<int>(step.hours_advanced));
    if (u.tokens + v.tokens <= kMaxLoad) {
      v.tokens = static_cast<std::uint8_t>(v.tokens + u.tokens);
      u.tokens = 0;
    }
  }
  if (next == 0 || v.phase == 0) {
    if (u.phase == p.phase_floor || u.tokens == 0) assign_random_role(u, p, rng);
    set_phase(u, 0, p);
  } else {
    u.phase = static_cast<std::int8_t>(next);
  }
}

}  // namespace plurality
