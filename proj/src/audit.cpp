// State-space accounting. Each role's live fields are encoded as a product of
// finite ranges; the audit multiplies those cardinalities, compares them with
// the asymptotic budget, and checks that a snapshot stays inside the encodings.
#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "plurality/engine.hpp"

namespace plurality {

namespace {

struct Cardinalities {
  std::uint64_t phases = 0;
  std::uint64_t count = 0;
  std::uint64_t hold = 0;
  std::uint64_t exponent = 0;
  std::uint64_t le_round = 0;
  std::uint64_t maj_round = 0;
  std::uint64_t junta = 0;
};

Cardinalities cardinalities(const ProtocolConfig& c, const DerivedParams& p) {
  Cardinalities r;
  r.phases = static_cast<std::uint64_t>(10 - p.phase_floor);
  r.count = std::max(p.psi, p.init_target + 1);
  r.hold = std::max<std::uint64_t>({p.match_hold, c.variant == Variant::Ordered ? 1u : p.setup_hold, 1u});
  r.exponent = p.majority.max_exponent + 1u;
  r.le_round = p.le_rounds + 1u;
  r.maj_round = p.maj_rounds;
  r.junta = c.variant == Variant::Improved ? (p.ell_max + 1ull) * 2 * 2 * p.junta_clock.window : 0;
  return r;
}

std::uint64_t pack(std::initializer_list<std::uint64_t> fields) {
  std::uint64_t h = 0;
  for (auto f : fields) h = h * 1000003ull + f;
  return h;
}

}  // namespace

StateBudgetReport audit_state_budget(const std::vector<AgentState>& snapshot, const ProtocolConfig& config) {
  const DerivedParams p = derive(config);
  const Cardinalities card = cardinalities(config, p);
  const bool ordered = config.variant == Variant::Ordered;
  const std::uint64_t k = config.k;

  StateBudgetReport r;
  // phase x per-phase flags (4 bits) x le_done
  r.shared = card.phases * 16 * (ordered ? 1 : 2);

  auto& clock = r.roles[static_cast<std::size_t>(Role::Clock)];
  clock.role = Role::Clock;
  clock.representable = card.count * card.hold;

  auto& tracker = r.roles[static_cast<std::size_t>(Role::Tracker)];
  tracker.role = Role::Tracker;
  // Ordered: tc in [1, k+1]. Otherwise leader-election fields (four bits,
  // round, synced) until le_done, then candidate slot plus three bits.
  tracker.representable = ordered ? k + 1 : 16 * card.le_round * 2 + (k + 1) * 8;

  auto& collector = r.roles[static_cast<std::size_t>(Role::Collector)];
  collector.role = Role::Collector;
  // opinion x tokens [0,10] x (defender, challenger, winner, eliminated) x load [-10,10],
  // plus the pre-phase encoding opinion x tokens x junta state.
  collector.representable = k * 11 * 16 * 21 + k * 11 * card.junta;

  auto& player = r.roles[static_cast<std::size_t>(Role::Player)];
  player.role = Role::Player;
  // player opinion x (empty or sign x exponent) x sub-round x split flag x seen bits x output
  player.representable = 3 * (1 + 2 * card.exponent) * card.maj_round * 2 * 4 * 2;

  std::uint64_t per_role_sum = 0;
  for (const auto& rb : r.roles) per_role_sum += rb.representable;
  r.max_states_used = r.shared * per_role_sum;

  const std::uint64_t log_n = p.log_n;
  if (config.variant == Variant::Improved) {
    const auto loglog = static_cast<std::uint64_t>(std::max(1u, ceil_log2(log_n)));
    r.constant = kImprovedStateConstant;
    r.bound = r.constant * (k * loglog + log_n);
  } else {
    r.constant = kSimpleStateConstant;
    r.bound = r.constant * (k + log_n);
  }

  std::array<std::unordered_set<std::uint64_t>, 4> seen;
  for (const auto& a : snapshot) {
    bool in_range = a.phase >= p.phase_floor && a.phase <= 9;
    std::uint64_t key = 0;
    switch (a.role) {
      case Role::Clock:
        in_range = in_range && a.count < card.count && a.hold < card.hold;
        key = pack({a.count, a.hold});
        break;
      case Role::Tracker:
        if (ordered) {
          in_range = in_range && a.tc >= 1 && a.tc <= k + 1;
          key = a.tc;
        } else if (!a.le_done) {
          in_range = in_range && a.le.round < card.le_round && a.tc == 0 && !a.announced;
          key = pack({0, a.le.contender, a.le.heads, a.le.signal, a.le.done, a.le.round, a.le_synced});
        } else {
          in_range = in_range && a.tc <= k;
          key = pack({1, a.tc, a.announced, a.exhausted, a.leader});
        }
        break;
      case Role::Collector:
        in_range = in_range && a.opinion >= 1 && a.opinion <= k && a.tokens <= kMaxLoad &&
                   a.load >= -kMaxLoad && a.load <= kMaxLoad;
        if (a.phase < 0 && config.variant == Variant::Improved) {
          in_range = in_range && a.junta.level <= p.ell_max && a.junta.p < p.junta_clock.window;
          key = pack({0, a.opinion, a.tokens, a.junta.level, a.junta.active, a.junta.is_junta, a.junta.p});
        } else {
          key = pack({1, a.opinion, a.tokens, a.defender, a.challenger, a.winner, a.eliminated,
                      static_cast<std::uint64_t>(a.load + kMaxLoad)});
        }
        break;
      case Role::Player:
        in_range = in_range && a.maj.exponent < card.exponent && a.maj.index < card.maj_round;
        key = pack({static_cast<std::uint64_t>(a.player_opinion), static_cast<std::uint64_t>(a.maj.sign + 1),
                    a.maj.exponent, a.maj.index, a.maj.split_done, a.maj.seen_a,
                    a.maj.seen_b, static_cast<std::uint64_t>(a.maj.output)});
        break;
    }
    if (!in_range) ++r.encoding_violations;
    seen[static_cast<std::size_t>(a.role)].insert(key);
  }
  for (std::size_t i = 0; i < 4; ++i) r.roles[i].observed = seen[i].size();

  r.ok = r.max_states_used <= r.bound && r.encoding_violations == 0;
  return r;
}

}  // namespace plurality
