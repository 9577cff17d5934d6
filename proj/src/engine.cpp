#include "plurality/engine.hpp"

#include <algorithm>

namespace plurality {

std::pair<AgentId, AgentId> sample_pair(Rng& rng, std::uint32_t n) {
  if (n < 2) throw ConfigError("n: population size must be at least 2");
  const auto u = static_cast<AgentId>(rng.below(n));
  auto v = static_cast<AgentId>(rng.below(n - 1));
  if (v >= u) ++v;
  return {u, v};
}

std::string milestone::tournament_start(std::uint32_t j) { return "tournament-" + std::to_string(j) + "-start"; }

std::optional<std::uint64_t> TrialResult::milestone(const std::string& name) const {
  for (const auto& [m, at] : milestones) {
    if (m == name) return at;
  }
  return std::nullopt;
}

HandoffReport handoff_check(const std::vector<AgentState>& agents, std::uint32_t k) {
  HandoffReport r;
  r.tokens.assign(k, 0);
  for (const auto& a : agents) {
    ++r.roles[static_cast<std::size_t>(a.role)];
    if (a.role == Role::Collector && a.tokens > 0 && a.opinion >= 1 && a.opinion <= k) {
      r.tokens[a.opinion - 1] += a.tokens;
    }
  }
  for (std::uint32_t i = 0; i < k; ++i) {
    if (r.tokens[i] > 0) r.surviving.push_back(static_cast<OpinionId>(i + 1));
  }
  return r;
}

Simulation::Simulation(const ProtocolConfig& config, std::uint64_t seed)
    : config_(config), params_(derive(config)), rng_(seed) {
  config_.validate();
  agents_ = initial_population(config_, params_);
  result_.rng_seed = seed;
  result_.n = config_.n;
  negative_ = config_.n;
  winners_by_opinion_.assign(config_.k + 1, 0);
  phase0_entries_.assign(config_.n, 0);
  if (config_.variant == Variant::Improved) {
    result_.first_hour_crossing.assign(config_.k, 0);
    result_.junta_at_first_phase0.assign(config_.k, 0);
  }
}

void Simulation::mark(const std::string& name) { result_.milestones.emplace_back(name, clock_.interactions); }

void Simulation::violation(std::string description) {
  result_.invariant_violations.push_back({clock_.interactions, std::move(description)});
}

void Simulation::finish(OpinionId winner, bool timeout) {
  finished_ = true;
  result_.winner = winner;
  result_.timeout = timeout;
  result_.correct = winner != 0 && winner == config_.plurality_opinion();
  result_.interactions_total = clock_.interactions;
}

bool Simulation::step() {
  if (finished_) return false;
  if (clock_.interactions >= params_.max_interactions) {
    finish(0, true);
    return false;
  }
  const auto [i, j] = sample_pair(rng_, config_.n);
  AgentState& u = agents_[i];
  AgentState& v = agents_[j];
  const Observed ou = observe(u);
  const Observed ov = observe(v);
  try {
    interact(u, v, params_, rng_);
  } catch (const InvariantViolation& e) {
    ++clock_.interactions;
    violation(e.what());
    finish(0, false);
    return false;
  }
  ++clock_.interactions;
  const Observed nu = observe(u);
  const Observed nv = observe(v);
  if (nu.phase != ou.phase || nu.winner != ou.winner || nu.challenger != ou.challenger || nu.le_done != ou.le_done) {
    on_change(i, ou);
  }
  if (nv.phase != ov.phase || nv.winner != ov.winner || nv.challenger != ov.challenger || nv.le_done != ov.le_done) {
    on_change(j, ov);
  }
  if (!finished_ && clock_.interactions % params_.snapshot_interval == 0) snapshot();
  return !finished_;
}

void Simulation::run_until(std::uint64_t interactions) {
  while (clock_.interactions < interactions && step()) {
  }
}

void Simulation::run() {
  while (step()) {
  }
}

void Simulation::on_change(AgentId id, const Observed& before) {
  const AgentState& a = agents_[id];

  if (a.le_done && !before.le_done && !leader_seen_) {
    leader_seen_ = true;
    mark(milestone::kLeaderElected);
    std::uint32_t leaders = 0;
    for (const auto& b : agents_) {
      if (b.role == Role::Tracker) leaders += b.leader || (!b.le_done && b.le.done && b.le.contender);
    }
    result_.leaders_at_election = leaders;
    if (leaders != 1) violation("leader election finished with " + std::to_string(leaders) + " leaders");
  }

  if (a.challenger && !before.challenger) {
    const std::uint32_t j = result_.tournaments_started;
    if (last_challenge_tournament_ != j) {
      last_challenge_tournament_ = j;
      result_.challengers.push_back(a.opinion);
    }
  }

  if (a.phase != before.phase && !a.winner) {
    if (before.phase < 0 && a.phase >= 0) {
      --negative_;
      if (!result_.milestone(milestone::kFirstPhase0)) {
        mark(milestone::kFirstPhase0);
        for (const auto& b : agents_) ++result_.roles_at_first_phase0[static_cast<std::size_t>(b.role)];
        if (config_.variant == Variant::Improved) {
          for (const auto& b : agents_) {
            if (b.phase < 0 && b.junta.is_junta) ++result_.junta_at_first_phase0[b.opinion - 1];
          }
        }
      }
      if (negative_ == 0) {
        mark(milestone::kPhase0Complete);
        result_.handoff = handoff_check(agents_, config_.k);
      }
    } else if (before.phase < 0 && a.phase < 0 && before.phase == params_.phase_floor &&
               config_.variant == Variant::Improved) {
      auto& first = result_.first_hour_crossing[a.opinion - 1];
      if (first == 0) first = clock_.interactions;
    }
    if (a.phase == 0) {
      const std::uint32_t entries = ++phase0_entries_[id];
      if (entries > result_.tournaments_started) {
        result_.tournaments_started = entries;
        mark(milestone::tournament_start(entries));
      }
    } else if (a.phase > 0 && checked_[a.phase] < phase0_entries_[id]) {
      checked_[a.phase] = phase0_entries_[id];
      on_phase_checkpoint(a.phase, phase0_entries_[id]);
    }
  }

  if (a.winner && !before.winner) {
    if (++winners_ == 1) mark(milestone::kWinnerFirst);
    ++winners_by_opinion_[a.opinion];
    if (winners_ == config_.n) {
      mark(milestone::kConverged);
      OpinionId w = a.opinion;
      if (winners_by_opinion_[w] != config_.n) {
        violation("converged with conflicting winner opinions");
        w = 0;
      }
      finish(w, false);
    }
  }
}

// First agent of tournament j entering `phase`: evaluate the per-tournament oracles.
void Simulation::on_phase_checkpoint(int phase, std::uint32_t tournament) {
  const std::string tag = " (tournament " + std::to_string(tournament) + ")";
  std::int64_t defender_tokens = 0;
  std::int64_t challenger_tokens = 0;
  std::int64_t load_sum = 0;
  std::vector<OpinionId> defenders;
  std::vector<OpinionId> challengers;
  std::uint32_t unfinished_lineup = 0;
  for (const auto& a : agents_) {
    if (a.role != Role::Collector || a.winner) continue;
    if (a.defender) {
      defender_tokens += a.tokens;
      defenders.push_back(a.opinion);
    }
    if (a.challenger) {
      challenger_tokens += a.tokens;
      challengers.push_back(a.opinion);
    }
    load_sum += a.load;
    unfinished_lineup += a.load != 0;
  }
  auto distinct = [](std::vector<OpinionId>& v) {
    std::sort(v.begin(), v.end());
    return static_cast<std::size_t>(std::unique(v.begin(), v.end()) - v.begin());
  };
  switch (phase) {
    case 2: {
      if (distinct(defenders) > 1) violation("defender Collectors hold several opinions" + tag);
      if (distinct(challengers) > 1) violation("challenger Collectors hold several opinions" + tag);
      if (config_.variant == Variant::Ordered && !challengers.empty() && challengers.front() != tournament + 1) {
        violation("challenger opinion " + std::to_string(challengers.front()) + " differs from tc" + tag);
      }
      expected_b_ = challenger_tokens > defender_tokens;
      break;
    }
    case 4:
      if (load_sum != defender_tokens - challenger_tokens) {
        violation("load sum " + std::to_string(load_sum) + " differs from token difference " +
                  std::to_string(defender_tokens - challenger_tokens) + tag);
      }
      break;
    case 6: {
      // An unfinished one-sided lineup still recruits only the winning side; it
      // only matters when Players of both sides were recruited.
      bool recruited_a = false;
      bool recruited_b = false;
      for (const auto& a : agents_) {
        if (a.role != Role::Player || a.winner) continue;
        recruited_a = recruited_a || a.player_opinion == PlayerOpinion::A;
        recruited_b = recruited_b || a.player_opinion == PlayerOpinion::B;
      }
      if (unfinished_lineup > 0 && recruited_a && recruited_b) {
        violation("lineup exhaustion: " + std::to_string(unfinished_lineup) + " Collectors hold load" + tag);
      }
      break;
    }
    case 8: {
      bool unanimous = true;
      for (const auto& a : agents_) {
        if (a.role != Role::Player || a.winner) continue;
        const PlayerOpinion out = a.phase == 6 ? a.maj.output : a.player_opinion;
        if ((out == PlayerOpinion::B) != expected_b_) {
          unanimous = false;
          break;
        }
      }
      ++result_.match_checks;
      if (!unanimous) {
        ++result_.match_failures;
        violation(std::string("match outcome disagrees with expected ") + (expected_b_ ? "B" : "A") + tag);
      }
      break;
    }
    default:
      break;
  }
}

void Simulation::snapshot() {
  ++result_.snapshots;
  std::array<bool, 10> present{};
  bool any = false;
  for (const auto& a : agents_) {
    if (a.phase >= 0 && !a.winner) {
      present[static_cast<std::size_t>(a.phase)] = true;
      any = true;
    }
  }
  // Longest circular run of absent phases; the present ones fit in the rest.
  int longest = 0;
  for (int start = 0; start < 10 && any; ++start) {
    int run = 0;
    while (run < 10 && !present[static_cast<std::size_t>((start + run) % 10)]) ++run;
    longest = std::max(longest, run);
  }
  const int spread = any ? 10 - longest - 1 : 0;
  if (spread <= 2) ++result_.phase_gap_ok;

  if (!result_.milestone(milestone::kFirstPhase0) && !token_violation_logged_) {
    std::vector<std::uint64_t> tokens(config_.k, 0);
    for (const auto& a : agents_) {
      if (a.role == Role::Collector) tokens[a.opinion - 1] += a.tokens;
    }
    for (std::uint32_t i = 0; i < config_.k; ++i) {
      if (tokens[i] != config_.x[i]) {
        token_violation_logged_ = true;
        violation("token sum of opinion " + std::to_string(i + 1) + " is " + std::to_string(tokens[i]) +
                  ", expected " + std::to_string(config_.x[i]));
        break;
      }
    }
  }
}

TrialResult run_trial(const ProtocolConfig& config, std::uint64_t seed) {
  Simulation sim(config, seed);
  sim.run();
  return sim.result();
}

}  // namespace plurality
