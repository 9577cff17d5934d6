#include "plurality/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace plurality {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') || (s.front() == '\'' && s.back() == '\''))) {
    return s.substr(1, s.size() - 2);
  }
  return s;
}

std::string normalize_key(std::string key) {
  std::replace(key.begin(), key.end(), '-', '_');
  return key;
}

std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "variant", "n", "k", "dist", "alpha", "x", "trials", "seed", "max_interactions", "psi_factor", "psi",
      "c_M", "maj_round_ticks", "maj_broadcast_rounds", "c_L", "setup_hold", "m", "c", "ell_max",
      "snapshot_interval", "allow_tie", "out", "format"};
  return keys;
}

const std::set<std::string>& sweep_axes() {
  static const std::set<std::string> axes{"variant", "n", "k", "dist", "alpha"};
  return axes;
}

std::vector<std::string> split_list(const std::string& body, int line_no) {
  std::vector<std::string> items;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = unquote(trim(item));
    if (item.empty()) continue;
    const auto star = item.find('*');
    if (star != std::string::npos) {
      const std::string value = trim(item.substr(0, star));
      const std::string times = trim(item.substr(star + 1));
      char* end = nullptr;
      const unsigned long reps = std::strtoul(times.c_str(), &end, 10);
      if (times.empty() || *end != '\0' || reps > 10'000'000) {
        throw ConfigError("line " + std::to_string(line_no) + ": bad repetition '" + item + "'");
      }
      items.insert(items.end(), reps, value);
    } else {
      items.push_back(item);
    }
  }
  return items;
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
  char* end = nullptr;
  errno = 0;
  const unsigned long long x = std::strtoull(v.c_str(), &end, 10);
  if (v.empty() || *end != '\0' || errno != 0 || v.front() == '-') {
    throw ConfigError(key + ": expected a non-negative integer, got '" + v + "'");
  }
  return x;
}

std::uint32_t to_u32(const std::string& key, const std::string& v) {
  const std::uint64_t x = to_uint(key, v);
  if (x > 0xffffffffull) throw ConfigError(key + ": value " + v + " is too large");
  return static_cast<std::uint32_t>(x);
}

double to_double(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (v.empty() || *end != '\0') throw ConfigError(key + ": expected a number, got '" + v + "'");
  return x;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

std::string fmt_float(double d) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6f", d);
  return buf;
}

}  // namespace

RawConfig parse_raw_config(const std::string& text) {
  RawConfig raw;
  RawSection* current = &raw.global;
  std::stringstream ss(text);
  std::string line;
  int line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    line = trim(strip_comment(line));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) {
        throw ConfigError("line " + std::to_string(line_no) + ": malformed section header '" + line + "'");
      }
      raw.sections.push_back(RawSection{trim(line.substr(1, line.size() - 2)), {}, {}});
      current = &raw.sections.back();
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value', got '" + line + "'");
    }
    const std::string key = normalize_key(trim(line.substr(0, eq)));
    const std::string value = trim(line.substr(eq + 1));
    if (!known_keys().count(key)) {
      throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    if (value.empty()) throw ConfigError("line " + std::to_string(line_no) + ": " + key + " has no value");
    if (value.front() == '[') {
      if (value.back() != ']') {
        throw ConfigError("line " + std::to_string(line_no) + ": unterminated list for " + key);
      }
      current->values[key] = split_list(value.substr(1, value.size() - 2), line_no);
      current->is_list[key] = true;
      if (current->values[key].empty()) {
        throw ConfigError("line " + std::to_string(line_no) + ": " + key + " is an empty list");
      }
    } else {
      current->values[key] = {unquote(value)};
      current->is_list[key] = false;
    }
  }
  return raw;
}

void override_value(RawConfig& raw, const std::string& key_in, const std::string& value) {
  const std::string key = normalize_key(key_in);
  if (!known_keys().count(key)) throw ConfigError("unknown key '" + key + "'");
  std::vector<std::string> values;
  bool list = false;
  if (!value.empty() && value.front() == '[' && value.back() == ']') {
    values = split_list(value.substr(1, value.size() - 2), 0);
    list = true;
  } else if (value.find(',') != std::string::npos) {
    values = split_list(value, 0);
    list = true;
  } else {
    values = {value};
  }
  auto apply = [&](RawSection& s) {
    s.values[key] = values;
    s.is_list[key] = list;
  };
  apply(raw.global);
  for (auto& s : raw.sections) apply(s);
}

ExperimentSpec build_experiment(const RawConfig& raw) {
  ExperimentSpec spec;
  std::vector<std::string> errors;
  std::vector<RawSection> sections;
  if (raw.sections.empty()) {
    sections.push_back(raw.global);
    sections.back().name = "default";
  } else {
    for (const auto& s : raw.sections) {
      RawSection merged = raw.global;
      merged.name = s.name;
      for (const auto& [k, v] : s.values) {
        merged.values[k] = v;
        merged.is_list[k] = s.is_list.at(k);
      }
      sections.push_back(std::move(merged));
    }
  }
  auto scalar = [](const RawSection& s, const std::string& key) -> const std::string* {
    auto it = s.values.find(key);
    return it == s.values.end() ? nullptr : &it->second.front();
  };
  if (const auto* out = scalar(raw.global, "out")) spec.out = *out;
  if (const auto* fmt = scalar(raw.global, "format")) spec.format = *fmt;
  if (spec.format != "csv" && spec.format != "json") {
    errors.push_back("format: expected csv or json, got '" + spec.format + "'");
  }

  for (const auto& s : sections) {
    const std::string where = "[" + s.name + "] ";
    bool section_ok = true;
    for (const auto& [key, list] : s.is_list) {
      if (list && key != "x" && !sweep_axes().count(key)) {
        errors.push_back(where + key + ": lists are only allowed for sweep axes (variant, n, k, dist, alpha) and x");
        section_ok = false;
      }
    }
    if (!s.values.count("n")) {
      errors.push_back(where + "n: missing population size");
      section_ok = false;
    }
    if (!section_ok) continue;
    auto axis = [&](const std::string& key, const std::string& fallback) {
      auto it = s.values.find(key);
      return it == s.values.end() ? std::vector<std::string>{fallback} : it->second;
    };
    const bool has_x = s.values.count("x") > 0;
    const auto variants = axis("variant", "ordered");
    const auto ns = axis("n", "");
    const auto ks = axis("k", has_x ? std::to_string(s.values.at("x").size()) : "");
    const auto dists = axis("dist", has_x ? "explicit" : "uniform");
    const auto alphas = axis("alpha", "0.5");
    for (const auto& variant : variants) {
      for (const auto& n_text : ns) {
        for (const auto& k_text : ks) {
          for (const auto& dist : dists) {
            for (const auto& alpha_text : alphas) {
              const std::string combo = where + "variant=" + variant + ", n=" + n_text + ", k=" + k_text +
                                        ", dist=" + dist + ": ";
              try {
                ExperimentEntry e;
                e.name = s.name;
                const Variant var = parse_variant(variant);
                const std::uint32_t n = to_u32("n", n_text);
                if (k_text.empty()) throw ConfigError("k: missing opinion count (or give x)");
                const std::uint32_t k = to_u32("k", k_text);
                DistributionSpec d;
                d.family = parse_distribution_family(dist);
                d.alpha = to_double("alpha", alpha_text);
                if (d.family == DistributionFamily::Explicit) {
                  if (!has_x) throw ConfigError("x: explicit distribution needs a support vector");
                  for (const auto& item : s.values.at("x")) d.x.push_back(to_u32("x", item));
                }
                ProtocolConfig c;
                c.variant = var;
                c.n = n;
                c.x = make_distribution(d, n, k);
                c.k = static_cast<std::uint32_t>(c.x.size());
                if (d.family == DistributionFamily::Explicit && c.k != k) {
                  throw ConfigError("k: is " + std::to_string(k) + " but x has " + std::to_string(c.k) + " entries");
                }
                if (const auto* v = scalar(s, "psi_factor")) c.psi_factor = to_double("psi_factor", *v);
                if (const auto* v = scalar(s, "psi")) c.psi = to_u32("psi", *v);
                if (const auto* v = scalar(s, "c_M")) c.c_M = to_double("c_M", *v);
                if (const auto* v = scalar(s, "maj_round_ticks")) c.maj_round_ticks = to_u32("maj_round_ticks", *v);
                if (const auto* v = scalar(s, "maj_broadcast_rounds")) {
                  c.maj_broadcast_rounds = to_u32("maj_broadcast_rounds", *v);
                }
                if (const auto* v = scalar(s, "c_L")) c.c_L = to_double("c_L", *v);
                if (const auto* v = scalar(s, "setup_hold")) c.setup_hold = to_u32("setup_hold", *v);
                if (const auto* v = scalar(s, "m")) c.m = to_u32("m", *v);
                if (const auto* v = scalar(s, "c")) c.c = to_u32("c", *v);
                if (const auto* v = scalar(s, "ell_max")) c.ell_max = to_u32("ell_max", *v);
                if (const auto* v = scalar(s, "max_interactions")) c.max_interactions = to_uint("max_interactions", *v);
                if (const auto* v = scalar(s, "snapshot_interval")) {
                  c.snapshot_interval = to_uint("snapshot_interval", *v);
                }
                if (const auto* v = scalar(s, "allow_tie")) c.allow_tie = to_bool("allow_tie", *v);
                c.validate();
                e.config = std::move(c);
                e.family = d.family;
                e.alpha = d.family == DistributionFamily::OneDominant ? d.alpha : 0.0;
                if (const auto* v = scalar(s, "trials")) e.trials = to_u32("trials", *v);
                if (const auto* v = scalar(s, "seed")) e.base_seed = to_uint("seed", *v);
                if (e.trials == 0) throw ConfigError("trials: must be at least 1");
                spec.entries.push_back(std::move(e));
              } catch (const ConfigError& err) {
                errors.push_back(combo + err.what());
              }
            }
          }
        }
      }
    }
  }
  if (!errors.empty()) {
    std::string msg;
    for (const auto& e : errors) msg += (msg.empty() ? "" : "\n") + e;
    throw ConfigError(msg);
  }
  return spec;
}

ExperimentSpec parse_config(const std::string& text) { return build_experiment(parse_raw_config(text)); }

std::string config_fingerprint(const ProtocolConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char ch : config.canonical()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

const std::vector<Column>& results_columns() {
  static const std::vector<Column> columns{
      {"fingerprint", ColumnKind::Text},
      {"experiment", ColumnKind::Text},
      {"variant", ColumnKind::Text},
      {"n", ColumnKind::Int},
      {"k", ColumnKind::Int},
      {"dist", ColumnKind::Text},
      {"alpha", ColumnKind::Float},
      {"x_max", ColumnKind::Int},
      {"plurality", ColumnKind::Int},
      {"seed", ColumnKind::Int},
      {"winner", ColumnKind::Int},
      {"correct", ColumnKind::Bool},
      {"timeout", ColumnKind::Bool},
      {"interactions", ColumnKind::Int},
      {"parallel_time", ColumnKind::Float},
      {"t_first_phase0", ColumnKind::Float},
      {"t_phase0_complete", ColumnKind::Float},
      {"t_leader_elected", ColumnKind::Float},
      {"t_winner_first", ColumnKind::Float},
      {"t_converged", ColumnKind::Float},
      {"tournaments_started", ColumnKind::Int},
      {"tournaments_challenged", ColumnKind::Int},
      {"challengers", ColumnKind::Text},
      {"tournament_starts", ColumnKind::Text},
      {"violations", ColumnKind::Int},
      {"first_violation", ColumnKind::Text},
      {"match_checks", ColumnKind::Int},
      {"match_failures", ColumnKind::Int},
      {"collectors_first_phase0", ColumnKind::Int},
      {"players_first_phase0", ColumnKind::Int},
      {"clocks_first_phase0", ColumnKind::Int},
      {"trackers_first_phase0", ColumnKind::Int},
      {"plurality_tokens_at_handoff", ColumnKind::Int},
      {"surviving_opinions", ColumnKind::Int},
      {"phase_gap_ok_fraction", ColumnKind::Float},
      {"leaders_at_election", ColumnKind::Int},
      {"outside_guarantee", ColumnKind::Bool},
  };
  return columns;
}

const std::string& ResultsRow::get(const std::string& column) const {
  const auto& cols = results_columns();
  for (std::size_t i = 0; i < cols.size() && i < values.size(); ++i) {
    if (column == cols[i].name) return values[i];
  }
  throw std::out_of_range("no column " + column);
}

ResultsRow make_row(const ExperimentEntry& entry, const TrialResult& r) {
  const ProtocolConfig& c = entry.config;
  auto pt = [&](const std::string& name) -> std::string {
    const auto at = r.milestone(name);
    return at ? fmt_float(static_cast<double>(*at) / c.n) : "";
  };
  std::string starts;
  for (const auto& [name, at] : r.milestones) {
    if (name.rfind("tournament-", 0) == 0) starts += (starts.empty() ? "" : ";") + fmt_float(static_cast<double>(at) / c.n);
  }
  std::string challengers;
  for (const auto o : r.challengers) challengers += (challengers.empty() ? "" : ";") + std::to_string(o);
  const OpinionId plurality = c.plurality_opinion();
  std::string handoff_tokens;
  std::string surviving;
  if (r.handoff) {
    if (plurality != 0) handoff_tokens = std::to_string(r.handoff->tokens[plurality - 1]);
    surviving = std::to_string(r.handoff->surviving.size());
  }
  const auto x_max = *std::max_element(c.x.begin(), c.x.end());
  ResultsRow row;
  row.values = {
      config_fingerprint(c),
      entry.name,
      to_string(c.variant),
      std::to_string(c.n),
      std::to_string(c.k),
      to_string(entry.family),
      fmt_float(entry.alpha),
      std::to_string(x_max),
      std::to_string(plurality),
      std::to_string(r.rng_seed),
      std::to_string(r.winner),
      r.correct ? "true" : "false",
      r.timeout ? "true" : "false",
      std::to_string(r.interactions_total),
      fmt_float(r.parallel_time()),
      pt(milestone::kFirstPhase0),
      pt(milestone::kPhase0Complete),
      pt(milestone::kLeaderElected),
      pt(milestone::kWinnerFirst),
      pt(milestone::kConverged),
      std::to_string(r.tournaments_started),
      std::to_string(r.challengers.size()),
      challengers,
      starts,
      std::to_string(r.invariant_violations.size()),
      r.invariant_violations.empty() ? "" : r.invariant_violations.front().description,
      std::to_string(r.match_checks),
      std::to_string(r.match_failures),
      std::to_string(r.roles_at_first_phase0[static_cast<std::size_t>(Role::Collector)]),
      std::to_string(r.roles_at_first_phase0[static_cast<std::size_t>(Role::Player)]),
      std::to_string(r.roles_at_first_phase0[static_cast<std::size_t>(Role::Clock)]),
      std::to_string(r.roles_at_first_phase0[static_cast<std::size_t>(Role::Tracker)]),
      handoff_tokens,
      surviving,
      fmt_float(r.snapshots ? static_cast<double>(r.phase_gap_ok) / r.snapshots : 1.0),
      std::to_string(r.leaders_at_election),
      c.variant == Variant::Improved && !within_guarantee(c.x, SignificanceThresholds{}.epsilon) ? "true" : "false",
  };
  return row;
}

unsigned worker_count() {
  if (const char* env = std::getenv("PLURALITY_WORKERS")) {
    char* end = nullptr;
    const unsigned long w = std::strtoul(env, &end, 10);
    if (*env != '\0' && *end == '\0' && w > 0) return static_cast<unsigned>(w);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<ResultsRow> run_experiment(const ExperimentSpec& spec, unsigned workers,
                                       const std::function<void(std::size_t, std::size_t)>& progress) {
  struct Job {
    std::size_t entry;
    std::uint64_t seed;
    std::string fingerprint;
  };
  std::vector<Job> jobs;
  for (std::size_t e = 0; e < spec.entries.size(); ++e) {
    const std::string fp = config_fingerprint(spec.entries[e].config);
    for (std::uint32_t t = 0; t < spec.entries[e].trials; ++t) jobs.push_back({e, spec.entries[e].base_seed + t, fp});
  }
  std::vector<ResultsRow> rows(jobs.size());
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::mutex progress_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      const auto& entry = spec.entries[jobs[i].entry];
      rows[i] = make_row(entry, run_trial(entry.config, jobs[i].seed));
      const std::size_t d = ++done;
      if (progress) {
        std::lock_guard<std::mutex> lock(progress_mutex);
        progress(d, jobs.size());
      }
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(jobs.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::vector<std::size_t> order(jobs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (jobs[a].fingerprint != jobs[b].fingerprint) return jobs[a].fingerprint < jobs[b].fingerprint;
    return jobs[a].seed < jobs[b].seed;
  });
  std::vector<ResultsRow> sorted;
  sorted.reserve(rows.size());
  for (const auto i : order) sorted.push_back(std::move(rows[i]));
  return sorted;
}

}  // namespace plurality
