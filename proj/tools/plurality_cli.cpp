// Command-line experiment runner for the plurality protocols.
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "plurality/harness.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitThreshold = 3;
constexpr int kExitSink = 4;
constexpr int kExitEmpty = 5;

struct Flags {
  std::string n, k, dist, variant, trials, seed, max_interactions, psi_factor, alpha, x, out, format;
  std::vector<std::string> sets;
};

void add_protocol_flags(CLI::App* app, Flags& f) {
  app->add_option("--n", f.n, "Population size (comma list to sweep)");
  app->add_option("--k", f.k, "Number of opinions (comma list to sweep)");
  app->add_option("--dist", f.dist, "uniform, bias-one, one-dominant or explicit");
  app->add_option("--variant", f.variant, "ordered, unordered or improved");
  app->add_option("--alpha", f.alpha, "Dominant share for one-dominant");
  app->add_option("--x", f.x, "Explicit supports, comma separated");
  app->add_option("--trials", f.trials, "Trials per configuration");
  app->add_option("--seed", f.seed, "Base seed; trial i uses seed + i");
  app->add_option("--max-interactions", f.max_interactions, "Interaction cap per trial");
  app->add_option("--psi-factor", f.psi_factor, "Clock cycle length per ceil(log2 n)");
  app->add_option("--set", f.sets, "Any config key as key=value");
}

void add_sink_flags(CLI::App* app, Flags& f) {
  app->add_option("--out", f.out, "Output file (default stdout)");
  app->add_option("--format", f.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
}

void apply_flags(plurality::RawConfig& raw, const Flags& f) {
  auto set = [&](const char* key, const std::string& v) {
    if (!v.empty()) plurality::override_value(raw, key, v);
  };
  set("n", f.n);
  set("k", f.k);
  set("dist", f.dist);
  set("variant", f.variant);
  set("alpha", f.alpha);
  if (!f.x.empty()) plurality::override_value(raw, "x", "[" + f.x + "]");
  set("trials", f.trials);
  set("seed", f.seed);
  set("max_interactions", f.max_interactions);
  set("psi_factor", f.psi_factor);
  for (const auto& kv : f.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw plurality::ConfigError("--set: expected key=value, got '" + kv + "'");
    plurality::override_value(raw, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (!f.out.empty()) raw.global.values["out"] = {f.out};
  if (!f.format.empty()) raw.global.values["format"] = {f.format};
}

// Writes to `path`, or stdout when empty. Returns false on any write failure.
bool emit(const std::string& path, const std::function<bool(std::ostream&)>& write) {
  if (path.empty() || path == "-") return write(std::cout);
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) return false;
  return write(os) && static_cast<bool>(os.flush());
}

int run_rows(const plurality::ExperimentSpec& spec, bool require_correct, bool quiet) {
  const unsigned workers = plurality::worker_count();
  auto progress = [&](std::size_t done, std::size_t total) {
    if (!quiet) std::cerr << "\rtrials " << done << "/" << total << std::flush;
  };
  const auto rows = plurality::run_experiment(spec, workers, progress);
  if (!quiet) std::cerr << "\n";
  const bool ok = emit(spec.out, [&](std::ostream& os) {
    return spec.format == "json" ? plurality::write_rows_json(os, rows) : plurality::write_rows_csv(os, rows);
  });
  if (!ok) {
    std::cerr << "error: could not write results to " << (spec.out.empty() ? "stdout" : spec.out)
              << " (output is partial)\n";
    if (!spec.out.empty()) {
      std::ofstream marker(spec.out + ".partial");
      marker << "incomplete\n";
    }
    return kExitSink;
  }
  if (require_correct) {
    std::size_t correct = 0;
    for (const auto& r : rows) correct += r.get("correct") == "true";
    if (correct != rows.size()) {
      std::cerr << "threshold: " << correct << "/" << rows.size() << " trials correct\n";
      return kExitThreshold;
    }
  }
  return kExitOk;
}

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw plurality::ConfigError("cannot read " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Plurality consensus population protocol simulator"};
  app.require_subcommand(1);
  app.fallthrough();
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "No progress output");

  Flags run_flags;
  bool run_require = false;
  auto* run = app.add_subcommand("run", "Run trials of one configuration");
  add_protocol_flags(run, run_flags);
  add_sink_flags(run, run_flags);
  run->add_flag("--require-correct", run_require, "Exit 3 unless every trial is correct");

  Flags sweep_flags;
  std::string sweep_file;
  bool sweep_require = false;
  auto* sweep = app.add_subcommand("sweep", "Run an experiment file");
  sweep->add_option("config", sweep_file, "Experiment file")->required();
  add_protocol_flags(sweep, sweep_flags);
  add_sink_flags(sweep, sweep_flags);
  sweep->add_flag("--require-correct", sweep_require, "Exit 3 unless every trial is correct");

  std::string agg_in, agg_out, agg_format = "csv";
  double min_correct = -1;
  auto* agg = app.add_subcommand("aggregate", "Summarize results rows");
  agg->add_option("rows", agg_in, "Rows written by run or sweep (- for stdin)")->required();
  agg->add_option("--out", agg_out, "Summary file (default stdout); fits go to <out>.fits.csv");
  agg->add_option("--format", agg_format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  agg->add_option("--min-correct-rate", min_correct, "Exit 3 if any config falls below this rate");

  Flags audit_flags;
  auto* audit = app.add_subcommand("audit", "State-budget report for one configuration");
  add_protocol_flags(audit, audit_flags);
  audit->add_option("--out", audit_flags.out, "Report file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run || *sweep) {
      const Flags& flags = *run ? run_flags : sweep_flags;
      plurality::RawConfig raw = *run ? plurality::RawConfig{} : plurality::parse_raw_config(read_file(sweep_file));
      apply_flags(raw, flags);
      const auto spec = plurality::build_experiment(raw);
      return run_rows(spec, *run ? run_require : sweep_require, quiet);
    }
    if (*agg) {
      std::string text;
      if (agg_in == "-") {
        std::stringstream ss;
        ss << std::cin.rdbuf();
        text = ss.str();
      } else {
        text = read_file(agg_in);
      }
      std::vector<plurality::ResultsRow> rows;
      try {
        rows = plurality::read_rows(text);
      } catch (const std::exception& e) {
        std::cerr << "config error: " << agg_in << ": " << e.what() << "\n";
        return kExitConfig;
      }
      const auto summary = plurality::aggregate(rows);
      bool ok = emit(agg_out, [&](std::ostream& os) {
        return agg_format == "json" ? plurality::write_summary_json(os, summary)
                                    : plurality::write_summary_csv(os, summary);
      });
      if (ok && agg_format == "csv") {
        if (agg_out.empty() || agg_out == "-") {
          std::cout << "\n";
          ok = plurality::write_fits_csv(std::cout, summary);
        } else {
          ok = emit(agg_out + ".fits.csv", [&](std::ostream& os) { return plurality::write_fits_csv(os, summary); });
        }
      }
      if (!ok) {
        std::cerr << "error: could not write summary\n";
        return kExitSink;
      }
      if (rows.empty()) {
        std::cerr << "aggregate: no rows in " << agg_in << "\n";
        return kExitEmpty;
      }
      if (min_correct >= 0) {
        for (const auto& c : summary.configs) {
          if (c.correct_rate < min_correct) {
            std::cerr << "threshold: " << c.fingerprint << " correct rate " << c.correct_rate << "\n";
            return kExitThreshold;
          }
        }
      }
      return kExitOk;
    }
    if (*audit) {
      plurality::RawConfig raw;
      apply_flags(raw, audit_flags);
      const auto spec = plurality::build_experiment(raw);
      nlohmann::ordered_json report = nlohmann::ordered_json::array();
      bool all_ok = true;
      for (const auto& entry : spec.entries) {
        plurality::Simulation sim(entry.config, entry.base_seed);
        const std::uint64_t stride = std::max<std::uint64_t>(1, sim.params().max_interactions / 16);
        plurality::StateBudgetReport worst = plurality::audit_state_budget(sim.agents(), entry.config);
        std::array<std::uint64_t, 4> observed{};
        std::uint64_t encoding_violations = worst.encoding_violations;
        while (!sim.finished()) {
          sim.run_until(sim.interactions() + stride);
          const auto r = plurality::audit_state_budget(sim.agents(), entry.config);
          encoding_violations += r.encoding_violations;
          for (std::size_t i = 0; i < 4; ++i) observed[i] = std::max(observed[i], r.roles[i].observed);
        }
        const bool ok = worst.max_states_used <= worst.bound && encoding_violations == 0;
        all_ok = all_ok && ok;
        nlohmann::ordered_json o;
        o["variant"] = plurality::to_string(entry.config.variant);
        o["n"] = entry.config.n;
        o["k"] = entry.config.k;
        o["shared"] = worst.shared;
        for (const auto& rb : worst.roles) {
          o["roles"][plurality::to_string(rb.role)] = {{"representable", rb.representable},
                                                       {"observed_max", observed[static_cast<std::size_t>(rb.role)]}};
        }
        o["max_states_used"] = worst.max_states_used;
        o["constant"] = worst.constant;
        o["bound"] = worst.bound;
        o["encoding_violations"] = encoding_violations;
        o["ok"] = ok;
        report.push_back(std::move(o));
      }
      const bool written = emit(audit_flags.out, [&](std::ostream& os) {
        os << report.dump(2) << "\n";
        return static_cast<bool>(os);
      });
      if (!written) return kExitSink;
      return all_ok ? kExitOk : kExitThreshold;
    }
  } catch (const plurality::ConfigError& e) {
    std::cerr << "config error:\n" << e.what() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}
