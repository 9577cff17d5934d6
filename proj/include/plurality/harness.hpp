#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "plurality/config.hpp"
#include "plurality/engine.hpp"
#include "plurality/significance.hpp"

namespace plurality {

/// Raw key/value text: a global section plus optional [named] sections.
/// Values are scalars or bracketed lists; list items may use `v*r` to repeat v r times.
struct RawSection {
  std::string name;
  std::map<std::string, std::vector<std::string>> values;  // scalar = one-element list
  std::map<std::string, bool> is_list;
};

struct RawConfig {
  RawSection global;
  std::vector<RawSection> sections;
};

/// Throws ConfigError on malformed syntax (the message names the line).
RawConfig parse_raw_config(const std::string& text);

/// Sets `key` in the global section and every named section.
void override_value(RawConfig& raw, const std::string& key, const std::string& value);

struct ExperimentEntry {
  std::string name;
  ProtocolConfig config;
  DistributionFamily family = DistributionFamily::Explicit;
  double alpha = 0;
  std::uint32_t trials = 1;
  std::uint64_t base_seed = 1;
};

struct ExperimentSpec {
  std::vector<ExperimentEntry> entries;  // sweep grid, fully enumerated
  std::string out;                       // empty: stdout
  std::string format = "csv";
};

/// Expands sweep axes (variant, n, k, dist, alpha) and validates every
/// configuration. All problems are reported together in one ConfigError.
ExperimentSpec build_experiment(const RawConfig& raw);
ExperimentSpec parse_config(const std::string& text);

/// Stable 64-bit FNV-1a hash of the canonical config, as 16 hex digits.
std::string config_fingerprint(const ProtocolConfig& config);

// ---------------------------------------------------------------------------
// Rows

enum class ColumnKind { Int, Float, Bool, Text };

struct Column {
  const char* name;
  ColumnKind kind;
};

inline constexpr int kResultsVersion = 1;
const std::vector<Column>& results_columns();

struct ResultsRow {
  std::vector<std::string> values;  // aligned with results_columns()
  const std::string& get(const std::string& column) const;
};

ResultsRow make_row(const ExperimentEntry& entry, const TrialResult& result);

/// Worker count from PLURALITY_WORKERS, else the available parallelism.
unsigned worker_count();

/// Runs every (entry, trial) pair, trial seeds base_seed + index. Rows come
/// back sorted by (fingerprint, seed) whatever the execution order.
std::vector<ResultsRow> run_experiment(const ExperimentSpec& spec, unsigned workers,
                                       const std::function<void(std::size_t done, std::size_t total)>& progress = {});

// ---------------------------------------------------------------------------
// Sinks

std::string csv_escape(const std::string& field);
/// Returns false if the stream failed part-way.
bool write_rows_csv(std::ostream& os, const std::vector<ResultsRow>& rows);
bool write_rows_json(std::ostream& os, const std::vector<ResultsRow>& rows);
/// Reads rows written by either writer (format detected from the content).
std::vector<ResultsRow> read_rows(const std::string& text);

// ---------------------------------------------------------------------------
// Aggregation

struct MilestoneStats {
  std::string name;
  std::uint32_t reached = 0;
  double median = 0;
  double p95 = 0;
};

struct ConfigSummary {
  std::string fingerprint;
  std::string experiment;
  std::string variant;
  std::uint32_t n = 0;
  std::uint32_t k = 0;
  std::string dist;
  double alpha = 0;
  std::uint64_t x_max = 0;
  std::uint32_t trials = 0;
  std::uint32_t correct = 0;
  double correct_rate = 0;
  std::uint32_t timeouts = 0;
  std::uint64_t violations = 0;
  double median_tournaments = 0;
  std::vector<MilestoneStats> milestones;
};

struct LinearFit {
  std::string group;  // e.g. "variant=ordered;n=4096;dist=bias-one"
  std::string x;      // "k" or "n/x_max"
  std::size_t points = 0;
  double intercept = 0;
  double slope = 0;
  double r2 = 0;
};

struct Summary {
  std::vector<ConfigSummary> configs;
  std::vector<LinearFit> fits;
};

/// Least squares y = a + b x; r2 is 1 when y is constant and fits exactly.
LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

double median(std::vector<double> v);
/// Nearest-rank percentile, q in (0, 1].
double percentile(std::vector<double> v, double q);

Summary aggregate(const std::vector<ResultsRow>& rows);
bool write_summary_csv(std::ostream& os, const Summary& s);
bool write_summary_json(std::ostream& os, const Summary& s);
/// Fitted lines only, one per row.
bool write_fits_csv(std::ostream& os, const Summary& s);

}  // namespace plurality
