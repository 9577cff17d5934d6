#include <sstream>

#include "doctest.h"
#include "plurality/harness.hpp"

using namespace plurality;

namespace {

// Apportionment of n over k equal shares: the first n mod k opinions get one extra.
std::vector<std::uint32_t> equal_shares(std::uint32_t n, std::uint32_t k) {
  std::vector<std::uint32_t> x(k, n / k);
  for (std::uint32_t i = 0; i < n % k; ++i) ++x[i];
  return x;
}

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

std::string to_csv(const std::vector<ResultsRow>& rows) {
  std::ostringstream os;
  write_rows_csv(os, rows);
  return os.str();
}

ExperimentEntry entry(std::vector<std::uint32_t> x, const std::string& name = "e") {
  ExperimentEntry e;
  e.name = name;
  e.config.n = 0;
  for (auto v : x) e.config.n += v;
  e.config.k = static_cast<std::uint32_t>(x.size());
  e.config.x = std::move(x);
  e.family = DistributionFamily::Explicit;
  return e;
}

TrialResult fake_result(std::uint64_t seed, bool correct, std::uint64_t converged_at, std::uint32_t n) {
  TrialResult r;
  r.rng_seed = seed;
  r.n = n;
  r.correct = correct;
  r.winner = correct ? 1 : 2;
  r.interactions_total = converged_at;
  r.milestones = {{milestone::kFirstPhase0, converged_at / 4}, {milestone::kConverged, converged_at}};
  return r;
}

}  // namespace

TEST_SUITE("distributions") {
  TEST_CASE("uniform uses largest remainder") {
    CHECK(make_distribution({DistributionFamily::Uniform, {}, 0}, 100, 3) == std::vector<std::uint32_t>{34, 33, 33});
    for (std::uint32_t n : {97u, 100u, 1000u, 4096u}) {
      for (std::uint32_t k : {1u, 2u, 3u, 7u, 16u}) {
        CHECK(make_distribution({DistributionFamily::Uniform, {}, 0}, n, k) == equal_shares(n, k));
      }
    }
  }

  TEST_CASE("bias-one puts a lead of one on opinion 1") {
    for (std::uint32_t n : {99u, 1001u, 10000u}) {
      for (std::uint32_t k : {3u, 4u, 8u}) {
        const auto x = make_distribution({DistributionFamily::BiasOne, {}, 0}, n, k);
        std::uint64_t sum = 0;
        for (auto v : x) sum += v;
        CHECK(sum == n);
        CHECK(x[0] == x[1] + 1);
        for (std::size_t i = 2; i < x.size(); ++i) CHECK(x[i] <= x[1]);
      }
    }
    CHECK(make_distribution({DistributionFamily::BiasOne, {}, 0}, 99, 2) == std::vector<std::uint32_t>{50, 49});
    CHECK(make_distribution({DistributionFamily::BiasOne, {}, 0}, 10000, 8)[0] == 1251);
  }

  TEST_CASE("bias-one with two opinions needs odd n") {
    CHECK_THROWS_AS(make_distribution({DistributionFamily::BiasOne, {}, 0}, 100, 2), ConfigError);
  }

  TEST_CASE("one-dominant") {
    std::vector<std::uint32_t> expected{4096};
    const auto rest = equal_shares(16384 - 4096, 9);
    expected.insert(expected.end(), rest.begin(), rest.end());
    CHECK(make_distribution({DistributionFamily::OneDominant, {}, 0.25}, 16384, 10) == expected);
    CHECK_THROWS_AS(make_distribution({DistributionFamily::OneDominant, {}, 1.5}, 100, 2), ConfigError);
  }

  TEST_CASE("family names") {
    CHECK(parse_distribution_family("bias-one") == DistributionFamily::BiasOne);
    CHECK_THROWS_AS(parse_distribution_family("zipf"), ConfigError);
  }
}

TEST_SUITE("config validation") {
  ProtocolConfig valid() {
    ProtocolConfig c;
    c.n = 1000;
    c.k = 3;
    c.x = {500, 300, 200};
    return c;
  }

  TEST_CASE("valid config passes") { CHECK_NOTHROW(valid().validate()); }

  TEST_CASE("too many opinions for the simple algorithm") {
    const std::string err = error_of("variant = ordered\nn = 400\nk = 11\ndist = uniform\nallow_tie = true\n");
    CHECK(contains(err, "k exceeds n/40"));
    ProtocolConfig c = make_config(Variant::Improved, 400, 11, {DistributionFamily::OneDominant, {}, 0.5});
    CHECK(c.k == 11);
  }

  TEST_CASE("supports must sum to n") {
    ProtocolConfig c = valid();
    c.x = {500, 300, 100};
    CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("x:"), ConfigError);
  }

  TEST_CASE("ties need an explicit opt-in") {
    ProtocolConfig c = valid();
    c.x = {400, 400, 200};
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c.allow_tie = true;
    CHECK_NOTHROW(c.validate());
    CHECK(c.plurality_opinion() == 0);
  }

  TEST_CASE("parameter ranges") {
    ProtocolConfig c = valid();
    c.psi = 2;
    CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("psi"), ConfigError);
    c = valid();
    c.c = 1;
    CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("c:"), ConfigError);
    c = valid();
    c.n = 1;
    CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("n:"), ConfigError);
  }

  TEST_CASE("derived constants") {
    const DerivedParams p = derive(valid());
    CHECK(p.log_n == 10);
    CHECK(p.psi == 20);
    CHECK(p.init_target == 50);  // ceil(5 * 9.97)
    CHECK(p.maj_rounds == 20);
    CHECK(p.match_hold == 12);   // ceil(20 * 12 / 20)
    CHECK(p.le_rounds == 20);
    CHECK(p.phase_floor == -1);
    ProtocolConfig i = valid();
    i.variant = Variant::Improved;
    i.n = 10000;
    i.x = {5000, 3000, 2000};
    const DerivedParams q = derive(i);
    CHECK(q.phase_floor == -8);
    CHECK(q.ell_max == 1);  // floor(log2 log2 10^4) - 2 = 3 - 2
    i.n = 1u << 30;
    i.x = {1u << 29, 1u << 28, 1u << 28};
    CHECK(derive(i).ell_max == 2);  // floor(log2 30) - 2
  }

  TEST_CASE("canonical text separates configs") {
    ProtocolConfig a = valid(), b = valid();
    CHECK(a.canonical() == b.canonical());
    CHECK(config_fingerprint(a) == config_fingerprint(b));
    CHECK(config_fingerprint(a).size() == 16);
    b.psi_factor = 3;
    CHECK(config_fingerprint(a) != config_fingerprint(b));
  }
}

TEST_SUITE("config text") {
  TEST_CASE("scalar keys and comments") {
    const ExperimentSpec s = parse_config(
        "# experiment\n"
        "variant = unordered\n"
        "n = 1000   # population\n"
        "k = 3\n"
        "dist = bias-one\n"
        "trials = 4\n"
        "seed = 17\n"
        "psi-factor = 3\n"
        "format = json\n");
    REQUIRE(s.entries.size() == 1);
    const auto& e = s.entries[0];
    CHECK(e.name == "default");
    CHECK(e.config.variant == Variant::Unordered);
    CHECK(e.config.x == std::vector<std::uint32_t>{334, 333, 333});
    CHECK(e.trials == 4);
    CHECK(e.base_seed == 17);
    CHECK(e.config.psi_factor == 3);
    CHECK(s.format == "json");
  }

  TEST_CASE("explicit supports infer k") {
    const ExperimentSpec s = parse_config("n = 400\nx = [240, 120, 40]\n");
    REQUIRE(s.entries.size() == 1);
    CHECK(s.entries[0].config.k == 3);
    CHECK(s.entries[0].family == DistributionFamily::Explicit);
  }

  TEST_CASE("repetition inside lists") {
    const ExperimentSpec s = parse_config("variant = improved\nn = 10000\nx = [5000, 3000, 50*40]\n");
    REQUIRE(s.entries.size() == 1);
    CHECK(s.entries[0].config.k == 42);
    CHECK(s.entries[0].config.x[41] == 50);
  }

  TEST_CASE("sweep axes expand to the full grid") {
    const ExperimentSpec s = parse_config(
        "n = [1000, 2000]\nk = [2, 4, 8]\nvariant = [ordered, unordered]\ndist = one-dominant\nalpha = 0.4\n");
    CHECK(s.entries.size() == 12);
    CHECK(s.entries.front().config.variant == Variant::Ordered);
    CHECK(s.entries.back().config.variant == Variant::Unordered);
    CHECK(s.entries.back().config.n == 2000);
    CHECK(s.entries.back().config.k == 8);
  }

  TEST_CASE("sections inherit global keys") {
    const ExperimentSpec s = parse_config(
        "n = 1000\ntrials = 2\ndist = bias-one\n"
        "[small]\nk = 3\n"
        "[large]\nk = 5\nn = 2001\ntrials = 7\n");
    REQUIRE(s.entries.size() == 2);
    CHECK(s.entries[0].name == "small");
    CHECK(s.entries[0].config.n == 1000);
    CHECK(s.entries[0].trials == 2);
    CHECK(s.entries[1].name == "large");
    CHECK(s.entries[1].config.n == 2001);
    CHECK(s.entries[1].trials == 7);
  }

  TEST_CASE("syntax errors name the line") {
    CHECK(contains(error_of("n = 100\nbogus line\n"), "line 2"));
    CHECK(contains(error_of("n = 100\nfoo = 3\n"), "unknown key 'foo'"));
    CHECK(contains(error_of("n = [100, 200\n"), "line 1"));
    CHECK(contains(error_of("[unterminated\n"), "section"));
  }

  TEST_CASE("all invalid grid points are reported together") {
    const std::string err = error_of("n = 400\nk = [2, 11, 12]\ndist = one-dominant\nalpha = 0.6\n");
    CHECK(contains(err, "k=11"));
    CHECK(contains(err, "k=12"));
    CHECK_FALSE(contains(err, "k=2,"));
  }

  TEST_CASE("lists are rejected for non-axis keys") {
    CHECK(contains(error_of("n = 1000\nk = 3\ndist = bias-one\npsi = [8, 9]\n"), "lists are only allowed"));
  }

  TEST_CASE("bias-one parity error") {
    CHECK(contains(error_of("n = 100\nk = 2\ndist = bias-one\n"), "odd n"));
  }

  TEST_CASE("command-line overrides apply to every section") {
    RawConfig raw = parse_raw_config("n = 1000\nk = 3\ndist = bias-one\n[a]\ntrials = 2\n[b]\ntrials = 3\n");
    override_value(raw, "trials", "9");
    override_value(raw, "k", "3,5");
    const ExperimentSpec s = build_experiment(raw);
    REQUIRE(s.entries.size() == 4);
    for (const auto& e : s.entries) CHECK(e.trials == 9);
    CHECK_THROWS_AS(override_value(raw, "nope", "1"), ConfigError);
  }
}

TEST_SUITE("experiments") {
  TEST_CASE("worker count does not change the output") {
    ExperimentSpec s = parse_config("n = 400\nk = [2, 3]\ndist = one-dominant\nalpha = 0.6\ntrials = 6\n");
    const std::string one = to_csv(run_experiment(s, 1));
    const std::string four = to_csv(run_experiment(s, 4));
    CHECK(one == four);
    CHECK(one == to_csv(run_experiment(s, 3)));
  }

  TEST_CASE("grid cardinality") {
    ExperimentSpec s = parse_config(
        "n = 400\nk = [2, 4, 8]\ndist = one-dominant\nalpha = 0.6\ntrials = 50\nmax_interactions = 20000\n");
    std::size_t progress_calls = 0;
    const auto rows = run_experiment(s, 2, [&](std::size_t, std::size_t total) {
      ++progress_calls;
      CHECK(total == 150);
    });
    CHECK(rows.size() == 150);
    CHECK(progress_calls == 150);
  }

  TEST_CASE("rows are sorted by fingerprint then seed") {
    ExperimentSpec s = parse_config("n = 400\nk = [2, 3]\ndist = one-dominant\nalpha = 0.6\ntrials = 3\nseed = 10\n");
    const auto rows = run_experiment(s, 2);
    REQUIRE(rows.size() == 6);
    for (std::size_t i = 1; i < rows.size(); ++i) {
      const auto& a = rows[i - 1];
      const auto& b = rows[i];
      const bool ordered = a.get("fingerprint") < b.get("fingerprint") ||
                           (a.get("fingerprint") == b.get("fingerprint") &&
                            std::stoull(a.get("seed")) < std::stoull(b.get("seed")));
      CHECK(ordered);
    }
    CHECK(rows[0].get("seed").size() == 2);
  }
}

TEST_SUITE("sinks") {
  TEST_CASE("csv escaping") {
    CHECK(csv_escape("plain") == "plain");
    CHECK(csv_escape("a,b") == "\"a,b\"");
    CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
    CHECK(csv_escape("line\nbreak") == "\"line\nbreak\"");
  }

  std::vector<ResultsRow> sample_rows() {
    const ExperimentEntry e = entry({60, 30, 10}, "round,trip");
    std::vector<ResultsRow> rows;
    for (std::uint64_t s = 1; s <= 4; ++s) {
      TrialResult r = fake_result(s, s != 3, 1000 * s, 100);
      if (s == 2) r.invariant_violations.push_back({5, "quote \" and, comma"});
      rows.push_back(make_row(e, r));
    }
    return rows;
  }

  TEST_CASE("csv round trip") {
    const auto rows = sample_rows();
    std::ostringstream os;
    REQUIRE(write_rows_csv(os, rows));
    CHECK(os.str().rfind("# plurality-results v1\n", 0) == 0);
    const auto back = read_rows(os.str());
    REQUIRE(back.size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) CHECK(back[i].values == rows[i].values);
  }

  TEST_CASE("json round trip") {
    const auto rows = sample_rows();
    std::ostringstream os;
    REQUIRE(write_rows_json(os, rows));
    const auto back = read_rows(os.str());
    REQUIRE(back.size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) CHECK(back[i].values == rows[i].values);
  }

  TEST_CASE("malformed input is rejected") {
    CHECK_THROWS(read_rows("# plurality-results v9\nfingerprint\nx\n"));
    std::ostringstream os;
    write_rows_csv(os, sample_rows());
    CHECK_THROWS(read_rows(os.str() + "too,few\n"));
    CHECK(read_rows("").empty());
  }

  TEST_CASE("row fields") {
    const auto rows = sample_rows();
    CHECK(rows[0].get("experiment") == "round,trip");
    CHECK(rows[0].get("x_max") == "60");
    CHECK(rows[0].get("plurality") == "1");
    CHECK(rows[0].get("parallel_time") == "10.000000");
    CHECK(rows[0].get("t_converged") == "10.000000");
    CHECK(rows[0].get("t_first_phase0") == "2.500000");
    CHECK(rows[0].get("t_leader_elected").empty());
    CHECK(rows[1].get("violations") == "1");
    CHECK(rows[2].get("correct") == "false");
    CHECK_THROWS(rows[0].get("missing"));
  }
}

TEST_SUITE("aggregation") {
  TEST_CASE("order statistics") {
    CHECK(median({3, 1, 2}) == 2);
    CHECK(median({4, 1, 3, 2}) == 2.5);
    std::vector<double> ten{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    CHECK(percentile(ten, 0.95) == 10);
    CHECK(percentile(ten, 0.5) == 5);
    CHECK(percentile(ten, 0.05) == 1);
    CHECK(median({}) == 0);
  }

  TEST_CASE("least squares") {
    const LinearFit exact = fit_line({1, 2, 3}, {5, 7, 9});
    CHECK(exact.slope == doctest::Approx(2));
    CHECK(exact.intercept == doctest::Approx(3));
    CHECK(exact.r2 == doctest::Approx(1));
    // slope = Sxy/Sxx = 9.5/5, r2 = Sxy^2/(Sxx Syy) = 90.25/93.75
    const LinearFit f = fit_line({1, 2, 3, 4}, {2, 4, 5, 8});
    CHECK(f.slope == doctest::Approx(1.9));
    CHECK(f.intercept == doctest::Approx(0.0));
    CHECK(f.r2 == doctest::Approx(90.25 / 93.75));
    CHECK(fit_line({1, 2}, {4, 4}).r2 == doctest::Approx(1));
  }

  TEST_CASE("correct rate matches a recount") {
    const auto rows = [] {
      std::vector<ResultsRow> out;
      const ExperimentEntry e = entry({60, 30, 10});
      for (std::uint64_t s = 1; s <= 10; ++s) out.push_back(make_row(e, fake_result(s, s % 4 != 0, 100 * s, 100)));
      return out;
    }();
    std::uint32_t recount = 0;
    for (const auto& r : rows) recount += r.get("correct") == "true";
    const Summary s = aggregate(rows);
    REQUIRE(s.configs.size() == 1);
    const ConfigSummary& c = s.configs[0];
    CHECK(c.trials == 10);
    CHECK(c.correct == recount);
    CHECK(c.correct_rate == doctest::Approx(recount / 10.0));
    const auto it = std::find_if(c.milestones.begin(), c.milestones.end(),
                                 [](const MilestoneStats& m) { return m.name == milestone::kConverged; });
    REQUIRE(it != c.milestones.end());
    CHECK(it->reached == 10);
    CHECK(it->median == doctest::Approx(5.5));
    CHECK(it->p95 == doctest::Approx(10));
  }

  TEST_CASE("all correct gives rate one") {
    std::vector<ResultsRow> rows;
    const ExperimentEntry e = entry({60, 30, 10});
    for (std::uint64_t s = 1; s <= 5; ++s) rows.push_back(make_row(e, fake_result(s, true, 100, 100)));
    CHECK(aggregate(rows).configs.at(0).correct_rate == 1.0);
  }

  TEST_CASE("fits over k use per-config medians") {
    std::vector<ResultsRow> rows;
    for (std::uint32_t k : {2u, 4u, 8u}) {
      std::vector<std::uint32_t> x = equal_shares(400, k);
      ++x.front();
      --x.back();
      ExperimentEntry e = entry(x);
      for (std::uint64_t s = 1; s <= 3; ++s) {
        // median converged parallel time = 5 + 3k
        rows.push_back(make_row(e, fake_result(s, true, e.config.n * (5 + 3 * k) + (s - 2) * e.config.n, e.config.n)));
      }
    }
    const Summary s = aggregate(rows);
    CHECK(s.configs.size() == 3);
    const auto fit = std::find_if(s.fits.begin(), s.fits.end(), [](const LinearFit& f) { return f.x == "k"; });
    REQUIRE(fit != s.fits.end());
    CHECK(fit->points == 3);
    CHECK(fit->slope == doctest::Approx(3));
    CHECK(fit->intercept == doctest::Approx(5));
    CHECK(fit->r2 == doctest::Approx(1));
  }

  TEST_CASE("empty input gives an empty summary") {
    const Summary s = aggregate({});
    CHECK(s.configs.empty());
    CHECK(s.fits.empty());
  }

  TEST_CASE("summary writers") {
    std::vector<ResultsRow> rows;
    const ExperimentEntry e = entry({60, 30, 10});
    for (std::uint64_t s = 1; s <= 3; ++s) rows.push_back(make_row(e, fake_result(s, true, 100 * s, 100)));
    const Summary s = aggregate(rows);
    std::ostringstream csv, json;
    CHECK(write_summary_csv(csv, s));
    CHECK(write_summary_json(json, s));
    CHECK(contains(csv.str(), "correct_rate"));
    CHECK(contains(json.str(), "\"correct_rate\""));
  }
}
