#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "lqz/harness.hpp"
#include "lqz/rng.hpp"
#include "lqz/stats.hpp"

using namespace lqz;

namespace {

ExperimentConfig config(const std::string& id, std::map<std::string, std::string> settings = {}) {
  ExperimentConfig c;
  c.id = id;
  c.seed = 11;
  c.settings = std::move(settings);
  return c;
}

std::string numeric_fields(const Report& r) {
  Report copy = r;
  copy.wall_seconds = 0;
  std::ostringstream s;
  emit_report(copy, ReportFormat::Json, s);
  return s.str();
}

std::size_t count_lines(const std::string& s) {
  std::size_t n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

}  // namespace

TEST(Harness, SlitOracleDefaultsPassQuickly) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = run_experiment(config("slit-oracle"));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  EXPECT_TRUE(r.passed());
  EXPECT_FALSE(r.records.empty());
  EXPECT_LT(secs, 5.0);
}

TEST(Harness, TrigIdentity) {
  const auto r = run_experiment(config("trig-identity"));
  ASSERT_TRUE(r.passed());
  EXPECT_LT(r.records[0].value, 1e-12);
}

TEST(Harness, RepeatRunIsIdentical) {
  for (int workers : {1, 3}) {
    auto c = config("martingale", {{"paths", "300"}, {"kappa", "2,4"}});
    c.workers = workers;
    EXPECT_EQ(numeric_fields(run_experiment(c)), numeric_fields(run_experiment(c)));
    auto d = config("capacity", {{"paths", "5"}});
    d.workers = workers;
    EXPECT_EQ(numeric_fields(run_experiment(d)), numeric_fields(run_experiment(d)));
  }
}

TEST(Harness, EveryRecordHasAReference) {
  for (const char* id : {"slit-oracle", "trig-identity", "mu-coupling", "green-identities", "bpz-polynomial"})
    for (const auto& r : run_experiment(config(id)).records) EXPECT_FALSE(r.reference.empty()) << id << " " << r.name;
}

TEST(Harness, PartialFailureIsRecorded) {
  // An impossible tolerance fails its record without aborting the others.
  const auto r = run_experiment(config("green-identities", {{"tol", "0"}}));
  EXPECT_FALSE(r.passed());
  EXPECT_EQ(r.records.size(), 4u);
  // A setting that breaks a step becomes an error record.
  const auto e = run_experiment(config("martingale", {{"kappa", "-1"}, {"paths", "10"}}));
  EXPECT_FALSE(e.passed());
  ASSERT_EQ(e.errors.size(), 1u);
}

TEST(Harness, SchemaErrorsListEveryField) {
  try {
    run_experiment(config("slit-oracle", {{"bogus", "1"}, {"t", "abc"}}));
    FAIL();
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.fields().size(), 2u);
  }
  EXPECT_THROW(run_experiment(config("no-such-experiment")), SchemaError);
  try {
    parse_config("[run]\nexperiment = slit-oracle\nworkerz = 2\n[slit-oracle]\nt = 0.1\nfoo = 2\n[other]\nx = 1\n");
    FAIL();
  } catch (const SchemaError& e) {
    // seed missing, workerz, foo, [other]
    EXPECT_EQ(e.fields().size(), 4u) << e.what();
  }
}

TEST(Harness, ConfigParses) {
  const auto c = parse_config(
      "# comment\n[run]\nexperiment = capacity\nseed = 42\nworkers = 2\nformat = csv\n\n[capacity]\npaths = 7\n");
  EXPECT_EQ(c.id, "capacity");
  EXPECT_EQ(c.seed, 42u);
  EXPECT_EQ(c.workers, 2);
  EXPECT_EQ(c.format, "csv");
  EXPECT_EQ(c.settings.at("paths"), "7");
  const auto r = run_experiment(c);
  EXPECT_TRUE(r.passed());
}

TEST(Harness, DefaultSeedFromEnvironment) {
  setenv("LQZIP_SEED", "123", 1);
  EXPECT_EQ(default_seed(), 123u);
  setenv("LQZIP_SEED", "x", 1);
  EXPECT_THROW(default_seed(), SchemaError);
  unsetenv("LQZIP_SEED");
  EXPECT_NO_THROW(default_seed());
}

TEST(Report, EmptyCsvIsHeaderOnly) {
  Report r;
  r.experiment = "empty";
  std::ostringstream s;
  emit_report(r, ReportFormat::Csv, s);
  EXPECT_EQ(count_lines(s.str()), 1u);
}

TEST(Report, CsvRowsAndQuoting) {
  Report r;
  r.experiment = "x";
  r.records.push_back(check_near("a", "plumbing", 1.0 / 3, 0.0, 1.0, "has, comma"));
  r.records.push_back(check_near("b", "say \"hi\"", 2.0, 0.0, 1.0));
  r.records.push_back(check_below("c", "multi\nline", 0.5, 1.0));
  std::ostringstream s;
  emit_report(r, ReportFormat::Csv, s);
  const std::string t = s.str();
  // Embedded newline sits inside a quoted field, so records = CRLF-terminated rows.
  std::size_t rows = 0;
  for (std::size_t p = t.find("\r\n"); p != std::string::npos; p = t.find("\r\n", p + 2)) ++rows;
  EXPECT_EQ(rows, r.records.size() + 1);
  EXPECT_NE(t.find("\"has, comma\""), std::string::npos);
  EXPECT_NE(t.find("\"say \"\"hi\"\"\""), std::string::npos);
  EXPECT_NE(t.find("0.33333333333333331"), std::string::npos);
}

TEST(Report, JsonRoundTrip) {
  Report r;
  r.experiment = "rt";
  r.seed = 99;
  r.workers = 2;
  r.wall_seconds = 0.125;
  r.environment = environment_fingerprint();
  r.errors = {"boom"};
  r.records.push_back(check_near("a", "ref \"q\"", 0.1, 0.2, 0.3, "note"));
  r.records.push_back({"nan", "plumbing", std::nan(""), 1.0, 2.0, false, ""});
  std::ostringstream s;
  emit_report(r, ReportFormat::Json, s);
  const Report q = parse_report_json(s.str());
  EXPECT_EQ(q.experiment, r.experiment);
  EXPECT_EQ(q.seed, r.seed);
  EXPECT_EQ(q.workers, r.workers);
  EXPECT_EQ(q.wall_seconds, r.wall_seconds);
  EXPECT_EQ(q.environment, r.environment);
  EXPECT_EQ(q.errors, r.errors);
  ASSERT_EQ(q.records.size(), 2u);
  EXPECT_EQ(q.records[0].value, 0.1);
  EXPECT_EQ(q.records[0].reference, r.records[0].reference);
  EXPECT_TRUE(std::isnan(q.records[1].value));
  std::ostringstream s2;
  emit_report(q, ReportFormat::Json, s2);
  EXPECT_EQ(s.str(), s2.str());
}

TEST(McStats, Examples) {
  std::vector<double> c(10, 3.5);
  EXPECT_EQ(mc_stats(c).std_error, 0.0);
  std::vector<double> two{1.0, 3.0};
  const auto e = mc_stats(two);
  EXPECT_EQ(e.mean, 2.0);
  EXPECT_DOUBLE_EQ(e.std_error, 1.0);
  std::vector<double> one{1.0};
  EXPECT_THROW(mc_stats(one), DomainError);
  Stream rng(3, 0);
  std::vector<double> z(1000000);
  for (auto& v : z) v = rng.normal();
  EXPECT_LT(std::abs(mc_stats(z).mean), 3e-3);
}
