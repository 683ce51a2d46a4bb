#ifndef LQZ_HARNESS_HPP
#define LQZ_HARNESS_HPP

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "lqz/types.hpp"

namespace lqz {

/// Invalid configuration; what() lists every offending field.
class SchemaError : public Error {
 public:
  explicit SchemaError(std::vector<std::string> fields);
  const std::vector<std::string>& fields() const { return fields_; }

 private:
  std::vector<std::string> fields_;
};

struct CheckRecord {
  std::string name;
  std::string reference;  ///< claim being checked, or "plumbing"
  double value = 0.0;
  double target = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string note;
};

/// |value - target| <= tolerance
CheckRecord check_near(std::string name, std::string reference, double value, double target, double tolerance,
                       std::string note = {});
/// value <= bound (target 0, tolerance bound)
CheckRecord check_below(std::string name, std::string reference, double value, double bound, std::string note = {});
/// value >= bound
CheckRecord check_above(std::string name, std::string reference, double value, double bound, std::string note = {});

struct Report {
  std::string experiment;
  std::uint64_t seed = 0;
  int workers = 1;
  std::vector<CheckRecord> records;
  double wall_seconds = 0.0;
  std::map<std::string, std::string> environment;
  std::vector<std::string> errors;  ///< checks that threw; each also appears as a failed record

  bool passed() const;
};

/// Compiler, build type, hardware threads.
std::map<std::string, std::string> environment_fingerprint();

enum class ReportFormat { Csv, Json };
ReportFormat parse_format(const std::string& s);

/// CSV: header plus one RFC 4180 row per record. JSON: stable key order.
/// Floats are written with 17 significant digits.
void emit_report(const Report& r, ReportFormat f, std::ostream& out);
void emit_report(const Report& r, ReportFormat f, const std::string& path);
/// Several reports: a JSON array, or one CSV table with a single header.
void emit_reports(const std::vector<Report>& rs, ReportFormat f, std::ostream& out);
Report parse_report_json(const std::string& text);

/// Module settings of one experiment with their defaults.
class Settings {
 public:
  Settings() = default;
  explicit Settings(std::map<std::string, std::string> defaults) : values_(std::move(defaults)) {}

  /// Throws SchemaError for keys the experiment does not declare.
  void override_with(const std::map<std::string, std::string>& kv, const std::string& section);
  double num(const std::string& key) const;
  long integer(const std::string& key) const;
  std::string str(const std::string& key) const;
  std::vector<double> list(const std::string& key) const;
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

struct ExperimentConfig {
  std::string id;
  std::uint64_t seed = 0;
  int workers = 1;
  std::string out;
  std::string format = "json";
  std::map<std::string, std::string> settings;  ///< overrides of the experiment defaults
};

/// [run] experiment / seed / workers / out / format, plus a section named after the
/// experiment with module settings. Unknown sections and keys raise SchemaError.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Seed from LQZIP_SEED when set, else the built-in default.
std::uint64_t default_seed();

struct RunContext {
  std::uint64_t seed = 0;
  int workers = 1;
};

/// Collects records; a step that throws becomes a failed record and the run continues.
class CheckList {
 public:
  void push(CheckRecord r) { records.push_back(std::move(r)); }
  void run(const std::string& name, const std::string& reference, const std::function<void()>& fn);

  std::vector<CheckRecord> records;
  std::vector<std::string> errors;
};

using ExperimentFn = std::function<void(const Settings&, const RunContext&, CheckList&)>;

struct Experiment {
  std::string id;
  std::string summary;
  std::map<std::string, std::string> defaults;
  ExperimentFn run;
};

const std::vector<Experiment>& experiments();
const Experiment& find_experiment(const std::string& id);

/// Throws SchemaError for an unknown experiment or setting.
/// Deterministic given (seed, workers), wall time aside.
Report run_experiment(const ExperimentConfig& c);

// Experiment groups, one per source file.
std::vector<Experiment> loewner_experiments();
std::vector<Experiment> sde_experiments();
std::vector<Experiment> field_experiments();
std::vector<Experiment> observable_experiments();
std::vector<Experiment> bpz_experiments();

}  // namespace lqz

#endif
