#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "lqz/harness.hpp"

#ifndef LQZ_COMPILER
#define LQZ_COMPILER "unknown"
#endif
#ifndef LQZ_BUILD_TYPE
#define LQZ_BUILD_TYPE "unknown"
#endif

namespace lqz {

namespace {

using json = nlohmann::ordered_json;

std::string fmt17(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string json_number(double v) { return std::isfinite(v) ? fmt17(v) : "null"; }

std::string json_string(const std::string& s) { return json(s).dump(); }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

constexpr const char* kCsvHeader = "experiment,name,reference,value,target,tolerance,pass,note";

void csv_rows(const Report& r, std::ostream& out) {
  for (const auto& c : r.records)
    out << csv_field(r.experiment) << ',' << csv_field(c.name) << ',' << csv_field(c.reference) << ','
        << fmt17(c.value) << ',' << fmt17(c.target) << ',' << fmt17(c.tolerance) << ',' << (c.pass ? "true" : "false")
        << ',' << csv_field(c.note) << "\r\n";
}

// Written by hand so numbers carry exactly 17 significant digits.
void json_object(const Report& r, std::ostream& out, const std::string& ind) {
  const std::string i1 = ind + "  ", i2 = i1 + "  ", i3 = i2 + "  ";
  out << "{\n";
  out << i1 << "\"experiment\": " << json_string(r.experiment) << ",\n";
  out << i1 << "\"seed\": " << r.seed << ",\n";
  out << i1 << "\"workers\": " << r.workers << ",\n";
  out << i1 << "\"passed\": " << (r.passed() ? "true" : "false") << ",\n";
  out << i1 << "\"wall_seconds\": " << json_number(r.wall_seconds) << ",\n";
  out << i1 << "\"environment\": {";
  bool first = true;
  for (const auto& [k, v] : r.environment) {
    out << (first ? "\n" : ",\n") << i2 << json_string(k) << ": " << json_string(v);
    first = false;
  }
  out << (first ? "" : "\n" + i1) << "},\n";
  out << i1 << "\"errors\": [";
  for (std::size_t k = 0; k < r.errors.size(); ++k) out << (k ? ", " : "") << json_string(r.errors[k]);
  out << "],\n";
  out << i1 << "\"records\": [";
  for (std::size_t k = 0; k < r.records.size(); ++k) {
    const auto& c = r.records[k];
    out << (k ? ",\n" : "\n") << i2 << "{\n";
    out << i3 << "\"name\": " << json_string(c.name) << ",\n";
    out << i3 << "\"reference\": " << json_string(c.reference) << ",\n";
    out << i3 << "\"value\": " << json_number(c.value) << ",\n";
    out << i3 << "\"target\": " << json_number(c.target) << ",\n";
    out << i3 << "\"tolerance\": " << json_number(c.tolerance) << ",\n";
    out << i3 << "\"pass\": " << (c.pass ? "true" : "false") << ",\n";
    out << i3 << "\"note\": " << json_string(c.note) << "\n";
    out << i2 << "}";
  }
  out << (r.records.empty() ? "" : "\n" + i1) << "]\n";
  out << ind << "}";
}

double num_or_nan(const json& j) { return j.is_null() ? std::nan("") : j.get<double>(); }

}  // namespace

SchemaError::SchemaError(std::vector<std::string> fields)
    : Error([&] {
        std::string s = "invalid configuration:";
        for (const auto& f : fields) s += " " + f + ";";
        return s;
      }()),
      fields_(std::move(fields)) {}

CheckRecord check_near(std::string name, std::string reference, double value, double target, double tolerance,
                       std::string note) {
  const bool ok = std::abs(value - target) <= tolerance;
  return {std::move(name), std::move(reference), value, target, tolerance, ok, std::move(note)};
}

CheckRecord check_below(std::string name, std::string reference, double value, double bound, std::string note) {
  return {std::move(name), std::move(reference), value, 0.0, bound, value <= bound, std::move(note)};
}

CheckRecord check_above(std::string name, std::string reference, double value, double bound, std::string note) {
  return {std::move(name), std::move(reference), value, bound, 0.0, value >= bound, std::move(note)};
}

bool Report::passed() const {
  if (!errors.empty()) return false;
  for (const auto& r : records)
    if (!r.pass) return false;
  return true;
}

void CheckList::run(const std::string& name, const std::string& reference, const std::function<void()>& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    errors.push_back(name + ": " + e.what());
    push({name, reference, std::nan(""), std::nan(""), std::nan(""), false, std::string("error: ") + e.what()});
  }
}

std::map<std::string, std::string> environment_fingerprint() {
  return {{"compiler", LQZ_COMPILER},
          {"build_type", LQZ_BUILD_TYPE},
          {"hardware_threads", std::to_string(std::thread::hardware_concurrency())}};
}

ReportFormat parse_format(const std::string& s) {
  if (s == "csv") return ReportFormat::Csv;
  if (s == "json") return ReportFormat::Json;
  throw SchemaError({"format: expected csv or json, got '" + s + "'"});
}

void emit_report(const Report& r, ReportFormat f, std::ostream& out) {
  if (f == ReportFormat::Csv) {
    out << kCsvHeader << "\r\n";
    csv_rows(r, out);
  } else {
    json_object(r, out, "");
    out << "\n";
  }
  if (!out) throw Error("emit_report: write failed");
}

void emit_reports(const std::vector<Report>& rs, ReportFormat f, std::ostream& out) {
  if (f == ReportFormat::Csv) {
    out << kCsvHeader << "\r\n";
    for (const auto& r : rs) csv_rows(r, out);
  } else {
    out << "[";
    for (std::size_t k = 0; k < rs.size(); ++k) {
      out << (k ? ",\n  " : "\n  ");
      json_object(rs[k], out, "  ");
    }
    out << (rs.empty() ? "]\n" : "\n]\n");
  }
  if (!out) throw Error("emit_reports: write failed");
}

void emit_report(const Report& r, ReportFormat f, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("emit_report: cannot open " + path);
  emit_report(r, f, out);
}

Report parse_report_json(const std::string& text) {
  const json j = json::parse(text);
  Report r;
  r.experiment = j.at("experiment").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.workers = j.at("workers").get<int>();
  r.wall_seconds = num_or_nan(j.at("wall_seconds"));
  for (const auto& [k, v] : j.at("environment").items()) r.environment[k] = v.get<std::string>();
  for (const auto& e : j.at("errors")) r.errors.push_back(e.get<std::string>());
  for (const auto& c : j.at("records"))
    r.records.push_back({c.at("name").get<std::string>(), c.at("reference").get<std::string>(),
                         num_or_nan(c.at("value")), num_or_nan(c.at("target")), num_or_nan(c.at("tolerance")),
                         c.at("pass").get<bool>(), c.at("note").get<std::string>()});
  return r;
}

}  // namespace lqz
