#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "lqz/harness.hpp"

namespace lqz {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

bool parse_double(const std::string& s, double& out) {
  const std::string t = trim(s);
  if (t.empty()) return false;
  char* end = nullptr;
  out = std::strtod(t.c_str(), &end);
  return end == t.c_str() + t.size();
}

bool parse_list(const std::string& s, std::vector<double>& out) {
  out.clear();
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    double v;
    if (!parse_double(item, v)) return false;
    out.push_back(v);
  }
  return !out.empty();
}

bool parse_u64(const std::string& s, std::uint64_t& out) {
  const std::string t = trim(s);
  if (t.empty() || t[0] == '-') return false;
  char* end = nullptr;
  out = std::strtoull(t.c_str(), &end, 10);
  return end == t.c_str() + t.size();
}

enum class Kind { Number, List, Text };

Kind kind_of(const std::string& v) {
  double d;
  std::vector<double> l;
  if (parse_double(v, d)) return Kind::Number;
  if (parse_list(v, l)) return Kind::List;
  return Kind::Text;
}

}  // namespace

void Settings::override_with(const std::map<std::string, std::string>& kv, const std::string& section) {
  std::vector<std::string> bad;
  for (const auto& [k, v] : kv) {
    auto it = values_.find(k);
    if (it == values_.end()) {
      bad.push_back(section + "." + k + ": unknown key");
      continue;
    }
    // Numbers and number lists are interchangeable here; arity is checked where the value is used.
    if (kind_of(it->second) != Kind::Text && kind_of(v) == Kind::Text)
      bad.push_back(section + "." + k + ": expected a number or number list, got '" + v + "'");
  }
  if (!bad.empty()) throw SchemaError(bad);
  for (const auto& [k, v] : kv) values_[k] = trim(v);
}

double Settings::num(const std::string& key) const {
  double d;
  if (!parse_double(str(key), d)) throw SchemaError({key + ": not a number"});
  return d;
}

long Settings::integer(const std::string& key) const {
  const double d = num(key);
  if (d != std::floor(d)) throw SchemaError({key + ": not an integer"});
  return static_cast<long>(d);
}

std::string Settings::str(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw SchemaError({key + ": unknown key"});
  return it->second;
}

std::vector<double> Settings::list(const std::string& key) const {
  std::vector<double> l;
  if (!parse_list(str(key), l)) throw SchemaError({key + ": not a number list"});
  return l;
}

ExperimentConfig parse_config(const std::string& text) {
  static const std::set<std::string> run_keys{"experiment", "seed", "workers", "out", "format"};
  std::map<std::string, std::map<std::string, std::string>> sections;
  std::vector<std::string> bad;
  std::string section;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']') {
        bad.push_back("line " + std::to_string(lineno) + ": malformed section header");
        continue;
      }
      section = trim(t.substr(1, t.size() - 2));
      sections[section];
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos || section.empty()) {
      bad.push_back("line " + std::to_string(lineno) + ": expected key = value inside a section");
      continue;
    }
    sections[section][trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
  }

  ExperimentConfig c;
  const auto& run = sections["run"];
  for (const auto& [k, v] : run)
    if (!run_keys.count(k)) bad.push_back("run." + k + ": unknown key");
  if (auto it = run.find("experiment"); it != run.end())
    c.id = it->second;
  else
    bad.push_back("run.experiment: missing");
  if (auto it = run.find("seed"); it == run.end())
    bad.push_back("run.seed: missing");
  else if (!parse_u64(it->second, c.seed))
    bad.push_back("run.seed: expected a non-negative integer");
  if (auto it = run.find("workers"); it != run.end()) {
    double w;
    if (!parse_double(it->second, w) || w < 1 || w != std::floor(w))
      bad.push_back("run.workers: expected a positive integer");
    else
      c.workers = static_cast<int>(w);
  }
  if (auto it = run.find("out"); it != run.end()) c.out = it->second;
  if (auto it = run.find("format"); it != run.end()) {
    c.format = it->second;
    if (c.format != "csv" && c.format != "json") bad.push_back("run.format: expected csv or json");
  }

  const Experiment* e = nullptr;
  if (!c.id.empty()) {
    for (const auto& x : experiments())
      if (x.id == c.id) e = &x;
    if (!e) bad.push_back("run.experiment: unknown experiment '" + c.id + "'");
  }
  for (const auto& [name, kv] : sections) {
    if (name == "run") continue;
    if (name != c.id) {
      bad.push_back("[" + name + "]: unknown section");
      continue;
    }
    if (!e) continue;
    try {
      Settings(e->defaults).override_with(kv, name);
    } catch (const SchemaError& err) {
      bad.insert(bad.end(), err.fields().begin(), err.fields().end());
    }
    c.settings = kv;
  }
  if (!bad.empty()) throw SchemaError(bad);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::uint64_t default_seed() {
  if (const char* s = std::getenv("LQZIP_SEED")) {
    std::uint64_t v;
    if (!parse_u64(s, v)) throw SchemaError({"LQZIP_SEED: expected a non-negative integer"});
    return v;
  }
  return 20240601;
}

}  // namespace lqz
