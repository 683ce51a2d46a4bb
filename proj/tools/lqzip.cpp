#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "lqz/harness.hpp"

using namespace lqz;

namespace {

const std::map<std::string, std::vector<std::string>> kVerifyTargets{
    {"loewner", {"slit-oracle", "capacity", "sle-drift"}},
    {"martingale", {"martingale"}},
    {"girsanov", {"girsanov"}},
    {"green", {"green-identities"}},
    {"gmc", {"gff-covariance", "gmc-moment"}},
    {"crt", {"crt-martingale"}},
    {"zipper-coupling", {"zipper-coupling"}},
    {"trig", {"trig-identity", "mu-coupling"}},
};

struct Globals {
  std::optional<std::uint64_t> seed;
  int workers = 1;
  std::string out;
  std::string format = "json";
  std::vector<std::string> sets;
};

// "key=value" goes to every listed experiment declaring key; "id.key=value" to one.
std::map<std::string, std::map<std::string, std::string>> route_sets(const std::vector<std::string>& sets,
                                                                    const std::vector<std::string>& ids) {
  std::map<std::string, std::map<std::string, std::string>> out;
  std::vector<std::string> bad;
  for (const auto& kv : sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      bad.push_back(kv + ": expected key=value");
      continue;
    }
    std::string key = kv.substr(0, eq);
    const std::string value = kv.substr(eq + 1);
    std::string only;
    for (const auto& id : ids)
      if (key.rfind(id + ".", 0) == 0) only = id;
    if (!only.empty()) key = key.substr(only.size() + 1);
    bool used = false;
    for (const auto& id : ids) {
      if (!only.empty() && id != only) continue;
      if (find_experiment(id).defaults.count(key) || !only.empty()) {
        out[id][key] = value;
        used = true;
      }
    }
    if (!used) bad.push_back(key + ": no selected experiment declares this key");
  }
  if (!bad.empty()) throw SchemaError(bad);
  return out;
}

int run_all(const std::vector<ExperimentConfig>& configs, const Globals& g) {
  std::vector<Report> reports;
  for (const auto& c : configs) {
    reports.push_back(run_experiment(c));
    for (const auto& r : reports.back().records)
      std::fprintf(stderr, "%s %s/%s value %.6g target %.6g tol %.3g %s\n", r.pass ? "PASS" : "FAIL", c.id.c_str(),
                   r.name.c_str(), r.value, r.target, r.tolerance, r.note.c_str());
  }
  const ReportFormat f = parse_format(g.format);
  if (g.out.empty()) {
    emit_reports(reports, f, std::cout);
  } else {
    std::ofstream o(g.out, std::ios::binary);
    if (!o) throw Error("cannot open " + g.out);
    emit_reports(reports, f, o);
  }
  bool ok = true;
  for (const auto& r : reports) ok = ok && r.passed();
  return ok ? 0 : 1;
}

std::vector<ExperimentConfig> configs_for(const std::vector<std::string>& ids, const Globals& g) {
  const auto sets = route_sets(g.sets, ids);
  std::vector<ExperimentConfig> cs;
  for (const auto& id : ids) {
    ExperimentConfig c;
    c.id = id;
    c.seed = g.seed ? *g.seed : default_seed();
    c.workers = g.workers;
    if (auto it = sets.find(id); it != sets.end()) c.settings = it->second;
    cs.push_back(c);
  }
  return cs;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reverse SLE, GFF and quantum zipper verification runner"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "master seed (default: LQZIP_SEED or built-in)");
  app.add_option("--workers", g.workers, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--out", g.out, "report path (default: stdout)");
  app.add_option("--format", g.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  auto* verify = app.add_subcommand("verify", "run a verification suite");
  std::string target;
  std::vector<std::string> names;
  for (const auto& [k, v] : kVerifyTargets) names.push_back(k);
  for (const auto& e : experiments()) names.push_back(e.id);
  verify->add_option("target", target, "suite or experiment id")->required()->check(CLI::IsMember(names));
  verify->add_option("--set", g.sets, "override a setting, key=value or id.key=value");

  auto* estimate = app.add_subcommand("estimate", "estimators");
  estimate->require_subcommand(1);
  auto* est_f = estimate->add_subcommand("f", "correlation function with a degenerate insertion");
  est_f->add_option("--set", g.sets, "override a setting");

  auto* bpz = app.add_subcommand("bpz", "BPZ equation checks");
  bpz->require_subcommand(1);
  auto* bpz_res = bpz->add_subcommand("residual", "polynomial oracle and Monte Carlo residual");
  bpz_res->add_option("--set", g.sets, "override a setting");

  auto* report = app.add_subcommand("report", "run a config file, chosen experiments, or everything");
  std::string config_path;
  std::vector<std::string> ids;
  report->add_option("--config", config_path, "INI config with [run] and an experiment section");
  report->add_option("experiments", ids, "experiment ids (default: all)");
  report->add_option("--set", g.sets, "override a setting");

  auto* list = app.add_subcommand("list", "list experiments and their defaults");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*list) {
      for (const auto& e : experiments()) {
        std::cout << e.id << "  " << e.summary << "\n";
        for (const auto& [k, v] : e.defaults) std::cout << "    " << k << " = " << v << "\n";
      }
      return 0;
    }
    if (*verify) {
      auto it = kVerifyTargets.find(target);
      return run_all(configs_for(it != kVerifyTargets.end() ? it->second : std::vector<std::string>{target}, g), g);
    }
    if (*est_f) return run_all(configs_for({"estimate-f"}, g), g);
    if (*bpz_res) return run_all(configs_for({"bpz-polynomial", "bpz-mc"}, g), g);
    if (*report) {
      if (!config_path.empty()) {
        ExperimentConfig c = load_config(config_path);
        if (g.seed) c.seed = *g.seed;
        if (app.count("--workers")) c.workers = g.workers;
        auto sets = route_sets(g.sets, {c.id});
        for (const auto& [k, v] : sets[c.id]) c.settings[k] = v;
        if (g.out.empty()) g.out = c.out;
        if (!app.count("--format")) g.format = c.format;
        return run_all({c}, g);
      }
      if (ids.empty())
        for (const auto& e : experiments()) ids.push_back(e.id);
      return run_all(configs_for(ids, g), g);
    }
  } catch (const SchemaError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
