#include <chrono>

#include "lqz/harness.hpp"

namespace lqz {

const std::vector<Experiment>& experiments() {
  static const std::vector<Experiment> all = [] {
    std::vector<Experiment> v;
    for (auto group : {loewner_experiments, sde_experiments, field_experiments, observable_experiments,
                       bpz_experiments}) {
      auto g = group();
      v.insert(v.end(), g.begin(), g.end());
    }
    return v;
  }();
  return all;
}

const Experiment& find_experiment(const std::string& id) {
  for (const auto& e : experiments())
    if (e.id == id) return e;
  throw SchemaError({"experiment: unknown id '" + id + "'"});
}

Report run_experiment(const ExperimentConfig& c) {
  const Experiment& e = find_experiment(c.id);
  if (c.workers < 1) throw SchemaError({"workers: expected a positive integer"});
  Settings s(e.defaults);
  s.override_with(c.settings, c.id);

  Report r;
  r.experiment = c.id;
  r.seed = c.seed;
  r.workers = c.workers;
  r.environment = environment_fingerprint();
  const auto t0 = std::chrono::steady_clock::now();
  CheckList checks;
  checks.run(c.id, "plumbing", [&] { e.run(s, RunContext{c.seed, c.workers}, checks); });
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.records = std::move(checks.records);
  r.errors = std::move(checks.errors);
  return r;
}

}  // namespace lqz
