#include <cmath>

#include "format.hpp"
#include "lqz/harness.hpp"
#include "lqz/parallel.hpp"
#include "lqz/sde.hpp"
#include "lqz/stats.hpp"

namespace lqz {

namespace {

void sle_drift(const Settings& s, const RunContext& ctx, CheckList& out) {
  const Params p = Params::from_kappa(s.num("kappa"));
  const std::vector<ForcePointSpec> fp{{s.num("rho"), Complex(s.num("x"), s.num("y"))}};
  const double dt = s.num("dt");
  const long steps = std::lround(s.num("T") / dt), n = s.integer("paths"), pilot = s.integer("pilot");
  const double zmax = s.num("max_z");
  const char* ref = "reverse SLE_{kappa,rho} driving drift is sum Re(-rho / (Z - W))";
  out.run("drift_bins", ref, [&] {
    std::vector<double> pd;
    for (long i = 0; i < pilot; ++i) {
      Stream rng(ctx.seed, derive_stream(i, 0xD1F0));
      ReverseSleStepper st(p, fp, dt, rng);
      for (long k = 0; k < steps; ++k) {
        pd.push_back(st.drift());
        st.step();
      }
    }
    const auto edges = equal_mass_edges(pd, static_cast<int>(s.integer("bins")));
    const Chunking ch{static_cast<std::size_t>(n), 1000};
    std::vector<BinnedResidual> parts(ch.count(), BinnedResidual(edges));
    parallel_for(ch.count(), ctx.workers, [&](std::size_t c) {
      for (std::size_t i = ch.begin(c); i < ch.end(c); ++i) {
        Stream rng(ctx.seed, derive_stream(i, 0xD1F1));
        ReverseSleStepper st(p, fp, dt, rng);
        parts[c].begin_path();
        for (long k = 0; k < steps && !st.threshold_hit(); ++k) {
          const double pred = st.drift(), w0 = st.W();
          st.step();
          parts[c].add(pred, pred, (st.W() - w0) / dt);
        }
        parts[c].end_path();
      }
    });
    BinnedResidual all(edges);
    for (const auto& b : parts) all.merge(b);
    const auto bins = all.bins();
    for (std::size_t k = 0; k < bins.size(); ++k)
      out.push(check_below("bin_" + std::to_string(k) + "_abs_z", ref, std::abs(bins[k].z), zmax,
                           fmt("predicted %.6g observed %.6g", bins[k].predicted_mean, bins[k].observed_mean)));
  });
}

void wedge_occupation(const Settings& s, const RunContext& ctx, CheckList& out) {
  const Params p = Params::from_gamma(s.num("gamma"));
  const double weight = s.num("weight"), b = s.num("b"), T = s.num("T"), dt = s.num("dt");
  const long n = s.integer("paths");
  const char* ref = "expected time the wedge average process spends in (0, b) is b / (Q - 2 alpha)";
  out.run("occupation", ref, [&] {
    std::vector<double> occ(n);
    parallel_for(n, ctx.workers, [&](std::size_t i) {
      Stream rng(ctx.seed, derive_stream(i, 0x3ED6));
      const auto w = wedge_average_process(weight, p, T, dt, rng);
      // Trapezoid occupation on the grid.
      double o = 0.0;
      for (std::size_t k = 0; k + 1 < w.values.size(); ++k) {
        const double a0 = w.values[k], a1 = w.values[k + 1];
        o += 0.5 * dt * ((a0 > 0 && a0 < b) + (a1 > 0 && a1 < b));
      }
      occ[i] = o;
    });
    const auto e = mc_stats(occ, ctx.seed);
    const double want = b / wedge_drift(weight, p);
    out.push(check_near("relative_error", ref, e.mean / want - 1, 0.0, s.num("rel_tol"),
                        fmt("mean %.6g se %.3g target %.6g", e.mean, e.std_error, want)));
  });
}

}  // namespace

std::vector<Experiment> sde_experiments() {
  return {
      {"sle-drift",
       "binned drift of the driving function against the force-point formula",
       {{"kappa", "4"},
        {"rho", "2"},
        {"x", "1"},
        {"y", "1"},
        {"dt", "1e-4"},
        {"T", "0.01"},
        {"paths", "100000"},
        {"pilot", "2000"},
        {"bins", "10"},
        {"max_z", "3"}},
       sle_drift},
      {"wedge-occupation",
       "occupation time of the wedge average process",
       {{"gamma", "1.5"},
        {"weight", "2"},
        {"b", "20"},
        {"T", "200"},
        {"dt", "0.01"},
        {"paths", "4000"},
        {"rel_tol", "0.05"}},
       wedge_occupation},
  };
}

}  // namespace lqz
