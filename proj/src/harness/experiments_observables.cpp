#include <cmath>

#include "format.hpp"
#include "lqz/harness.hpp"
#include "lqz/observables.hpp"
#include "lqz/parallel.hpp"
#include "lqz/rng.hpp"

namespace lqz {

namespace {

std::string tag(const char* prefix, double v) { return prefix + fmt("%g", v); }

InsertionSpec insertion_from(const Settings& s) {
  InsertionSpec spec;
  const std::string kind = s.str("kind");
  if (kind == "bulk")
    spec.bulk.push_back({s.num("alpha"), Complex(s.num("x"), s.num("y"))});
  else if (kind == "boundary")
    spec.boundary.push_back({s.num("alpha"), s.num("x")});
  else
    throw SchemaError({"kind: expected bulk or boundary, got '" + kind + "'"});
  return spec;
}

std::vector<ForcePointSpec> tracers(const InsertionSpec& spec) {
  std::vector<ForcePointSpec> t;
  for (const auto& [a, z] : spec.points()) t.push_back({0.0, z});
  return t;
}

void martingale(const Settings& s, const RunContext& ctx, CheckList& out) {
  const InsertionSpec spec = insertion_from(s);
  const double tau = s.num("tau"), dt = s.num("dt");
  const long steps = std::lround(tau / dt), n = s.integer("paths");
  const char* ref = "M_t is a martingale along reverse SLE_kappa";
  for (double kappa : s.list("kappa")) {
    const std::string name = tag("kappa_", kappa);
    out.run(name, ref, [&] {
      const Params p = Params::from_kappa(kappa);
      const auto tr = tracers(spec);
      std::vector<double> ratio(n);
      parallel_for(n, ctx.workers, [&](std::size_t i) {
        Stream rng(ctx.seed, derive_stream(i, 0x3A27 + static_cast<std::uint64_t>(kappa * 1000)));
        ReverseSleStepper st(p, tr, dt, rng);
        const double m0 = log_martingale_M({st.W(), st.points()}, spec, p);
        for (long k = 0; k < steps; ++k) st.step();
        ratio[i] = std::exp(log_martingale_M({st.W(), st.points()}, spec, p) - m0);
      });
      const auto e = mc_stats(ratio, ctx.seed);
      out.push(check_near(name + "_ratio", ref, e.mean, 1.0, s.num("z_max") * e.std_error,
                          fmt("E[M_tau]/M_0, se %.3g", e.std_error)));
      out.push(check_below(name + "_se", "plumbing", e.std_error, s.num("max_se")));
    });
  }
}

void girsanov(const Settings& s, const RunContext& ctx, CheckList& out) {
  const Params p = Params::from_kappa(s.num("kappa"));
  const InsertionSpec spec = insertion_from(s);
  const double tau = s.num("tau"), dt = s.num("dt");
  const long steps = std::lround(tau / dt), n = s.integer("paths");
  const auto tr = tracers(spec);
  const auto fp = girsanov_force_points(spec, p);
  const char* ref = "weighting SLE_kappa by M_tau / M_0 gives SLE_{kappa,rho} up to tau";
  out.run("ks_p_value", ref, [&] {
    std::vector<double> w(n), wt(n), direct(n);
    std::vector<char> collided(n, 0);
    parallel_for(n, ctx.workers, [&](std::size_t i) {
      Stream rng(ctx.seed, derive_stream(i, 0x6125));
      ReverseSleStepper st(p, tr, dt, rng);
      const double m0 = log_martingale_M({st.W(), st.points()}, spec, p);
      for (long k = 0; k < steps; ++k) st.step();
      bool hit = false;
      for (const auto& q : st.points()) hit = hit || q.collided;
      collided[i] = hit;
      wt[i] = hit ? 0.0 : std::exp(log_martingale_M({st.W(), st.points()}, spec, p) - m0);
      w[i] = st.W();
      Stream rng2(ctx.seed, derive_stream(i, 0x6126));
      ReverseSleStepper sd(p, fp, dt, rng2);
      for (long k = 0; k < steps; ++k) sd.step();
      direct[i] = sd.W();
    });
    long nc = 0;
    for (char c : collided) nc += c;
    const auto ks = ks_two_sample(w, wt, direct, {});
    out.push(check_above("ks_p_value", ref, ks.p_value, s.num("min_p"),
                         fmt("D %.4g, effective n %.0f, collided tracers %ld", ks.statistic, ks.effective_n, nc)));
  });
  out.run("weighted_drift", ref, [&] {
    const long m = s.integer("drift_paths");
    std::vector<DrivingState> paths(m);
    parallel_for(m, ctx.workers, [&](std::size_t i) {
      Stream rng(ctx.seed, derive_stream(i, 0x6127));
      paths[i] = simulate_reverse_sle(p, tr, tau, dt, rng);
    });
    const auto r = girsanov_drift_check(paths, spec, p, tau, static_cast<int>(s.integer("bins")));
    out.push(check_below("weighted_drift_max_abs_z", ref, r.max_abs_z, s.num("z_max"),
                         fmt("%ld paths, ess %.0f", m, r.ess)));
  });
}

void trig_identity(const Settings& s, const RunContext& ctx, CheckList& out) {
  const char* ref = "cos^2 x + cos^2(x + th) - 2 cos x cos(x + th) cos th = sin^2 th";
  out.run("max_residual", ref, [&] {
    Stream rng(ctx.seed, 0x7819);
    double worst = 0.0, worst_c = 0.0;
    const long n = s.integer("draws");
    const double xr = s.num("x_range");
    for (long i = 0; i < n; ++i) {
      const double x = xr * (2 * rng.uniform() - 1), th = pi * rng.uniform();
      worst = std::max(worst, std::abs(trig_residual(x, th)));
      const Complex xc(x, rng.uniform() - 0.5);
      worst_c = std::max(worst_c, std::abs(trig_residual(xc, Complex(th, 0.0))));
    }
    out.push(check_below("max_residual", ref, worst, s.num("tol"), std::to_string(n) + " real draws"));
    out.push(check_below("max_residual_complex_x", ref, worst_c, s.num("tol"), "Im x in (-1/2, 1/2)"));
  });
}

void mu_coupling(const Settings& s, const RunContext& ctx, CheckList& out) {
  const char* ref = "mu(sigma) = cos(pi gamma (sigma - Q/2)) / sqrt(sin(pi gamma^2 / 4)) matches the trig parametrization";
  for (double gamma : s.list("gamma")) {
    const std::string name = tag("gamma_", gamma);
    out.run(name, ref, [&] {
      const Params p = Params::from_gamma(gamma);
      Stream rng(ctx.seed, derive_stream(static_cast<std::uint64_t>(gamma * 1000), 0x4C0));
      double dmu = 0.0, dsig = 0.0;
      for (long i = 0; i < s.integer("draws"); ++i) {
        const Complex sl(4 * rng.uniform() - 2, rng.uniform() - 0.5);
        const auto a = CosmologicalCoupling::from_sigma_L(sl, p);
        const auto b = CosmologicalCoupling::from_x(a.x, p);
        dmu = std::max({dmu, std::abs(a.mu_L - b.mu_L), std::abs(a.mu_R - b.mu_R),
                        std::abs(a.mu_L - coupling_mu(a.sigma_L, p)), std::abs(a.mu_R - coupling_mu(a.sigma_R, p))});
        dsig = std::max(dsig, std::abs(a.sigma_L - a.sigma_R + gamma / 4));
      }
      out.push(check_below(name + "_max_mu_diff", ref, dmu, s.num("tol")));
      out.push(check_below(name + "_sigma_shift", "sigma_L - sigma_R = beta_* / 2 with beta_* = -gamma / 2", dsig,
                           s.num("tol")));
    });
  }
}

void crt_martingale(const Settings& s, const RunContext& ctx, CheckList& out) {
  const Params p = Params::from_kappa(s.num("kappa"));
  const double T = s.num("s"), dt = T / s.integer("steps");
  const long n = s.integer("paths");
  const auto c = CosmologicalCoupling::from_x(Complex(s.num("x"), 0.0), p);
  const char* ref = "exp(-s - mu_L X_s - mu_R Y_s) has expectation 1 under the CRT pair";
  out.run("expectation", ref, [&] {
    std::vector<double> v(n);
    parallel_for(n, ctx.workers, [&](std::size_t i) {
      Stream rng(ctx.seed, derive_stream(i, 0xC27));
      const auto path = sample_crt(p, T, dt, rng);
      v[i] = std::real(crt_mtg_value(T, path.X.back(), path.Y.back(), c));
    });
    const auto e = mc_stats(v, ctx.seed);
    out.push(check_near("expectation", ref, e.mean, 1.0, s.num("z_max") * e.std_error,
                        fmt("se %.3g", e.std_error)));
  });
  out.run("closed_form_exponent", "the exponent -s + (a^2 s / 2)(mu_L^2 + mu_R^2 - 2 mu_L mu_R cos th) vanishes", [&] {
    Stream rng(ctx.seed, 0xC28);
    double worst = std::abs(crt_log_expectation(T, c, crt_a_sq(p.kappa)));
    for (int i = 0; i < 1000; ++i) {
      const Complex x(6 * rng.uniform() - 3, rng.uniform() - 0.5);
      worst = std::max(worst, std::abs(crt_log_expectation(T, CosmologicalCoupling::from_x(x, p), crt_a_sq(p.kappa))));
    }
    out.push(check_below("closed_form_exponent", "the exponent -s + (a^2 s / 2)(mu_L^2 + mu_R^2 - 2 mu_L mu_R cos th) vanishes",
                         worst, s.num("tol")));
  });
}

}  // namespace

std::vector<Experiment> observable_experiments() {
  return {
      {"martingale",
       "flatness of E[M_tau] / M_0 for one insertion",
       {{"kappa", "2,4,9"},
        {"kind", "bulk"},
        {"alpha", "0.3"},
        {"x", "0"},
        {"y", "1"},
        {"tau", "0.1"},
        {"dt", "1e-3"},
        {"paths", "100000"},
        {"z_max", "3"},
        {"max_se", "0.01"}},
       martingale},
      {"girsanov",
       "weighted SLE_kappa against direct SLE_{kappa,rho}",
       {{"kappa", "2"},
        {"kind", "boundary"},
        {"alpha", "0.5"},
        {"x", "1.5"},
        {"y", "0"},
        {"tau", "0.05"},
        {"dt", "1e-3"},
        {"paths", "100000"},
        {"min_p", "0.01"},
        {"drift_paths", "20000"},
        {"bins", "5"},
        {"z_max", "3"}},
       girsanov},
      {"trig-identity",
       "trigonometric identity behind the cosmological coupling",
       {{"draws", "10000"}, {"x_range", "10"}, {"tol", "1e-12"}},
       trig_identity},
      {"mu-coupling",
       "two parametrizations of the boundary cosmological constants",
       {{"gamma", "1.2,1.5,1.8"}, {"draws", "1000"}, {"tol", "1e-12"}},
       mu_coupling},
      {"crt-martingale",
       "exponential martingale of the mating-of-trees pair",
       {{"kappa", "6"}, {"s", "0.5"}, {"steps", "50"}, {"x", "0.3"}, {"paths", "100000"}, {"z_max", "3"}, {"tol", "1e-12"}},
       crt_martingale},
  };
}

}  // namespace lqz
