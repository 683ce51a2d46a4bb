#include <cmath>

#include "format.hpp"
#include "lqz/bpz.hpp"
#include "lqz/harness.hpp"
#include "lqz/observables.hpp"

namespace lqz {

namespace {

const std::map<std::string, std::string> kCorrelationDefaults{
    {"gamma", "1.5"},
    {"degenerate", "2/gamma"},
    {"alpha", "1.2,1.2"},
    {"z", "-0.5,0.8,0.6,1.1"},
    {"beta", "1.2"},
    {"x", "0.8"},
    {"w", "-0.6"},
    {"delta", "-0.3"},
    {"mu", "0,0"},
    {"mu_L", "0"},
    {"mu_R", "0"},
    {"radius", "6"},
    {"ymin", "0.0125"},
    {"ladder", "0.0125"},
    {"samples", "10000"},
};

std::map<std::string, std::string> with(std::map<std::string, std::string> m,
                                        const std::map<std::string, std::string>& extra) {
  for (const auto& [k, v] : extra) m[k] = v;
  return m;
}

CorrelationConfig correlation_from(const Settings& s) {
  CorrelationConfig c;
  c.gamma = s.num("gamma");
  const std::string deg = s.str("degenerate");
  if (deg == "2/gamma")
    c.beta_star = -2 / c.gamma;
  else if (deg == "gamma/2")
    c.beta_star = -c.gamma / 2;
  else
    throw SchemaError({"degenerate: expected 2/gamma or gamma/2"});
  c.alpha = s.list("alpha");
  const auto z = s.list("z");
  if (z.size() % 2) throw SchemaError({"z: expected re,im pairs"});
  for (std::size_t k = 0; k + 1 < z.size(); k += 2) c.point.z.emplace_back(z[k], z[k + 1]);
  c.beta = s.list("beta");
  c.point.x = s.list("x");
  c.point.w = s.num("w");
  c.delta = s.num("delta");
  c.mu = s.list("mu");
  c.mu_L = s.num("mu_L");
  c.mu_R = s.num("mu_R");
  c.window.radius = s.num("radius");
  c.window.ymin = s.num("ymin");
  c.window.ladder = s.list("ladder");
  c.samples = static_cast<int>(s.integer("samples"));
  return c;
}

void bpz_polynomial(const Settings& s, const RunContext&, CheckList& out) {
  const char* ref = "stencil BPZ operator on (x - w)^p converges to the symbolic value at rate h^2";
  out.run("convergence", ref, [&] {
    const double gamma = s.num("gamma"), Q = gamma / 2 + 2 / gamma, bs = -2 / gamma, beta = s.num("beta"),
                 p = s.num("p");
    BpzPoint b;
    b.w = s.num("w");
    b.x = {s.num("x")};
    const double d = b.x[0] - b.w;
    const double want = (p * (p - 1) / (bs * bs) - p + delta_weight(beta, Q)) * std::pow(d, p - 2);
    const std::vector<double> bv{beta};
    auto err = [&](double h) {
      std::vector<double> v;
      for (const auto& q : bpz_stencil(b, h)) v.push_back(std::pow(q.x[0] - q.w, p));
      return std::abs(bpz_apply(v, b, h, bs, Q, {}, bv) - want);
    };
    for (double h : s.list("h")) {
      const double r = err(h) / err(h / 2);
      out.push(check_near(fmt("ratio_h_%g", h), ref, r, 4.0, 1.0, fmt("error %.3g at h, %.3g at h/2", err(h), err(h / 2))));
    }
    out.push(check_below("error_fine", ref, err(s.num("h_fine")), s.num("tol_fine"), fmt("h = %g", s.num("h_fine"))));
  });
}

void bpz_mc(const Settings& s, const RunContext& ctx, CheckList& out) {
  const char* ref = "F solves the BPZ equation; tested as |residual| <= 3 propagated standard errors";
  out.run("residual", ref, [&] {
    const auto c = correlation_from(s);
    const auto r = bpz_residual(c, s.num("h"), ctx.seed);
    out.push(check_near("residual", ref, r.residual.mean, 0.0, s.num("z_max") * r.residual.std_error,
                        fmt("se %.3g; R(h) %.4g, R(h/2) %.4g; F %.5g; operator scale %.3g", r.residual.std_error,
                            r.coarse.mean, r.fine.mean, r.F.mean, r.scale)));
  });
}

void estimate_f(const Settings& s, const RunContext& ctx, CheckList& out) {
  const char* ref = "Monte Carlo correlation function with a degenerate boundary insertion";
  out.run("estimate", ref, [&] {
    const auto c = correlation_from(s);
    const auto f = estimate_F(c, ctx.seed, s.num("tail_tol"));
    const bool finite = std::isfinite(f.value.mean) && std::isfinite(f.value.std_error) && f.value.mean > 0;
    out.push({"finite", "the correlation functional converges absolutely under the Seiberg bounds", f.value.mean,
              f.value.mean, 0.0, finite, fmt("se %.3g, n %zu", f.value.std_error, f.value.n)});
    out.push(check_below("ladder_drift", "plumbing", f.ladder_drift, s.num("max_drift"),
                         fmt("coarse %.6g fine %.6g", f.coarse.mean, f.value.mean)));
    out.push(check_below("tail_effect", "plumbing", f.tail_effect, s.num("tail_tol"),
                         fmt("area fraction outside the window %.3g", f.tail_fraction)));
    const double sw = estimate_F_swapped(c, f.tables);
    out.push(check_near("swapped_order", "plumbing", sw, f.value.mean, 3 * f.value.std_error));
    auto m = c;
    for (auto& v : m.mu) v += s.num("mu_step");
    const double fm = estimate_F(m, ctx.seed, s.num("tail_tol")).value.mean;
    out.push(check_below("mu_monotone", "the integrand decreases pointwise in each mu", fm - f.value.mean, 0.0,
                         fmt("F %.6g, F with mu + %g %.6g", f.value.mean, s.num("mu_step"), fm)));
  });
}

}  // namespace

std::vector<Experiment> bpz_experiments() {
  return {
      {"bpz-polynomial",
       "finite-difference BPZ operator on a polynomial oracle",
       {{"gamma", "1.5"}, {"beta", "1.2"}, {"p", "2.5"}, {"w", "-0.6"}, {"x", "0.8"}, {"h", "0.2,0.1,0.05"},
        {"h_fine", "0.01"}, {"tol_fine", "1e-4"}},
       bpz_polynomial},
      {"bpz-mc", "Monte Carlo BPZ residual with common random numbers",
       with(kCorrelationDefaults, {{"h", "0.2"}, {"z_max", "3"}}), bpz_mc},
      {"estimate-f", "correlation function estimate and its diagnostics",
       with(kCorrelationDefaults, {{"ymin", "0.025"},
                                   {"ladder", "0.025,0.0125"},
                                   {"samples", "2000"},
                                   {"tail_tol", "0.01"},
                                   {"max_drift", "0.1"},
                                   {"mu_step", "0.5"}}),
       estimate_f},
  };
}

}  // namespace lqz
