#include <algorithm>
#include <cmath>

#include "lqz/harness.hpp"
#include "lqz/loewner.hpp"
#include "lqz/parallel.hpp"
#include "lqz/rng.hpp"

namespace lqz {

namespace {

void slit_oracle(const Settings& s, const RunContext&, CheckList& out) {
  const double t = s.num("t"), dt = s.num("dt");
  const long nx = s.integer("nx"), ny = s.integer("ny");
  std::vector<Complex> pts;
  for (long i = 0; i < nx; ++i)
    for (long j = 0; j < ny; ++j)
      pts.emplace_back(-2.0 + 4.0 * i / std::max(1L, nx - 1), 0.1 + 0.5 * j);
  out.run("max_error", "reverse flow with zero driving equals sqrt(z^2 - 4t)", [&] {
    auto flow = reverse_flow(pts, constant_driving(0.0, t, dt), 0.0, t, false);
    double err = 0.0, derr = 0.0;
    for (std::size_t k = 0; k < pts.size(); ++k) {
      err = std::max(err, std::abs(flow[k].value() - slit_map(pts[k], t)));
      derr = std::max(derr, std::abs(flow[k].slope() - slit_map_derivative(pts[k], t)));
    }
    out.push(check_below("max_error", "reverse flow with zero driving equals sqrt(z^2 - 4t)", err, s.num("tol"),
                         std::to_string(pts.size()) + " points"));
    out.push(check_below("max_derivative_error", "g_t' co-evolved with the flow matches z / sqrt(z^2 - 4t)", derr,
                         s.num("tol")));
  });
}

void capacity(const Settings& s, const RunContext& ctx, CheckList& out) {
  const double T = s.num("T"), dt = s.num("dt"), kappa = s.num("kappa");
  const long n = s.integer("paths");
  const long steps = std::lround(T / dt);
  const char* ref = "half-plane capacity of the hull equals 2T";
  out.run("max_hcap_error", ref, [&] {
    std::vector<double> err(n);
    parallel_for(n, ctx.workers, [&](std::size_t i) {
      Stream rng(ctx.seed, derive_stream(i, 0xCA9));
      LoewnerEvolution ev{{0.0}, dt};
      for (long k = 0; k < steps; ++k)
        ev.driving.push_back(ev.driving.back() + std::sqrt(kappa * dt) * rng.normal());
      err[i] = std::abs(hcap_estimate(ev) - 2 * T);
    });
    out.push(check_below("max_hcap_error", ref, *std::max_element(err.begin(), err.end()), s.num("tol"),
                         std::to_string(n) + " Brownian paths"));
  });
}

}  // namespace

std::vector<Experiment> loewner_experiments() {
  return {
      {"slit-oracle",
       "reverse flow against the closed-form slit map",
       {{"t", "0.25"}, {"dt", "1e-5"}, {"nx", "10"}, {"ny", "5"}, {"tol", "1e-8"}},
       slit_oracle},
      {"capacity",
       "hcap of reverse flows driven by Brownian motion",
       {{"T", "0.5"}, {"dt", "1e-3"}, {"kappa", "4"}, {"paths", "100"}, {"tol", "1e-4"}},
       capacity},
  };
}

}  // namespace lqz
