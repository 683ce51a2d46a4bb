#include <cmath>
#include <memory>

#include "format.hpp"
#include "lqz/conformal.hpp"
#include "lqz/gff.hpp"
#include "lqz/gmc.hpp"
#include "lqz/harness.hpp"
#include "lqz/parallel.hpp"
#include "lqz/stats.hpp"
#include "lqz/zipper.hpp"

namespace lqz {

namespace {

std::vector<double> column(const Eigen::MatrixXd& m, Eigen::Index j) {
  return {m.col(j).data(), m.col(j).data() + m.rows()};
}

void gff_covariance(const Settings& s, const RunContext& ctx, CheckList& out) {
  const char* ref = "free-boundary GFF covariance is the double integral of G_H";
  out.run("pairs", ref, [&] {
    const Bump a{Complex(0.2, 0.9), 0.3}, b{Complex(0.6, 1.1), 0.25}, c{Complex(-0.7, 0.5), 0.2};
    auto d = std::make_shared<Discretization>();
    d->add_pairing(TestFunction(a));
    d->add_pairing(TestFunction(b) - TestFunction(c));
    d->add_pairing(TestFunction(a) + 0.5 * TestFunction(c));
    SpectralOptions opt;
    opt.modes = static_cast<int>(s.integer("modes"));
    SpectralSampler sampler(d, opt);
    const Eigen::MatrixXd K = covariance_matrix(*d);
    const long n = s.integer("samples");
    Eigen::MatrixXd x(n, 3);
    parallel_for(n, ctx.workers, [&](std::size_t i) {
      Stream rng(ctx.seed, derive_stream(i, 0x6FF));
      const auto f = sampler.sample(rng);
      for (int j = 0; j < 3; ++j) x(static_cast<Eigen::Index>(i), j) = f.value(j);
    });
    const double z = s.num("z_max"), bias = s.num("bias");
    const std::pair<int, int> pairs[] = {{0, 0}, {1, 1}, {2, 2}, {0, 1}, {1, 2}};
    for (auto [i, j] : pairs) {
      const auto e = mc_covariance(column(x, i), column(x, j), ctx.seed);
      out.push(check_near(fmt("cov_%d_%d", i, j), ref, e.mean, K(i, j), z * e.std_error + bias * std::abs(K(i, j)),
                          fmt("se %.3g", e.std_error)));
    }
  });
}

void gmc_moment(const Settings& s, const RunContext& ctx, CheckList& out) {
  const char* ref = "E[A] is the integral of (2 Im z)^{-gamma^2/2} |z|_+^{2 gamma^2}";
  out.run("first_moment", ref, [&] {
    const double gamma = s.num("gamma");
    const auto r = s.list("region");
    if (r.size() != 4) throw SchemaError({"region: expected xmin,xmax,ymin,ymax"});
    const AreaGrid g{{r[0], r[1], r[2], r[3]}, static_cast<int>(s.integer("nx")), static_cast<int>(s.integer("ny"))};
    const auto ladder = geometric_ladder(s.num("eps0"), static_cast<int>(s.integer("rungs")));
    auto d = std::make_shared<Discretization>();
    register_area_functionals(*d, g, ladder);
    const CholeskySampler sampler(d);
    const long n = s.integer("samples");
    const Chunking ch{static_cast<std::size_t>(n), 250};
    std::vector<std::vector<double>> mass(ladder.size(), std::vector<double>(n));
    parallel_for(ch.count(), ctx.workers, [&](std::size_t c) {
      std::vector<Stream> streams;
      for (std::size_t i = ch.begin(c); i < ch.end(c); ++i) streams.emplace_back(ctx.seed, derive_stream(i, 0x63C));
      const Eigen::MatrixXd X = sampler.sample_values(streams);
      FieldSample f;
      f.discretization = d;
      for (std::size_t i = ch.begin(c); i < ch.end(c); ++i) {
        f.gaussian = X.col(static_cast<Eigen::Index>(i - ch.begin(c)));
        const auto m = quantum_area(f, g, gamma, ladder);
        for (std::size_t k = 0; k < ladder.size(); ++k) mass[k][i] = m.masses[k];
      }
    });
    const double want = area_first_moment(g.region, gamma);
    std::string ladder_note;
    for (std::size_t k = 0; k < ladder.size(); ++k)
      ladder_note += fmt("%seps %g: %.5g", k ? ", " : "", ladder[k], mc_stats(mass[k]).mean / want);
    const auto e = mc_stats(mass.back(), ctx.seed);
    out.push(check_near("relative_error", ref, e.mean / want - 1, 0.0, s.num("rel_tol"),
                        fmt("se %.3g; ", e.std_error / want) + ladder_note));
  });
}

void green_identities(const Settings& s, const RunContext&, CheckList& out) {
  const double tol = s.num("tol"), t = s.num("t");
  const auto g = ConformalMap::slit(t);
  const Complex u(0.4, 0.3), z0(-0.5, 1.2);
  {
    const char* ref = "harmonic mean value: the circle average of -log|u - .| - log|u - conj .| is its value at the centre";
    out.run("bulk_mean_value", ref, [&] {
      const double v = pushforward_average(u, ConformalMap::identity(), BulkContour{z0, 0.4});
      out.push(check_near("bulk_mean_value", ref, v, green_neutral(u, z0), tol));
    });
  }
  {
    const char* ref = "average of the neutral kernel over the circle of radius 1/eps is 2 log eps";
    out.run("infinity_average", ref, [&] {
      double worst = 0.0;
      for (double eps : {0.5, 0.1, 0.01})
        worst = std::max(worst, std::abs(pushforward_average(u, g, InfinityContour{eps}) - 2 * std::log(eps)));
      out.push(check_below("infinity_average", ref, worst, tol, "slit map, eps 0.5, 0.1, 0.01"));
    });
  }
  {
    const char* ref = "log g' averages to 0 over a large half circle";
    out.run("log_derivative_average", ref, [&] {
      double worst = 0.0;
      for (double tt : {0.05, t})
        worst = std::max(worst, std::abs(log_derivative_average(ConformalMap::slit(tt), InfinityContour{0.2})));
      out.push(check_below("log_derivative_average", ref, worst, tol));
    });
  }
  {
    const char* ref = "pushforward under the slit map: the average of G(u, g(.)) over a circle is G(u, g(centre))";
    out.run("slit_pushforward", ref, [&] {
      const Complex uu(0.8, 0.2), c0(-0.6, 0.9);
      const double a = std::abs(pushforward_average(uu, g, BulkContour{c0, 0.3}) - green_neutral(uu, g(c0)));
      const double b = std::abs(pushforward_average(uu, g, BoundaryContour{2.0, 0.5}) -
                                green_neutral(uu, g(Complex(2.0, 0.0))));
      out.push(check_below("slit_pushforward", ref, std::max(a, b), tol, "bulk and boundary contours"));
    });
  }
}

void zipper_coupling(const Settings& s, const RunContext& ctx, CheckList& out) {
  const char* ref = "h_0 + h and h_tau + h o g_tau agree in law";
  out.run("moments", ref, [&] {
    ZipperCouplingSetup z;
    z.params = Params::from_kappa(s.num("kappa"));
    z.force = {{s.num("rho"), Complex(s.num("force_x"), 0.0)}};
    z.tau = s.num("tau");
    z.dt = s.num("dt");
    z.spectral.modes = static_cast<int>(s.integer("modes"));
    const Bump b1{Complex(-0.5, 0.8), 0.25}, b2{Complex(0.5, 0.8), 0.25}, b3{Complex(0.0, 1.2), 0.3},
        b4{Complex(0.3, 0.5), 0.2};
    z.tests = {TestFunction(b1) - TestFunction(b2), TestFunction(b2) - TestFunction(b3),
               TestFunction(b3) - TestFunction(b4)};
    const auto n = static_cast<std::size_t>(s.integer("samples"));
    const Eigen::MatrixXd L = zipper_lhs_samples(z, n, derive_stream(ctx.seed, 0x21F), ctx.workers);
    const auto R = zipper_rhs_samples(z, n, derive_stream(ctx.seed, 0x220), ctx.workers);
    const double zmax = s.num("z_max");
    for (Eigen::Index a = 0; a < 3; ++a) {
      const auto l = column(L, a), r = column(R.samples, a);
      const auto ml = mc_stats(l), mr = mc_stats(r), vl = mc_variance(l), vr = mc_variance(r);
      out.push(check_near(fmt("test_%d_mean", int(a)), ref, ml.mean - mr.mean, 0.0,
                          zmax * std::hypot(ml.std_error, mr.std_error), fmt("lhs %.5g rhs %.5g", ml.mean, mr.mean)));
      out.push(check_near(fmt("test_%d_variance", int(a)), ref, vl.mean - vr.mean, 0.0,
                          zmax * std::hypot(vl.std_error, vr.std_error),
                          fmt("lhs %.5g rhs %.5g; collided paths %zu", vl.mean, vr.mean, R.collided_paths)));
    }
  });
}

}  // namespace

std::vector<Experiment> field_experiments() {
  return {
      {"gff-covariance",
       "spectral GFF pairings against the covariance oracle",
       {{"samples", "100000"}, {"modes", "512"}, {"z_max", "3"}, {"bias", "0.02"}},
       gff_covariance},
      {"gmc-moment",
       "first moment of the regularized area measure",
       {{"gamma", "1"},
        {"region", "-1,1,0.25,1"},
        {"nx", "40"},
        {"ny", "15"},
        {"eps0", "0.2"},
        {"rungs", "4"},
        {"samples", "10000"},
        {"rel_tol", "0.05"}},
       gmc_moment},
      {"green-identities", "quadrature identities for G_H and conformal maps", {{"t", "0.3"}, {"tol", "1e-8"}},
       green_identities},
      {"zipper-coupling",
       "moments of GFF pairings on both sides of the quantum zipper",
       {{"kappa", "2"},
        {"rho", "1"},
        {"force_x", "-1"},
        {"tau", "0.05"},
        {"dt", "2.5e-4"},
        {"modes", "256"},
        {"samples", "10000"},
        {"z_max", "3"}},
       zipper_coupling},
  };
}

}  // namespace lqz
