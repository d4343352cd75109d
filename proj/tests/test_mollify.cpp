#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "liplab/mollify.hpp"

using namespace liplab;

namespace {

// independent quadrature oracle over the marginal table
double marginal_integral(const Marginal1D& m, const std::function<double(double)>& w,
                         int panels = 40000) {
  double acc = 0;
  for (int i = 0; i <= panels; ++i) {
    double u = -1.0 + 2.0 * i / panels;
    acc += ((i == 0 || i == panels) ? 0.5 : 1.0) * w(u) * m.value(u);
  }
  return acc * 2.0 / panels;
}

}  // namespace

TEST_CASE("kernel discretization: stencil mass, halfwidth, floor rule") {
  Grid g = make_grid({{-1, 1}}, {201});  // h = 0.01
  MollifierKernel k = make_kernel(Profile::standard_bump, 0.1, g);
  CHECK(k.halfwidth[0] == 10);
  double mass = 0;
  for (const auto& e : k.stencil) mass += e.weight;
  CHECK(std::abs(mass - 1.0) <= 1e-12);
  CHECK_THROWS_AS(make_kernel(Profile::standard_bump, 0.02, g), Error);
  CHECK_THROWS_AS(make_kernel(Profile::standard_bump, -0.1, g), Error);
}

TEST_CASE("standard bump normalizes to unit integral (quadrature oracle)") {
  for (Profile p : {Profile::standard_bump, Profile::polynomial_bump}) {
    for (int dim : {1, 2, 4}) {
      Marginal1D m = make_marginal(p, dim);
      CHECK(std::abs(marginal_integral(m, [](double) { return 1.0; }) - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("convolve preserves constants exactly and affine within 1e-10") {
  Grid g = make_grid({{-1, 1}}, {401});
  MollifierKernel k = make_kernel(Profile::standard_bump, 0.1, g);
  SampledField c = sample_scalar([](const Vec&) { return 2.75; }, g);
  SampledField cc = convolve(c, k);
  for_each_index(g, cc.valid, [&](const std::array<int, kMaxDim>& idx) {
    CHECK(cc.at(g.flat(idx), 0) == doctest::Approx(2.75).epsilon(1e-14));
  });
  SampledField lin = sample_scalar([](const Vec& x) { return 3 * x[0] - 0.4; }, g);
  SampledField lc = convolve(lin, k);
  for_each_index(g, lc.valid, [&](const std::array<int, kMaxDim>& idx) {
    CHECK(std::abs(lc.at(g.flat(idx), 0) - lin.at(g.flat(idx), 0)) <= 1e-10);
  });
}

TEST_CASE("convolve of |x| at 0 matches the absolute-moment oracle") {
  Grid g = make_grid({{-1, 1}}, {801});
  double eps = 0.1;
  MollifierKernel k = make_kernel(Profile::standard_bump, eps, g);
  SampledField a = sample_scalar([](const Vec& x) { return std::abs(x[0]); }, g);
  SampledField ac = convolve(a, k);
  double v0 = ac.at(400, 0);
  CHECK(v0 > 0.0);
  CHECK(v0 < eps);
  double oracle = eps * marginal_integral(k.marginal, [](double u) { return std::abs(u); });
  CHECK(v0 == doctest::Approx(oracle).epsilon(1e-3));
}

TEST_CASE("convolve is monotone on nonnegative fields") {
  Grid g = make_grid({{-1, 1}}, {401});
  MollifierKernel k = make_kernel(Profile::polynomial_bump, 0.08, g);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  SampledField f = sample_scalar([&](const Vec&) { return u(rng); }, g);
  SampledField fc = convolve(f, k);
  for_each_index(g, fc.valid, [&](const std::array<int, kMaxDim>& idx) {
    CHECK(fc.at(g.flat(idx), 0) >= -1e-15);
  });
}

TEST_CASE("L1 contraction under schedule halving for Lipschitz f") {
  Grid g = make_grid({{-1, 1}}, {1601});
  SampledField f = sample_scalar([](const Vec& x) { return std::abs(x[0]); }, g);
  IndexBox K = trust_region(g, 0.2, 2);
  auto l1_err = [&](double eps) {
    MollifierKernel k = make_kernel(Profile::standard_bump, eps, g);
    SampledField fc = convolve(f, k);
    for (std::int64_t i = 0; i < g.npoints(); ++i) fc.at(i, 0) -= f.at(i, 0);
    return lp_norm(fc, K, 1.0);
  };
  double e1 = l1_err(0.2), e2 = l1_err(0.1);
  CHECK(e2 / e1 <= 0.6);
}

TEST_CASE("valid-region bookkeeping: outside access is an error") {
  Grid g = make_grid({{-1, 1}}, {201});
  MollifierKernel k = make_kernel(Profile::standard_bump, 0.1, g);
  SampledField f = sample_scalar([](const Vec& x) { return x[0]; }, g);
  SampledField fc = convolve(f, k);
  std::array<int, kMaxDim> inside{100}, outside{2};
  CHECK_NOTHROW(fc.at_valid(inside, 0));
  CHECK_THROWS_AS(fc.at_valid(outside, 0), Error);
}

TEST_CASE("regularize_metric: Minkowski is exact, signature verified") {
  SpacetimeModel mink = make_minkowski(4);
  Grid g = make_grid({{-1, 1}, {-1, 1}, {-1, 1}, {-1, 1}}, {21, 9, 9, 9});
  MollifierKernel k = make_kernel(Profile::standard_bump, 0.4, g);
  MetricField geps = regularize_metric(mink.metric, k);
  Vec x{0.3, -0.2, 0.1, 0.0};
  Mat diff = geps.g_at(x) - mink.metric.g_at(x);
  CHECK(max_abs(diff) == 0.0);
}

TEST_CASE("regularize_metric on the two-slope model: exact closed forms") {
  // a^2 is piecewise quadratic, so outside the kink window mollification
  // shifts it by exactly eps^2 M2 (a^2)''/2 per side
  double m1 = 0.5, m2 = 1.0, eps = 0.05;
  SpacetimeModel ts = make_grw_two_slope(4, m1, m2);
  Grid g = make_grid({{-0.8, 0.72}, {-0.5, 0.5}, {-0.5, 0.5}, {-0.5, 0.5}}, {401, 3, 3, 3});
  MollifierKernel k = make_kernel(Profile::standard_bump, eps, g);
  MetricField geps = regularize_metric(ts.metric, k);
  double M2 = marginal_integral(k.marginal, [](double u) { return u * u; });

  const Piecewise1D& raw = ts.metric.analytic->profiles[0].second;
  const Piecewise1D& smooth = geps.analytic->profiles[0].second;
  for (double t : {-0.4, -0.1, 0.1, 0.3, 0.6}) {
    double m = t < 0 ? m1 : m2;
    double expected = raw.v(t) + eps * eps * M2 * m * m;
    CHECK(smooth.v(t) == doctest::Approx(expected).epsilon(1e-10));
  }
  // C^1 across t = 0
  CHECK(smooth.d1(1e-9) == doctest::Approx(smooth.d1(-1e-9)).epsilon(1e-7));
  // sup bound || g_eps - g || <= Lip(g) eps on the trust region
  double sup = 0;
  for (int i = 0; i <= 400; ++i) {
    double t = -0.7 + 1.3 * i / 400.0;
    sup = std::max(sup, std::abs(smooth.v(t) - raw.v(t)));
  }
  CHECK(sup <= *ts.metric.lipschitz_estimate * eps);
}

TEST_CASE("adjust_cones: Minkowski sits at the search floor") {
  SpacetimeModel mink = make_minkowski(4);
  Grid g = make_grid({{-1, 1}, {-1, 1}, {-1, 1}, {-1, 1}}, {21, 9, 9, 9});
  MollifierKernel k = make_kernel(Profile::standard_bump, 0.4, g);
  MetricField geps = regularize_metric(mink.metric, k, false);
  Box region;
  for (int a = 0; a < 4; ++a) region.lo[a] = -0.5, region.hi[a] = 0.5;
  AuditConfig cfg;
  auto r = adjust_cones(geps, mink.metric, ConeMode::inner, region, cfg);
  CHECK(r.lambda == doctest::Approx(1.5e-8));
  CHECK(r.min_margin > 0.0);
}

TEST_CASE("adjust_cones: two-slope nesting holds on ~1e4 audit vectors") {
  SpacetimeModel ts = make_grw_two_slope(4, 0.5, 1.0);
  Grid g = make_grid({{-0.8, 0.72}, {-0.6, 0.6}, {-0.6, 0.6}, {-0.6, 0.6}}, {201, 3, 3, 3});
  MollifierKernel k = make_kernel(Profile::standard_bump, 0.05, g);
  MetricField geps = regularize_metric(ts.metric, k, false);
  Box region;
  region.lo = {-0.6, -0.5, -0.5, -0.5};
  region.hi = {0.6, 0.5, 0.5, 0.5};
  AuditConfig cfg;
  cfg.points = 256;  // 256 points x 40 directions ~ 1e4 samples
  auto inner = adjust_cones(geps, ts.metric, ConeMode::inner, region, cfg);
  auto outer = adjust_cones(geps, ts.metric, ConeMode::outer, region, cfg);
  CHECK(inner.min_margin > 0.0);
  CHECK(outer.min_margin > 0.0);
  CHECK(inner.lambda < 1.0);
  // inner shift *raises* the quadratic form: check exactly on sample vectors
  Vec x{0.02, 0.1, 0.0, 0.0};
  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd(0, 1);
  for (int i = 0; i < 50; ++i) {
    Vec v(4);
    for (int a = 0; a < 4; ++a) v[a] = nd(rng);
    double lhs = qform(inner.adjusted.g_at(x), v) - qform(geps.g_at(x), v);
    double dt2 = v[0] * v[0];
    CHECK(lhs == doctest::Approx(inner.lambda * dt2).epsilon(1e-12));
    CHECK(qform(inner.adjusted.g_at(x), v) >= qform(geps.g_at(x), v) - 1e-15);
  }
}

TEST_CASE("family: lambdas decrease and inner cones widen along the schedule") {
  SpacetimeModel ts = make_grw_two_slope(4, 0.5, 1.0);
  Grid g = make_grid({{-0.8, 0.72}, {-0.6, 0.6}, {-0.6, 0.6}, {-0.6, 0.6}}, {201, 3, 3, 3});
  Box region;
  region.lo = {-0.6, -0.5, -0.5, -0.5};
  region.hi = {0.6, 0.5, 0.5, 0.5};
  AuditConfig cfg;
  cfg.points = 96;
  RegularizedFamily fam =
      build_family(ts, {0.2, 0.1, 0.05}, Profile::standard_bump, g, region, cfg);
  REQUIRE(fam.inner.size() == 3);
  CHECK(fam.lambda_inner[0] > fam.lambda_inner[1]);
  CHECK(fam.lambda_inner[1] > fam.lambda_inner[2]);
  // Lemma-2.1(iv) style monotonicity on the audit set: g_{eps} < g_{eps/2} < g
  CHECK(cones_narrower(fam.inner[0], fam.inner[1], region, cfg).holds);
  CHECK(cones_narrower(fam.inner[1], fam.inner[2], region, cfg).holds);
  CHECK(cones_narrower(fam.inner[2], ts.metric, region, cfg).holds);
  CHECK(cones_narrower(ts.metric, fam.outer[2], region, cfg).holds);
  CHECK(cones_narrower(fam.outer[2], fam.outer[1], region, cfg).holds);
}

TEST_CASE("friedrichs_weighted_convolve basics") {
  Grid g = make_grid({{-1, 1}}, {801});
  MollifierKernel k = make_kernel(Profile::standard_bump, 0.1, g);

  // a constant: the two products coincide
  SampledField ac = sample_scalar([](const Vec&) { return 1.7; }, g);
  SampledField f = sample_scalar([](const Vec& x) { return std::sin(3 * x[0]); }, g);
  auto [p1, p2] = friedrichs_weighted_convolve(ac, f, k);
  for_each_index(g, p2.valid, [&](const std::array<int, kMaxDim>& idx) {
    CHECK(std::abs(p1.at(g.flat(idx), 0) - p2.at(g.flat(idx), 0)) <= 1e-13);
  });

  // f constant: difference = f (a - a*rho), sup <= Lip(a) eps |f|
  SampledField a = sample_scalar([](const Vec& x) { return std::abs(x[0]); }, g);
  SampledField fc = sample_scalar([](const Vec&) { return -2.0; }, g);
  auto [q1, q2] = friedrichs_weighted_convolve(a, fc, k);
  double sup = 0;
  for_each_index(g, q2.valid, [&](const std::array<int, kMaxDim>& idx) {
    sup = std::max(sup, std::abs(q1.at(g.flat(idx), 0) - q2.at(g.flat(idx), 0)));
  });
  CHECK(sup <= 1.0 * 0.1 * 2.0 * (1 + 1e-9));
  CHECK(sup > 0.0);

  // a = f = x: difference is the constant -M2 eps^2 (moment-expansion oracle)
  SampledField xx = sample_scalar([](const Vec& x) { return x[0]; }, g);
  auto [r1, r2] = friedrichs_weighted_convolve(xx, xx, k);
  double M2 = marginal_integral(k.marginal, [](double u) { return u * u; });
  for_each_index(g, r2.valid, [&](const std::array<int, kMaxDim>& idx) {
    double diff = r1.at(g.flat(idx), 0) - r2.at(g.flat(idx), 0);
    CHECK(diff == doctest::Approx(-M2 * 0.01).epsilon(2e-3));
  });
}
