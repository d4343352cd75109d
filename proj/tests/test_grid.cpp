#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <random>

#include "liplab/grid.hpp"

using namespace liplab;

TEST_CASE("make_grid spacing and point count") {
  Grid g = make_grid({{-1, 1}, {-1, 1}}, {3, 3});
  CHECK(g.spacing(0) == doctest::Approx(1.0));
  CHECK(g.spacing(1) == doctest::Approx(1.0));
  CHECK(g.npoints() == 9);
  Grid g1 = make_grid({{0, 1}}, {101});
  CHECK(g1.spacing(0) == doctest::Approx(0.01));
}

TEST_CASE("make_grid rejects bad input") {
  CHECK_THROWS_AS(make_grid({{0, 1}}, {1}), Error);
  CHECK_THROWS_AS(make_grid({{1, 1}}, {5}), Error);
  CHECK_THROWS_AS(make_grid({{1, 0}}, {5}), Error);
}

TEST_CASE("index/coordinate round trip is exact on lattice points") {
  Grid g = make_grid({{-0.7, 1.3}, {0.1, 2.9}, {-2, 2}}, {7, 5, 9});
  for_each_index(g, IndexBox::full(g), [&](const std::array<int, kMaxDim>& idx) {
    Vec x = g.point(idx);
    CHECK(g.nearest(x) == idx);
    CHECK(g.unflat(g.flat(idx)) == idx);
  });
}

TEST_CASE("sample hits lattice values exactly") {
  Grid g = make_grid({{0, 1}}, {3});
  SampledField f = sample_scalar([](const Vec& x) { return x[0]; }, g);
  CHECK(f.at(0, 0) == 0.0);
  CHECK(f.at(1, 0) == 0.5);
  CHECK(f.at(2, 0) == 1.0);

  Grid g2 = make_grid({{-1, 1}}, {5});
  SampledField a = sample_scalar([](const Vec& x) { return std::abs(x[0]); }, g2);
  CHECK(a.at(0, 0) == 1.0);
  CHECK(a.at(1, 0) == 0.5);
  CHECK(a.at(2, 0) == 0.0);
  CHECK(a.at(4, 0) == 1.0);

  SampledField c = sample_scalar([](const Vec&) { return 1.0; }, g2);
  for (int i = 0; i < 5; ++i) CHECK(c.at(i, 0) == 1.0);
}

TEST_CASE("sample propagates non-finite values as data errors") {
  Grid g = make_grid({{0, 1}}, {5});
  CHECK_THROWS_WITH_AS(
      sample_scalar([](const Vec& x) { return x[0] > 0.6 ? NAN : 0.0; }, g),
      doctest::Contains("non-finite"), Error);
}

TEST_CASE("fd_partial of constants and quadratics") {
  Grid g = make_grid({{0, 1}}, {51});
  SampledField c = sample_scalar([](const Vec&) { return 3.5; }, g);
  SampledField dc = fd_partial(c, 0);
  for (int i = 0; i < 51; ++i) CHECK(std::abs(dc.at(i, 0)) <= 1e-13);

  SampledField q = sample_scalar([](const Vec& x) { return x[0] * x[0]; }, g);
  SampledField dq = fd_partial(q, 0, FdScheme::central2);
  // exact on quadratics, including the one-sided boundary stencils
  for (int i = 0; i < 51; ++i)
    CHECK(dq.at(i, 0) == doctest::Approx(2.0 * g.coord(0, i)).epsilon(1e-12));
}

TEST_CASE("fd_partial truncation error follows the h^2/6 oracle on sin") {
  Grid g = make_grid({{-1, 1}}, {201});
  SampledField s = sample_scalar([](const Vec& x) { return std::sin(x[0]); }, g);
  SampledField ds = fd_partial(s, 0, FdScheme::central2);
  double h = g.spacing(0);
  double err = std::abs(ds.at(100, 0) - 1.0);
  CHECK(err <= 2.5e-5);
  double oracle = h * h / 6.0;  // |f'''(0)| = 1
  CHECK(err == doctest::Approx(oracle).epsilon(0.05));
}

TEST_CASE("fd_partial exact on polynomials up to scheme order") {
  Grid g = make_grid({{-1, 1}}, {41});
  auto check_scheme = [&](FdScheme sc, int deg) {
    SampledField p = sample_scalar(
        [deg](const Vec& x) { return std::pow(0.7 * x[0] + 0.2, deg); }, g);
    SampledField dp = fd_partial(p, 0, sc);
    for (int i = 3; i < 38; ++i) {
      double x = g.coord(0, i);
      double exact = deg * 0.7 * std::pow(0.7 * x + 0.2, deg - 1);
      CHECK(dp.at(i, 0) == doctest::Approx(exact).epsilon(1e-10));
    }
  };
  check_scheme(FdScheme::central2, 2);
  check_scheme(FdScheme::one_sided2, 2);
  check_scheme(FdScheme::central4, 4);
}

TEST_CASE("fd_partial rejects bad axes and small grids") {
  Grid g = make_grid({{0, 1}}, {3});
  SampledField f = sample_scalar([](const Vec& x) { return x[0]; }, g);
  CHECK_THROWS_AS(fd_partial(f, 1), Error);
  CHECK_THROWS_AS(fd_partial(f, 0, FdScheme::central4), Error);
}

TEST_CASE("integrate: trapezoid values and errors") {
  Grid g = make_grid({{0, 1}}, {101});
  SampledField one = sample_scalar([](const Vec&) { return 1.0; }, g);
  CHECK(integrate(one) == doctest::Approx(1.0).epsilon(1e-14));
  SampledField lin = sample_scalar([](const Vec& x) { return x[0]; }, g);
  CHECK(integrate(lin) == doctest::Approx(0.5).epsilon(1e-12));

  Grid gs = make_grid({{0, M_PI}}, {101});
  SampledField s = sample_scalar([](const Vec& x) { return std::sin(x[0]); }, gs);
  CHECK(std::abs(integrate(s) - 2.0) <= 2e-4);
}

TEST_CASE("integrate: additivity over disjoint regions and homogeneity") {
  Grid g = make_grid({{0, 2}, {0, 1}}, {21, 11});
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-1, 1);
  SampledField f = sample_scalar([&](const Vec& x) { return u(rng) + x[0] * x[1]; }, g);
  IndexBox left = IndexBox::full(g), right = IndexBox::full(g), all = IndexBox::full(g);
  left.hi[0] = 10;
  right.lo[0] = 10;
  CHECK(integrate(f, left) + integrate(f, right) ==
        doctest::Approx(integrate(f, all)).epsilon(1e-13));

  SampledField f3 = f;
  for (auto& v : f3.values) v *= 3.0;
  CHECK(integrate(f3, all) == doctest::Approx(3.0 * integrate(f, all)).epsilon(1e-13));

  IndexBox empty = all;
  empty.lo[0] = 5;
  empty.hi[0] = 4;
  CHECK_THROWS_AS(integrate(f, empty), Error);
}

TEST_CASE("field serialization round trip") {
  Grid g = make_grid({{-1, 2}, {0, 1}}, {7, 5});
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-5, 5);
  SampledField f = sample(
      [&](const Vec&, double* out) {
        for (int c = 0; c < 4; ++c) out[c] = u(rng);
      },
      g, 0, 2, true);
  save_field(f, "/tmp/liplab_field.bin");
  SampledField f2 = load_field("/tmp/liplab_field.bin");
  REQUIRE(f2.values.size() == f.values.size());
  CHECK(f2.grid.dim == 2);
  CHECK(f2.rank_down == 2);
  CHECK(f2.symmetric);
  for (size_t i = 0; i < f.values.size(); ++i) CHECK(f.values[i] == f2.values[i]);
}

TEST_CASE("csv slice export") {
  Grid g = make_grid({{0, 1}, {0, 1}}, {3, 3});
  SampledField f = sample_scalar([](const Vec& x) { return x[0] + 10 * x[1]; }, g);
  export_csv_slice(f, "/tmp/liplab_slice.csv", {0}, {0, 1, 0, 0});
  std::FILE* fp = std::fopen("/tmp/liplab_slice.csv", "r");
  REQUIRE(fp != nullptr);
  char buf[128];
  REQUIRE(std::fgets(buf, sizeof buf, fp));
  CHECK(std::string(buf) == "x0,value\n");
  REQUIRE(std::fgets(buf, sizeof buf, fp));
  CHECK(std::string(buf) == "0,5\n");
  std::fclose(fp);
}

TEST_CASE("trust region leaves the requested margin") {
  Grid g = make_grid({{-1, 1}}, {201});
  IndexBox k = trust_region(g, 0.2, 2);
  CHECK(g.coord(0, k.lo[0]) >= -1.0 + 0.2);
  CHECK(g.coord(0, k.hi[0]) <= 1.0 - 0.2);
  CHECK_THROWS_AS(trust_region(g, 3.0, 2), Error);
}
