#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "core/weighted.hpp"
#include "support/test_helpers.hpp"

using namespace laplab;
using namespace laplab::testing;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("weighted norm: zero field") {
  Grid g = Grid::build(2, 4, 0.25);
  GridFunction u(g);
  CHECK(weighted_norm(u, 0.0) == 0.0);
  CHECK(star_norm(u, 0.0) == 0.0);
  CHECK(sobolev_norm(u, 1, 0.0) == 0.0);
}

TEST_CASE("weighted norm: indicator of the unit ball vs its volume") {
  double exact = std::sqrt(4.0 * kPi / 3.0);
  double prev_err = 1e9;
  for (double h : {0.25, 0.125}) {
    Grid g = Grid::build(3, 4, h);
    GridFunction u(g);
    for (Index i = 0; i < g.size(); ++i) u[i] = 1.0;
    double v = weighted_norm(u, 0.0, Region::ball(1.0));
    double err = std::abs(v - exact);
    CHECK(err < 0.1 * exact);
    CHECK(err < prev_err);
    prev_err = err;
  }
}

TEST_CASE("weighted norm: monotone in the weight exponent") {
  Grid g = Grid::build(2, 4, 0.25);
  GridFunction u = random_field(g, 99, false);
  double n0 = weighted_norm(u, -0.5);
  double n1 = weighted_norm(u, 0.0);
  double n2 = weighted_norm(u, 0.75);
  CHECK(n0 <= n1);
  CHECK(n1 <= n2);
}

TEST_CASE("weighted norm: homogeneity and triangle inequality") {
  Grid g = Grid::build(2, 4, 0.25);
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    GridFunction u = random_field(g, 100 + trial, false);
    GridFunction v = random_field(g, 200 + trial, false);
    double a = std::uniform_real_distribution<double>(-3, 3)(rng);
    GridFunction au(g), uv(g);
    for (Index i = 0; i < g.size(); ++i) {
      au[i] = a * u[i];
      uv[i] = u[i] + v[i];
    }
    double t = 0.6;
    CHECK(weighted_norm(au, t) ==
          doctest::Approx(std::abs(a) * weighted_norm(u, t)).epsilon(1e-12));
    CHECK(weighted_norm(uv, t) <=
          weighted_norm(u, t) + weighted_norm(v, t) + 1e-12);
  }
}

TEST_CASE("star norm: constant field in 2-D matches polar integrals") {
  double prev_err = 1e9;
  for (double h : {0.25, 0.125}) {
    Grid g = Grid::build(2, 4, h);
    GridFunction u(g);
    for (Index i = 0; i < g.size(); ++i) u[i] = 1.0;
    // int_{B_1} |x| dx = 2 pi / 3; exterior with t = 0: area of box minus disk
    double exact = 2 * kPi / 3 + (64.0 - kPi);
    double v = star_norm(u, 0.0);
    double err = std::abs(v * v - exact);
    CHECK(err < 0.05 * exact);
    CHECK(err <= prev_err);
    prev_err = err;
  }
}

TEST_CASE("star norm is dominated by the weighted norm for t = 1") {
  Grid g = Grid::build(2, 4, 0.25);
  for (int trial = 0; trial < 5; ++trial) {
    GridFunction u = random_field(g, 300 + trial, false);
    CHECK(star_norm(u, 1.0) <= weighted_norm(u, 1.0) + 1e-12);
  }
}

TEST_CASE("Sobolev norm: linear field on the box") {
  Grid g = Grid::build(2, 4, 0.125);
  GridFunction u(g);
  for (Index i = 0; i < g.size(); ++i) u[i] = g.node(i)[0];
  // int over [-4,4]^2 of (1 + x1^2) dx = 64 + 8 * (2 * 4^3 / 3)
  double exact = std::sqrt(64.0 + 8.0 * (2.0 * 64.0 / 3.0));
  CHECK(sobolev_norm(u, 1, 0.0) == doctest::Approx(exact).epsilon(0.02));
  CHECK(sobolev_norm(u, 1, 0.0) >= weighted_norm(u, 0.0));
}

TEST_CASE("Sobolev norm of order 2 dominates order 1 on interior-supported fields") {
  Grid g = Grid::build(2, 4, 0.25);
  GridFunction u = random_field(g, 11);
  CHECK(sobolev_norm(u, 2, 0.3) >= sobolev_norm(u, 1, 0.3) * 0.999);
}

TEST_CASE("wavenumber branch") {
  auto m4 = homogeneous_medium(2, 4.0);
  Grid g = Grid::build(2, 4, 0.25);
  WaveNumberField f = wavenumber(Complex(1, 0), *m4, g);
  CHECK(f.k[0] == Complex(2, 0));
  CHECK(f.a[0] == doctest::Approx(2.0));
  CHECK(f.b[0] == doctest::Approx(0.0));

  auto m1 = homogeneous_medium(2, 1.0);
  WaveNumberField fi = wavenumber(Complex(0, 1), *m1, g);
  CHECK(fi.k[0].real() == doctest::Approx(std::sqrt(0.5)));
  CHECK(fi.k[0].imag() == doctest::Approx(std::sqrt(0.5)));

  WaveNumberField fn = wavenumber(Complex(-1, 0), *m1, g);
  CHECK(fn.k[0].real() == doctest::Approx(0.0));
  CHECK(fn.k[0].imag() == doctest::Approx(1.0));
}

TEST_CASE("wavenumber branch: random property") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> ur(-5, 5), um(0.1, 10);
  for (int trial = 0; trial < 1000; ++trial) {
    Complex z(ur(rng), ur(rng));
    double mu0 = um(rng);
    Complex k = branch_sqrt(z * mu0);
    CHECK(k.imag() >= 0.0);
    CHECK(std::abs(k * k - z * mu0) <=
          1e-12 * std::max(1.0, std::abs(z * mu0)));
  }
}

TEST_CASE("dimensional constant") {
  CHECK(c_dim(3) == 0.0);
  CHECK(c_dim(2) == doctest::Approx(-0.25));
}

TEST_CASE("radiation field: outgoing spherical wave is annihilated (N = 3)") {
  auto m = homogeneous_medium(3, 1.0);
  double prev = 1e9;
  for (double h : {0.5, 0.25}) {
    Grid g = Grid::build(3, 8, h);
    GridFunction u(g);
    for (Index i = 0; i < g.size(); ++i) {
      double r = g.radius(i);
      if (r < h) continue;
      u[i] = std::exp(Complex(0, r)) / r;
    }
    WaveNumberField kf = wavenumber(Complex(1, 0), *m, g);
    RadiationField plus = radiation_field(u, kf, +1);
    double n = weighted_norm(plus.Dru, 0.0, Region::exterior(2.0));
    CHECK(n < prev);
    CHECK(n < 0.2);
    prev = n;

    // incoming operator sees the full 2ik u amplitude
    RadiationField minus = radiation_field(u, kf, -1);
    Index probe = g.encode(g.nodes_per_axis() - 5, g.nodes_per_axis() / 2,
                           g.nodes_per_axis() / 2);
    double r = g.radius(probe);
    CHECK(std::abs(minus.Dru[probe]) ==
          doctest::Approx(2.0 / r).epsilon(0.05));
  }
}

TEST_CASE("radiation field: linearity") {
  auto m = homogeneous_medium(2, 1.5);
  Grid g = Grid::build(2, 4, 0.25);
  GridFunction u = random_field(g, 21, false), v = random_field(g, 22, false);
  WaveNumberField kf = wavenumber(Complex(2, 0.3), *m, g);
  Complex a(0.7, -0.2), b(1.3, 0.4);
  GridFunction w(g);
  for (Index i = 0; i < g.size(); ++i) w[i] = a * u[i] + b * v[i];
  RadiationField ru = radiation_field(u, kf, +1);
  RadiationField rv = radiation_field(v, kf, +1);
  RadiationField rw = radiation_field(w, kf, +1);
  for (Index i = 0; i < g.size(); i += 37) {
    if (!rw.Du.mask[static_cast<std::size_t>(i)]) continue;
    Complex expect = a * ru.Dru[i] + b * rv.Dru[i];
    CHECK(std::abs(rw.Dru[i] - expect) < 1e-12);
  }
}

TEST_CASE("radial weights satisfy the admissibility conditions") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> ud(0.5001, 1.4999), ub(0.01, 1.99),
      ucap(1.5, 30.0);
  for (int trial = 0; trial < 50; ++trial) {
    int N = trial % 2 == 0 ? 3 : 2;
    RadialWeight w = trial % 4 < 2
                         ? RadialWeight::power(N, ud(rng))
                         : RadialWeight::capped(N, ub(rng), ucap(rng));
    double prev_v = 0.0;
    for (int i = 1; i <= 4000; ++i) {
      double r = 40.0 * i / 4000;
      double v = w.value(r);
      double s = w.slope(r);
      CHECK(v >= 0.0);
      CHECK(s >= -1e-14);
      CHECK(v / r - 0.5 * s >= -1e-12);
      CHECK(v >= prev_v - 1e-12);
      prev_v = v;
    }
    // small-r behavior
    if (N >= 3) {
      CHECK(w.value(1e-4) == doctest::Approx(1e-4));
    } else {
      CHECK(w.value(1e-4) == doctest::Approx(0.5e-8));
      CHECK(w.slope(1e-4) == doctest::Approx(1e-4));
    }
  }
}

TEST_CASE("identity: zero field gives zero terms") {
  auto m = homogeneous_medium(3, 1.0);
  Grid g = Grid::build(3, 4, 0.25);
  GridFunction u(g);
  RadialWeight xi = RadialWeight::power(3, 0.75);
  IdentityReport rep =
      identity_residual(u, nullptr, Complex(1, 0), *m, xi, 1.0, 3.0);
  CHECK(rep.residual == 0.0);
  for (const auto& [name, v] : rep.terms) {
    CAPTURE(name);
    CHECK(v == 0.0);
  }
}

TEST_CASE("identity: shell preconditions") {
  auto m = homogeneous_medium(3, 1.0);
  Grid g = Grid::build(3, 4, 0.25);
  GridFunction u(g);
  RadialWeight xi = RadialWeight::power(3, 0.75);
  CHECK_THROWS_AS(identity_residual(u, nullptr, Complex(1, 0), *m, xi, 0.1, 3.0),
                  Error);
  CHECK_THROWS_AS(identity_residual(u, nullptr, Complex(1, 0), *m, xi, 1.0, 1.5),
                  Error);
}

TEST_CASE("identity: manufactured Gaussian residual shrinks under refinement") {
  auto m = homogeneous_medium(3, 1.0);
  RadialWeight xi = RadialWeight::power(3, 0.75);
  double res_coarse = 0, res_fine = 0;
  for (double h : {0.25, 0.125}) {
    Grid g = Grid::build(3, 5, h);
    GridFunction u(g);
    for (Index i = 0; i < g.size(); ++i) {
      double r2 = 0;
      Point x = g.node(i);
      for (int d = 0; d < 3; ++d) r2 += x[d] * x[d];
      u[i] = std::exp(-r2);
    }
    IdentityReport rep =
        identity_residual(u, nullptr, Complex(1, 0), *m, xi, 1.0, 4.0);
    if (h == 0.25)
      res_coarse = rep.residual;
    else
      res_fine = rep.residual;
  }
  CHECK(res_fine < res_coarse);
  CHECK(res_fine / res_coarse <= 0.8);
}

TEST_CASE("identity: interface term is nonpositive for an admissible stack") {
  auto m = planar_medium(3, {-1.25, 1.25}, {1.5, 1.0, 1.5});
  Grid g = Grid::build(3, 5, 0.25);
  CertificateReport cert = validate_partition(m->partition(), m->nus(), {5.0});
  REQUIRE(cert.pass);
  GridFunction u(g);
  for (Index i = 0; i < g.size(); ++i) {
    double r2 = 0;
    Point x = g.node(i);
    for (int d = 0; d < 3; ++d) r2 += x[d] * x[d];
    u[i] = std::exp(-r2 / 2.0);
  }
  RadialWeight xi = RadialWeight::power(3, 0.75);
  for (AlphaMode alpha : {AlphaMode::InvSqrtMu0, AlphaMode::One}) {
    IdentityOptions io;
    io.alpha = alpha;
    IdentityReport rep =
        identity_residual(u, nullptr, Complex(1, 0), *m, xi, 1.0, 4.0, io);
    CHECK(rep.interface_sign_term <= 1e-12);
    CHECK(rep.interface_sign_term < -1e-6);  // strictly active interfaces
  }
}

TEST_CASE("flux probe: zero and compactly supported fields") {
  Grid g = Grid::build(3, 4, 0.25);
  GridFunction u(g);
  FluxProbe p0 = flux_probe(u, {2.0, 3.0});
  for (auto [R, F] : p0.points) CHECK(F == 0.0);

  for (Index i = 0; i < g.size(); ++i)
    if (g.radius(i) < 1.0) u[i] = 1.0;
  FluxProbe pc = flux_probe(u, {2.0, 3.0, 3.5});
  for (auto [R, F] : pc.points) CHECK(F == doctest::Approx(0.0));
}

TEST_CASE("flux probe: outgoing wave carries 8 pi") {
  Grid g = Grid::build(3, 8, 0.125);
  GridFunction u(g);
  for (Index i = 0; i < g.size(); ++i) {
    double r = g.radius(i);
    if (r < g.h()) continue;
    u[i] = std::exp(Complex(0, r)) / r;
  }
  FluxProbe p = flux_probe(u, {4.0, 5.0, 6.0});
  for (auto [R, F] : p.points) {
    double expect = 4 * kPi * (2.0 + 1.0 / (R * R));
    CHECK(F == doctest::Approx(expect).epsilon(0.08));
  }
  CHECK(p.running_min > 8.0);  // far from vanishing
}
