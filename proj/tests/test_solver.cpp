#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "core/solver.hpp"
#include "core/weighted.hpp"
#include "support/dense_oracle.hpp"
#include "support/test_helpers.hpp"

using namespace laplab;
using namespace laplab::testing;

TEST_CASE("solve: zero right-hand side is trivial") {
  Grid g = Grid::build_unchecked(2, 1, 0.25);
  auto m = homogeneous_medium(2, 1.0);
  DiscreteOperator op = assemble(g, *m, Complex(1, 0.1));
  GridFunction f(g);
  auto [u, stats] = solve(op, f);
  CHECK(stats.converged);
  CHECK(stats.iterations == 0);
  for (Index i = 0; i < g.size(); ++i) CHECK(u[i] == Complex(0));
}

TEST_CASE("solve: Krylov matches the dense path on a tiny grid") {
  Grid g = Grid::build_unchecked(2, 1, 0.125);  // 17x17
  auto m = planar_medium(2, {-0.4, 0.3}, {1.6, 1.0, 2.1});
  DiscreteOperator op = assemble(g, *m, Complex(1.2, 0.4));
  GridFunction f = random_field(g, 77);

  SolveOptions dense;
  dense.method = SolveMethod::DenseDirect;
  auto [ud, sd] = solve(op, f, dense);
  REQUIRE(sd.converged);

  SolveOptions krylov;
  krylov.tol = 1e-10;
  auto [uk, sk] = solve(op, f, krylov);
  REQUIRE(sk.converged);

  double diff = 0, scale = 0;
  for (Index i = 0; i < g.size(); ++i) {
    diff += std::norm(uk[i] - ud[i]);
    scale += std::norm(ud[i]);
  }
  CHECK(std::sqrt(diff / scale) < 1e-6);
}

TEST_CASE("solve: residual contract and tolerance refinement") {
  Grid g = Grid::build_unchecked(2, 1, 0.125);
  auto m = homogeneous_medium(2, 1.3);
  DiscreteOperator op = assemble(g, *m, Complex(0.9, 0.6));
  GridFunction f = random_field(g, 31);

  SolveOptions o1;
  o1.tol = 1e-6;
  auto [u1, s1] = solve(op, f, o1);
  REQUIRE(s1.converged);
  CHECK(s1.residual <= 1e-6);

  SolveOptions o2;
  o2.tol = 1e-7;
  auto [u2, s2] = solve(op, f, o2);
  REQUIRE(s2.converged);
  double diff = 0, scale = 0;
  for (Index i = 0; i < g.size(); ++i) {
    diff += std::norm(u1[i] - u2[i]);
    scale += std::norm(u2[i]);
  }
  CHECK(std::sqrt(diff) <= 10 * o1.tol * std::sqrt(scale) * 10);
}

TEST_CASE("solve: 1-D outgoing Green's function at second order") {
  auto m = line_medium({1000.0}, {1.0, 1.0});
  double prev_err = -1;
  for (double h : {1.0 / 16, 1.0 / 32}) {
    Grid g = Grid::build_unchecked(1, 8, h);
    AssembleOptions ao;
    ao.bc = BcKind::Robin1D;
    DiscreteOperator op = assemble(g, *m, Complex(1, 0), ao);
    GridFunction f(g);
    f[g.encode(g.nodes_per_axis() / 2, 0, 0)] = 1.0 / h;  // delta at x = 0

    SolveOptions so;
    so.method = SolveMethod::Tridiagonal;
    auto [u, stats] = solve(op, f, so);
    REQUIRE(stats.converged);

    double err = 0, scale = 0;
    for (Index i = 0; i < g.size(); ++i) {
      double x = g.node(i)[0];
      Complex exact = Complex(0, 0.5) * std::exp(Complex(0, std::abs(x)));
      err += std::norm(u[i] - exact);
      scale += std::norm(exact);
    }
    err = std::sqrt(err / scale);
    if (prev_err > 0) {
      double order = std::log2(prev_err / err);
      CHECK(order >= 1.8);
      CHECK(order <= 2.2);
    }
    CHECK(err < 0.01);
    prev_err = err;
  }
}

TEST_CASE("solve: conjugation symmetry for real data, sponge off") {
  Grid g = Grid::build_unchecked(2, 1.5, 0.125);
  auto m = planar_medium(2, {-0.5, 0.5}, {1.4, 1.0, 1.7});
  GridFunction f(g);
  for (Index i = 0; i < g.size(); ++i)
    if (!g.is_wall(i)) f[i] = std::exp(-2.0 * g.radius(i));

  Complex z(1.1, 0.35);
  SolveOptions so;
  so.tol = 1e-10;
  DiscreteOperator op_p = assemble(g, *m, z);
  DiscreteOperator op_m = assemble(g, *m, std::conj(z));
  auto [up, sp] = solve(op_p, f, so);
  auto [um, sm] = solve(op_m, f, so);
  REQUIRE(sp.converged);
  REQUIRE(sm.converged);
  double diff = 0, scale = 0;
  for (Index i = 0; i < g.size(); ++i) {
    diff += std::norm(um[i] - std::conj(up[i]));
    scale += std::norm(up[i]);
  }
  CHECK(std::sqrt(diff / scale) < 1e-7);
}

TEST_CASE("eig_probe: lambda below the spectrum decays linearly") {
  Grid g = Grid::build_unchecked(2, 1.5, 0.25);
  auto m = homogeneous_medium(2, 1.0);
  auto fields = random_probe_fields(g, *m, 2, 4242);
  std::vector<double> etas{0.16, 0.08, 0.04, 0.02, 0.01};
  ProbeCurve c = eig_probe(g, *m, -1.0, fields, etas);
  CHECK_FALSE(c.eigenvalue_likely);
  // m(eta)/eta stays pinned at |R(-1) f|, so the curve is linear through 0
  double ratio0 = c.rows[0].m / c.rows[0].eta;
  for (const auto& row : c.rows)
    CHECK(row.m / row.eta == doctest::Approx(ratio0).epsilon(0.02));
}

TEST_CASE("eig_probe: planted cavity eigenvalue produces a plateau") {
  Grid g = Grid::build_unchecked(2, 1.5, 0.25);
  auto m = planar_medium(2, {-0.6, 0.8}, {1.3, 1.0, 1.6});
  DenseSpectrum spec = dense_spectrum(g, *m, 1);
  double lambda1 = spec.eigenvalues[0];
  double gap = spec.eigenvalues[1] - spec.eigenvalues[0];
  REQUIRE(gap > 0.1);

  auto fields = random_probe_fields(g, *m, 3, 777);
  std::vector<double> etas{0.08, 0.04, 0.02, 0.01, 0.005};
  ProbeCurve c = eig_probe(g, *m, lambda1, fields, etas);
  CHECK(c.eigenvalue_likely);

  // the plateau approaches |<f, phi>_X| for the best-coupled sample
  double best = 0;
  for (const auto& f : fields)
    best = std::max(best,
                    std::abs(inner_x(f, spec.eigenfunctions[0], *m)));
  CHECK(c.plateau == doctest::Approx(best).epsilon(0.1));
}

TEST_CASE("eig_probe: midpoint of a gap obeys the spectral bound") {
  Grid g = Grid::build_unchecked(2, 1.5, 0.25);
  auto m = homogeneous_medium(2, 1.0);
  DenseSpectrum spec = dense_spectrum(g, *m);
  double a = spec.eigenvalues[0], b = spec.eigenvalues[1];
  double lambda = 0.5 * (a + b), gap = b - a;
  REQUIRE(gap > 0.1);

  auto fields = random_probe_fields(g, *m, 2, 999);
  std::vector<double> etas{0.04, 0.02, 0.01};
  ProbeCurve c = eig_probe(g, *m, lambda, fields, etas);
  CHECK_FALSE(c.eigenvalue_likely);
  for (const auto& row : c.rows)
    CHECK(row.m <= row.eta * (2.0 / gap) * 1.0 + 1e-9);  // |f|_X = 1
}

TEST_CASE("eig_probe: eta ladder validation") {
  Grid g = Grid::build_unchecked(2, 1.5, 0.25);
  auto m = homogeneous_medium(2, 1.0);
  auto fields = random_probe_fields(g, *m, 1, 1);
  CHECK_THROWS_AS(eig_probe(g, *m, 1.0, fields, {0.1, 0.2}), Error);
  CHECK_THROWS_AS(eig_probe(g, *m, 1.0, fields, {}), Error);
}

TEST_CASE("sponge damping: reflected energy stays within the baseline") {
  // homogeneous 2-D solve with the sponge on; measure |Dr u| on the shell
  // just inside the layer for two strengths (recorded regression numbers)
  auto m = homogeneous_medium(2, 1.0);
  double measured[2] = {0, 0};
  int idx = 0;
  for (double strength : {2.0, 4.0}) {
    SpongeParams sp{2.0, strength, 2.0};
    Grid g = Grid::build(2, 8, 0.25, sp);
    DiscreteOperator op = assemble(g, *m, Complex(1.0, 0.0));
    GridFunction f(g);
    for (Index i = 0; i < g.size(); ++i) {
      double r = g.radius(i);
      if (r < 1.0 && !g.is_wall(i)) f[i] = 1.0;
    }
    SolveOptions so;
    so.tol = 1e-8;
    so.max_iter = 40000;
    auto [u, stats] = solve(op, f, so);
    REQUIRE(stats.converged);
    WaveNumberField kf = wavenumber(Complex(1.0, 0.0), *m, g);
    RadiationField rad = radiation_field(u, kf, +1);
    double acc = 0;
    for (Index i = 0; i < g.size(); ++i) {
      double r = g.radius(i);
      if (r >= 4.5 && r < 5.5) acc += std::norm(rad.Dru[i]);
    }
    measured[idx++] = acc * g.h() * g.h();
  }
  CHECK(measured[0] > 0);
  CHECK(measured[1] > 0);
  // doubling the strength must not blow the reflection up (regression band)
  CHECK(measured[1] <= 1.5 * measured[0]);
}
