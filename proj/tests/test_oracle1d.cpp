#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "core/oracle1d.hpp"
#include "core/solver.hpp"
#include "core/weighted.hpp"
#include "support/test_helpers.hpp"

using namespace laplab;
using namespace laplab::testing;

namespace {

SlabStack three_slabs() {
  SlabStack st;
  st.breakpoints = {-1.0, -0.25, 0.5, 1.25};
  st.slab_nus = {1.6, 2.4, 1.8};
  st.nu_left = 1.0;
  st.nu_right = 1.2;
  return st;
}

Source1D point_at(double y) {
  Source1D s;
  s.kind = Source1D::Kind::PointMass;
  s.y = y;
  return s;
}

}  // namespace

TEST_CASE("transfer matrix: zero width is the identity") {
  Eigen::Matrix2cd M = transfer_matrix(Complex(1.3, 0.2), 0.0);
  CHECK(std::abs(M(0, 0) - Complex(1)) < 1e-15);
  CHECK(std::abs(M(0, 1)) < 1e-15);
  CHECK(std::abs(M(1, 0)) < 1e-15);
  CHECK(std::abs(M(1, 1) - Complex(1)) < 1e-15);
}

TEST_CASE("transfer matrix: half period flips the sign") {
  Eigen::Matrix2cd M = transfer_matrix(Complex(1, 0), M_PI);
  CHECK(std::abs(M(0, 0) + 1.0) < 1e-12);
  CHECK(std::abs(M(1, 1) + 1.0) < 1e-12);
  CHECK(std::abs(M(0, 1)) < 1e-12);
  CHECK(std::abs(M(1, 0)) < 1e-12);
}

TEST_CASE("transfer matrix: unit determinant, including complex wavenumbers") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> ur(-2, 2), ud(0.01, 3.0);
  for (int trial = 0; trial < 100; ++trial) {
    Complex k(ur(rng), std::abs(ur(rng)));
    if (std::abs(k) < 1e-3) k += 0.5;
    double d = ud(rng);
    Eigen::Matrix2cd M = transfer_matrix(k, d);
    Complex det = M(0, 0) * M(1, 1) - M(0, 1) * M(1, 0);
    CHECK(std::abs(det - Complex(1)) < 1e-12 * std::max(1.0, M.norm()));
  }
  // propagator of an actual slab
  Eigen::Matrix2cd Ms = transfer_matrix(three_slabs(), 1, Complex(1, 0.1));
  Complex det = Ms(0, 0) * Ms(1, 1) - Ms(0, 1) * Ms(1, 0);
  CHECK(std::abs(det - Complex(1)) < 1e-12);
}

TEST_CASE("exact solve: homogeneous point source reproduces (i/2k) e^{ik|x|}") {
  SlabStack st;  // no interior breakpoints: two identical end media
  st.breakpoints = {};
  st.slab_nus = {};
  st.nu_left = st.nu_right = 1.0;
  ExactSolution sol = exact_solve(st, Complex(1, 0), point_at(0.0), +1);
  for (double x : {-3.0, -0.7, 0.4, 2.5}) {
    Complex expect = Complex(0, 0.5) * std::exp(Complex(0, std::abs(x)));
    CHECK(std::abs(sol.eval(x) - expect) < 1e-12);
  }
  CHECK(sol.matching_residual(0.0) < 1e-10 * 0.5);
}

TEST_CASE("exact solve: single-interface reflection coefficient") {
  double k1 = 1.0, k2 = 1.7;
  SlabStack st;
  st.breakpoints = {0.0};
  st.slab_nus = {};
  st.nu_left = k1 * k1;
  st.nu_right = k2 * k2;
  ExactSolution sol = exact_solve(st, Complex(1, 0), point_at(-2.0), +1);

  // between the source and the interface: A e^{ik1 x} + B e^{-ik1 x};
  // the reflected-over-incident amplitude ratio at x = 0 is (k1-k2)/(k1+k2)
  int j = sol.region_of(-1.0);
  std::size_t jj = static_cast<std::size_t>(j);
  Complex ik = Complex(0, 1) * sol.k[jj];
  Complex inc = sol.A[jj] * std::exp(ik * (0.0 - sol.xref[jj]));
  Complex refl = sol.B[jj] * std::exp(-ik * (0.0 - sol.xref[jj]));
  CHECK(std::abs(refl / inc - (k1 - k2) / (k1 + k2)) < 1e-12);
}

TEST_CASE("exact solve: absorption decays at both ends") {
  ExactSolution sol =
      exact_solve(three_slabs(), Complex(1.0, 0.2), point_at(0.1), +1);
  double mid = std::abs(sol.eval(0.1));
  // Im k ~ 0.1, so |u| shrinks like e^{-0.1 |x|}
  CHECK(std::abs(sol.eval(80.0)) < 1e-2 * mid);
  CHECK(std::abs(sol.eval(-80.0)) < 1e-2 * mid);
  CHECK(std::abs(sol.eval(80.0)) < 0.1 * std::abs(sol.eval(40.0)));
  CHECK(std::abs(sol.eval(-80.0)) < 0.1 * std::abs(sol.eval(-40.0)));
  CHECK(sol.matching_residual(0.1) < 1e-10 * mid);
}

TEST_CASE("exact solve: interface continuity on random stacks") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> unu(0.3, 3.0), uy(-0.6, 0.6);
  for (int trial = 0; trial < 20; ++trial) {
    SlabStack st;
    st.breakpoints = {-0.9, 0.1, 0.8};
    st.slab_nus = {unu(rng), unu(rng)};
    st.nu_left = unu(rng);
    st.nu_right = unu(rng);
    double y = uy(rng);
    Complex z(0.5 + unu(rng), trial % 2 ? 0.0 : 0.13);
    ExactSolution sol = exact_solve(st, z, point_at(y), +1);
    double scale = std::abs(sol.eval(y)) + 1e-30;
    CHECK(sol.matching_residual(y) < 1e-9 * scale);
  }
}

TEST_CASE("exact solve: piecewise-constant source") {
  SlabStack st;
  st.breakpoints = {};
  st.slab_nus = {};
  st.nu_left = st.nu_right = 1.0;
  Source1D src;
  src.kind = Source1D::Kind::PiecewiseConstant;
  src.pieces = {{-0.5, 0.5, 1.0}};
  Complex z(1.0, 0.1);
  ExactSolution sol = exact_solve(st, z, src, +1);
  // residual of -u'' - z u = f checked by finite differences of the closed form
  for (double x : {-2.0, -0.3, 0.0, 0.2, 1.7}) {
    double d = 1e-4;
    Complex upp = (sol.eval(x + d) - 2.0 * sol.eval(x) + sol.eval(x - d)) / (d * d);
    double f = (x > -0.5 && x < 0.5) ? 1.0 : 0.0;
    CHECK(std::abs(-upp - z * sol.eval(x) - f) < 1e-5);
  }
}

TEST_CASE("exact solve: side selection on the real axis") {
  SlabStack st;
  st.breakpoints = {};
  st.slab_nus = {};
  st.nu_left = st.nu_right = 1.0;
  ExactSolution plus = exact_solve(st, Complex(1, 0), point_at(0.0), +1);
  ExactSolution minus = exact_solve(st, Complex(1, 0), point_at(0.0), -1);
  // incoming boundary value is the conjugate of the outgoing one
  for (double x : {-1.3, 0.7, 2.2})
    CHECK(std::abs(minus.eval(x) - std::conj(plus.eval(x))) < 1e-12);
}

TEST_CASE("lap limit: homogeneous medium converges to the boundary value") {
  SlabStack st;
  st.breakpoints = {};
  st.slab_nus = {};
  st.nu_left = st.nu_right = 1.0;
  std::vector<double> etas{0.4, 0.2, 0.1, 0.05, 0.025};
  LapLimitTable t = lap_limit_exact(st, 1.0, etas, point_at(0.0), 0.75, 8.0);
  REQUIRE(t.rows.size() == etas.size());
  for (std::size_t i = 1; i < t.rows.size(); ++i)
    CHECK(t.rows[i].diff_to_limit < t.rows[i - 1].diff_to_limit);
  CHECK(t.rows.back().diff_to_limit < 0.05 * t.limit_norm);
}

TEST_CASE("lap limit: Cauchy differences halve along a factor-2 ladder") {
  std::vector<double> etas{0.4, 0.2, 0.1, 0.05, 0.025, 0.0125};
  LapLimitTable t =
      lap_limit_exact(three_slabs(), 1.0, etas, point_at(0.1), 0.75, 8.0);
  for (std::size_t i = 2; i + 1 < t.rows.size(); ++i) {
    double ratio = t.rows[i].cauchy_diff / t.rows[i + 1].cauchy_diff;
    CHECK(ratio > 1.5);
    CHECK(ratio < 3.0);
  }
}

TEST_CASE("lap limit: eta = 0 equals the vanishing-absorption limit") {
  ExactSolution at_zero =
      exact_solve(three_slabs(), Complex(1, 0), point_at(0.1), +1);
  ExactSolution tiny =
      exact_solve(three_slabs(), Complex(1, 1e-9), point_at(0.1), +1);
  double diff = exact_diff_norm(at_zero, tiny, -0.75, 8.0);
  double scale = exact_weighted_norm(at_zero, -0.75, 8.0);
  CHECK(diff < 1e-8 * scale + 1e-8);
}

TEST_CASE("adaptive quadrature: smooth reference integrals") {
  double v = adaptive_integrate([](double x) { return std::sin(x); }, 0.0,
                                M_PI, {}, 1e-12);
  CHECK(v == doctest::Approx(2.0).epsilon(1e-10));
  double w = adaptive_integrate([](double x) { return std::abs(x); }, -1.0,
                                1.0, {0.0}, 1e-12);
  CHECK(w == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("FD with impedance ends converges at second order to the oracle") {
  SlabStack st = three_slabs();
  auto m = line_medium(st.breakpoints, {1.0, 1.6, 2.4, 1.8, 1.2});
  Source1D src = point_at(0.25);
  Complex z(1.0, 0.01);
  ExactSolution exact = exact_solve(st, z, src, +1);

  double prev_err = -1;
  for (double h : {1.0 / 32, 1.0 / 64}) {
    Grid g = Grid::build_unchecked(1, 4, h);
    AssembleOptions ao;
    ao.bc = BcKind::Robin1D;
    DiscreteOperator op = assemble(g, *m, z, ao);
    // unit-jump normalization: f = delta / mu0(y)
    GridFunction f(g);
    f[g.encode(static_cast<int>(std::llround((0.25 + 4) / h)), 0, 0)] =
        1.0 / (h * 2.4);
    SolveOptions so;
    so.method = SolveMethod::Tridiagonal;
    auto [u, stats] = solve(op, f, so);
    REQUIRE(stats.converged);

    GridFunction diff(g), uex(g);
    for (Index i = 0; i < g.size(); ++i) {
      Complex e = exact.eval(g.node(i)[0]);
      uex[i] = e;
      diff[i] = u[i] - e;
    }
    double err = weighted_norm(diff, -0.75) / weighted_norm(uex, -0.75);
    if (prev_err > 0) {
      double ratio = prev_err / err;
      CHECK(ratio >= 3.5);
      CHECK(ratio <= 4.5);
    }
    prev_err = err;
  }
}
