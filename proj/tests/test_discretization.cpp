#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "core/fd_operator.hpp"
#include "core/weighted.hpp"
#include "support/dense_oracle.hpp"
#include "support/test_helpers.hpp"

using namespace laplab;
using namespace laplab::testing;

namespace {

// mu-weighted bilinear pairing sum mu u v h^N (no conjugation); the stencil
// is complex-symmetric under it for every shift z.
Complex bilinear_x(const GridFunction& u, const GridFunction& v,
                   const MediumProfile& m) {
  const Grid& g = *u.grid;
  Complex acc = 0;
  for (Index i = 0; i < g.size(); ++i)
    acc += m.mu_at(g.node(i), g.h() / 2).mu * u[i] * v[i];
  double cell = 1;
  for (int d = 0; d < g.dim(); ++d) cell *= g.h();
  return acc * cell;
}

}  // namespace

TEST_CASE("grid arithmetic") {
  Grid g2 = Grid::build(2, 16, 0.25);
  CHECK(g2.nodes_per_axis() == 129);
  CHECK(g2.size() == 129 * 129);

  Grid g3 = Grid::build(3, 8, 0.25);
  CHECK(g3.nodes_per_axis() == 65);
  CHECK(g3.size() == 65LL * 65 * 65);
}

TEST_CASE("grid guards") {
  CHECK_THROWS_AS(Grid::build(2, 2, 0.1), Error);   // rmax too small
  CHECK_THROWS_AS(Grid::build(2, 8, 1.0), Error);   // h too coarse
  CHECK_THROWS_AS(Grid::build(2, 8, 0.3), Error);   // rmax/h not integral
  // points-per-wavelength guard: k = 5 needs h < 2 pi / 40
  CHECK_THROWS_AS(Grid::build(2, 8, 0.25, {}, 5.0), Error);
  CHECK_NOTHROW(Grid::build(2, 8, 0.125, {}, 5.0));
  SpongeParams sp{0.5, 1.0, 2.0};
  CHECK_THROWS_AS(Grid::build(2, 8, 0.25, sp), Error);  // width < 4h
}

TEST_CASE("1-D interior stencil is the [-1, 2, -1] row") {
  Grid g = Grid::build_unchecked(1, 2, 1.0);  // 5 nodes
  auto m = line_medium({1000.0}, {1.0, 1.0});
  DiscreteOperator op = assemble(g, *m, Complex(0, 0));
  // basis vector at the middle node
  GridFunction e(g);
  e[2] = 1.0;
  GridFunction y = matvec(op, e);
  CHECK(y[1] == Complex(-1, 0));
  CHECK(y[2] == Complex(2, 0));
  CHECK(y[3] == Complex(-1, 0));
  CHECK(y[0] == Complex(0, 0));  // wall row
}

TEST_CASE("matvec matches a dense multiply on a tiny grid") {
  Grid g = Grid::build_unchecked(2, 1, 0.5);  // 5x5 nodes
  auto m = planar_medium(2, {-0.3, 0.4}, {2.0, 1.0, 1.5});
  DiscreteOperator op = assemble(g, *m, Complex(0.7, 0.2));
  const std::size_t n = op.active.size();
  Eigen::MatrixXcd D = Eigen::MatrixXcd::Zero(n, n);
  for (Index r = 0; r < op.A.nrows; ++r)
    for (Index p = op.A.rowptr[r]; p < op.A.rowptr[r + 1]; ++p)
      D(static_cast<Eigen::Index>(r),
        static_cast<Eigen::Index>(op.A.col[p])) = op.A.val[p];

  GridFunction u = random_field(g, 5);
  Eigen::VectorXcd x(n);
  for (std::size_t i = 0; i < n; ++i) x(static_cast<Eigen::Index>(i)) = u[op.active[i]];
  Eigen::VectorXcd y = D * x;
  GridFunction z = matvec(op, u);
  for (std::size_t i = 0; i < n; ++i)
    CHECK(std::abs(z[op.active[i]] - y(static_cast<Eigen::Index>(i))) < 1e-13);

  GridFunction zero(g);
  GridFunction yz = matvec(op, zero);
  for (Index i = 0; i < g.size(); ++i) CHECK(yz[i] == Complex(0));
}

TEST_CASE("matvec shape mismatch") {
  Grid g = Grid::build_unchecked(2, 1, 0.5);
  Grid g2 = Grid::build_unchecked(2, 1, 0.25);
  auto m = homogeneous_medium(2, 1.0);
  DiscreteOperator op = assemble(g, *m, Complex(1, 0));
  GridFunction u(g2);
  CHECK_THROWS_AS(matvec(op, u), Error);
}

TEST_CASE("complex symmetry in the weighted pairing, sponge off") {
  Grid g = Grid::build_unchecked(2, 2, 0.125);
  auto m = planar_medium(2, {-1.1, 0.9}, {1.8, 1.0, 1.4});
  DiscreteOperator op = assemble(g, *m, Complex(1.3, 0.45));
  CHECK(op.symmetric_in_x);
  for (int trial = 0; trial < 5; ++trial) {
    GridFunction u = random_field(g, 40 + trial);
    GridFunction v = random_field(g, 50 + trial);
    Complex a = bilinear_x(matvec(op, u), v, *m);
    Complex b = bilinear_x(u, matvec(op, v), *m);
    CHECK(std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)));
  }
}

TEST_CASE("sesquilinear damping identity: Im <(H - z)u, u>_X = -eta |u|_X^2") {
  Grid g = Grid::build_unchecked(2, 2, 0.125);
  auto m = planar_medium(2, {-0.8, 0.7}, {1.5, 1.0, 2.0});
  for (int trial = 0; trial < 5; ++trial) {
    Complex z(0.5 + 0.3 * trial, 0.2 + 0.1 * trial);
    DiscreteOperator op = assemble(g, *m, z);
    GridFunction u = random_field(g, 60 + trial);
    GridFunction au = matvec(op, u);
    double lhs = inner_x(au, u, *m).imag();
    double rhs = -z.imag() * norm_x(u, *m) * norm_x(u, *m);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("sponge flips sign with the requested side") {
  SpongeParams sp{1.0, 2.0, 2.0};
  Grid g = Grid::build_unchecked(2, 2, 0.125, sp);
  auto m = homogeneous_medium(2, 1.0);

  AssembleOptions plus;
  plus.side = Side::Plus;
  AssembleOptions minus;
  minus.side = Side::Minus;
  DiscreteOperator op_p = assemble(g, *m, Complex(1, 0), plus);
  DiscreteOperator op_m = assemble(g, *m, Complex(1, 0), minus);
  CHECK(op_p.sponge_active);
  CHECK_FALSE(op_p.symmetric_in_x);

  // pick an active node deep in the sponge ring and compare diagonals
  for (Index r = 0; r < op_p.A.nrows; ++r) {
    Index gnode = op_p.active[static_cast<std::size_t>(r)];
    Point x = g.node(gnode);
    if (g.sponge_profile(x, 1.0) < 0.5) continue;
    Complex dp, dm;
    for (Index p = op_p.A.rowptr[r]; p < op_p.A.rowptr[r + 1]; ++p)
      if (op_p.A.col[p] == r) dp = op_p.A.val[p];
    for (Index p = op_m.A.rowptr[r]; p < op_m.A.rowptr[r + 1]; ++p)
      if (op_m.A.col[p] == r) dm = op_m.A.val[p];
    CHECK(dp.imag() < 0);
    CHECK(dm.imag() > 0);
    CHECK(dp.imag() == doctest::Approx(-dm.imag()));
    break;
  }
}

TEST_CASE("automatic sponge strength resolves to twice the peak wavenumber") {
  SpongeParams sp{1.0, -1.0, 2.0};
  Grid g = Grid::build_unchecked(2, 2, 0.125, sp);
  auto m = homogeneous_medium(2, 4.0);
  DiscreteOperator op = assemble(g, *m, Complex(1, 0));
  CHECK(op.sigma0 == doctest::Approx(2.0 * 2.0));  // k = sqrt(1 * 4) = 2
}

TEST_CASE("truncated operator is nonnegative: dense spectrum check") {
  Grid g = Grid::build_unchecked(2, 1.5, 0.25);
  auto m = planar_medium(2, {-0.4, 0.6}, {1.3, 1.0, 1.8});
  DenseSpectrum sp = dense_spectrum(g, *m);
  REQUIRE(!sp.eigenvalues.empty());
  for (double ev : sp.eigenvalues) CHECK(ev > 0.0);
}

TEST_CASE("Robin rows close the 1-D operator") {
  Grid g = Grid::build_unchecked(1, 2, 0.5);  // 9 nodes
  auto m = line_medium({1000.0}, {1.0, 1.0});
  Complex z(1.0, 0.0);
  AssembleOptions ao;
  ao.bc = BcKind::Robin1D;
  DiscreteOperator op = assemble(g, *m, z, ao);
  CHECK(op.A.nrows == 9);  // all nodes active
  // left end row: ((2 - 2 i h k) u_0 - 2 u_1) / h^2 - z u_0
  GridFunction e0(g);
  e0[0] = 1.0;
  GridFunction y = matvec(op, e0);
  double h = g.h();
  Complex expect_diag = (2.0 - Complex(0, 2.0) * h) / (h * h) - z;
  CHECK(std::abs(y[0] - expect_diag) < 1e-13);
  // the end row reaches its inner neighbor with a doubled coefficient
  GridFunction e1(g);
  e1[1] = 1.0;
  GridFunction y1 = matvec(op, e1);
  CHECK(std::abs(y1[0] - Complex(-2.0 / (h * h))) < 1e-13);
}

TEST_CASE("MatrixMarket dump round-trips the dimensions") {
  Grid g = Grid::build_unchecked(2, 1, 0.5);
  auto m = homogeneous_medium(2, 1.0);
  DiscreteOperator op = assemble(g, *m, Complex(1, 0.1));
  std::ostringstream os;
  write_matrix_market(op, os);
  std::string text = os.str();
  CHECK(text.rfind("%%MatrixMarket matrix coordinate complex general", 0) == 0);
  std::istringstream is(text);
  std::string header;
  std::getline(is, header);
  long rows, cols, nnz;
  is >> rows >> cols >> nnz;
  CHECK(rows == op.A.nrows);
  CHECK(cols == op.A.nrows);
  CHECK(nnz == static_cast<long>(op.A.col.size()));
}
