#include "core/oracle1d.hpp"

#include <algorithm>
#include <cmath>

#include "core/weighted.hpp"

namespace laplab {

void SlabStack::validate() const {
  for (std::size_t i = 1; i < breakpoints.size(); ++i)
    require(breakpoints[i - 1] < breakpoints[i], ErrorCode::Config,
            "breakpoints must be strictly increasing");
  require(slab_nus.size() + 1 == breakpoints.size() || breakpoints.empty(),
          ErrorCode::Config, "one nu per finite slab required");
  require(nu_left > 0 && nu_right > 0, ErrorCode::Config,
          "end media must be positive");
  for (double v : slab_nus)
    require(v > 0, ErrorCode::Config, "slab values must be positive");
}

double SlabStack::nu_at(double x) const {
  if (breakpoints.empty() || x < breakpoints.front()) return nu_left;
  if (x >= breakpoints.back()) return nu_right;
  auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), x);
  std::size_t slab = static_cast<std::size_t>(it - breakpoints.begin()) - 1;
  return slab_nus[slab];
}

Eigen::Matrix2cd transfer_matrix(Complex k, double d) {
  Eigen::Matrix2cd M;
  Complex kd = k * d;
  Complex c = std::cos(kd), s = std::sin(kd);
  Complex sinc = std::abs(kd) < 1e-8
                     ? Complex(d) * (1.0 - kd * kd / 6.0)
                     : s / k;
  M << c, sinc, -k * s, c;
  return M;
}

Eigen::Matrix2cd transfer_matrix(const SlabStack& stack, int slab, Complex z) {
  stack.validate();
  require(slab >= 0 && slab + 1 < static_cast<int>(stack.breakpoints.size()),
          ErrorCode::Config, "no such slab");
  double d = stack.breakpoints[static_cast<std::size_t>(slab) + 1] -
             stack.breakpoints[static_cast<std::size_t>(slab)];
  Complex k = branch_sqrt(z * stack.slab_nus[static_cast<std::size_t>(slab)]);
  return transfer_matrix(k, d);
}

int ExactSolution::region_of(double x) const {
  auto it = std::upper_bound(boundaries.begin(), boundaries.end(), x);
  return static_cast<int>(it - boundaries.begin());
}

namespace {

Complex wave_pair(const ExactSolution& s, int j, double x, bool derivative) {
  std::size_t jj = static_cast<std::size_t>(j);
  Complex ik = Complex(0, 1) * s.k[jj];
  Complex ep = std::exp(ik * (x - s.xref[jj]));
  Complex em = std::exp(-ik * (x - s.xref[jj]));
  if (!derivative) return s.A[jj] * ep + s.B[jj] * em;
  return s.A[jj] * ik * ep - s.B[jj] * ik * em;
}

}  // namespace

Complex ExactSolution::eval(double x) const {
  int j = region_of(x);
  Complex base = c0.empty() ? Complex(0) : c0[static_cast<std::size_t>(j)];
  return wave_pair(*this, j, x, false) + base;
}

Complex ExactSolution::deriv(double x) const {
  return wave_pair(*this, region_of(x), x, true);
}

double ExactSolution::matching_residual(double source_y) const {
  double worst = 0;
  for (std::size_t b = 0; b < boundaries.size(); ++b) {
    double xb = boundaries[b];
    Complex ul = wave_pair(*this, static_cast<int>(b), xb, false);
    Complex ur = wave_pair(*this, static_cast<int>(b) + 1, xb, false);
    if (!c0.empty()) {
      ul += c0[b];
      ur += c0[b + 1];
    }
    Complex dl = wave_pair(*this, static_cast<int>(b), xb, true);
    Complex dr = wave_pair(*this, static_cast<int>(b) + 1, xb, true);
    Complex jump = dr - dl;
    if (std::abs(xb - source_y) < 1e-14) jump += Complex(1);  // expected -1
    worst = std::max(worst, std::abs(ul - ur) + std::abs(jump));
  }
  return worst;
}

ExactSolution exact_solve(const SlabStack& stack, Complex z,
                          const Source1D& source, int side_sgn) {
  stack.validate();
  require(side_sgn == 1 || side_sgn == -1, ErrorCode::Config,
          "side must be +1 or -1");

  // Region separators: medium breakpoints plus the source structure.
  std::vector<double> bounds = stack.breakpoints;
  if (source.kind == Source1D::Kind::PointMass) {
    for (double b : bounds)
      require(std::abs(source.y - b) > 1e-12, ErrorCode::Config,
              "point source must not sit on an interface");
    bounds.push_back(source.y);
  } else {
    require(z != Complex(0), ErrorCode::Precondition,
            "piecewise-constant source requires z != 0");
    for (const auto& piece : source.pieces) {
      require(piece[0] < piece[1], ErrorCode::Config, "empty source piece");
      bounds.push_back(piece[0]);
      bounds.push_back(piece[1]);
    }
  }
  std::sort(bounds.begin(), bounds.end());
  bounds.erase(std::unique(bounds.begin(), bounds.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-14; }),
               bounds.end());
  require(!bounds.empty(), ErrorCode::Config, "no region separators");

  const int nb = static_cast<int>(bounds.size());
  const int nr = nb + 1;

  ExactSolution sol;
  sol.boundaries = bounds;
  sol.z = z;
  sol.k.resize(static_cast<std::size_t>(nr));
  sol.A.assign(static_cast<std::size_t>(nr), Complex(0));
  sol.B.assign(static_cast<std::size_t>(nr), Complex(0));
  sol.xref.resize(static_cast<std::size_t>(nr));

  // Representative interior point per region, to look up the medium.
  auto rep = [&](int j) {
    if (j == 0) return bounds.front() - 1.0;
    if (j == nr - 1) return bounds.back() + 1.0;
    return 0.5 * (bounds[static_cast<std::size_t>(j) - 1] +
                  bounds[static_cast<std::size_t>(j)]);
  };
  // Sign flip selects the incoming boundary value on the real axis; off the
  // axis both sides coincide with the square-integrable solution.
  bool flip = (z.imag() == 0.0 && side_sgn < 0);
  for (int j = 0; j < nr; ++j) {
    Complex k = branch_sqrt(z * stack.nu_at(rep(j)));
    sol.k[static_cast<std::size_t>(j)] = flip ? -k : k;
    if (j == 0)
      sol.xref[static_cast<std::size_t>(j)] = bounds.front();
    else
      sol.xref[static_cast<std::size_t>(j)] = bounds[static_cast<std::size_t>(j) - 1];
  }

  // Particular solution u_p = -f/z per region for the distributed source.
  std::vector<Complex> up(static_cast<std::size_t>(nr), Complex(0));
  if (source.kind == Source1D::Kind::PiecewiseConstant) {
    for (int j = 0; j < nr; ++j) {
      double xm = rep(j);
      double f = 0;
      for (const auto& piece : source.pieces)
        if (xm > piece[0] && xm < piece[1]) f += piece[2];
      up[static_cast<std::size_t>(j)] = -f / z;
    }
  }

  // Unknowns: B_0, (A_j, B_j) for interior regions, A_{nr-1}; the growing
  // coefficients of the end media are pinned to zero.
  const int nu_unknowns = 2 * nb;
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(nu_unknowns, nu_unknowns);
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(nu_unknowns);

  auto col_A = [&](int j) { return j == 0 ? -1 : 2 * j - 1; };
  auto col_B = [&](int j) { return j == nr - 1 ? -1 : 2 * j; };

  for (int b = 0; b < nb; ++b) {
    double xb = bounds[static_cast<std::size_t>(b)];
    for (int eq = 0; eq < 2; ++eq) {  // 0: continuity of u, 1: jump of u'
      int row = 2 * b + eq;
      for (int side = 0; side < 2; ++side) {
        int j = b + side;  // left region, right region
        std::size_t jj = static_cast<std::size_t>(j);
        double sgn = side == 0 ? 1.0 : -1.0;
        Complex ik = Complex(0, 1) * sol.k[jj];
        Complex ep = std::exp(ik * (xb - sol.xref[jj]));
        Complex em = std::exp(-ik * (xb - sol.xref[jj]));
        Complex cA = eq == 0 ? ep : ik * ep;
        Complex cB = eq == 0 ? em : -ik * em;
        if (col_A(j) >= 0) M(row, col_A(j)) += sgn * cA;
        if (col_B(j) >= 0) M(row, col_B(j)) += sgn * cB;
      }
      if (eq == 0) {
        // the row computes u_h(left) - u_h(right); continuity of u_h + u_p
        // requires it to equal u_p(right) - u_p(left)
        rhs(row) = up[static_cast<std::size_t>(b) + 1] -
                   up[static_cast<std::size_t>(b)];
      } else {
        // u'(b+) - u'(b-) carries -1 at the point mass; the row computes
        // u'_left - u'_right, so the right-hand side is +1 there.
        bool at_source = source.kind == Source1D::Kind::PointMass &&
                         std::abs(xb - source.y) < 1e-14;
        rhs(row) = at_source ? Complex(1) : Complex(0);
      }
    }
  }

  Eigen::FullPivLU<Eigen::MatrixXcd> lu(M);
  require(lu.isInvertible(), ErrorCode::DegenerateSystem,
          "matching system is singular (real-axis resonance)");
  Eigen::VectorXcd c = lu.solve(rhs);

  for (int j = 0; j < nr; ++j) {
    if (col_A(j) >= 0) sol.A[static_cast<std::size_t>(j)] = c(col_A(j));
    if (col_B(j) >= 0) sol.B[static_cast<std::size_t>(j)] = c(col_B(j));
  }
  if (source.kind == Source1D::Kind::PiecewiseConstant) sol.c0 = up;
  return sol;
}

double adaptive_integrate(const std::function<double(double)>& f, double lo,
                          double hi, const std::vector<double>& split_at,
                          double tol) {
  std::vector<double> pts{lo, hi};
  for (double s : split_at)
    if (s > lo && s < hi) pts.push_back(s);
  std::sort(pts.begin(), pts.end());

  struct Simpson {
    const std::function<double(double)>& f;
    double tol;
    int depth_limit = 40;
    double recurse(double a, double b, double fa, double fm, double fb,
                   double whole, int depth) const {
      double m = 0.5 * (a + b);
      double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
      double flm = f(lm), frm = f(rm);
      double left = (m - a) / 6 * (fa + 4 * flm + fm);
      double right = (b - m) / 6 * (fm + 4 * frm + fb);
      if (depth >= depth_limit ||
          std::abs(left + right - whole) < 15 * tol * std::max(1.0, std::abs(whole)))
        return left + right + (left + right - whole) / 15.0;
      return recurse(a, m, fa, flm, fm, left, depth + 1) +
             recurse(m, b, fm, frm, fb, right, depth + 1);
    }
  };

  double total = 0;
  Simpson s{f, tol};
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    double a = pts[i], b = pts[i + 1];
    if (b - a < 1e-15) continue;
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    double whole = (b - a) / 6 * (fa + 4 * fm + fb);
    total += s.recurse(a, b, fa, fm, fb, whole, 0);
  }
  return total;
}

namespace {

std::vector<double> kink_points(const ExactSolution& sol) {
  std::vector<double> pts = sol.boundaries;
  pts.push_back(0.0);  // weight kink at the origin
  return pts;
}

}  // namespace

double exact_weighted_norm(const ExactSolution& sol, double t, double X,
                           double quad_tol) {
  auto f = [&](double x) {
    return std::pow(1.0 + std::abs(x), 2 * t) * std::norm(sol.eval(x));
  };
  return std::sqrt(adaptive_integrate(f, -X, X, kink_points(sol), quad_tol));
}

double exact_diff_norm(const ExactSolution& a, const ExactSolution& b, double t,
                       double X, double quad_tol) {
  auto f = [&](double x) {
    return std::pow(1.0 + std::abs(x), 2 * t) * std::norm(a.eval(x) - b.eval(x));
  };
  std::vector<double> pts = kink_points(a);
  for (double p : kink_points(b)) pts.push_back(p);
  return std::sqrt(adaptive_integrate(f, -X, X, pts, quad_tol));
}

LapLimitTable lap_limit_exact(const SlabStack& stack, double lambda,
                              const std::vector<double>& eta_list,
                              const Source1D& source, double delta, double X,
                              int side_sgn) {
  require(lambda > 0, ErrorCode::Precondition, "lambda must be positive");
  for (std::size_t i = 1; i < eta_list.size(); ++i)
    require(eta_list[i] < eta_list[i - 1], ErrorCode::Precondition,
            "eta ladder must decrease");

  LapLimitTable table;
  table.lambda = lambda;
  table.delta = delta;
  table.X = X;

  ExactSolution limit = exact_solve(stack, Complex(lambda, 0), source, side_sgn);
  table.limit_norm = exact_weighted_norm(limit, -delta, X);

  const ExactSolution* prev = nullptr;
  ExactSolution prev_store;
  for (double eta : eta_list) {
    require(eta > 0, ErrorCode::Precondition, "eta must be positive");
    ExactSolution cur =
        exact_solve(stack, Complex(lambda, side_sgn * eta), source, side_sgn);
    LapLimitRow row;
    row.eta = eta;
    row.u_norm = exact_weighted_norm(cur, -delta, X);
    row.cauchy_diff = prev ? exact_diff_norm(cur, *prev, -delta, X) : 0.0;
    row.diff_to_limit = exact_diff_norm(cur, limit, -delta, X);
    table.rows.push_back(row);
    prev_store = std::move(cur);
    prev = &prev_store;
  }
  return table;
}

}  // namespace laplab
