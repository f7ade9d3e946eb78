#ifndef LAPLAB_CORE_ORACLE1D_HPP
#define LAPLAB_CORE_ORACLE1D_HPP

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "core/types.hpp"

namespace laplab {

// Planar stratified medium reduced to one axis: finitely many slabs between
// two semi-infinite end media. The exact resolvent solutions are assembled in
// closed form and serve as the brute-force reference for the grid solver.
struct SlabStack {
  std::vector<double> breakpoints;  // strictly increasing, may be empty
  std::vector<double> slab_nus;     // one value per finite slab
  double nu_left = 1.0;
  double nu_right = 1.0;

  void validate() const;
  double nu_at(double x) const;
};

// Closed-form solution: per region u(x) = A e^{ik(x-xref)} + B e^{-ik(x-xref)}
// with local reference coordinates chosen so that stored coefficients stay
// bounded for Im k > 0.
struct ExactSolution {
  std::vector<double> boundaries;  // region separators (breakpoints + source)
  std::vector<Complex> k;          // per region, one more than boundaries
  std::vector<Complex> A, B;
  std::vector<Complex> c0;         // constant particular part, -f/z per region
  std::vector<double> xref;
  Complex z;

  int region_of(double x) const;
  Complex eval(double x) const;
  Complex deriv(double x) const;
  // max over boundaries of |[u]| + |[u']| with the source jump removed
  double matching_residual(double source_y) const;
};

struct Source1D {
  enum class Kind { PointMass, PiecewiseConstant } kind = Kind::PointMass;
  double y = 0.0;  // point-mass location
  // (lo, hi, value) pieces for the piecewise-constant right-hand side
  std::vector<std::array<double, 3>> pieces;
};

// (u, u') propagator across a homogeneous slab of width d:
// [[cos(kd), sin(kd)/k], [-k sin(kd), cos(kd)]], determinant 1.
Eigen::Matrix2cd transfer_matrix(Complex k, double d);
Eigen::Matrix2cd transfer_matrix(const SlabStack& stack, int slab, Complex z);

// Exact solution of (-nu^{-1} u'' - z u) = f with purely outgoing (side +1)
// or incoming (side -1) end behavior; at Im z != 0 both choices coincide with
// the square-integrable solution. The matching system is solved as one banded
// linear system over all local coefficients. Throws DegenerateSystem if the
// matching matrix is singular (a real-axis resonance).
ExactSolution exact_solve(const SlabStack& stack, Complex z,
                          const Source1D& source, int side_sgn);

// Adaptive Simpson quadrature, split at the given singular/kink points.
double adaptive_integrate(const std::function<double(double)>& f, double lo,
                          double hi, const std::vector<double>& split_at,
                          double tol = 1e-10);

// Weighted interval norms of exact solutions on [-X, X].
double exact_weighted_norm(const ExactSolution& sol, double t, double X,
                           double quad_tol = 1e-10);
double exact_diff_norm(const ExactSolution& a, const ExactSolution& b, double t,
                       double X, double quad_tol = 1e-10);

// Weighted norms of u_eta along a decreasing eta ladder, their Cauchy
// differences, and the eta = 0 boundary value, all from the closed forms.
struct LapLimitRow {
  double eta = 0;
  double u_norm = 0;        // |u_eta|_{-delta, [-X, X]}
  double cauchy_diff = 0;   // |u_eta - u_prev|_{-delta}
  double diff_to_limit = 0; // |u_eta - u_0|_{-delta}
};

struct LapLimitTable {
  double lambda = 0;
  double delta = 0;
  double X = 0;
  std::vector<LapLimitRow> rows;
  double limit_norm = 0;  // |u_0|
};

LapLimitTable lap_limit_exact(const SlabStack& stack, double lambda,
                              const std::vector<double>& eta_list,
                              const Source1D& source, double delta, double X,
                              int side_sgn = +1);

}  // namespace laplab

#endif
