#ifndef LAPLAB_CORE_WEIGHTED_HPP
#define LAPLAB_CORE_WEIGHTED_HPP

#include <map>
#include <string>
#include <vector>

#include "core/grid.hpp"
#include "core/medium.hpp"
#include "core/types.hpp"

namespace laplab {

// Integration region for the weighted norms.
struct Region {
  enum class Kind { All, Ball, Exterior } kind = Kind::All;
  double radius = 0.0;

  static Region all() { return {}; }
  static Region ball(double R) { return {Kind::Ball, R}; }
  static Region exterior(double s) { return {Kind::Exterior, s}; }
  bool contains(double r) const {
    switch (kind) {
      case Kind::All: return true;
      case Kind::Ball: return r < radius;
      case Kind::Exterior: return r > radius;
    }
    return true;
  }
};

// [ sum (1+|x|)^{2t} |u|^2 h^N ]^{1/2} over the region (midpoint quadrature).
double weighted_norm(const GridFunction& u, double t,
                     Region region = Region::all());

// Variant used for N = 2: |x| weight inside the unit ball, the usual
// (1+|x|)^{2t} weight outside.
double star_norm(const GridFunction& u, double t);

double weighted_norm(const VectorGridFunction& u, double t,
                     Region region = Region::all());
double star_norm(const VectorGridFunction& u, double t);

// Discrete weighted Sobolev norm of order 1 or 2 (central differences;
// order 2 sums only over nodes with a full interior stencil).
double sobolev_norm(const GridFunction& u, int order, double t);

// Plain l2 / weighted-measure inner products on the grid.
Complex inner_l2(const GridFunction& u, const GridFunction& v);
double norm_l2(const GridFunction& u);
// X inner product: sum mu(x) u conj(v) h^N.
Complex inner_x(const GridFunction& u, const GridFunction& v,
                const MediumProfile& m);
double norm_x(const GridFunction& u, const MediumProfile& m);

// Principal square root folded onto the branch Im >= 0.
Complex branch_sqrt(Complex w);

// (N-1)(N-3)/4, the dimensional constant of the radial identity.
double c_dim(int N);

// k(x) = sqrt(z mu0(x)) with Im k >= 0, with real/imaginary parts cached.
struct WaveNumberField {
  const Grid* grid = nullptr;
  Complex z;
  std::vector<Complex> k;
  std::vector<double> a, b;
  double max_a = 0;
};

WaveNumberField wavenumber(Complex z, const MediumProfile& m, const Grid& g);

// Central differences, one-sided at the box faces.
VectorGridFunction discrete_gradient(const GridFunction& u);

// D u = grad u + ((N-1)/(2r)) xt u -/+ i k xt u and its radial part
// Dr u = D u . xt. Nodes with r < h are masked out.
struct RadiationField {
  VectorGridFunction Du;
  GridFunction Dru;
};

RadiationField radiation_field(const GridFunction& u,
                               const WaveNumberField& kf, int sign);

// Piecewise radial weight families used by the a-priori estimates. The
// unbounded families grow like (1+r)^{2 delta - 1}; the capped families grow
// like (1+r)^beta up to r_cap and are constant beyond. All satisfy
// xi' >= 0 and xi/r - xi'/2 >= 0, with xi = O(r) (N >= 3) or xi = O(r^2),
// xi' = O(r) (N = 2) near the origin.
enum class RadialWeightKind { PowerN3, PowerN2, CappedPowerN3, CappedPowerN2 };

class RadialWeight {
 public:
  static RadialWeight power(int N, double delta);
  static RadialWeight capped(int N, double beta, double r_cap);

  RadialWeightKind kind() const { return kind_; }
  double value(double r) const;
  double slope(double r) const;  // a.e. derivative

 private:
  RadialWeightKind kind_ = RadialWeightKind::PowerN3;
  double p_ = 0;      // growth exponent: 2 delta - 1, or beta
  double r_cap_ = 0;  // capped families only
  double amp_ = 1;    // continuity-matching amplitude
};

enum class AlphaMode { InvSqrtMu0, One };

// Every term of the radial energy identity on the shell r < |x| < R, with
// phi(x) = alpha(x) xi(|x|), alpha constant per layer. Volume terms use
// midpoint quadrature, sphere terms use node binning of width h, interface
// terms use parametric surface sampling with one-sided traces. The right-hand
// side f is recomputed as (-mu0^{-1} Delta_h - z) u so the residual isolates
// quadrature and differencing error.
struct IdentityOptions {
  AlphaMode alpha = AlphaMode::InvSqrtMu0;
};

struct IdentityReport {
  Complex z;
  double r_inner = 0, r_outer = 0;
  // lhs: damping+slope, interface flux, transverse, dimensional
  // rhs: source, interface sign, outer sphere, inner sphere
  std::map<std::string, double> terms;
  double lhs_total = 0, rhs_total = 0, residual = 0;
  double interface_sign_term = 0;  // the combined two-sided interface term
  double f_mismatch = 0;           // ||f_given - f_recomputed||_l2, if given
};

IdentityReport identity_residual(const GridFunction& u,
                                 const GridFunction* f_given, Complex z,
                                 const MediumProfile& m, const RadialWeight& xi,
                                 double r_inner, double r_outer,
                                 const IdentityOptions& opts = {});

// F(R) = int_{S_R} (|du/dr|^2 + |u|^2) dS by shell binning, scaled by
// R^alpha_exp for N = 2. Reports the running minimum as the observable
// stand-in for the liminf along R -> infinity.
struct FluxProbe {
  std::vector<std::pair<double, double>> points;  // (R, F(R))
  double running_min = 0;
  double trend_slope = 0;  // least-squares slope of F against R
};

FluxProbe flux_probe(const GridFunction& u, const std::vector<double>& radii,
                     double alpha_exp = 1.0);

// Multilinear interpolation of a grid function at an arbitrary point.
Complex interpolate(const GridFunction& u, const Point& x);

}  // namespace laplab

#endif
