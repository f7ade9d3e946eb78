#ifndef LAPLAB_CORE_MEDIUM_HPP
#define LAPLAB_CORE_MEDIUM_HPP

#include <memory>
#include <optional>
#include <vector>

#include "core/geometry.hpp"
#include "core/types.hpp"

namespace laplab {

class Grid;

enum class PerturbationKind { ShortRange, LongRange };
enum class PerturbationProfile { PowerDecay, GaussianBump, Table };

// Decaying perturbation mu1 added on top of the piecewise-constant profile.
// PowerDecay saturates its own decay envelope; GaussianBump is smooth and
// short-range for any epsilon; Table interpolates a radial value table.
struct Perturbation {
  PerturbationKind kind = PerturbationKind::ShortRange;
  PerturbationProfile profile = PerturbationProfile::PowerDecay;
  double c1 = 0.0;
  double epsilon = 0.25;  // decay rate, in (0, 1/2)
  double sign = 1.0;
  Point center{0, 0, 0};  // GaussianBump
  double width = 1.0;     // GaussianBump
  std::vector<std::pair<double, double>> table;  // (radius, value), sorted

  bool differentiable() const { return profile != PerturbationProfile::Table; }

  double value(const Point& x, int dim) const;
  // Gradient for analytic profiles; central differences of the interpolant
  // for tables (used only by envelope reporting, never by the hypothesis
  // checks, which refuse tables instead).
  Point gradient(const Point& x, int dim) const;
  double radial_derivative(const Point& x, int dim) const;
};

struct MuTriple {
  double mu0 = 0, mu1 = 0, mu = 0;
};

// The full sound profile mu = mu0 + mu1: a simple function taking the value
// nus[l] on layer l, plus an optional decaying perturbation.
class MediumProfile {
 public:
  MediumProfile(std::shared_ptr<const LayeredPartition> partition,
                std::vector<double> nus,
                std::optional<Perturbation> perturbation = std::nullopt);

  const LayeredPartition& partition() const { return *partition_; }
  std::shared_ptr<const LayeredPartition> partition_ptr() const {
    return partition_;
  }
  const std::vector<double>& nus() const { return nus_; }
  const std::optional<Perturbation>& perturbation() const {
    return perturbation_;
  }
  bool perturbed() const { return perturbation_.has_value(); }

  double m0() const { return m0_; }
  double M0() const { return M0_; }

  double nu_of(int layer) const {
    return nus_[static_cast<std::size_t>(layer - partition_->lowest_layer())];
  }

  // Piecewise-constant part; interface hits take the mean of the two
  // adjacent values.
  double mu0_at(const Point& x, double tie_tol = 1e-12) const;

  // (mu0, mu1, mu) at x; throws NonPositiveMedium if mu <= 0.
  MuTriple mu_at(const Point& x, double tie_tol = 1e-12) const;

 private:
  std::shared_ptr<const LayeredPartition> partition_;
  std::vector<double> nus_;
  std::optional<Perturbation> perturbation_;
  double m0_ = 0, M0_ = 0;
};

// Positivity/boundedness of mu on the grid plus the decay envelopes of the
// declared perturbation class, all checked nodewise. Failures are report
// entries carrying a witness node.
CertificateReport validate_medium(const MediumProfile& m, const Grid& grid);

enum class AbsenceCondition { Both, IntervalOnly, RadialOnly };

// Pointwise hypotheses that exclude point spectrum:
//   (interval)  mu >= N mu1 + lambda0 (|x| |mu1|)^2   => none in [0, lambda0]
//   (radial)    mu + |x| d(mu1)/d|x| >= 0             => none at all
// The radial check requires a differentiable perturbation and refuses tables.
CertificateReport check_absence_conditions(
    const MediumProfile& m, double lambda0, const Grid& grid,
    AbsenceCondition which = AbsenceCondition::Both);

// Exponent bookkeeping of the decay-improvement chain: starting from weight
// -delta, each step gains epsilon (short-range) or epsilon/2 (long-range)
// until the weight becomes positive.
struct BootstrapExponents {
  double delta = 0;
  double epsilon = 0;
  double eps_step = 0;  // epsilon, or epsilon/2 for long-range
  int j0 = 0;
  double delta0 = 0;
  double delta_admissible_hi = 0;  // upper end of the perturbed-sweep range
};

BootstrapExponents bootstrap_exponents(double delta, double epsilon,
                                       PerturbationKind kind);

// Lower bound c1^-2 C^(-2/j0) for the admissible point spectrum, with the
// (non-constructive) constant C supplied by the caller.
double spectral_lower_bound(double c1, int j0, double C_measured);

}  // namespace laplab

#endif
