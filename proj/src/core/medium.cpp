#include "core/medium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "core/grid.hpp"

namespace laplab {

namespace {

double table_value(const std::vector<std::pair<double, double>>& t, double r) {
  if (t.empty()) return 0.0;
  if (r <= t.front().first) return t.front().second;
  if (r >= t.back().first) return t.back().second;
  auto it = std::upper_bound(
      t.begin(), t.end(), r,
      [](double a, const std::pair<double, double>& b) { return a < b.first; });
  auto lo = it - 1;
  double w = (r - lo->first) / (it->first - lo->first);
  return lo->second * (1 - w) + it->second * w;
}

}  // namespace

double Perturbation::value(const Point& x, int dim) const {
  double r = norm2(x, dim);
  switch (profile) {
    case PerturbationProfile::PowerDecay: {
      double p = (kind == PerturbationKind::ShortRange) ? 1.0 + epsilon : epsilon;
      return sign * c1 * std::pow(1.0 + r, -p);
    }
    case PerturbationProfile::GaussianBump: {
      double d2 = 0;
      for (int i = 0; i < dim; ++i) d2 += (x[i] - center[i]) * (x[i] - center[i]);
      return sign * c1 * std::exp(-d2 / (width * width));
    }
    case PerturbationProfile::Table:
      return sign * table_value(table, r);
  }
  return 0.0;
}

Point Perturbation::gradient(const Point& x, int dim) const {
  Point g{0, 0, 0};
  double r = norm2(x, dim);
  switch (profile) {
    case PerturbationProfile::PowerDecay: {
      double p = (kind == PerturbationKind::ShortRange) ? 1.0 + epsilon : epsilon;
      double dr = -p * sign * c1 * std::pow(1.0 + r, -p - 1.0);
      if (r > 0)
        for (int i = 0; i < dim; ++i) g[i] = dr * x[i] / r;
      return g;
    }
    case PerturbationProfile::GaussianBump: {
      double v = value(x, dim);
      for (int i = 0; i < dim; ++i)
        g[i] = v * (-2.0 * (x[i] - center[i]) / (width * width));
      return g;
    }
    case PerturbationProfile::Table: {
      double dr = 1e-6 * std::max(1.0, r);
      double rp = r + dr, rm = std::max(0.0, r - dr);
      double dv = (table_value(table, rp) - table_value(table, rm)) /
                  (rp - rm) * sign;
      if (r > 0)
        for (int i = 0; i < dim; ++i) g[i] = dv * x[i] / r;
      else
        g[0] = dv;
      return g;
    }
  }
  return g;
}

double Perturbation::radial_derivative(const Point& x, int dim) const {
  double r = norm2(x, dim);
  if (r == 0) return 0.0;
  Point g = gradient(x, dim);
  double s = 0;
  for (int i = 0; i < dim; ++i) s += g[i] * x[i] / r;
  return s;
}

MediumProfile::MediumProfile(std::shared_ptr<const LayeredPartition> partition,
                             std::vector<double> nus,
                             std::optional<Perturbation> perturbation)
    : partition_(std::move(partition)),
      nus_(std::move(nus)),
      perturbation_(std::move(perturbation)) {
  require(partition_ != nullptr, ErrorCode::Config, "partition required");
  require(!nus_.empty(), ErrorCode::EmptyWindow, "no layer values given");
  require(static_cast<int>(nus_.size()) == partition_->layer_count(),
          ErrorCode::Config, "nus must cover the layer window");
  m0_ = M0_ = nus_[0];
  for (double v : nus_) {
    require(v > 0, ErrorCode::Config, "layer values must be positive");
    m0_ = std::min(m0_, v);
    M0_ = std::max(M0_, v);
  }
  if (perturbation_) {
    require(perturbation_->epsilon > 1e-9 && perturbation_->epsilon < 0.5,
            ErrorCode::Config, "epsilon must lie in (0, 1/2)");
    require(perturbation_->c1 >= 0, ErrorCode::Config, "c1 must be nonnegative");
  }
}

double MediumProfile::mu0_at(const Point& x, double tie_tol) const {
  ClassifyResult r = partition_->classify(x, tie_tol);
  if (!r.on_interface) return nu_of(r.layer);
  return 0.5 * (nu_of(r.layer) + nu_of(r.layer + 1));
}

MuTriple MediumProfile::mu_at(const Point& x, double tie_tol) const {
  MuTriple t;
  t.mu0 = mu0_at(x, tie_tol);
  t.mu1 = perturbation_ ? perturbation_->value(x, partition_->dimension()) : 0.0;
  t.mu = t.mu0 + t.mu1;
  require(t.mu > 0, ErrorCode::NonPositiveMedium,
          "mu = mu0 + mu1 is not positive at a queried point");
  return t;
}

CertificateReport validate_medium(const MediumProfile& m, const Grid& grid) {
  CertificateReport rep;
  const double tie = grid.h() / 2;
  const int dim = grid.dim();

  CertificateEntry bounds;
  bounds.condition = "mu_bounds";
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;

  CertificateEntry env;
  env.condition = "decay_envelope";
  env.pass = true;
  double achieved = 0;

  CertificateEntry genv;
  genv.condition = "gradient_envelope";
  genv.pass = true;
  double gachieved = 0;

  const bool perturbed = m.perturbed();
  const Perturbation* pert = perturbed ? &*m.perturbation() : nullptr;
  const bool longrange =
      perturbed && pert->kind == PerturbationKind::LongRange;

  for (Index i = 0; i < grid.size(); ++i) {
    Point x = grid.node(i);
    double r = norm2(x, dim);
    double mu0 = m.mu0_at(x, tie);
    double mu1 = perturbed ? pert->value(x, dim) : 0.0;
    double mu = mu0 + mu1;
    if (mu < lo) lo = mu;
    if (mu > hi) hi = mu;

    if (perturbed) {
      double decay = longrange ? std::pow(1.0 + r, pert->epsilon)
                               : std::pow(1.0 + r, 1.0 + pert->epsilon);
      double c = std::abs(mu1) * decay;
      if (c > achieved) {
        achieved = c;
        if (c > pert->c1 * (1.0 + 1e-12) && !env.witness) env.witness = x;
      }
      if (longrange) {
        Point g = pert->gradient(x, dim);
        double gc = norm2(g, dim) * std::pow(1.0 + r, 1.0 + pert->epsilon);
        if (gc > gachieved) {
          gachieved = gc;
          if (gc > pert->c1 * (1.0 + 1e-9) && !genv.witness) genv.witness = x;
        }
      }
    }
  }

  bounds.constants["m0_tilde"] = lo;
  bounds.constants["M0_tilde"] = hi;
  bounds.pass = lo > 0 && std::isfinite(hi);
  rep.add(std::move(bounds));

  if (perturbed) {
    env.constants["achieved_c1"] = achieved;
    env.constants["declared_c1"] = pert->c1;
    env.pass = achieved <= pert->c1 * (1.0 + 1e-12);
    rep.add(std::move(env));
    if (longrange) {
      genv.constants["achieved_c1"] = gachieved;
      genv.constants["declared_c1"] = pert->c1;
      genv.pass = gachieved <= pert->c1 * (1.0 + 1e-9);
      rep.add(std::move(genv));
    }
  } else {
    env.constants["achieved_c1"] = 0.0;
    env.pass = true;
    rep.add(std::move(env));
  }
  return rep;
}

CertificateReport check_absence_conditions(const MediumProfile& m,
                                           double lambda0, const Grid& grid,
                                           AbsenceCondition which) {
  CertificateReport rep;
  const double tie = grid.h() / 2;
  const int dim = grid.dim();
  const Perturbation* pert = m.perturbed() ? &*m.perturbation() : nullptr;

  if (which != AbsenceCondition::RadialOnly) {
    CertificateEntry e;
    e.condition = "interval_margin";
    e.pass = true;
    double worst = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < grid.size(); ++i) {
      Point x = grid.node(i);
      double r = norm2(x, dim);
      double mu0 = m.mu0_at(x, tie);
      double mu1 = pert ? pert->value(x, dim) : 0.0;
      double margin = (mu0 + mu1) - dim * mu1 - lambda0 * (r * std::abs(mu1)) *
                                                    (r * std::abs(mu1));
      if (margin < worst) {
        worst = margin;
        if (margin < 0) e.witness = x;  // witness tracks the minimizer
      }
    }
    e.pass = worst >= 0;
    e.constants["min_margin"] = worst;
    e.constants["lambda0"] = lambda0;
    e.detail = e.pass ? "no point spectrum in [0, lambda0]" : "";
    rep.add(std::move(e));
  }

  if (which != AbsenceCondition::IntervalOnly) {
    if (pert)
      require(pert->differentiable(), ErrorCode::NotDifferentiable,
              "radial condition requires a differentiable perturbation");
    CertificateEntry e;
    e.condition = "radial_derivative_positivity";
    e.pass = true;
    double worst = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < grid.size(); ++i) {
      Point x = grid.node(i);
      double r = norm2(x, dim);
      double mu0 = m.mu0_at(x, tie);
      double mu1 = pert ? pert->value(x, dim) : 0.0;
      double dmu1 = pert ? pert->radial_derivative(x, dim) : 0.0;
      double margin = (mu0 + mu1) + r * dmu1;
      if (margin < worst) {
        worst = margin;
        if (margin < 0) e.witness = x;
      }
    }
    e.pass = worst >= 0;
    e.constants["min_margin"] = worst;
    e.detail = e.pass ? "empty point spectrum" : "";
    rep.add(std::move(e));
  }
  return rep;
}

namespace {

// Exact dyadic-rational comparisons; every finite double is n * 2^e.
struct Dyadic {
  __int128 num = 0;
  int exp = 0;
};

Dyadic dyadic_from(double d) {
  int e;
  double mant = std::frexp(d, &e);  // d = mant * 2^e, |mant| in [0.5, 1)
  long long scaled = static_cast<long long>(std::ldexp(mant, 53));
  return Dyadic{static_cast<__int128>(scaled), e - 53};
}

// floor(a / b) for positive dyadics; exponent gaps stay small under the
// epsilon/delta preconditions, so the shifted numerators fit in 128 bits.
long long dyadic_floor_div(Dyadic a, Dyadic b) {
  __int128 num = a.num, den = b.num;
  int gap = a.exp - b.exp;
  if (gap >= 0)
    num <<= gap;
  else
    den <<= -gap;
  return static_cast<long long>(num / den);
}

}  // namespace

BootstrapExponents bootstrap_exponents(double delta, double epsilon,
                                       PerturbationKind kind) {
  require(epsilon > 1e-9 && epsilon < 0.5, ErrorCode::DeltaOutOfRange,
          "epsilon must lie in (0, 1/2)");
  double hi = (kind == PerturbationKind::ShortRange) ? 0.5 + epsilon
                                                     : 0.5 * (1.0 + epsilon);
  require(delta > 0.5 && delta < hi, ErrorCode::DeltaOutOfRange,
          "delta outside the admissible range for this perturbation class");

  BootstrapExponents out;
  out.delta = delta;
  out.epsilon = epsilon;
  out.eps_step =
      (kind == PerturbationKind::ShortRange) ? epsilon : epsilon / 2.0;
  out.delta_admissible_hi = 0.5 + epsilon / 4.0;

  // j0 = min { j >= 1 : j * step > delta } = floor(delta / step) + 1, decided
  // exactly on the dyadic representations so that ties (j * step == delta)
  // round up rather than depending on floating-point noise.
  Dyadic d = dyadic_from(delta);
  Dyadic s = dyadic_from(epsilon);
  if (kind == PerturbationKind::LongRange) s.exp -= 1;  // exact halving
  long long q = dyadic_floor_div(d, s);
  require(q < 1000000, ErrorCode::Internal, "bootstrap chain too long");
  out.j0 = static_cast<int>(q) + 1;
  out.delta0 = -delta + out.j0 * out.eps_step;
  return out;
}

double spectral_lower_bound(double c1, int j0, double C_measured) {
  return std::pow(c1, -2.0) * std::pow(C_measured, -2.0 / j0);
}

}  // namespace laplab
