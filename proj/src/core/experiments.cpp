#include "core/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "core/fd_operator.hpp"
#include "core/parallel.hpp"

namespace laplab {

GridFunction build_source(const Grid& grid, const SourceSpec& spec,
                          const MediumProfile* medium) {
  GridFunction f(grid);
  const int N = grid.dim();
  switch (spec.kind) {
    case SourceSpec::Kind::GaussianBump:
      for (Index i = 0; i < grid.size(); ++i) {
        Point x = grid.node(i);
        double d2 = 0;
        for (int d = 0; d < N; ++d)
          d2 += (x[d] - spec.center[d]) * (x[d] - spec.center[d]);
        if (d2 > spec.r_cut * spec.r_cut) continue;
        f[i] = std::exp(-d2 / (spec.width * spec.width));
      }
      break;
    case SourceSpec::Kind::BallIndicator:
      for (Index i = 0; i < grid.size(); ++i) {
        Point x = grid.node(i);
        double d2 = 0;
        for (int d = 0; d < N; ++d)
          d2 += (x[d] - spec.center[d]) * (x[d] - spec.center[d]);
        if (d2 < spec.radius * spec.radius) f[i] = 1.0;
      }
      break;
    case SourceSpec::Kind::PointMass: {
      require(N == 1, ErrorCode::Config,
              "point-mass sources are supported in the 1-D mode only");
      double s = (spec.y + grid.rmax()) / grid.h();
      int node = static_cast<int>(std::llround(s));
      require(std::abs(s - node) < 1e-9, ErrorCode::Config,
              "point-mass location must coincide with a grid node");
      double mu0 = medium ? medium->mu0_at(Point{spec.y, 0, 0}, grid.h() / 2)
                          : 1.0;
      f[grid.encode(node, 0, 0)] = 1.0 / (grid.h() * mu0);
      break;
    }
  }
  // walls are pinned by the closure
  for (Index i = 0; i < grid.size(); ++i)
    if (grid.is_wall(i) && grid.dim() > 1) f[i] = 0;
  return f;
}

const char* sweep_verdict_name(SweepVerdict v) {
  switch (v) {
    case SweepVerdict::LAPConverged: return "LAPConverged";
    case SweepVerdict::EigenvalueSuspected: return "EigenvalueSuspected";
    case SweepVerdict::Inconclusive: return "Inconclusive";
  }
  return "?";
}

namespace {

double median_of(std::vector<double> v) {
  if (v.empty()) return 0;
  std::sort(v.begin(), v.end());
  std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double loglog_slope_tail(const std::vector<std::pair<double, double>>& pts,
                         int tail) {
  // least-squares slope of log y against log x over the last `tail` points
  int n = static_cast<int>(pts.size());
  int lo = std::max(0, n - tail);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (int i = lo; i < n; ++i) {
    if (pts[static_cast<std::size_t>(i)].first <= 0 ||
        pts[static_cast<std::size_t>(i)].second <= 0)
      continue;
    double lx = std::log(pts[static_cast<std::size_t>(i)].first);
    double ly = std::log(pts[static_cast<std::size_t>(i)].second);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++m;
  }
  if (m < 2) return 0;
  double den = m * sxx - sx * sx;
  return den != 0 ? (m * sxy - sx * sy) / den : 0;
}

}  // namespace

SweepReport lap_sweep(const MediumProfile& medium, const Grid& grid,
                      const std::vector<double>& lambdas, double eta0,
                      double factor, int count, Side side,
                      const SourceSpec& f_spec, double delta,
                      const SweepOptions& opts) {
  require(!lambdas.empty(), ErrorCode::Precondition, "empty lambda list");
  for (double l : lambdas)
    require(l > 0, ErrorCode::Precondition, "lambda must be positive");
  require(eta0 > 0 && factor > 1 && count >= 1, ErrorCode::Precondition,
          "eta ladder must be decreasing from a positive start");
  const bool perturbed = medium.perturbed();
  if (perturbed) {
    double hi = 0.5 + medium.perturbation()->epsilon / 4.0;
    require(delta > 0.5 && delta <= hi + 1e-15, ErrorCode::DeltaOutOfRange,
            "perturbed sweeps require delta in (1/2, 1/2 + eps/4]");
  } else {
    require(delta > 0.5 && delta <= 1.0, ErrorCode::DeltaOutOfRange,
            "delta must lie in (1/2, 1]");
  }

  const int sgn = side == Side::Minus ? -1 : +1;
  const int N = grid.dim();

  SweepReport rep;
  rep.dim = N;
  rep.rmax = grid.rmax();
  rep.h = grid.h();
  rep.delta = delta;
  rep.eta0 = eta0;
  rep.factor = factor;
  rep.count = count;
  rep.side = sgn;
  rep.perturbed = perturbed;
  rep.sponge_on = grid.sponge().enabled();

  GridFunction f = build_source(grid, f_spec, &medium);
  const double f_norm = weighted_norm(f, delta);

  std::vector<std::vector<SweepRow>> blocks(lambdas.size());
  std::vector<SweepVerdictRow> verdicts(lambdas.size());

  parallel_for(static_cast<int>(lambdas.size()), [&](int li) {
    double lambda = lambdas[static_cast<std::size_t>(li)];
    std::vector<SweepRow>& rows = blocks[static_cast<std::size_t>(li)];
    GridFunction u_prev;
    std::vector<std::pair<double, double>> u_norm_curve;

    for (int kstep = 0; kstep < count; ++kstep) {
      double eta = eta0 * std::pow(factor, -kstep);
      Complex z(lambda, sgn * eta);
      SweepRow row;
      row.lambda = lambda;
      row.eta = eta;
      row.side = sgn;
      row.f_norm_delta = f_norm;
      try {
        AssembleOptions ao;
        ao.side = side;
        if (grid.dim() == 1) ao.bc = BcKind::Robin1D;  // 1-D closes exactly
        DiscreteOperator op = assemble(grid, medium, z, ao);
        SolveOptions so = opts.solver;
        if (u_prev.grid) so.initial_guess = &u_prev;
        auto [u, stats] = solve(op, f, so);
        row.solver_ok = stats.converged;
        row.iterations = stats.iterations;
        row.residual = stats.residual;
        if (!stats.converged) row.error = "NoConvergence";

        row.u_norm_neg_delta = weighted_norm(u, -delta);
        WaveNumberField kf = wavenumber(z, medium, grid);
        RadiationField rad = radiation_field(u, kf, sgn);
        row.du_norm_w = weighted_norm(rad.Du, delta - 1);
        row.du_norm_star = star_norm(rad.Du, delta - 1);
        row.dru_norm_w = weighted_norm(rad.Dru, delta - 1);
        row.dru_norm_star = star_norm(rad.Dru, delta - 1);
        if (f_norm > 0) {
          row.ratio_full = row.du_norm_w / f_norm;
          row.ratio_dr = row.dru_norm_w / f_norm;
          row.ratio_star =
              row.du_norm_star / (f_norm + row.u_norm_neg_delta);
        }

        // exterior decay, normalized by (1+s)^{-(2 delta - 1)} |f|_delta^2
        VectorGridFunction grad = discrete_gradient(u);
        for (int si = 0; si < 3; ++si) {
          double s = rep.exterior_s[static_cast<std::size_t>(si)];
          double acc = 0;
          for (Index i = 0; i < grid.size(); ++i) {
            double r = grid.radius(i);
            if (r <= s) continue;
            double g2 = 0;
            for (int d = 0; d < N; ++d)
              g2 += std::norm(grad.comp[d][static_cast<std::size_t>(i)]);
            double k2 = std::norm(kf.k[static_cast<std::size_t>(i)]);
            acc += std::pow(1.0 + r, -2 * delta) *
                   (g2 + k2 * std::norm(u[i]));
          }
          double vol = 1;
          for (int d = 0; d < N; ++d) vol *= grid.h();
          acc *= vol;
          row.ext_decay[si] =
              f_norm > 0
                  ? acc * std::pow(1.0 + s, 2 * delta - 1) / (f_norm * f_norm)
                  : 0.0;
        }

        if (u_prev.grid) {
          GridFunction diff(grid);
          for (Index i = 0; i < grid.size(); ++i) diff[i] = u[i] - u_prev[i];
          row.cauchy_diff = weighted_norm(diff, -delta);
        }

        double unx = norm_x(u, medium);
        row.eta_u2_x = eta * unx * unx;
        row.im_fu_x = -sgn * inner_x(f, u, medium).imag();

        if (opts.compute_identity && N >= 2) {
          double r_in = std::max(2 * grid.h(), 1.0);
          double r_out = grid.rmax() - std::max(grid.sponge().width, grid.h());
          if (r_out - r_in >= 4 * grid.h()) {
            RadialWeight xi = RadialWeight::power(N, delta);
            IdentityReport ir =
                identity_residual(u, &f, z, medium, xi, r_in, r_out);
            row.identity_residual = ir.residual;
          }
        }

        u_norm_curve.emplace_back(eta, row.u_norm_neg_delta);
        u_prev = std::move(u);
      } catch (const Error& err) {
        row.solver_ok = false;
        row.error = std::string(error_code_name(err.code())) + ": " + err.what();
      }
      rows.push_back(std::move(row));
    }

    // Verdict: geometric Cauchy decay plus a stable radiation ratio.
    SweepVerdictRow v;
    v.lambda = lambda;
    v.side = sgn;
    std::vector<double> diffs, ratios;
    for (const auto& r : rows) {
      if (r.cauchy_diff >= 0) diffs.push_back(r.cauchy_diff);
      double main_ratio =
          (N == 2 || perturbed) ? r.ratio_star : r.ratio_full;
      if (r.solver_ok) ratios.push_back(main_ratio);
    }
    double worst = std::numeric_limits<double>::infinity();
    if (diffs.size() >= 4) {
      worst = 0;
      for (std::size_t i = diffs.size() - 3; i < diffs.size(); ++i) {
        double prev = diffs[i - 1];
        worst = std::max(worst, prev > 0 ? diffs[i] / prev
                                         : (diffs[i] > 0 ? 1e30 : 0.0));
      }
    }
    v.worst_cauchy_ratio = worst;
    double med = median_of(ratios);
    double rmaxv = ratios.empty() ? 0 : *std::max_element(ratios.begin(), ratios.end());
    double rminv = ratios.empty() ? 0 : *std::min_element(ratios.begin(), ratios.end());
    v.ratio_spread = med > 0 ? rmaxv / med : 0;
    bool band_ok = med > 0 && rmaxv <= opts.ratio_band * med &&
                   rminv >= med / opts.ratio_band;
    v.u_growth_slope = loglog_slope_tail(u_norm_curve, 3);

    bool all_ok = !rows.empty();
    for (const auto& r : rows) all_ok = all_ok && r.solver_ok;

    if (all_ok && worst <= opts.cauchy_ratio_threshold && band_ok)
      v.verdict = SweepVerdict::LAPConverged;
    else if (v.u_growth_slope <= -0.8)
      v.verdict = SweepVerdict::EigenvalueSuspected;
    else
      v.verdict = SweepVerdict::Inconclusive;
    verdicts[static_cast<std::size_t>(li)] = v;
  });

  for (auto& b : blocks)
    for (auto& r : b) rep.rows.push_back(std::move(r));
  rep.verdicts = std::move(verdicts);
  return rep;
}

std::vector<BoundRow> radiation_bound_measure(const SweepReport& report) {
  require(!report.rows.empty(), ErrorCode::Precondition, "empty sweep report");
  std::vector<BoundRow> out;
  std::vector<std::pair<double, int>> keys;
  for (const auto& r : report.rows) {
    std::pair<double, int> key{r.lambda, r.side};
    if (std::find(keys.begin(), keys.end(), key) == keys.end())
      keys.push_back(key);
  }
  for (auto [lambda, side] : keys) {
    BoundRow b;
    b.lambda = lambda;
    b.side = side;
    std::vector<double> fulls;
    for (const auto& r : report.rows) {
      if (r.lambda != lambda || r.side != side || !r.solver_ok) continue;
      b.c_full = std::max(b.c_full, r.ratio_full);
      b.c_star = std::max(b.c_star, r.ratio_star);
      b.c_dr = std::max(b.c_dr, r.ratio_dr);
      fulls.push_back(r.ratio_full);
    }
    double med = median_of(fulls);
    b.spread_full = med > 0 ? b.c_full / med : 0;
    b.unbounded_flag = b.spread_full > 10.0;
    out.push_back(b);
  }
  return out;
}

UniquenessReport uniqueness_probe(const MediumProfile& medium, const Grid& grid,
                                  double lambda, const GridFunction& candidate,
                                  const UniquenessOptions& opts) {
  require(candidate.grid == &grid, ErrorCode::ShapeMismatch, "grid mismatch");
  UniquenessReport rep;

  CertificateReport geo = validate_partition(
      medium.partition(), medium.nus(),
      PartitionCheckOptions{grid.rmax(), 1000, 15});
  const CertificateEntry* sign = geo.find("interface_sign");
  rep.sign_condition_pass = sign && sign->pass;

  double u_norm = norm_l2(candidate);
  if (u_norm == 0) {
    rep.verdict = rep.sign_condition_pass
                      ? UniquenessVerdict::TrivialByUniqueness
                      : UniquenessVerdict::NoConclusion;
    return rep;
  }

  // Residual of the homogeneous equation away from the origin and the walls.
  GridFunction res =
      apply_reduced_wave(grid, medium, Complex(lambda, 0), candidate, true);
  double mask_r = std::max(1.0, 4 * grid.h());
  double racc = 0, uacc = 0;
  for (Index i = 0; i < grid.size(); ++i) {
    double r = grid.radius(i);
    if (r <= mask_r || grid.is_wall(i)) continue;
    racc += std::norm(res[i]);
    uacc += std::norm(candidate[i]);
  }
  rep.residual_ratio =
      uacc > 0 ? std::sqrt(racc) / ((1.0 + lambda) * std::sqrt(uacc)) : 0;
  require(rep.residual_ratio <= opts.hom_tol, ErrorCode::NotHomogeneous,
          "candidate does not solve the homogeneous equation");

  std::vector<double> radii = opts.radii;
  if (radii.empty()) {
    double hi = grid.rmax() - grid.sponge().width - grid.h();
    double lo = grid.rmax() / 3;
    for (int i = 0; i < 4; ++i)
      radii.push_back(lo + (hi - lo) * i / 3.0);
  }
  rep.flux = flux_probe(candidate, radii);

  double first = rep.flux.points.front().second;
  double last = rep.flux.points.back().second;
  double scale = u_norm * u_norm;
  bool to_zero = first <= 1e-12 * scale
                     ? last <= 1e-12 * scale
                     : last <= opts.flux_drop * first;
  rep.verdict = (to_zero && rep.sign_condition_pass)
                    ? UniquenessVerdict::TrivialByUniqueness
                    : UniquenessVerdict::NoConclusion;
  return rep;
}

ScanReport eig_scan(const MediumProfile& medium, const Grid& grid,
                    const std::vector<double>& lambda_grid,
                    const ScanOptions& opts) {
  require(!lambda_grid.empty(), ErrorCode::Precondition, "empty lambda grid");
  for (double l : lambda_grid)
    require(l > 0, ErrorCode::Precondition, "lambda must be positive");
  require(!grid.sponge().enabled(), ErrorCode::Precondition,
          "eigenvalue scans require the sponge to be off");

  ScanReport rep;
  rep.lambda0 = opts.lambda0;

  // Absence certificates; tables cannot be differentiated, so degrade to the
  // interval condition alone.
  try {
    rep.certificates = check_absence_conditions(
        medium, opts.lambda0 > 0 ? opts.lambda0 : 0.0, grid,
        AbsenceCondition::Both);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NotDifferentiable) throw;
    rep.certificates = check_absence_conditions(
        medium, opts.lambda0 > 0 ? opts.lambda0 : 0.0, grid,
        AbsenceCondition::IntervalOnly);
    rep.note = "radial condition skipped: perturbation not differentiable";
  }
  if (const CertificateEntry* e = rep.certificates.find("interval_margin"))
    rep.interval_cert_pass = e->pass && opts.lambda0 > 0;
  if (const CertificateEntry* e =
          rep.certificates.find("radial_derivative_positivity"))
    rep.radial_cert_pass = e->pass;

  std::vector<GridFunction> samples =
      random_probe_fields(grid, medium, opts.num_samples, opts.seed);

  rep.curves.resize(lambda_grid.size());
  parallel_for(static_cast<int>(lambda_grid.size()), [&](int i) {
    rep.curves[static_cast<std::size_t>(i)] =
        eig_probe(grid, medium, lambda_grid[static_cast<std::size_t>(i)],
                  samples, opts.eta_list, opts.solver, opts.plateau_tol);
  });

  for (const auto& c : rep.curves) {
    if (!c.eigenvalue_likely) continue;
    rep.suspected.emplace_back(c.lambda, c.plateau);
    bool certified = rep.radial_cert_pass ||
                     (rep.interval_cert_pass && c.lambda <= rep.lambda0);
    if (certified) rep.contradictions.push_back(c.lambda);
  }
  if (rep.radial_cert_pass && rep.note.empty())
    rep.note = "certificate: empty point spectrum (radial condition holds)";
  else if (rep.interval_cert_pass && rep.note.empty())
    rep.note = "certificate: no point spectrum in [0, lambda0]";
  return rep;
}

ChainReport bootstrap_check(double delta, double epsilon, PerturbationKind kind,
                            double lambda, double c1,
                            const std::vector<double>& norm_samples) {
  ChainReport rep;
  rep.exponents = bootstrap_exponents(delta, epsilon, kind);
  rep.lambda = lambda;
  rep.c1 = c1;
  rep.arithmetic_pass = true;
  const double step = rep.exponents.eps_step;
  for (int j = 0; j < rep.exponents.j0; ++j) {
    ChainStep s;
    s.j = j;
    s.weight_from = -delta + j * step;
    s.weight_to = -delta + (j + 1) * step;
    s.window_exponent = 1.0 - delta + (j + 1) * step;
    s.window_ok = s.window_exponent > 0.5 && s.window_exponent < 1.5;
    rep.arithmetic_pass = rep.arithmetic_pass && s.window_ok;
    if (static_cast<int>(norm_samples.size()) > j + 1 &&
        norm_samples[static_cast<std::size_t>(j)] > 0)
      s.ratio = norm_samples[static_cast<std::size_t>(j) + 1] /
                norm_samples[static_cast<std::size_t>(j)];
    rep.steps.push_back(s);
  }
  return rep;
}

}  // namespace laplab
