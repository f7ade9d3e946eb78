#include "core/weighted.hpp"

#include <algorithm>
#include <cmath>

#include "core/fd_operator.hpp"

namespace laplab {

namespace {

double cell_measure(const Grid& g) {
  double w = 1;
  for (int d = 0; d < g.dim(); ++d) w *= g.h();
  return w;
}

}  // namespace

double weighted_norm(const GridFunction& u, double t, Region region) {
  const Grid& g = *u.grid;
  double acc = 0;
  for (Index i = 0; i < g.size(); ++i) {
    double r = g.radius(i);
    if (!region.contains(r)) continue;
    acc += std::pow(1.0 + r, 2 * t) * std::norm(u[i]);
  }
  return std::sqrt(acc * cell_measure(g));
}

double star_norm(const GridFunction& u, double t) {
  const Grid& g = *u.grid;
  double acc = 0;
  for (Index i = 0; i < g.size(); ++i) {
    double r = g.radius(i);
    double w = r < 1.0 ? r : std::pow(1.0 + r, 2 * t);
    acc += w * std::norm(u[i]);
  }
  return std::sqrt(acc * cell_measure(g));
}

double weighted_norm(const VectorGridFunction& u, double t, Region region) {
  const Grid& g = *u.grid;
  double acc = 0;
  for (Index i = 0; i < g.size(); ++i) {
    if (!u.mask[static_cast<std::size_t>(i)]) continue;
    double r = g.radius(i);
    if (!region.contains(r)) continue;
    double s = 0;
    for (int d = 0; d < g.dim(); ++d)
      s += std::norm(u.comp[d][static_cast<std::size_t>(i)]);
    acc += std::pow(1.0 + r, 2 * t) * s;
  }
  return std::sqrt(acc * cell_measure(g));
}

double star_norm(const VectorGridFunction& u, double t) {
  const Grid& g = *u.grid;
  double acc = 0;
  for (Index i = 0; i < g.size(); ++i) {
    if (!u.mask[static_cast<std::size_t>(i)]) continue;
    double r = g.radius(i);
    double w = r < 1.0 ? r : std::pow(1.0 + r, 2 * t);
    double s = 0;
    for (int d = 0; d < g.dim(); ++d)
      s += std::norm(u.comp[d][static_cast<std::size_t>(i)]);
    acc += w * s;
  }
  return std::sqrt(acc * cell_measure(g));
}

VectorGridFunction discrete_gradient(const GridFunction& u) {
  const Grid& g = *u.grid;
  VectorGridFunction out(g);
  const int mpa = g.nodes_per_axis();
  const double inv2h = 1.0 / (2 * g.h());
  const double invh = 1.0 / g.h();
  for (Index i = 0; i < g.size(); ++i) {
    int ijk[3];
    g.decode(i, ijk);
    for (int d = 0; d < g.dim(); ++d) {
      int nb[3] = {ijk[0], ijk[1], ijk[2]};
      Complex val;
      if (ijk[d] == 0) {
        nb[d] = 1;
        val = (u[g.encode(nb[0], nb[1], nb[2])] - u[i]) * invh;
      } else if (ijk[d] == mpa - 1) {
        nb[d] = mpa - 2;
        val = (u[i] - u[g.encode(nb[0], nb[1], nb[2])]) * invh;
      } else {
        nb[d] = ijk[d] + 1;
        Complex up = u[g.encode(nb[0], nb[1], nb[2])];
        nb[d] = ijk[d] - 1;
        Complex dn = u[g.encode(nb[0], nb[1], nb[2])];
        val = (up - dn) * inv2h;
      }
      out.comp[d][static_cast<std::size_t>(i)] = val;
    }
  }
  return out;
}

double sobolev_norm(const GridFunction& u, int order, double t) {
  require(order == 1 || order == 2, ErrorCode::Config,
          "Sobolev order must be 1 or 2");
  const Grid& g = *u.grid;
  const int N = g.dim();
  VectorGridFunction grad = discrete_gradient(u);
  double acc = 0;
  const double inv_h2 = 1.0 / (g.h() * g.h());
  const double inv_4h2 = 0.25 * inv_h2;

  for (Index i = 0; i < g.size(); ++i) {
    if (order == 2 && g.is_wall(i)) continue;
    double w = std::pow(1.0 + g.radius(i), 2 * t);
    double s = std::norm(u[i]);
    for (int d = 0; d < N; ++d)
      s += std::norm(grad.comp[d][static_cast<std::size_t>(i)]);
    if (order == 2) {
      int ijk[3];
      g.decode(i, ijk);
      for (int d = 0; d < N; ++d) {
        int nb[3] = {ijk[0], ijk[1], ijk[2]};
        nb[d] = ijk[d] + 1;
        Complex up = u[g.encode(nb[0], nb[1], nb[2])];
        nb[d] = ijk[d] - 1;
        Complex dn = u[g.encode(nb[0], nb[1], nb[2])];
        s += std::norm((up - 2.0 * u[i] + dn) * inv_h2);
      }
      for (int d = 0; d < N; ++d)
        for (int e = d + 1; e < N; ++e) {
          int nb[3];
          auto at = [&](int sd, int se) {
            nb[0] = ijk[0];
            nb[1] = ijk[1];
            nb[2] = ijk[2];
            nb[d] += sd;
            nb[e] += se;
            return u[g.encode(nb[0], nb[1], nb[2])];
          };
          Complex mixed =
              (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) * inv_4h2;
          s += std::norm(mixed);
        }
    }
    acc += w * s;
  }
  return std::sqrt(acc * cell_measure(g));
}

Complex inner_l2(const GridFunction& u, const GridFunction& v) {
  require(u.grid == v.grid, ErrorCode::ShapeMismatch, "grid mismatch");
  Complex acc = 0;
  for (Index i = 0; i < u.size(); ++i) acc += u[i] * std::conj(v[i]);
  return acc * cell_measure(*u.grid);
}

double norm_l2(const GridFunction& u) {
  double acc = 0;
  for (Index i = 0; i < u.size(); ++i) acc += std::norm(u[i]);
  return std::sqrt(acc * cell_measure(*u.grid));
}

Complex inner_x(const GridFunction& u, const GridFunction& v,
                const MediumProfile& m) {
  require(u.grid == v.grid, ErrorCode::ShapeMismatch, "grid mismatch");
  const Grid& g = *u.grid;
  const double tie = g.h() / 2;
  Complex acc = 0;
  for (Index i = 0; i < g.size(); ++i)
    acc += m.mu_at(g.node(i), tie).mu * u[i] * std::conj(v[i]);
  return acc * cell_measure(g);
}

double norm_x(const GridFunction& u, const MediumProfile& m) {
  return std::sqrt(inner_x(u, u, m).real());
}

Complex branch_sqrt(Complex w) {
  Complex k = std::sqrt(w);
  if (k.imag() < 0 || (k.imag() == 0 && k.real() < 0)) k = -k;
  return k;
}

double c_dim(int N) { return (N - 1) * (N - 3) / 4.0; }

WaveNumberField wavenumber(Complex z, const MediumProfile& m, const Grid& g) {
  WaveNumberField f;
  f.grid = &g;
  f.z = z;
  const double tie = g.h() / 2;
  const std::size_t n = static_cast<std::size_t>(g.size());
  f.k.resize(n);
  f.a.resize(n);
  f.b.resize(n);
  for (Index i = 0; i < g.size(); ++i) {
    Complex k = branch_sqrt(z * m.mu0_at(g.node(i), tie));
    f.k[static_cast<std::size_t>(i)] = k;
    f.a[static_cast<std::size_t>(i)] = k.real();
    f.b[static_cast<std::size_t>(i)] = k.imag();
    if (k.real() > f.max_a) f.max_a = k.real();
  }
  return f;
}

RadiationField radiation_field(const GridFunction& u,
                               const WaveNumberField& kf, int sign) {
  const Grid& g = *u.grid;
  require(kf.grid == &g, ErrorCode::ShapeMismatch, "wavenumber grid mismatch");
  RadiationField out{VectorGridFunction(g), GridFunction(g)};
  VectorGridFunction grad = discrete_gradient(u);
  const int N = g.dim();
  const double rmin = g.h();

  for (Index i = 0; i < g.size(); ++i) {
    Point x = g.node(i);
    double r = norm2(x, N);
    std::size_t ii = static_cast<std::size_t>(i);
    if (r < rmin) {
      out.Du.mask[ii] = 0;
      continue;
    }
    Complex ik = Complex(0, sign) * kf.k[ii];
    Complex dru = 0;
    for (int d = 0; d < N; ++d) {
      double xt = x[d] / r;
      Complex val =
          grad.comp[d][ii] + ((N - 1) / (2 * r)) * xt * u[i] - ik * xt * u[i];
      out.Du.comp[d][ii] = val;
      dru += val * xt;
    }
    out.Dru[i] = dru;
  }
  return out;
}

RadialWeight RadialWeight::power(int N, double delta) {
  require(delta > 0.5 && delta < 1.5, ErrorCode::DeltaOutOfRange,
          "weight exponent requires delta in (1/2, 3/2)");
  RadialWeight w;
  w.p_ = 2 * delta - 1;
  w.r_cap_ = 0;
  if (N >= 3) {
    w.kind_ = RadialWeightKind::PowerN3;
    w.amp_ = std::pow(2.0, -w.p_);
  } else {
    w.kind_ = RadialWeightKind::PowerN2;
    w.amp_ = std::pow(2.0, -(w.p_ + 1));
  }
  return w;
}

RadialWeight RadialWeight::capped(int N, double beta, double r_cap) {
  require(beta > 0 && beta < 2, ErrorCode::DeltaOutOfRange,
          "capped weight requires beta in (0, 2)");
  require(r_cap > 1, ErrorCode::Config, "r_cap must exceed 1");
  RadialWeight w;
  w.p_ = beta;
  w.r_cap_ = r_cap;
  if (N >= 3) {
    w.kind_ = RadialWeightKind::CappedPowerN3;
    w.amp_ = std::pow(2.0, -beta);
  } else {
    w.kind_ = RadialWeightKind::CappedPowerN2;
    w.amp_ = std::pow(2.0, -beta - 1);
  }
  return w;
}

double RadialWeight::value(double r) const {
  bool planar2 = kind_ == RadialWeightKind::PowerN2 ||
                 kind_ == RadialWeightKind::CappedPowerN2;
  if (r <= 1.0) return planar2 ? 0.5 * r * r : r;
  bool capped = kind_ == RadialWeightKind::CappedPowerN3 ||
                kind_ == RadialWeightKind::CappedPowerN2;
  double rr = (capped && r > r_cap_) ? r_cap_ : r;
  return amp_ * std::pow(1.0 + rr, p_);
}

double RadialWeight::slope(double r) const {
  bool planar2 = kind_ == RadialWeightKind::PowerN2 ||
                 kind_ == RadialWeightKind::CappedPowerN2;
  if (r <= 1.0) return planar2 ? r : 1.0;
  bool capped = kind_ == RadialWeightKind::CappedPowerN3 ||
                kind_ == RadialWeightKind::CappedPowerN2;
  if (capped && r > r_cap_) return 0.0;
  return amp_ * p_ * std::pow(1.0 + r, p_ - 1.0);
}

Complex interpolate(const GridFunction& u, const Point& x) {
  const Grid& g = *u.grid;
  const int N = g.dim();
  const int mpa = g.nodes_per_axis();
  int base[3] = {0, 0, 0};
  double frac[3] = {0, 0, 0};
  for (int d = 0; d < N; ++d) {
    double s = (x[d] + g.rmax()) / g.h();
    int c = static_cast<int>(std::floor(s));
    c = std::clamp(c, 0, mpa - 2);
    base[d] = c;
    frac[d] = std::clamp(s - c, 0.0, 1.0);
  }
  Complex acc = 0;
  int corners = 1 << N;
  for (int c = 0; c < corners; ++c) {
    double w = 1;
    int idx[3] = {base[0], base[1], base[2]};
    for (int d = 0; d < N; ++d) {
      if (c & (1 << d)) {
        idx[d] += 1;
        w *= frac[d];
      } else {
        w *= 1.0 - frac[d];
      }
    }
    acc += w * u[g.encode(idx[0], idx[1], idx[2])];
  }
  return acc;
}

IdentityReport identity_residual(const GridFunction& u,
                                 const GridFunction* f_given, Complex z,
                                 const MediumProfile& m, const RadialWeight& xi,
                                 double r_inner, double r_outer,
                                 const IdentityOptions& opts) {
  const Grid& g = *u.grid;
  const int N = g.dim();
  const double h = g.h();
  require(r_inner >= 2 * h, ErrorCode::Precondition,
          "inner shell radius must be at least 2h");
  require(r_outer - r_inner >= 4 * h, ErrorCode::ShellTooThin,
          "shell thinner than 4h");
  require(r_outer <= g.rmax() - h, ErrorCode::Precondition,
          "outer sphere must fit inside the box");

  IdentityReport rep;
  rep.z = z;
  rep.r_inner = r_inner;
  rep.r_outer = r_outer;

  GridFunction f = apply_reduced_wave(g, m, z, u, /*mu0_only=*/true);
  if (f_given) {
    double acc = 0;
    for (Index i = 0; i < g.size(); ++i) acc += std::norm((*f_given)[i] - f[i]);
    rep.f_mismatch = std::sqrt(acc * cell_measure(g));
  }

  WaveNumberField kf = wavenumber(z, m, g);
  RadiationField rad = radiation_field(u, kf, +1);

  const double cN = c_dim(N);
  const double vol_w = cell_measure(g);
  const double surf_w = vol_w / h;
  const double tie = h / 2;

  auto alpha_of = [&](double mu0) {
    return opts.alpha == AlphaMode::InvSqrtMu0 ? 1.0 / std::sqrt(mu0) : 1.0;
  };

  double L1 = 0, L3 = 0, L4 = 0;
  double R1 = 0, R3 = 0, R4 = 0;

  for (Index i = 0; i < g.size(); ++i) {
    std::size_t ii = static_cast<std::size_t>(i);
    if (!rad.Du.mask[ii]) continue;
    Point x = g.node(i);
    double rr = norm2(x, N);
    double mu0 = m.mu0_at(x, tie);
    double phi = alpha_of(mu0) * xi.value(rr);
    double dphi = alpha_of(mu0) * xi.slope(rr);
    double du2 = 0;
    for (int d = 0; d < N; ++d) du2 += std::norm(rad.Du.comp[d][ii]);
    double dru2 = std::norm(rad.Dru[i]);
    double b = kf.b[ii];

    if (rr > r_inner && rr < r_outer) {
      L1 += (b * phi + 0.5 * dphi) * du2;
      L3 += (phi / rr - dphi) * (du2 - dru2);
      L4 += cN / (rr * rr) * (phi / rr - 0.5 * dphi + b * phi) * std::norm(u[i]);
      R1 += (phi * mu0 * f[i] * std::conj(rad.Dru[i])).real();
    }
    double gval = phi * (2 * dru2 - du2 - cN / (rr * rr) * std::norm(u[i]));
    if (std::abs(rr - r_outer) < h / 2) R3 += 0.5 * gval * surf_w;
    if (std::abs(rr - r_inner) < h / 2) R4 -= 0.5 * gval * surf_w;
  }
  L1 *= vol_w;
  L3 *= vol_w;
  L4 *= vol_w;
  R1 *= vol_w;

  // Interface contributions, both one-sided traces per separating surface.
  double L2 = 0, R2 = 0;
  const LayeredPartition& part = m.partition();
  for (const Interface& iface : part.interfaces()) {
    auto samples = part.sample_interface(iface, h, g.rmax());
    double nu_lo = m.nu_of(iface.lower_layer);
    double nu_hi = m.nu_of(iface.lower_layer + 1);
    Complex k_lo = branch_sqrt(z * nu_lo), k_hi = branch_sqrt(z * nu_hi);
    double a_lo = alpha_of(nu_lo), a_hi = alpha_of(nu_hi);
    for (const auto& sp : samples) {
      double rr = norm2(sp.x, N);
      if (!(rr > r_inner && rr < r_outer)) continue;
      double xtn = dot(sp.x, sp.normal, N) / rr;
      double xv = xi.value(rr);

      for (int side = 0; side < 2; ++side) {
        double sgn = side == 0 ? 1.0 : -1.0;  // normal of this side's layer
        Complex k_side = side == 0 ? k_lo : k_hi;
        double phi = (side == 0 ? a_lo : a_hi) * xv;
        // one-sided trace and normal derivative from within this side
        Point p1, p2;
        for (int d = 0; d < 3; ++d) {
          p1[d] = sp.x[d] - sgn * 0.5 * h * sp.normal[d];
          p2[d] = sp.x[d] - sgn * 1.5 * h * sp.normal[d];
        }
        Complex u1 = interpolate(u, p1), u2 = interpolate(u, p2);
        Complex utr = 0.5 * (3.0 * u1 - u2);
        Complex dudn = sgn * (u1 - u2) / h;  // derivative along sgn * normal
        double b_side = k_side.imag();
        L2 += phi *
              (std::conj(k_side) * dudn * std::conj(utr)).imag() * sp.weight;
        R2 += 0.5 * phi *
              ((N - 1) * b_side / rr + std::norm(k_side)) * (sgn * xtn) *
              std::norm(utr) * sp.weight;
      }
    }
  }

  rep.terms["lhs_radiation_energy"] = L1;
  rep.terms["lhs_interface_flux"] = L2;
  rep.terms["lhs_transverse"] = L3;
  rep.terms["lhs_dimensional"] = L4;
  rep.terms["rhs_source"] = R1;
  rep.terms["rhs_interface_sign"] = R2;
  rep.terms["rhs_outer_sphere"] = R3;
  rep.terms["rhs_inner_sphere"] = R4;
  rep.lhs_total = L1 + L2 + L3 + L4;
  rep.rhs_total = R1 + R2 + R3 + R4;
  rep.residual = std::abs(rep.lhs_total - rep.rhs_total);
  rep.interface_sign_term = R2;
  return rep;
}

FluxProbe flux_probe(const GridFunction& u, const std::vector<double>& radii,
                     double alpha_exp) {
  const Grid& g = *u.grid;
  const int N = g.dim();
  const double h = g.h();
  VectorGridFunction grad = discrete_gradient(u);
  FluxProbe out;

  for (double R : radii) {
    require(R > h && R <= g.rmax(), ErrorCode::Precondition,
            "probe radius outside the grid");
    double acc = 0;
    for (Index i = 0; i < g.size(); ++i) {
      Point x = g.node(i);
      double rr = norm2(x, N);
      if (std::abs(rr - R) >= h / 2 || rr < h) continue;
      Complex dudr = 0;
      for (int d = 0; d < N; ++d)
        dudr += grad.comp[d][static_cast<std::size_t>(i)] * (x[d] / rr);
      acc += std::norm(dudr) + std::norm(u[i]);
    }
    double F = acc * cell_measure(g) / h;
    if (N == 2) F *= std::pow(R, alpha_exp);
    out.points.emplace_back(R, F);
  }

  if (!out.points.empty()) {
    out.running_min = out.points[0].second;
    for (auto& p : out.points)
      out.running_min = std::min(out.running_min, p.second);
    // least-squares slope of F against R
    double n = static_cast<double>(out.points.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto& p : out.points) {
      sx += p.first;
      sy += p.second;
      sxx += p.first * p.first;
      sxy += p.first * p.second;
    }
    double den = n * sxx - sx * sx;
    out.trend_slope = den != 0 ? (n * sxy - sx * sy) / den : 0.0;
  }
  return out;
}

}  // namespace laplab
