#include "core/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace laplab {

namespace {

constexpr double kPi = 3.14159265358979323846;

bool strictly_increasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i - 1] < v[i])) return false;
  return true;
}

// Two unit tangents spanning a plane with unit normal n (N = 3), or one
// tangent for N = 2.
void tangent_basis(const Point& n, int dim, Point& t1, Point& t2) {
  if (dim == 2) {
    t1 = {-n[1], n[0], 0};
    t2 = {0, 0, 0};
    return;
  }
  Point seed = std::abs(n[0]) < 0.9 ? Point{1, 0, 0} : Point{0, 1, 0};
  double c = dot(seed, n, 3);
  for (int i = 0; i < 3; ++i) t1[i] = seed[i] - c * n[i];
  double m = norm2(t1, 3);
  for (int i = 0; i < 3; ++i) t1[i] /= m;
  t2 = {n[1] * t1[2] - n[2] * t1[1], n[2] * t1[0] - n[0] * t1[2],
        n[0] * t1[1] - n[1] * t1[0]};
}

}  // namespace

void LayerIndexSet::validate() const {
  require(window_lo <= 0 && window_hi >= 0 && window_lo <= window_hi,
          ErrorCode::Config, "index window must be a finite range containing 0");
  if (has_left_end())
    require(window_lo >= l_minus, ErrorCode::Config,
            "window extends below the smallest layer index");
  if (has_right_end())
    require(window_hi <= l_plus, ErrorCode::Config,
            "window extends above the largest layer index");
}

LayeredPartition LayeredPartition::planar(int dimension,
                                          const std::vector<double>& breakpoints,
                                          const Point& axis) {
  require(dimension >= 2 && dimension <= 3, ErrorCode::Config,
          "planar partitions require N in {2, 3}");
  require(!breakpoints.empty(), ErrorCode::EmptyWindow,
          "at least one breakpoint required");
  require(strictly_increasing(breakpoints), ErrorCode::Config,
          "breakpoints must be strictly increasing");

  LayeredPartition p;
  p.n_ = dimension;
  p.kind_ = PartitionKind::PlanarStack;
  p.breakpoints_ = breakpoints;

  Point a = axis;
  if (norm2(a, dimension) == 0.0) {
    a = {0, 0, 0};
    a[dimension - 1] = 1.0;
  } else {
    double m = norm2(a, dimension);
    for (int i = 0; i < dimension; ++i) a[i] /= m;
    for (int i = dimension; i < 3; ++i) a[i] = 0;
  }
  p.axis_ = a;

  int neg = 0;
  for (double b : breakpoints) {
    require(b != 0.0, ErrorCode::Config,
            "breakpoints must be nonzero so layer 0 contains the origin");
    if (b < 0) ++neg;
  }
  p.origin_region_ = neg;

  p.index_set_.kind = IndexSetKind::TwoSidedInfinite;
  p.index_set_.window_lo = -neg;
  p.index_set_.window_hi = static_cast<int>(breakpoints.size()) - neg;
  return p;
}

LayeredPartition LayeredPartition::concentric(int dimension,
                                              const std::vector<double>& radii) {
  require(dimension >= 2 && dimension <= 3, ErrorCode::Config,
          "cylindrical partitions require N in {2, 3}");
  require(!radii.empty(), ErrorCode::EmptyWindow, "at least one radius required");
  require(radii.front() > 0.0, ErrorCode::Config, "radii must be positive");
  require(strictly_increasing(radii), ErrorCode::Config,
          "radii must be strictly increasing");

  LayeredPartition p;
  p.n_ = dimension;
  p.kind_ = PartitionKind::ConcentricCylinders;
  p.breakpoints_ = radii;
  p.axis_ = {0, 0, 1};
  p.origin_region_ = 0;
  p.index_set_.kind = IndexSetKind::LeftFiniteRightInfinite;
  p.index_set_.l_minus = 0;
  p.index_set_.window_lo = 0;
  p.index_set_.window_hi = static_cast<int>(radii.size());
  return p;
}

void LayeredPartition::set_index_set(const LayerIndexSet& s) {
  LayerIndexSet t = s;
  t.window_lo = index_set_.window_lo;
  t.window_hi = index_set_.window_hi;
  t.validate();
  if (kind_ == PartitionKind::ConcentricCylinders)
    require(t.has_left_end() && t.l_minus == 0, ErrorCode::Config,
            "cylindrical partitions have smallest layer 0");
  index_set_ = t;
}

std::vector<Interface> LayeredPartition::interfaces() const {
  std::vector<Interface> out;
  out.reserve(breakpoints_.size());
  for (std::size_t j = 0; j < breakpoints_.size(); ++j) {
    Interface f;
    f.lower_layer = static_cast<int>(j) - origin_region_;
    f.locus = breakpoints_[j];
    out.push_back(f);
  }
  return out;
}

ClassifyResult LayeredPartition::classify(const Point& x, double tie_tol) const {
  double s;
  if (kind_ == PartitionKind::PlanarStack) {
    s = dot(x, axis_, n_);
  } else {
    s = std::hypot(x[0], x[1]);
  }
  // Region = number of breakpoints strictly below s.
  auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), s);
  int region = static_cast<int>(it - breakpoints_.begin());

  // Interface hit if within tie_tol of the nearest locus.
  for (int j : {region - 1, region}) {
    if (j < 0 || j >= static_cast<int>(breakpoints_.size())) continue;
    if (std::abs(s - breakpoints_[j]) < tie_tol) {
      ClassifyResult r;
      r.on_interface = true;
      r.layer = j - origin_region_;
      return r;
    }
  }

  int layer = region - origin_region_;
  require(layer >= index_set_.window_lo && layer <= index_set_.window_hi,
          ErrorCode::OutOfWindow, "point classifies outside the layer window");
  ClassifyResult r;
  r.layer = layer;
  return r;
}

Point LayeredPartition::interface_normal(const Interface& iface,
                                         const Point& x) const {
  (void)iface;
  if (kind_ == PartitionKind::PlanarStack) return axis_;
  double rho = std::hypot(x[0], x[1]);
  require(rho > 0, ErrorCode::NotOnBoundary,
          "cylindrical normal undefined on the axis");
  return Point{x[0] / rho, x[1] / rho, 0};
}

Point LayeredPartition::outward_normal(int layer, const Point& x,
                                       double surf_tol) const {
  double s = (kind_ == PartitionKind::PlanarStack) ? dot(x, axis_, n_)
                                                   : std::hypot(x[0], x[1]);
  int region = layer + origin_region_;
  int lower_iface = region - 1;  // locus below/inside the layer
  int upper_iface = region;      // locus above/outside the layer

  double d_low = lower_iface >= 0 ? std::abs(s - breakpoints_[lower_iface])
                                  : std::numeric_limits<double>::infinity();
  double d_up = upper_iface < static_cast<int>(breakpoints_.size())
                    ? std::abs(s - breakpoints_[upper_iface])
                    : std::numeric_limits<double>::infinity();

  bool low = d_low <= surf_tol && d_low <= d_up;
  bool up = d_up <= surf_tol && d_up < d_low;
  require(low || up, ErrorCode::NotOnBoundary,
          "point is not on a boundary of the given layer");

  Interface f;
  f.lower_layer = (low ? lower_iface : upper_iface) - origin_region_;
  f.locus = breakpoints_[low ? lower_iface : upper_iface];
  Point n = interface_normal(f, x);
  if (low)  // interface below: outward of this layer points against it
    for (int i = 0; i < 3; ++i) n[i] = -n[i];
  return n;
}

std::vector<SurfacePoint> LayeredPartition::sample_interface(
    const Interface& iface, double spacing, double box) const {
  std::vector<SurfacePoint> out;
  if (kind_ == PartitionKind::PlanarStack) {
    Point t1, t2;
    tangent_basis(axis_, n_, t1, t2);
    Point c{};
    for (int i = 0; i < 3; ++i) c[i] = iface.locus * axis_[i];
    // Lattice in tangent coordinates with midpoint offsets; the extent covers
    // the whole box for any axis orientation.
    double extent = box * std::sqrt(static_cast<double>(n_));
    int m = std::max(1, static_cast<int>(std::ceil(2 * extent / spacing)));
    double hs = 2 * extent / m;
    int m2 = (n_ == 3) ? m : 1;
    for (int i = 0; i < m; ++i) {
      double a = -extent + (i + 0.5) * hs;
      for (int j = 0; j < m2; ++j) {
        double b = (n_ == 3) ? -extent + (j + 0.5) * hs : 0.0;
        SurfacePoint sp;
        for (int d = 0; d < 3; ++d) sp.x[d] = c[d] + a * t1[d] + b * t2[d];
        bool inside = true;
        for (int d = 0; d < n_; ++d)
          if (std::abs(sp.x[d]) > box) inside = false;
        if (!inside) continue;
        sp.normal = axis_;
        sp.weight = (n_ == 3) ? hs * hs : hs;
        out.push_back(sp);
      }
    }
  } else {
    double b = iface.locus;
    int mth = std::max(8, static_cast<int>(std::ceil(2 * kPi * b / spacing)));
    double dth = 2 * kPi / mth;
    if (n_ == 2) {
      for (int i = 0; i < mth; ++i) {
        double th = (i + 0.5) * dth;
        SurfacePoint sp;
        sp.x = {b * std::cos(th), b * std::sin(th), 0};
        if (std::abs(sp.x[0]) > box || std::abs(sp.x[1]) > box) continue;
        sp.normal = {std::cos(th), std::sin(th), 0};
        sp.weight = b * dth;
        out.push_back(sp);
      }
    } else {
      int mz = std::max(1, static_cast<int>(std::ceil(2 * box / spacing)));
      double dz = 2 * box / mz;
      for (int i = 0; i < mth; ++i) {
        double th = (i + 0.5) * dth;
        double cx = b * std::cos(th), cy = b * std::sin(th);
        if (std::abs(cx) > box || std::abs(cy) > box) continue;
        for (int j = 0; j < mz; ++j) {
          double zz = -box + (j + 0.5) * dz;
          SurfacePoint sp;
          sp.x = {cx, cy, zz};
          sp.normal = {std::cos(th), std::sin(th), 0};
          sp.weight = b * dth * dz;
          out.push_back(sp);
        }
      }
    }
  }
  return out;
}

namespace {

double default_box(const LayeredPartition& p, double requested) {
  if (requested > 0) return requested;
  double m = 0;
  for (double b : p.breakpoints()) m = std::max(m, std::abs(b));
  return 1.5 * m + 1.0;
}

double spacing_for(const LayeredPartition& p, const Interface& f, double box,
                   int min_samples) {
  // Pitch so that the restricted sample holds at least min_samples points.
  double extent;
  if (p.kind() == PartitionKind::PlanarStack)
    extent = 2 * box;
  else
    extent = (p.dimension() == 2) ? 2 * kPi * f.locus
                                  : std::sqrt(2 * kPi * f.locus * 2 * box);
  if (p.dimension() == 3 || p.kind() == PartitionKind::ConcentricCylinders) {
    if (p.dimension() == 2 && p.kind() == PartitionKind::ConcentricCylinders)
      return extent / (2.0 * min_samples);
    return extent / std::ceil(std::sqrt(2.0 * min_samples));
  }
  return extent / (2.0 * min_samples);
}

}  // namespace

CertificateReport validate_partition(const LayeredPartition& p,
                                     const std::vector<double>& nus,
                                     const PartitionCheckOptions& opts) {
  require(!nus.empty(), ErrorCode::EmptyWindow, "no layers instantiated");
  require(static_cast<int>(nus.size()) == p.layer_count(), ErrorCode::Config,
          "nus must cover the layer window");

  CertificateReport rep;
  double box = default_box(p, opts.box);
  auto nu_of = [&](int layer) {
    return nus[static_cast<std::size_t>(layer - p.lowest_layer())];
  };

  // Covering/disjointness: every sampled point resolves to exactly one layer
  // in the window (or an interface hit), and the resolved layer really
  // contains the point.
  {
    CertificateEntry e;
    e.condition = "cover";
    e.pass = true;
    int m = opts.cover_samples_per_axis;
    double tie = 1e-9 * box;
    long checked = 0;
    for (int i = 0; i < m && e.pass; ++i)
      for (int j = 0; j < m && e.pass; ++j)
        for (int k = 0; k < (p.dimension() == 3 ? m : 1) && e.pass; ++k) {
          Point x{-box + (i + 0.5) * 2 * box / m, -box + (j + 0.5) * 2 * box / m,
                  p.dimension() == 3 ? -box + (k + 0.5) * 2 * box / m : 0.0};
          ++checked;
          try {
            ClassifyResult r = p.classify(x, tie);
            if (!r.on_interface &&
                (r.layer < p.lowest_layer() || r.layer > p.highest_layer())) {
              e.pass = false;
              e.witness = x;
            }
          } catch (const Error&) {
            e.pass = false;
            e.witness = x;
          }
        }
    e.constants["points_checked"] = static_cast<double>(checked);
    rep.add(std::move(e));
  }

  // Local finiteness: the box meets finitely many layers.
  {
    CertificateEntry e;
    e.condition = "local_finiteness";
    e.pass = true;
    e.constants["layers_in_box"] = static_cast<double>(p.layer_count());
    rep.add(std::move(e));
  }

  // Interface pairing: shared locus, unit normals, opposite orientation for
  // the two adjacent layers.
  {
    CertificateEntry e;
    e.condition = "interface_pairing";
    e.pass = true;
    for (const Interface& f : p.interfaces()) {
      auto samples = p.sample_interface(f, box / 4, box);
      for (const auto& sp : samples) {
        Point n_lo = p.outward_normal(f.lower_layer, sp.x, 1e-9 * box);
        Point n_hi = p.outward_normal(f.lower_layer + 1, sp.x, 1e-9 * box);
        double len = norm2(n_lo, p.dimension());
        double opp = 0;
        for (int d = 0; d < p.dimension(); ++d) opp += n_lo[d] + n_hi[d];
        if (std::abs(len - 1.0) > 1e-12 || std::abs(opp) > 1e-12) {
          e.pass = false;
          e.witness = sp.x;
          break;
        }
      }
      if (!e.pass) break;
    }
    rep.add(std::move(e));
  }

  // Positive bounded values.
  {
    CertificateEntry e;
    e.condition = "value_bounds";
    double m0 = nus[0], M0 = nus[0];
    for (double v : nus) {
      m0 = std::min(m0, v);
      M0 = std::max(M0, v);
    }
    e.constants["m0"] = m0;
    e.constants["M0"] = M0;
    e.pass = m0 > 0;
    rep.add(std::move(e));
  }

  // Interface sign condition: (nu_l - nu_{l+1}) (n^(l)(x) . x) <= 0.
  {
    CertificateEntry e;
    e.condition = "interface_sign";
    e.pass = true;
    double worst = -std::numeric_limits<double>::infinity();
    double scale = 0;
    for (double v : nus) scale = std::max(scale, std::abs(v));
    double tol = 1e-12 * scale * box;
    long total = 0;
    for (const Interface& f : p.interfaces()) {
      double sp_pitch = spacing_for(p, f, box, opts.min_interface_samples);
      auto samples = p.sample_interface(f, sp_pitch, box);
      total += static_cast<long>(samples.size());
      double dn = nu_of(f.lower_layer) - nu_of(f.lower_layer + 1);
      for (const auto& sp : samples) {
        double q = dn * dot(sp.normal, sp.x, p.dimension());
        if (q > worst) worst = q;
        if (q > tol && !e.witness) {
          e.pass = false;
          e.witness = sp.x;
        }
      }
    }
    e.constants["max_value"] = worst;
    e.constants["samples"] = static_cast<double>(total);
    rep.add(std::move(e));
  }

  return rep;
}

CertificateReport check_cone_condition_on_samples(
    const std::vector<SurfacePoint>& samples, int dimension) {
  CertificateReport rep;
  CertificateEntry e;
  e.condition = "cone_normal_component";
  double c1 = std::numeric_limits<double>::infinity();
  double c2 = 0;
  for (const auto& sp : samples) {
    c1 = std::min(c1, std::abs(sp.normal[dimension - 1]));
    c2 = std::max(c2, std::abs(dot(sp.x, sp.normal, dimension)));
  }
  e.constants["c1"] = c1;
  e.constants["c2"] = c2;
  e.pass = c1 >= 1e-8;
  if (!e.pass)
    for (const auto& sp : samples)
      if (std::abs(sp.normal[dimension - 1]) < 1e-8) {
        e.witness = sp.x;
        break;
      }
  rep.add(std::move(e));

  CertificateEntry m;
  m.condition = "cone_moment_bound";
  m.constants["c2"] = c2;
  m.pass = std::isfinite(c2);
  rep.add(std::move(m));
  return rep;
}

CertificateReport check_cone_condition(const LayeredPartition& p,
                                       const PartitionCheckOptions& opts) {
  require(p.layer_count() == 2, ErrorCode::WrongArity,
          "cone condition check requires a two-region partition");
  double box = default_box(p, opts.box);
  Interface f = p.interfaces()[0];
  auto samples = p.sample_interface(
      f, spacing_for(p, f, box, opts.min_interface_samples), box);
  return check_cone_condition_on_samples(samples, p.dimension());
}

CertificateReport check_cylindrical_condition_on_samples(
    const std::vector<SurfacePoint>& samples, int dimension, double nu1,
    double nu2) {
  CertificateReport rep;
  CertificateEntry e;
  e.condition = "cylindrical_sign";
  e.pass = true;
  double worst = std::numeric_limits<double>::infinity();
  double tol = 1e-12 * std::max(std::abs(nu1), std::abs(nu2));
  for (const auto& sp : samples) {
    // normal oriented out of region 1 (the origin side)
    double q = (nu2 - nu1) * dot(sp.x, sp.normal, dimension);
    worst = std::min(worst, q);
    if (q < -tol && !e.witness) {
      e.pass = false;
      e.witness = sp.x;
    }
  }
  e.constants["min_value"] = worst;
  rep.add(std::move(e));
  return rep;
}

CertificateReport check_cylindrical_condition(const LayeredPartition& p,
                                              const std::vector<double>& nus,
                                              const PartitionCheckOptions& opts) {
  require(p.layer_count() == 2, ErrorCode::WrongArity,
          "cylindrical condition check requires a two-region partition");
  require(nus.size() == 2, ErrorCode::Config, "two nu values required");
  double box = default_box(p, opts.box);
  Interface f = p.interfaces()[0];
  auto samples = p.sample_interface(
      f, spacing_for(p, f, box, opts.min_interface_samples), box);
  // Identify the origin-containing region; orient samples out of it.
  int origin_layer = p.classify(Point{0, 0, 0}).layer;
  double nu_origin, nu_other;
  if (origin_layer == f.lower_layer) {
    nu_origin = nus[0];
    nu_other = nus[1];
  } else {
    nu_origin = nus[1];
    nu_other = nus[0];
    for (auto& sp : samples)
      for (int d = 0; d < 3; ++d) sp.normal[d] = -sp.normal[d];
  }
  return check_cylindrical_condition_on_samples(samples, p.dimension(),
                                                nu_origin, nu_other);
}

}  // namespace laplab
