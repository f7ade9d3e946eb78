#ifndef LAPLAB_CORE_GRID_HPP
#define LAPLAB_CORE_GRID_HPP

#include <cmath>
#include <vector>

#include "core/types.hpp"

namespace laplab {

// Absorbing layer occupying rmax - width <= |x|_inf <= rmax with damping
// profile strength * ((|x|_inf - (rmax - width)) / width)^exponent.
// strength < 0 requests the automatic value 2 * max(Re k) at assembly time.
struct SpongeParams {
  double width = 0.0;
  double strength = 0.0;
  double exponent = 2.0;
  bool enabled() const { return width > 0.0 && strength != 0.0; }
};

// Uniform lattice on [-rmax, rmax]^N. N = 1 is an internal mode used for
// comparisons against the closed-form stratified solutions.
class Grid {
 public:
  static Grid build(int N, double rmax, double h, SpongeParams sponge = {},
                    double max_wavenumber = 0.0);

  // Skips the production size guards (rmax >= 4, h <= rmax/16); for tiny
  // grids driven against dense references.
  static Grid build_unchecked(int N, double rmax, double h,
                              SpongeParams sponge = {});

  int dim() const { return n_; }
  double rmax() const { return rmax_; }
  double h() const { return h_; }
  int nodes_per_axis() const { return m_; }
  Index size() const { return total_; }
  const SpongeParams& sponge() const { return sponge_; }
  void set_sponge(const SpongeParams& s) { sponge_ = s; }

  double coord(int i) const { return -rmax_ + i * h_; }

  void decode(Index idx, int ijk[3]) const {
    ijk[1] = ijk[2] = 0;
    if (n_ == 1) {
      ijk[0] = static_cast<int>(idx);
      return;
    }
    if (n_ == 2) {
      ijk[0] = static_cast<int>(idx % m_);
      ijk[1] = static_cast<int>(idx / m_);
      return;
    }
    ijk[0] = static_cast<int>(idx % m_);
    ijk[1] = static_cast<int>((idx / m_) % m_);
    ijk[2] = static_cast<int>(idx / (static_cast<Index>(m_) * m_));
  }

  Index encode(int i, int j, int k) const {
    Index idx = i;
    if (n_ >= 2) idx += static_cast<Index>(j) * m_;
    if (n_ >= 3) idx += static_cast<Index>(k) * m_ * m_;
    return idx;
  }

  Point node(Index idx) const {
    int ijk[3];
    decode(idx, ijk);
    Point x{coord(ijk[0]), 0, 0};
    if (n_ >= 2) x[1] = coord(ijk[1]);
    if (n_ >= 3) x[2] = coord(ijk[2]);
    return x;
  }

  double radius(Index idx) const {
    Point x = node(idx);
    return norm2(x, n_);
  }

  // Outermost lattice shell, where the Dirichlet closure pins the values.
  bool is_wall(Index idx) const {
    int ijk[3];
    decode(idx, ijk);
    for (int d = 0; d < n_; ++d)
      if (ijk[d] == 0 || ijk[d] == m_ - 1) return true;
    return false;
  }

  // Damping profile of the sponge at x (0 outside the layer).
  double sponge_profile(const Point& x, double strength) const {
    if (!(sponge_.width > 0.0)) return 0.0;
    double a = 0;
    for (int d = 0; d < n_; ++d) a = std::max(a, std::abs(x[d]));
    double start = rmax_ - sponge_.width;
    if (a <= start) return 0.0;
    double t = (a - start) / sponge_.width;
    if (t > 1.0) t = 1.0;
    return strength * std::pow(t, sponge_.exponent);
  }

 private:
  int n_ = 3;
  double rmax_ = 0, h_ = 0;
  int m_ = 0;
  Index total_ = 0;
  SpongeParams sponge_;
};

// Complex-valued field on the grid nodes.
struct GridFunction {
  const Grid* grid = nullptr;
  std::vector<Complex> v;

  GridFunction() = default;
  explicit GridFunction(const Grid& g) : grid(&g), v(g.size(), Complex(0)) {}

  Index size() const { return static_cast<Index>(v.size()); }
  Complex& operator[](Index i) { return v[static_cast<std::size_t>(i)]; }
  const Complex& operator[](Index i) const {
    return v[static_cast<std::size_t>(i)];
  }
  bool finite() const {
    for (const Complex& c : v)
      if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
    return true;
  }
};

// Vector-valued field (one component per space dimension) with a validity
// mask; nodes too close to the origin are excluded from radial operations.
struct VectorGridFunction {
  const Grid* grid = nullptr;
  std::vector<Complex> comp[3];
  std::vector<unsigned char> mask;  // 1 = valid

  explicit VectorGridFunction(const Grid& g) : grid(&g) {
    for (int d = 0; d < g.dim(); ++d)
      comp[d].assign(static_cast<std::size_t>(g.size()), Complex(0));
    mask.assign(static_cast<std::size_t>(g.size()), 1);
  }
};

}  // namespace laplab

#endif
