#include "core/grid.hpp"

#include <cmath>

namespace laplab {

Grid Grid::build_unchecked(int N, double rmax, double h, SpongeParams sponge) {
  require(N >= 1 && N <= 3, ErrorCode::Config, "grid dimension must be 1..3");
  require(rmax > 0 && h > 0, ErrorCode::Config, "rmax and h must be positive");
  double cells = rmax / h;
  require(std::abs(cells - std::round(cells)) < 1e-9 * cells,
          ErrorCode::Config, "rmax/h must be an integer");
  Grid g;
  g.n_ = N;
  g.rmax_ = rmax;
  g.h_ = h;
  g.m_ = 2 * static_cast<int>(std::llround(cells)) + 1;
  g.total_ = 1;
  for (int d = 0; d < N; ++d) g.total_ *= g.m_;
  g.sponge_ = sponge;
  return g;
}

Grid Grid::build(int N, double rmax, double h, SpongeParams sponge,
                 double max_wavenumber) {
  if (N >= 2) {
    require(rmax >= 4.0, ErrorCode::Precondition, "rmax must be at least 4");
    require(h <= rmax / 16.0, ErrorCode::Precondition,
            "h must be at most rmax/16");
  }
  if (sponge.enabled())
    require(sponge.width >= 4 * h - 1e-12, ErrorCode::Config,
            "sponge width must be at least 4h");
  if (max_wavenumber > 0) {
    // Second-order dispersion control: at least 8 points per wavelength.
    double wavelength = 2 * 3.14159265358979323846 / max_wavenumber;
    require(wavelength >= 8 * h, ErrorCode::BadResolution,
            "fewer than 8 points per wavelength at the requested resolution");
  }
  return build_unchecked(N, rmax, h, sponge);
}

}  // namespace laplab
