#ifndef LAPLAB_CORE_FD_OPERATOR_HPP
#define LAPLAB_CORE_FD_OPERATOR_HPP

#include <iosfwd>
#include <vector>

#include "core/grid.hpp"
#include "core/medium.hpp"
#include "core/types.hpp"

namespace laplab {

// Closure of the truncated operator: homogeneous Dirichlet walls with an
// optional interior absorbing layer, or (N = 1 only) impedance rows
// u' = -/+ i k u at the two ends, which close the stratified problem exactly
// outside the source support.
enum class BcKind { DirichletSponge, Robin1D };

struct SparseMatrixZ {
  Index nrows = 0;
  std::vector<Index> rowptr;
  std::vector<Index> col;
  std::vector<Complex> val;
};

// Sparse representation of (-mu^{-1} Delta_h - z_eff) over the active nodes,
// where z_eff(x) = z + i * sgn * s(x) and s is the sponge profile.
struct DiscreteOperator {
  const Grid* grid = nullptr;
  const MediumProfile* medium = nullptr;
  Complex z;
  int side_sgn = +1;
  BcKind bc = BcKind::DirichletSponge;
  bool sponge_active = false;
  double sigma0 = 0.0;  // resolved sponge strength
  SparseMatrixZ A;
  std::vector<Index> active;          // active node ids in grid order
  std::vector<Index> node_to_active;  // -1 for pinned (wall) nodes
  std::vector<double> mu;             // mu sampled at every node
  // A is symmetric in the mu-weighted inner product (sponge off, no
  // impedance rows): Im <(H_h - z) u, u>_X = -Im(z) |u|_X^2 exactly.
  bool symmetric_in_x = false;
};

struct AssembleOptions {
  Side side = Side::Auto;
  bool force_sponge_off = false;
  BcKind bc = BcKind::DirichletSponge;
};

DiscreteOperator assemble(const Grid& grid, const MediumProfile& m, Complex z,
                          const AssembleOptions& opts = {});

GridFunction matvec(const DiscreteOperator& op, const GridFunction& u);

// Matrix-free (-mu^{-1} Delta_h - z) u with Dirichlet closure; wall rows are
// zero. mu0_only selects the unperturbed coefficient.
GridFunction apply_reduced_wave(const Grid& grid, const MediumProfile& m,
                                Complex z, const GridFunction& u,
                                bool mu0_only);

// MatrixMarket coordinate dump (1-based indices) for external inspection.
void write_matrix_market(const DiscreteOperator& op, std::ostream& os);

}  // namespace laplab

#endif
