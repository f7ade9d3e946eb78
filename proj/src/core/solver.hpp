#ifndef LAPLAB_CORE_SOLVER_HPP
#define LAPLAB_CORE_SOLVER_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "core/fd_operator.hpp"
#include "core/grid.hpp"
#include "core/types.hpp"

namespace laplab {

enum class SolveMethod { Krylov, DenseDirect, Tridiagonal };
enum class PreconditionerKind { None, DiagonalComplexShift };

struct SolveOptions {
  SolveMethod method = SolveMethod::Krylov;
  double tol = 1e-8;  // relative residual target
  int max_iter = 20000;
  int restart = 200;
  PreconditionerKind precond = PreconditionerKind::DiagonalComplexShift;
  const GridFunction* initial_guess = nullptr;

  void validate() const {
    require(tol > 0 && tol <= 1e-2, ErrorCode::Config,
            "solver tolerance must lie in (0, 1e-2]");
    require(max_iter >= 1 && restart >= 1, ErrorCode::Config,
            "max_iter and restart must be positive");
  }
};

struct SolveStats {
  bool converged = false;
  int iterations = 0;
  double residual = 0;  // final relative residual
  std::string method;
};

// Solve A u = f to the relative residual target. Krylov is restarted GMRES
// over the complex field with diagonal preconditioning; DenseDirect and
// Tridiagonal are exact paths for tiny grids and the 1-D mode. On stagnation
// the best iterate is returned with converged = false.
std::pair<GridFunction, SolveStats> solve(const DiscreteOperator& A,
                                          const GridFunction& f,
                                          const SolveOptions& opts = {});

// Resolvent probe m(eta) = eta |(H_h - lambda - i eta)^{-1} f|_X along a
// decreasing eta ladder, sponge off. A plateau in eta flags an eigenvalue at
// lambda; linear decay clears it.
struct ProbeRow {
  double lambda = 0;
  double eta = 0;
  int sample = 0;
  double m = 0;
  bool solver_ok = true;
  int iterations = 0;
  double residual = 0;
};

struct ProbeCurve {
  double lambda = 0;
  std::vector<ProbeRow> rows;
  bool eigenvalue_likely = false;
  double plateau = 0;  // fitted zero-eta intercept, max over samples
  double plateau_tol = 1e-3;
};

ProbeCurve eig_probe(const Grid& grid, const MediumProfile& m, double lambda,
                     const std::vector<GridFunction>& f_samples,
                     const std::vector<double>& eta_list,
                     const SolveOptions& opts = {}, double plateau_tol = 1e-3);

// Independent unit-X-norm random fields (fixed seed) used as probe data.
std::vector<GridFunction> random_probe_fields(const Grid& grid,
                                              const MediumProfile& m, int count,
                                              std::uint64_t seed);

}  // namespace laplab

#endif
