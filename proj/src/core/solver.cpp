#include "core/solver.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "core/weighted.hpp"

namespace laplab {

namespace {

using Vec = std::vector<Complex>;

void csr_apply(const SparseMatrixZ& A, const Vec& x, Vec& y) {
  for (Index row = 0; row < A.nrows; ++row) {
    Complex acc = 0;
    for (Index p = A.rowptr[static_cast<std::size_t>(row)];
         p < A.rowptr[static_cast<std::size_t>(row) + 1]; ++p)
      acc += A.val[static_cast<std::size_t>(p)] *
             x[static_cast<std::size_t>(A.col[static_cast<std::size_t>(p)])];
    y[static_cast<std::size_t>(row)] = acc;
  }
}

double vec_norm(const Vec& v) {
  double s = 0;
  for (const Complex& c : v) s += std::norm(c);
  return std::sqrt(s);
}

Complex vec_dot(const Vec& a, const Vec& b) {  // <a, b> = sum a conj(b)
  Complex s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * std::conj(b[i]);
  return s;
}

Vec diagonal_of(const SparseMatrixZ& A) {
  Vec d(static_cast<std::size_t>(A.nrows), Complex(1));
  for (Index row = 0; row < A.nrows; ++row)
    for (Index p = A.rowptr[static_cast<std::size_t>(row)];
         p < A.rowptr[static_cast<std::size_t>(row) + 1]; ++p)
      if (A.col[static_cast<std::size_t>(p)] == row) {
        Complex v = A.val[static_cast<std::size_t>(p)];
        d[static_cast<std::size_t>(row)] = std::abs(v) > 0 ? v : Complex(1);
      }
  return d;
}

// Right-preconditioned restarted GMRES; x holds the initial guess on entry
// and the best iterate on exit. Returns (converged, iterations, relres).
std::tuple<bool, int, double> gmres(const SparseMatrixZ& A, const Vec& b,
                                    Vec& x, const Vec* precond_diag, double tol,
                                    int max_iter, int restart) {
  const std::size_t n = b.size();
  const double bnorm = vec_norm(b);
  Vec r(n), w(n), tmp(n);

  auto apply_prec = [&](const Vec& v, Vec& out) {
    if (precond_diag)
      for (std::size_t i = 0; i < n; ++i) out[i] = v[i] / (*precond_diag)[i];
    else
      out = v;
  };

  std::vector<Vec> V(static_cast<std::size_t>(restart) + 1, Vec(n));
  std::vector<std::vector<Complex>> H(
      static_cast<std::size_t>(restart) + 1,
      std::vector<Complex>(static_cast<std::size_t>(restart), Complex(0)));
  std::vector<Complex> cs(static_cast<std::size_t>(restart));
  std::vector<Complex> sn(static_cast<std::size_t>(restart));
  std::vector<Complex> gamma(static_cast<std::size_t>(restart) + 1);

  int total_iters = 0;
  double relres = 1.0;

  while (total_iters < max_iter) {
    csr_apply(A, x, r);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
    double beta = vec_norm(r);
    relres = beta / bnorm;
    if (relres <= tol) return {true, total_iters, relres};

    for (std::size_t i = 0; i < n; ++i) V[0][i] = r[i] / beta;
    std::fill(gamma.begin(), gamma.end(), Complex(0));
    gamma[0] = beta;

    int k = 0;
    for (; k < restart && total_iters < max_iter; ++k, ++total_iters) {
      apply_prec(V[static_cast<std::size_t>(k)], tmp);
      csr_apply(A, tmp, w);
      // modified Gram-Schmidt
      for (int i = 0; i <= k; ++i) {
        Complex hik = vec_dot(w, V[static_cast<std::size_t>(i)]);
        H[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] = hik;
        for (std::size_t j = 0; j < n; ++j)
          w[j] -= hik * V[static_cast<std::size_t>(i)][j];
      }
      double hkk = vec_norm(w);
      H[static_cast<std::size_t>(k) + 1][static_cast<std::size_t>(k)] = hkk;
      if (hkk > 0)
        for (std::size_t j = 0; j < n; ++j)
          V[static_cast<std::size_t>(k) + 1][j] = w[j] / hkk;

      // apply stored Givens rotations, then form a new one
      for (int i = 0; i < k; ++i) {
        Complex t = H[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
        H[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] =
            std::conj(cs[static_cast<std::size_t>(i)]) * t +
            std::conj(sn[static_cast<std::size_t>(i)]) *
                H[static_cast<std::size_t>(i) + 1][static_cast<std::size_t>(k)];
        H[static_cast<std::size_t>(i) + 1][static_cast<std::size_t>(k)] =
            -sn[static_cast<std::size_t>(i)] * t +
            cs[static_cast<std::size_t>(i)] *
                H[static_cast<std::size_t>(i) + 1][static_cast<std::size_t>(k)];
      }
      Complex hk = H[static_cast<std::size_t>(k)][static_cast<std::size_t>(k)];
      Complex hk1 =
          H[static_cast<std::size_t>(k) + 1][static_cast<std::size_t>(k)];
      double denom = std::sqrt(std::norm(hk) + std::norm(hk1));
      if (denom == 0) denom = 1;
      cs[static_cast<std::size_t>(k)] = hk / denom;
      sn[static_cast<std::size_t>(k)] = hk1 / denom;
      H[static_cast<std::size_t>(k)][static_cast<std::size_t>(k)] =
          std::conj(cs[static_cast<std::size_t>(k)]) * hk +
          std::conj(sn[static_cast<std::size_t>(k)]) * hk1;
      H[static_cast<std::size_t>(k) + 1][static_cast<std::size_t>(k)] = 0;
      gamma[static_cast<std::size_t>(k) + 1] =
          -sn[static_cast<std::size_t>(k)] * gamma[static_cast<std::size_t>(k)];
      gamma[static_cast<std::size_t>(k)] =
          std::conj(cs[static_cast<std::size_t>(k)]) *
          gamma[static_cast<std::size_t>(k)];

      relres = std::abs(gamma[static_cast<std::size_t>(k) + 1]) / bnorm;
      if (relres <= tol) {
        ++k;
        ++total_iters;
        break;
      }
    }

    // back substitution on the k x k triangular system
    std::vector<Complex> y(static_cast<std::size_t>(k));
    for (int i = k - 1; i >= 0; --i) {
      Complex s = gamma[static_cast<std::size_t>(i)];
      for (int j = i + 1; j < k; ++j)
        s -= H[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] *
             y[static_cast<std::size_t>(j)];
      y[static_cast<std::size_t>(i)] =
          s / H[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)];
    }
    std::fill(tmp.begin(), tmp.end(), Complex(0));
    for (int j = 0; j < k; ++j)
      for (std::size_t i = 0; i < n; ++i)
        tmp[i] += y[static_cast<std::size_t>(j)] * V[static_cast<std::size_t>(j)][i];
    apply_prec(tmp, w);
    for (std::size_t i = 0; i < n; ++i) x[i] += w[i];

    if (relres <= tol) {
      csr_apply(A, x, r);
      for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
      relres = vec_norm(r) / bnorm;
      if (relres <= tol) return {true, total_iters, relres};
    }
  }
  return {false, total_iters, relres};
}

// Tridiagonal LU with partial pivoting (one fill superdiagonal).
bool tridiag_solve(const SparseMatrixZ& A, Vec& x, const Vec& b) {
  const Index n = A.nrows;
  Vec dl(static_cast<std::size_t>(n), 0), d(static_cast<std::size_t>(n), 0),
      du(static_cast<std::size_t>(n), 0), du2(static_cast<std::size_t>(n), 0);
  for (Index row = 0; row < n; ++row)
    for (Index p = A.rowptr[static_cast<std::size_t>(row)];
         p < A.rowptr[static_cast<std::size_t>(row) + 1]; ++p) {
      Index c = A.col[static_cast<std::size_t>(p)];
      Complex v = A.val[static_cast<std::size_t>(p)];
      if (c == row - 1)
        dl[static_cast<std::size_t>(row)] = v;
      else if (c == row)
        d[static_cast<std::size_t>(row)] = v;
      else if (c == row + 1)
        du[static_cast<std::size_t>(row)] = v;
      else
        return false;
    }
  x = b;
  for (Index i = 0; i < n - 1; ++i) {
    std::size_t ii = static_cast<std::size_t>(i);
    if (std::abs(d[ii]) >= std::abs(dl[ii + 1])) {
      if (std::abs(d[ii]) == 0) return false;
      Complex mult = dl[ii + 1] / d[ii];
      d[ii + 1] -= mult * du[ii];
      x[ii + 1] -= mult * x[ii];
      du2[ii] = 0;
    } else {
      // row swap
      Complex mult = d[ii] / dl[ii + 1];
      d[ii] = dl[ii + 1];
      Complex temp = d[ii + 1];
      d[ii + 1] = du[ii] - mult * temp;
      du2[ii] = (i + 2 < n) ? du[ii + 1] : Complex(0);
      du[ii + 1] = -mult * du2[ii];
      du[ii] = temp;
      std::swap(x[ii], x[ii + 1]);
      x[ii + 1] -= mult * x[ii];
    }
  }
  if (std::abs(d[static_cast<std::size_t>(n - 1)]) == 0) return false;
  for (Index i = n - 1; i >= 0; --i) {
    std::size_t ii = static_cast<std::size_t>(i);
    Complex s = x[ii];
    if (i + 1 < n) s -= du[ii] * x[ii + 1];
    if (i + 2 < n) s -= du2[ii] * x[ii + 2];
    x[ii] = s / d[ii];
    if (i == 0) break;
  }
  return true;
}

}  // namespace

std::pair<GridFunction, SolveStats> solve(const DiscreteOperator& A,
                                          const GridFunction& f,
                                          const SolveOptions& opts) {
  opts.validate();
  require(f.grid == A.grid, ErrorCode::ShapeMismatch,
          "right-hand side does not match the operator grid");

  const std::size_t n = A.active.size();
  Vec b(n), x(n, Complex(0));
  for (std::size_t i = 0; i < n; ++i) b[i] = f[A.active[i]];
  if (opts.initial_guess) {
    require(opts.initial_guess->grid == A.grid, ErrorCode::ShapeMismatch,
            "initial guess grid mismatch");
    for (std::size_t i = 0; i < n; ++i)
      x[i] = (*opts.initial_guess)[A.active[i]];
  }

  SolveStats stats;
  GridFunction u(*A.grid);

  double bnorm = vec_norm(b);
  if (bnorm == 0) {
    stats.converged = true;
    stats.method = "trivial";
    return {u, stats};
  }

  SolveMethod method = opts.method;
  if (method == SolveMethod::Tridiagonal)
    require(A.grid->dim() == 1, ErrorCode::Config,
            "tridiagonal path requires the 1-D mode");

  if (method == SolveMethod::DenseDirect) {
    require(A.A.nrows <= 6000, ErrorCode::Config,
            "dense direct path is for tiny grids only");
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(
        static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (Index row = 0; row < A.A.nrows; ++row)
      for (Index p = A.A.rowptr[static_cast<std::size_t>(row)];
           p < A.A.rowptr[static_cast<std::size_t>(row) + 1]; ++p)
        M(static_cast<Eigen::Index>(row),
          static_cast<Eigen::Index>(A.A.col[static_cast<std::size_t>(p)])) =
            A.A.val[static_cast<std::size_t>(p)];
    Eigen::VectorXcd rhs(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i)
      rhs(static_cast<Eigen::Index>(i)) = b[i];
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(M);
    Eigen::VectorXcd sol = lu.solve(rhs);
    double err = (M * sol - rhs).norm() / rhs.norm();
    require(std::isfinite(err) && err < 1e-6, ErrorCode::SingularSystem,
            "dense factorization failed or system is singular");
    for (std::size_t i = 0; i < n; ++i) x[i] = sol(static_cast<Eigen::Index>(i));
    stats.converged = err <= opts.tol;
    stats.residual = err;
    stats.method = "dense";
  } else if (method == SolveMethod::Tridiagonal) {
    bool ok = tridiag_solve(A.A, x, b);
    require(ok, ErrorCode::SingularSystem, "tridiagonal factorization failed");
    Vec r(n);
    csr_apply(A.A, x, r);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
    stats.residual = vec_norm(r) / bnorm;
    stats.converged = stats.residual <= std::max(opts.tol, 1e-10);
    stats.method = "tridiagonal";
  } else {
    Vec diag;
    const Vec* pd = nullptr;
    if (opts.precond == PreconditionerKind::DiagonalComplexShift) {
      diag = diagonal_of(A.A);
      pd = &diag;
    }
    auto [conv, iters, rel] =
        gmres(A.A, b, x, pd, opts.tol, opts.max_iter, opts.restart);
    stats.converged = conv;
    stats.iterations = iters;
    stats.residual = rel;
    stats.method = "gmres";
  }

  for (std::size_t i = 0; i < n; ++i) u[A.active[i]] = x[i];
  require(u.finite(), ErrorCode::Internal, "solver produced a non-finite field");
  return {u, stats};
}

std::vector<GridFunction> random_probe_fields(const Grid& grid,
                                              const MediumProfile& m, int count,
                                              std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<GridFunction> out;
  for (int c = 0; c < count; ++c) {
    GridFunction f(grid);
    for (Index i = 0; i < grid.size(); ++i) {
      if (grid.is_wall(i)) continue;
      f[i] = Complex(gauss(rng), gauss(rng));
    }
    double nx = norm_x(f, m);
    for (Index i = 0; i < grid.size(); ++i) f[i] /= nx;
    out.push_back(std::move(f));
  }
  return out;
}

ProbeCurve eig_probe(const Grid& grid, const MediumProfile& m, double lambda,
                     const std::vector<GridFunction>& f_samples,
                     const std::vector<double>& eta_list,
                     const SolveOptions& opts, double plateau_tol) {
  require(!eta_list.empty(), ErrorCode::Precondition, "empty eta ladder");
  for (std::size_t i = 0; i < eta_list.size(); ++i) {
    require(eta_list[i] > 0, ErrorCode::Precondition, "eta must be positive");
    if (i > 0)
      require(eta_list[i] < eta_list[i - 1], ErrorCode::Precondition,
              "eta ladder must decrease");
  }

  ProbeCurve curve;
  curve.lambda = lambda;
  curve.plateau_tol = plateau_tol;

  for (int s = 0; s < static_cast<int>(f_samples.size()); ++s) {
    GridFunction prev;
    std::vector<std::pair<double, double>> pts;
    for (double eta : eta_list) {
      Complex z(lambda, eta);
      AssembleOptions ao;
      ao.side = Side::Plus;
      ao.force_sponge_off = true;  // detection needs the self-adjoint operator
      DiscreteOperator op = assemble(grid, m, z, ao);
      SolveOptions so = opts;
      if (prev.grid) so.initial_guess = &prev;
      auto [u, stats] = solve(op, f_samples[static_cast<std::size_t>(s)], so);
      ProbeRow row;
      row.lambda = lambda;
      row.eta = eta;
      row.sample = s;
      row.m = eta * norm_x(u, m);
      row.solver_ok = stats.converged;
      row.iterations = stats.iterations;
      row.residual = stats.residual;
      curve.rows.push_back(row);
      if (stats.converged) pts.emplace_back(eta, row.m);
      prev = std::move(u);
    }
    // plateau detection: fit m ~ c0 + c1 eta on the last three points
    if (pts.size() >= 3) {
      double max_m = 0;
      for (auto& p : pts) max_m = std::max(max_m, p.second);
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      int n0 = static_cast<int>(pts.size()) - 3;
      for (int i = n0; i < n0 + 3; ++i) {
        sx += pts[static_cast<std::size_t>(i)].first;
        sy += pts[static_cast<std::size_t>(i)].second;
        sxx += pts[static_cast<std::size_t>(i)].first *
               pts[static_cast<std::size_t>(i)].first;
        sxy += pts[static_cast<std::size_t>(i)].first *
               pts[static_cast<std::size_t>(i)].second;
      }
      double den = 3 * sxx - sx * sx;
      double c1 = den != 0 ? (3 * sxy - sx * sy) / den : 0;
      double c0 = (sy - c1 * sx) / 3;
      if (c0 > curve.plateau) curve.plateau = c0;
      if (c0 > plateau_tol * max_m) curve.eigenvalue_likely = true;
    }
  }
  return curve;
}

}  // namespace laplab
