#include "core/fd_operator.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "core/weighted.hpp"

namespace laplab {

DiscreteOperator assemble(const Grid& grid, const MediumProfile& m, Complex z,
                          const AssembleOptions& opts) {
  DiscreteOperator op;
  op.grid = &grid;
  op.medium = &m;
  op.z = z;
  op.side_sgn = side_sign(opts.side, z);
  op.bc = opts.bc;
  if (opts.bc == BcKind::Robin1D)
    require(grid.dim() == 1, ErrorCode::Config,
            "impedance closure is the 1-D mode only");

  const int N = grid.dim();
  const double h = grid.h();
  const double inv_h2 = 1.0 / (h * h);
  const double tie = h / 2;
  const Index total = grid.size();

  op.mu.resize(static_cast<std::size_t>(total));
  double max_a = 0;
  for (Index i = 0; i < total; ++i) {
    Point x = grid.node(i);
    MuTriple t = m.mu_at(x, tie);
    op.mu[static_cast<std::size_t>(i)] = t.mu;
    double a = branch_sqrt(z * t.mu0).real();
    if (a > max_a) max_a = a;
  }

  const SpongeParams& sp = grid.sponge();
  op.sponge_active =
      !opts.force_sponge_off && opts.bc == BcKind::DirichletSponge &&
      sp.enabled();
  op.sigma0 = 0;
  if (op.sponge_active)
    op.sigma0 = sp.strength < 0 ? 2.0 * std::max(max_a, 1e-12) : sp.strength;
  op.symmetric_in_x = !op.sponge_active && opts.bc == BcKind::DirichletSponge;

  op.node_to_active.assign(static_cast<std::size_t>(total), -1);
  for (Index i = 0; i < total; ++i) {
    bool active = opts.bc == BcKind::Robin1D ? true : !grid.is_wall(i);
    if (active) {
      op.node_to_active[static_cast<std::size_t>(i)] =
          static_cast<Index>(op.active.size());
      op.active.push_back(i);
    }
  }

  const Index nact = static_cast<Index>(op.active.size());
  op.A.nrows = nact;
  op.A.rowptr.assign(static_cast<std::size_t>(nact) + 1, 0);
  op.A.col.reserve(static_cast<std::size_t>(nact) * (2 * N + 1));
  op.A.val.reserve(static_cast<std::size_t>(nact) * (2 * N + 1));

  const int mpa = grid.nodes_per_axis();
  for (Index row = 0; row < nact; ++row) {
    Index g = op.active[static_cast<std::size_t>(row)];
    int ijk[3];
    grid.decode(g, ijk);
    double mu = op.mu[static_cast<std::size_t>(g)];
    Point x = grid.node(g);

    Complex diag = 2.0 * N * inv_h2 / mu - z;
    if (op.sponge_active) {
      double s = grid.sponge_profile(x, op.sigma0);
      diag -= Complex(0, op.side_sgn * s);
    }

    bool end_node = false;
    if (opts.bc == BcKind::Robin1D && (ijk[0] == 0 || ijk[0] == mpa - 1)) {
      end_node = true;
      // One ghost layer eliminated through u' = sgn_face * i k u, second
      // order; the inner neighbor coefficient doubles.
      Complex k = branch_sqrt(z * m.mu_at(x, tie).mu0);
      Complex corr = Complex(0, -2.0 * op.side_sgn) * h * k;
      diag = (2.0 + corr) * inv_h2 / mu - z;
      int inner = ijk[0] == 0 ? 1 : mpa - 2;
      op.A.col.push_back(op.node_to_active[static_cast<std::size_t>(
          grid.encode(inner, 0, 0))]);
      op.A.val.push_back(-2.0 * inv_h2 / mu);
    }

    op.A.col.push_back(row);
    op.A.val.push_back(diag);

    if (!end_node) {
      for (int d = 0; d < N; ++d) {
        for (int step : {-1, +1}) {
          int nb[3] = {ijk[0], ijk[1], ijk[2]};
          nb[d] += step;
          if (nb[d] < 0 || nb[d] >= mpa) continue;
          Index gn = grid.encode(nb[0], nb[1], nb[2]);
          Index an = op.node_to_active[static_cast<std::size_t>(gn)];
          if (an < 0) continue;  // Dirichlet neighbor
          op.A.col.push_back(an);
          op.A.val.push_back(-inv_h2 / mu);
        }
      }
    }
    op.A.rowptr[static_cast<std::size_t>(row) + 1] =
        static_cast<Index>(op.A.col.size());
  }
  return op;
}

GridFunction matvec(const DiscreteOperator& op, const GridFunction& u) {
  require(u.grid == op.grid && u.size() == op.grid->size(),
          ErrorCode::ShapeMismatch, "field does not match the operator grid");
  GridFunction y(*op.grid);
  const Index nact = op.A.nrows;
  for (Index row = 0; row < nact; ++row) {
    Complex acc = 0;
    for (Index p = op.A.rowptr[static_cast<std::size_t>(row)];
         p < op.A.rowptr[static_cast<std::size_t>(row) + 1]; ++p) {
      Index col = op.A.col[static_cast<std::size_t>(p)];
      acc += op.A.val[static_cast<std::size_t>(p)] *
             u[op.active[static_cast<std::size_t>(col)]];
    }
    y[op.active[static_cast<std::size_t>(row)]] = acc;
  }
  return y;
}

GridFunction apply_reduced_wave(const Grid& grid, const MediumProfile& m,
                                Complex z, const GridFunction& u,
                                bool mu0_only) {
  require(u.grid == &grid, ErrorCode::ShapeMismatch,
          "field does not match the grid");
  GridFunction y(grid);
  const int N = grid.dim();
  const double inv_h2 = 1.0 / (grid.h() * grid.h());
  const double tie = grid.h() / 2;

  for (Index g = 0; g < grid.size(); ++g) {
    if (grid.is_wall(g)) continue;
    int ijk[3];
    grid.decode(g, ijk);
    Point x = grid.node(g);
    double mu = mu0_only ? m.mu0_at(x, tie) : m.mu_at(x, tie).mu;
    Complex lap = 2.0 * N * u[g];
    for (int d = 0; d < N; ++d) {
      int nb[3] = {ijk[0], ijk[1], ijk[2]};
      nb[d] = ijk[d] - 1;
      lap -= u[grid.encode(nb[0], nb[1], nb[2])];
      nb[d] = ijk[d] + 1;
      lap -= u[grid.encode(nb[0], nb[1], nb[2])];
    }
    y[g] = lap * inv_h2 / mu - z * u[g];
  }
  return y;
}

void write_matrix_market(const DiscreteOperator& op, std::ostream& os) {
  os << "%%MatrixMarket matrix coordinate complex general\n";
  os << op.A.nrows << " " << op.A.nrows << " " << op.A.col.size() << "\n";
  char buf[128];
  for (Index row = 0; row < op.A.nrows; ++row)
    for (Index p = op.A.rowptr[static_cast<std::size_t>(row)];
         p < op.A.rowptr[static_cast<std::size_t>(row) + 1]; ++p) {
      Complex v = op.A.val[static_cast<std::size_t>(p)];
      std::snprintf(buf, sizeof buf, "%lld %lld %.17g %.17g\n",
                    static_cast<long long>(row + 1),
                    static_cast<long long>(op.A.col[static_cast<std::size_t>(p)] + 1),
                    v.real(), v.imag());
      os << buf;
    }
}

}  // namespace laplab
