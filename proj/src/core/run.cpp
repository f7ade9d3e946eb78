#include "core/run.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>

#include "core/config.hpp"
#include "core/fd_operator.hpp"
#include "core/report.hpp"

namespace laplab {

namespace {

using nlohmann::json;

struct Ctx {
  RunConfig cfg;
  json raw;
  std::string out_dir;
  std::vector<std::string> artifacts;
  json report;
  int exit_code = 0;

  bool wants(const std::string& fmt) const {
    for (const auto& f : cfg.output.formats)
      if (f == fmt) return true;
    return false;
  }
  void emit(const std::string& name, const std::string& content) {
    std::string path = out_dir + "/" + name;
    write_text_file(path, content);
    artifacts.push_back(path);
  }
};

std::string describe_geometry(const RunConfig& cfg) {
  std::string s = cfg.geometry.kind + " [";
  for (std::size_t i = 0; i < cfg.geometry.breakpoints.size(); ++i)
    s += (i ? ", " : "") + format_number(cfg.geometry.breakpoints[i]);
  return s + "]";
}

std::string describe_medium(const RunConfig& cfg) {
  std::string s = "nus [";
  for (std::size_t i = 0; i < cfg.medium.nus.size(); ++i)
    s += (i ? ", " : "") + format_number(cfg.medium.nus[i]);
  s += "]";
  if (cfg.perturbation)
    s += " + " + cfg.perturbation->kind + " " + cfg.perturbation->profile;
  return s;
}

void cmd_validate(Ctx& ctx) {
  Instruments ins = build_instruments(ctx.cfg);
  PartitionCheckOptions pco;
  pco.box = ins.grid.rmax();

  CertificateReport geo =
      validate_partition(*ins.partition, ctx.cfg.medium.nus, pco);
  CertificateReport med = validate_medium(*ins.medium, ins.grid);

  ctx.report["geometry"] = to_json(geo);
  ctx.report["medium"] = to_json(med);

  if (ins.partition->layer_count() == 2) {
    ctx.report["cone_condition"] =
        to_json(check_cone_condition(*ins.partition, pco));
    ctx.report["cylindrical_condition"] = to_json(
        check_cylindrical_condition(*ins.partition, ctx.cfg.medium.nus, pco));
  }

  try {
    ctx.report["absence_conditions"] = to_json(check_absence_conditions(
        *ins.medium, ctx.cfg.experiment.lambda0, ins.grid));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NotDifferentiable) throw;
    ctx.report["absence_conditions"] = to_json(check_absence_conditions(
        *ins.medium, ctx.cfg.experiment.lambda0, ins.grid,
        AbsenceCondition::IntervalOnly));
    ctx.report["absence_note"] = "radial condition skipped: table profile";
  }

  if (ctx.wants("json"))
    ctx.emit("validate_report.json", ctx.report.dump(2) + "\n");
  if (!geo.pass || !med.pass) ctx.exit_code = 2;
}

void cmd_solve(Ctx& ctx) {
  Instruments ins = build_instruments(ctx.cfg);
  const ExperimentConfig& e = ctx.cfg.experiment;
  double lambda = e.lambda_list.at(0);
  int sgn = ins.side == Side::Minus ? -1 : +1;
  Complex z(lambda, sgn * e.eta);

  AssembleOptions ao;
  ao.side = ins.side;
  if (ins.grid.dim() == 1) ao.bc = BcKind::Robin1D;
  DiscreteOperator op = assemble(ins.grid, *ins.medium, z, ao);
  GridFunction f = build_source(ins.grid, [&] {
    SourceSpec s;
    s.kind = e.f_spec.kind == "ball"
                 ? SourceSpec::Kind::BallIndicator
                 : (e.f_spec.kind == "point" ? SourceSpec::Kind::PointMass
                                             : SourceSpec::Kind::GaussianBump);
    s.width = e.f_spec.width;
    s.r_cut = e.f_spec.r_cut;
    s.radius = e.f_spec.radius;
    s.center = e.f_spec.center;
    s.y = e.f_spec.y;
    return s;
  }(), ins.medium.get());
  auto [u, stats] = solve(op, f, ins.solver);

  WaveNumberField kf = wavenumber(z, *ins.medium, ins.grid);
  RadiationField rad = radiation_field(u, kf, sgn);
  ctx.report["lambda"] = lambda;
  ctx.report["eta"] = e.eta;
  ctx.report["side"] = sgn > 0 ? "+" : "-";
  ctx.report["converged"] = stats.converged;
  ctx.report["iterations"] = stats.iterations;
  ctx.report["residual"] = stats.residual;
  ctx.report["u_norm_neg_delta"] = weighted_norm(u, -ins.delta);
  ctx.report["f_norm_delta"] = weighted_norm(f, ins.delta);
  ctx.report["du_norm_w"] = weighted_norm(rad.Du, ins.delta - 1);
  ctx.report["du_norm_star"] = star_norm(rad.Du, ins.delta - 1);

  if (ctx.wants("csv")) ctx.emit("solve_field.csv", field_csv(u));
  if (ctx.wants("json"))
    ctx.emit("solve_report.json", ctx.report.dump(2) + "\n");
  if (!stats.converged) fail(ErrorCode::NoConvergence, "solver did not converge");
}

SourceSpec to_source_spec(const SourceConfig& f) {
  SourceSpec s;
  s.kind = f.kind == "ball"
               ? SourceSpec::Kind::BallIndicator
               : (f.kind == "point" ? SourceSpec::Kind::PointMass
                                    : SourceSpec::Kind::GaussianBump);
  s.width = f.width;
  s.r_cut = f.r_cut;
  s.radius = f.radius;
  s.center = f.center;
  s.y = f.y;
  return s;
}

void cmd_sweep(Ctx& ctx) {
  Instruments ins = build_instruments(ctx.cfg);
  const ExperimentConfig& e = ctx.cfg.experiment;

  SweepOptions opts;
  opts.solver = ins.solver;
  opts.compute_identity = e.compute_identity;
  SweepReport rep =
      lap_sweep(*ins.medium, ins.grid, e.lambda_list, e.eta0, e.factor, e.count,
                ins.side, to_source_spec(e.f_spec), ins.delta, opts);
  rep.geometry_desc = describe_geometry(ctx.cfg);
  rep.medium_desc = describe_medium(ctx.cfg);
  auto bounds = radiation_bound_measure(rep);

  ctx.report = to_json(rep);
  ctx.report["bounds"] = to_json(bounds);
  if (ctx.wants("csv")) {
    ctx.emit("sweep_rows.csv", sweep_rows_csv(rep));
    ctx.emit("sweep_bounds.csv", bounds_csv(bounds));
  }
  if (ctx.wants("json"))
    ctx.emit("sweep_report.json", ctx.report.dump(2) + "\n");

  for (const auto& v : rep.verdicts)
    if (v.verdict != SweepVerdict::LAPConverged) ctx.exit_code = 2;
}

void cmd_eigscan(Ctx& ctx) {
  Instruments ins = build_instruments(ctx.cfg);
  const ExperimentConfig& e = ctx.cfg.experiment;

  ScanOptions opts;
  opts.solver = ins.solver;
  opts.plateau_tol = e.plateau_tol;
  opts.num_samples = e.num_samples;
  opts.seed = ctx.cfg.seed != 0 ? ctx.cfg.seed : opts.seed;
  if (!e.eta_list.empty()) opts.eta_list = e.eta_list;
  opts.lambda0 = e.lambda0;

  ScanReport rep = eig_scan(*ins.medium, ins.grid, e.lambda_list, opts);
  ctx.report = to_json(rep);
  if (ctx.wants("csv")) ctx.emit("eigscan_rows.csv", scan_rows_csv(rep));
  if (ctx.wants("json"))
    ctx.emit("eigscan_report.json", ctx.report.dump(2) + "\n");
  if (!rep.contradictions.empty()) ctx.exit_code = 2;
}

void cmd_identity(Ctx& ctx) {
  const ExperimentConfig& e = ctx.cfg.experiment;
  double lambda = e.lambda_list.at(0);
  AlphaMode alpha =
      e.alpha == "one" ? AlphaMode::One : AlphaMode::InvSqrtMu0;

  auto run_at = [&](double h) {
    RunConfig cfg2 = ctx.cfg;
    cfg2.grid.h = h;
    Instruments ins = build_instruments(cfg2);
    GridFunction u(ins.grid);
    double w2 = e.f_spec.width * e.f_spec.width;
    for (Index i = 0; i < ins.grid.size(); ++i) {
      Point x = ins.grid.node(i);
      double d2 = 0;
      for (int d = 0; d < ins.grid.dim(); ++d) d2 += x[d] * x[d];
      u[i] = std::exp(-d2 / w2);
    }
    RadialWeight xi = RadialWeight::power(ins.grid.dim(), ins.delta);
    IdentityOptions io;
    io.alpha = alpha;
    return identity_residual(u, nullptr, Complex(lambda, 0), *ins.medium, xi,
                             e.shell_lo, e.shell_hi, io);
  };

  IdentityReport coarse = run_at(ctx.cfg.grid.h);
  IdentityReport fine = run_at(ctx.cfg.grid.h / 2);
  double ratio = coarse.residual > 0 ? fine.residual / coarse.residual
                                     : (fine.residual > 0 ? 1e30 : 0.0);

  ctx.report["lambda"] = lambda;
  ctx.report["h"] = ctx.cfg.grid.h;
  ctx.report["coarse"] = to_json(coarse);
  ctx.report["fine"] = to_json(fine);
  ctx.report["refinement_ratio"] = ratio;
  ctx.report["ratio_threshold"] = e.ratio_threshold;

  if (ctx.wants("csv")) {
    ctx.emit("identity_coarse.csv", identity_csv(coarse));
    ctx.emit("identity_fine.csv", identity_csv(fine));
  }
  if (ctx.wants("json"))
    ctx.emit("identity_report.json", ctx.report.dump(2) + "\n");
  if (ratio > e.ratio_threshold) ctx.exit_code = 2;
}

void cmd_oracle(Ctx& ctx) {
  const ExperimentConfig& e = ctx.cfg.experiment;
  require(ctx.cfg.grid.N == 1, ErrorCode::Config,
          "the oracle comparison runs in the 1-D mode (grid.N = 1)");
  SlabStack stack = slab_stack_from(ctx.cfg);

  std::vector<double> etas = e.eta_list.empty()
                                 ? std::vector<double>{0.0, 0.01}
                                 : e.eta_list;
  std::vector<double> hs = e.h_list.empty()
                               ? std::vector<double>{1.0 / 32, 1.0 / 64, 1.0 / 128}
                               : e.h_list;
  Instruments ins = build_instruments(ctx.cfg, /*need_grid=*/false);
  double delta_w = ins.delta;
  int sgn = ins.side == Side::Minus ? -1 : +1;
  double X = e.X > 0 ? e.X : ctx.cfg.grid.rmax;

  Source1D src;
  src.kind = Source1D::Kind::PointMass;
  src.y = e.f_spec.y;

  std::string csv = "lambda,eta,h,rel_err,order_vs_prev\n";
  json rows = json::array();
  double worst_mid = 0;
  bool wrote_sample = false;

  for (double lambda : e.lambda_list) {
    for (double eta : etas) {
      Complex z(lambda, sgn * eta);
      ExactSolution exact = exact_solve(stack, z, src, sgn);
      double prev_err = -1;
      int hi_idx = 0;
      for (double h : hs) {
        RunConfig cfg2 = ctx.cfg;
        cfg2.grid.h = h;
        cfg2.grid.sponge.off = true;
        Instruments g = build_instruments(cfg2);
        AssembleOptions ao;
        ao.bc = BcKind::Robin1D;
        ao.side = ins.side;
        DiscreteOperator op = assemble(g.grid, *g.medium, z, ao);
        SourceSpec fd_src;
        fd_src.kind = SourceSpec::Kind::PointMass;
        fd_src.y = src.y;
        GridFunction f = build_source(g.grid, fd_src, g.medium.get());
        SolveOptions so = g.solver;
        so.method = SolveMethod::Tridiagonal;
        auto [u, stats] = solve(op, f, so);

        GridFunction diff(g.grid), uex(g.grid);
        for (Index i = 0; i < g.grid.size(); ++i) {
          Complex ev = exact.eval(g.grid.node(i)[0]);
          uex[i] = ev;
          diff[i] = u[i] - ev;
        }
        Region reg = Region::ball(X + g.grid.h());
        double err = weighted_norm(diff, -delta_w, reg) /
                     weighted_norm(uex, -delta_w, reg);
        double order = prev_err > 0 ? std::log2(prev_err / err) : 0.0;
        csv += format_number(lambda) + "," + format_number(eta) + "," +
               format_number(h) + "," + format_number(err) + "," +
               format_number(order) + "\n";
        rows.push_back(json{{"lambda", lambda},
                            {"eta", eta},
                            {"h", h},
                            {"rel_err", err},
                            {"order_vs_prev", order},
                            {"solver_ok", stats.converged}});
        if (hi_idx == static_cast<int>(hs.size()) / 2)
          worst_mid = std::max(worst_mid, err);
        prev_err = err;
        ++hi_idx;

        if (!wrote_sample && ctx.wants("csv")) {
          ctx.emit("oracle_exact_sample.csv",
                   exact_solution_csv(exact, -X, X, 2001));
          wrote_sample = true;
        }
      }
    }
  }

  ctx.report["rows"] = rows;
  ctx.report["max_rel_err_mid_h"] = worst_mid;
  ctx.report["threshold"] = e.max_rel_error;
  ctx.report["delta"] = delta_w;
  if (ctx.wants("csv")) ctx.emit("oracle_rows.csv", csv);
  if (ctx.wants("json"))
    ctx.emit("oracle_report.json", ctx.report.dump(2) + "\n");
  if (worst_mid > e.max_rel_error) ctx.exit_code = 2;
}

}  // namespace

const char* laplab_version_string() { return "0.1.0"; }

RunResult run_command(const std::string& command, json config_json,
                      const std::string& out_dir_override) {
  auto t0 = std::chrono::steady_clock::now();
  RunResult result;
  Ctx ctx;
  ctx.raw = config_json;

  json manifest;
  manifest["command"] = command;
  manifest["version"] = laplab_version_string();
  manifest["config_hash"] = config_hash(config_json);
  manifest["errors"] = json::array();

  try {
    if (config_json.contains("experiment") &&
        config_json["experiment"].is_object())
      config_json["experiment"]["name"] = command;
    ctx.cfg = parse_config(config_json);
    manifest["seed"] = ctx.cfg.seed;
    ctx.out_dir = out_dir_override.empty() ? ctx.cfg.output.dir
                                           : out_dir_override;
    std::filesystem::create_directories(ctx.out_dir);

    if (command == "validate")
      cmd_validate(ctx);
    else if (command == "solve")
      cmd_solve(ctx);
    else if (command == "sweep")
      cmd_sweep(ctx);
    else if (command == "eigscan")
      cmd_eigscan(ctx);
    else if (command == "identity")
      cmd_identity(ctx);
    else if (command == "oracle")
      cmd_oracle(ctx);
    else
      fail(ErrorCode::Config, "unknown command: " + command);
    result.exit_code = ctx.exit_code;
  } catch (const Error& e) {
    manifest["errors"].push_back(
        json{{"code", error_code_name(e.code())}, {"message", e.what()}});
    result.exit_code = 1;
  } catch (const std::exception& e) {
    manifest["errors"].push_back(
        json{{"code", "Internal"}, {"message", e.what()}});
    result.exit_code = 1;
  }

  auto t1 = std::chrono::steady_clock::now();
  manifest["wall_time_s"] =
      std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count() /
      1000.0;
  manifest["exit_code"] = result.exit_code;
  manifest["artifacts"] = ctx.artifacts;
  if (!ctx.report.is_null()) manifest["summary_available"] = true;

  if (!ctx.out_dir.empty()) {
    try {
      write_text_file(ctx.out_dir + "/manifest.json", manifest.dump(2) + "\n");
    } catch (const Error&) {
      // manifest write failure downgrades to the error already recorded
    }
  }
  result.manifest = manifest;
  return result;
}

}  // namespace laplab
