#include "core/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

namespace laplab {

namespace {

using nlohmann::json;

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

json point_json(const Point& p) { return json::array({p[0], p[1], p[2]}); }

}  // namespace

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorCode::Io, "cannot open for writing: " + path);
  out << content;
  require(out.good(), ErrorCode::Io, "write failed: " + path);
}

json to_json(const CertificateReport& r) {
  json out;
  out["pass"] = r.pass;
  json entries = json::array();
  for (const auto& e : r.entries) {
    json je;
    je["condition"] = e.condition;
    je["pass"] = e.pass;
    je["constants"] = e.constants;
    if (e.witness) je["witness"] = point_json(*e.witness);
    if (!e.detail.empty()) je["detail"] = e.detail;
    entries.push_back(je);
  }
  out["entries"] = entries;
  return out;
}

json to_json(const SweepReport& r) {
  json out;
  out["dim"] = r.dim;
  out["rmax"] = r.rmax;
  out["h"] = r.h;
  out["delta"] = r.delta;
  out["eta0"] = r.eta0;
  out["factor"] = r.factor;
  out["count"] = r.count;
  out["side"] = r.side > 0 ? "+" : "-";
  out["perturbed"] = r.perturbed;
  out["sponge_on"] = r.sponge_on;
  out["geometry"] = r.geometry_desc;
  out["medium"] = r.medium_desc;
  json verdicts = json::array();
  for (const auto& v : r.verdicts) {
    json jv;
    jv["lambda"] = v.lambda;
    jv["side"] = v.side > 0 ? "+" : "-";
    jv["verdict"] = sweep_verdict_name(v.verdict);
    jv["worst_cauchy_ratio"] = v.worst_cauchy_ratio;
    jv["ratio_spread"] = v.ratio_spread;
    jv["u_growth_slope"] = v.u_growth_slope;
    verdicts.push_back(jv);
  }
  out["verdicts"] = verdicts;
  return out;
}

json to_json(const std::vector<BoundRow>& rows) {
  json out = json::array();
  for (const auto& b : rows) {
    json jb;
    jb["lambda"] = b.lambda;
    jb["side"] = b.side > 0 ? "+" : "-";
    jb["c_full"] = b.c_full;
    jb["c_star"] = b.c_star;
    jb["c_dr"] = b.c_dr;
    jb["spread_full"] = b.spread_full;
    jb["unbounded_flag"] = b.unbounded_flag;
    out.push_back(jb);
  }
  return out;
}

json to_json(const ScanReport& r) {
  json out;
  out["lambda0"] = r.lambda0;
  out["radial_cert_pass"] = r.radial_cert_pass;
  out["interval_cert_pass"] = r.interval_cert_pass;
  out["certificates"] = to_json(r.certificates);
  json sus = json::array();
  for (auto [l, p] : r.suspected)
    sus.push_back(json{{"lambda", l}, {"plateau", p}});
  out["suspected"] = sus;
  out["contradictions"] = r.contradictions;
  if (!r.note.empty()) out["note"] = r.note;
  json verdicts = json::array();
  for (const auto& c : r.curves)
    verdicts.push_back(json{{"lambda", c.lambda},
                            {"verdict", c.eigenvalue_likely ? "EigenvalueLikely"
                                                            : "Clean"},
                            {"plateau", c.plateau}});
  out["verdicts"] = verdicts;
  return out;
}

json to_json(const ChainReport& r) {
  json out;
  out["delta"] = r.exponents.delta;
  out["epsilon"] = r.exponents.epsilon;
  out["eps_step"] = r.exponents.eps_step;
  out["j0"] = r.exponents.j0;
  out["delta0"] = r.exponents.delta0;
  out["delta_admissible_hi"] = r.exponents.delta_admissible_hi;
  out["lambda"] = r.lambda;
  out["c1"] = r.c1;
  out["arithmetic_pass"] = r.arithmetic_pass;
  json steps = json::array();
  for (const auto& s : r.steps) {
    json js;
    js["j"] = s.j;
    js["weight_from"] = s.weight_from;
    js["weight_to"] = s.weight_to;
    js["window_exponent"] = s.window_exponent;
    js["window_ok"] = s.window_ok;
    if (s.ratio >= 0) js["ratio"] = s.ratio;
    steps.push_back(js);
  }
  out["steps"] = steps;
  return out;
}

json to_json(const IdentityReport& r) {
  json out;
  out["z"] = json::array({r.z.real(), r.z.imag()});
  out["shell"] = json::array({r.r_inner, r.r_outer});
  out["terms"] = r.terms;
  out["lhs_total"] = r.lhs_total;
  out["rhs_total"] = r.rhs_total;
  out["residual"] = r.residual;
  out["interface_sign_term"] = r.interface_sign_term;
  out["f_mismatch"] = r.f_mismatch;
  return out;
}

json to_json(const LapLimitTable& t) {
  json out;
  out["lambda"] = t.lambda;
  out["delta"] = t.delta;
  out["X"] = t.X;
  out["limit_norm"] = t.limit_norm;
  json rows = json::array();
  for (const auto& r : t.rows)
    rows.push_back(json{{"eta", r.eta},
                        {"u_norm", r.u_norm},
                        {"cauchy_diff", r.cauchy_diff},
                        {"diff_to_limit", r.diff_to_limit}});
  out["rows"] = rows;
  return out;
}

std::string sweep_rows_csv(const SweepReport& r) {
  std::string out =
      "lambda,eta,side,f_norm_delta,u_norm_neg_delta,du_norm_w,du_norm_star,"
      "dru_norm_w,dru_norm_star,ratio_full,ratio_star,ratio_dr,ext_decay_1,"
      "ext_decay_2,ext_decay_4,cauchy_diff,eta_u2_x,im_fu_x,identity_residual,"
      "solver_ok,iterations,residual,error\n";
  for (const auto& row : r.rows) {
    out += format_number(row.lambda) + "," + format_number(row.eta) + "," +
           (row.side > 0 ? "+" : "-") + "," + format_number(row.f_norm_delta) +
           "," + format_number(row.u_norm_neg_delta) + "," +
           format_number(row.du_norm_w) + "," + format_number(row.du_norm_star) +
           "," + format_number(row.dru_norm_w) + "," +
           format_number(row.dru_norm_star) + "," +
           format_number(row.ratio_full) + "," + format_number(row.ratio_star) +
           "," + format_number(row.ratio_dr) + "," +
           format_number(row.ext_decay[0]) + "," +
           format_number(row.ext_decay[1]) + "," +
           format_number(row.ext_decay[2]) + "," +
           format_number(row.cauchy_diff) + "," + format_number(row.eta_u2_x) +
           "," + format_number(row.im_fu_x) + "," +
           format_number(row.identity_residual) + "," +
           (row.solver_ok ? "1" : "0") + "," + std::to_string(row.iterations) +
           "," + format_number(row.residual) + "," + csv_escape(row.error) +
           "\n";
  }
  return out;
}

std::string bounds_csv(const std::vector<BoundRow>& rows) {
  std::string out = "lambda,side,c_full,c_star,c_dr,spread_full,unbounded\n";
  for (const auto& b : rows)
    out += format_number(b.lambda) + std::string(",") + (b.side > 0 ? "+" : "-") +
           "," + format_number(b.c_full) + "," + format_number(b.c_star) + "," +
           format_number(b.c_dr) + "," + format_number(b.spread_full) + "," +
           (b.unbounded_flag ? "1" : "0") + "\n";
  return out;
}

std::string scan_rows_csv(const ScanReport& r) {
  std::string out = "lambda,eta,sample_id,m,verdict\n";
  for (const auto& c : r.curves) {
    const char* verdict = c.eigenvalue_likely ? "EigenvalueLikely" : "Clean";
    for (const auto& row : c.rows)
      out += format_number(row.lambda) + "," + format_number(row.eta) + "," +
             std::to_string(row.sample) + "," + format_number(row.m) + "," +
             verdict + "\n";
  }
  return out;
}

std::string identity_csv(const IdentityReport& r) {
  std::string out = "term,value_re,value_im\n";
  for (const auto& [name, value] : r.terms)
    out += name + "," + format_number(value) + ",0\n";
  out += "lhs_total," + format_number(r.lhs_total) + ",0\n";
  out += "rhs_total," + format_number(r.rhs_total) + ",0\n";
  out += "residual," + format_number(r.residual) + ",0\n";
  return out;
}

std::string flux_csv(const FluxProbe& p) {
  std::string out = "R,F\n";
  for (auto [R, F] : p.points)
    out += format_number(R) + "," + format_number(F) + "\n";
  return out;
}

std::string field_csv(const GridFunction& u) {
  const Grid& g = *u.grid;
  std::string out;
  if (g.dim() == 1)
    out = "x,re_u,im_u\n";
  else if (g.dim() == 2)
    out = "x1,x2,re_u,im_u\n";
  else
    out = "x1,x2,x3,re_u,im_u\n";
  for (Index i = 0; i < g.size(); ++i) {
    Point x = g.node(i);
    for (int d = 0; d < g.dim(); ++d) out += format_number(x[d]) + ",";
    out += format_number(u[i].real()) + "," + format_number(u[i].imag()) + "\n";
  }
  return out;
}

std::string exact_solution_csv(const ExactSolution& sol, double lo, double hi,
                               int samples) {
  std::string out = "x,re_u,im_u\n";
  for (int i = 0; i < samples; ++i) {
    double x = lo + (hi - lo) * i / (samples - 1);
    Complex v = sol.eval(x);
    out += format_number(x) + "," + format_number(v.real()) + "," +
           format_number(v.imag()) + "\n";
  }
  return out;
}

}  // namespace laplab
