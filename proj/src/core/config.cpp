#include "core/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace laplab {

namespace {

using nlohmann::json;

void check_keys(const json& j, const std::string& where,
                const std::set<std::string>& allowed) {
  require(j.is_object(), ErrorCode::Config, where + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    require(allowed.count(it.key()) != 0, ErrorCode::Config,
            "unknown key '" + where + "." + it.key() + "'");
}

double get_num(const json& j, const std::string& where, const char* key,
               double fallback, bool required = false) {
  if (!j.contains(key)) {
    require(!required, ErrorCode::Config,
            "missing required key '" + where + "." + key + "'");
    return fallback;
  }
  require(j[key].is_number(), ErrorCode::Config,
          "'" + where + "." + key + "' must be a number");
  return j[key].get<double>();
}

std::string get_str(const json& j, const std::string& where, const char* key,
                    const std::string& fallback, bool required = false) {
  if (!j.contains(key)) {
    require(!required, ErrorCode::Config,
            "missing required key '" + where + "." + key + "'");
    return fallback;
  }
  require(j[key].is_string(), ErrorCode::Config,
          "'" + where + "." + key + "' must be a string");
  return j[key].get<std::string>();
}

std::vector<double> get_vec(const json& j, const std::string& where,
                            const char* key, bool required = false) {
  if (!j.contains(key)) {
    require(!required, ErrorCode::Config,
            "missing required key '" + where + "." + key + "'");
    return {};
  }
  require(j[key].is_array(), ErrorCode::Config,
          "'" + where + "." + key + "' must be an array of numbers");
  std::vector<double> out;
  for (const auto& v : j[key]) {
    require(v.is_number(), ErrorCode::Config,
            "'" + where + "." + key + "' must contain numbers only");
    out.push_back(v.get<double>());
  }
  return out;
}

Point get_point(const json& j, const std::string& where, const char* key) {
  Point p{0, 0, 0};
  if (!j.contains(key)) return p;
  auto v = get_vec(j, where, key);
  require(v.size() <= 3, ErrorCode::Config,
          "'" + where + "." + key + "' has more than 3 components");
  for (std::size_t i = 0; i < v.size(); ++i) p[i] = v[i];
  return p;
}

SourceConfig parse_source(const json& j, const std::string& where) {
  SourceConfig s;
  if (j.is_null()) return s;
  check_keys(j, where, {"kind", "width", "r_cut", "radius", "center", "y"});
  s.kind = get_str(j, where, "kind", s.kind);
  require(s.kind == "gaussian" || s.kind == "ball" || s.kind == "point",
          ErrorCode::Config, where + ".kind must be gaussian|ball|point");
  s.width = get_num(j, where, "width", s.width);
  s.r_cut = get_num(j, where, "r_cut", s.r_cut);
  s.radius = get_num(j, where, "radius", s.radius);
  s.center = get_point(j, where, "center");
  s.y = get_num(j, where, "y", s.y);
  return s;
}

SolverConfig parse_solver(const json& j, const std::string& where) {
  SolverConfig s;
  if (j.is_null()) return s;
  check_keys(j, where, {"method", "tol", "max_iter", "restart", "precond"});
  s.method = get_str(j, where, "method", s.method);
  require(s.method == "krylov" || s.method == "dense" ||
              s.method == "tridiagonal",
          ErrorCode::Config, where + ".method must be krylov|dense|tridiagonal");
  s.tol = get_num(j, where, "tol", s.tol);
  s.max_iter = static_cast<int>(get_num(j, where, "max_iter", s.max_iter));
  s.restart = static_cast<int>(get_num(j, where, "restart", s.restart));
  s.precond = get_str(j, where, "precond", s.precond);
  require(s.precond == "diagonal" || s.precond == "none", ErrorCode::Config,
          where + ".precond must be diagonal|none");
  return s;
}

}  // namespace

RunConfig parse_config(const nlohmann::json& j) {
  check_keys(j, "config",
             {"geometry", "medium", "perturbation", "grid", "experiment",
              "output", "seed"});
  RunConfig cfg;

  require(j.contains("geometry"), ErrorCode::Config, "missing 'geometry'");
  {
    const json& g = j["geometry"];
    check_keys(g, "geometry", {"kind", "breakpoints", "axis", "index_set"});
    cfg.geometry.kind = get_str(g, "geometry", "kind", "", true);
    require(cfg.geometry.kind == "planar" || cfg.geometry.kind == "cylindrical",
            ErrorCode::Config, "geometry.kind must be planar|cylindrical");
    cfg.geometry.breakpoints = get_vec(g, "geometry", "breakpoints", true);
    cfg.geometry.axis = get_point(g, "geometry", "axis");
    cfg.geometry.index_set = get_str(g, "geometry", "index_set", "auto");
  }

  require(j.contains("medium"), ErrorCode::Config, "missing 'medium'");
  {
    const json& m = j["medium"];
    check_keys(m, "medium", {"nus", "extension_rule"});
    cfg.medium.nus = get_vec(m, "medium", "nus", true);
    cfg.medium.extension_rule =
        get_str(m, "medium", "extension_rule", "repeat_last");
    require(cfg.medium.extension_rule == "repeat_last", ErrorCode::Config,
            "medium.extension_rule: only 'repeat_last' is supported");
  }

  if (j.contains("perturbation") && !j["perturbation"].is_null()) {
    const json& p = j["perturbation"];
    check_keys(p, "perturbation",
               {"kind", "profile", "c1", "epsilon", "sign", "center", "width",
                "table"});
    PerturbationConfig pc;
    pc.kind = get_str(p, "perturbation", "kind", "", true);
    require(pc.kind == "short" || pc.kind == "long", ErrorCode::Config,
            "perturbation.kind must be short|long");
    pc.profile = get_str(p, "perturbation", "profile", "power");
    require(pc.profile == "power" || pc.profile == "gaussian" ||
                pc.profile == "table",
            ErrorCode::Config, "perturbation.profile must be power|gaussian|table");
    pc.c1 = get_num(p, "perturbation", "c1", 0, true);
    pc.epsilon = get_num(p, "perturbation", "epsilon", 0.25);
    pc.sign = get_num(p, "perturbation", "sign", 1);
    pc.center = get_point(p, "perturbation", "center");
    pc.width = get_num(p, "perturbation", "width", 1);
    if (p.contains("table")) {
      require(p["table"].is_array(), ErrorCode::Config,
              "perturbation.table must be an array of [r, value] pairs");
      for (const auto& row : p["table"]) {
        require(row.is_array() && row.size() == 2, ErrorCode::Config,
                "perturbation.table entries must be [r, value]");
        pc.table.emplace_back(row[0].get<double>(), row[1].get<double>());
      }
    }
    cfg.perturbation = pc;
  }

  require(j.contains("grid"), ErrorCode::Config, "missing 'grid'");
  {
    const json& g = j["grid"];
    check_keys(g, "grid", {"N", "rmax", "h", "sponge"});
    cfg.grid.N = static_cast<int>(get_num(g, "grid", "N", 2, true));
    cfg.grid.rmax = get_num(g, "grid", "rmax", 8, true);
    cfg.grid.h = get_num(g, "grid", "h", 0.25, true);
    if (g.contains("sponge")) {
      const json& s = g["sponge"];
      if (s.is_string()) {
        require(s.get<std::string>() == "off", ErrorCode::Config,
                "grid.sponge must be an object or \"off\"");
        cfg.grid.sponge.off = true;
      } else {
        check_keys(s, "grid.sponge", {"width", "strength", "exponent"});
        cfg.grid.sponge.width = get_num(s, "grid.sponge", "width", -1);
        cfg.grid.sponge.strength = get_num(s, "grid.sponge", "strength", -1);
        cfg.grid.sponge.exponent = get_num(s, "grid.sponge", "exponent", 2);
      }
    }
  }

  require(j.contains("experiment"), ErrorCode::Config, "missing 'experiment'");
  {
    const json& e = j["experiment"];
    static const std::set<std::string> allowed{
        "name",       "lambda_list", "lambda_grid", "eta0",
        "factor",     "count",       "side",        "delta",
        "f_spec",     "solver",      "eta_list",    "plateau_tol",
        "num_samples", "lambda0",    "eta",         "shell",
        "alpha",      "ratio_threshold", "h_list",  "X",
        "max_rel_error", "compute_identity"};
    check_keys(e, "experiment", allowed);
    ExperimentConfig& x = cfg.experiment;
    x.name = get_str(e, "experiment", "name", "", true);
    require(x.name == "validate" || x.name == "solve" || x.name == "sweep" ||
                x.name == "eigscan" || x.name == "identity" ||
                x.name == "oracle",
            ErrorCode::Config,
            "experiment.name must be one of validate|solve|sweep|eigscan|"
            "identity|oracle");
    if (e.contains("lambda_list")) x.lambda_list = get_vec(e, "experiment", "lambda_list");
    if (e.contains("lambda_grid")) x.lambda_list = get_vec(e, "experiment", "lambda_grid");
    x.eta0 = get_num(e, "experiment", "eta0", x.eta0);
    x.factor = get_num(e, "experiment", "factor", x.factor);
    x.count = static_cast<int>(get_num(e, "experiment", "count", x.count));
    x.side = get_str(e, "experiment", "side", x.side);
    require(x.side == "+" || x.side == "-", ErrorCode::Config,
            "experiment.side must be '+' or '-'");
    x.delta = get_num(e, "experiment", "delta", x.delta);
    if (e.contains("f_spec")) x.f_spec = parse_source(e["f_spec"], "experiment.f_spec");
    if (e.contains("solver")) x.solver = parse_solver(e["solver"], "experiment.solver");
    x.eta_list = get_vec(e, "experiment", "eta_list");
    x.plateau_tol = get_num(e, "experiment", "plateau_tol", x.plateau_tol);
    x.num_samples =
        static_cast<int>(get_num(e, "experiment", "num_samples", x.num_samples));
    x.lambda0 = get_num(e, "experiment", "lambda0", x.lambda0);
    x.eta = get_num(e, "experiment", "eta", x.eta);
    if (e.contains("shell")) {
      auto v = get_vec(e, "experiment", "shell");
      require(v.size() == 2, ErrorCode::Config,
              "experiment.shell must be [r_inner, r_outer]");
      x.shell_lo = v[0];
      x.shell_hi = v[1];
    }
    x.alpha = get_str(e, "experiment", "alpha", x.alpha);
    require(x.alpha == "inv_sqrt_mu0" || x.alpha == "one", ErrorCode::Config,
            "experiment.alpha must be inv_sqrt_mu0|one");
    x.ratio_threshold = get_num(e, "experiment", "ratio_threshold", x.ratio_threshold);
    x.h_list = get_vec(e, "experiment", "h_list");
    x.X = get_num(e, "experiment", "X", x.X);
    x.max_rel_error = get_num(e, "experiment", "max_rel_error", x.max_rel_error);
    if (e.contains("compute_identity")) {
      require(e["compute_identity"].is_boolean(), ErrorCode::Config,
              "experiment.compute_identity must be a boolean");
      x.compute_identity = e["compute_identity"].get<bool>();
    }
  }

  if (j.contains("output")) {
    const json& o = j["output"];
    check_keys(o, "output", {"dir", "formats"});
    cfg.output.dir = get_str(o, "output", "dir", cfg.output.dir);
    if (o.contains("formats")) {
      cfg.output.formats.clear();
      for (const auto& f : o["formats"]) {
        std::string s = f.get<std::string>();
        require(s == "csv" || s == "json", ErrorCode::Config,
                "output.formats entries must be csv|json");
        cfg.output.formats.push_back(s);
      }
    }
  }

  if (j.contains("seed")) {
    require(j["seed"].is_number_integer(), ErrorCode::Config,
            "seed must be an integer");
    cfg.seed = j["seed"].get<std::uint64_t>();
  }
  return cfg;
}

nlohmann::json load_config_file(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::Io, "cannot open config file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    fail(ErrorCode::Config, std::string("config parse error: ") + e.what());
  }
  return j;
}

void apply_override(nlohmann::json& j, const std::string& dotted_key,
                    const std::string& value) {
  nlohmann::json* cur = &j;
  std::size_t pos = 0;
  std::string key = dotted_key;
  while ((pos = key.find('.')) != std::string::npos) {
    std::string head = key.substr(0, pos);
    key = key.substr(pos + 1);
    if (!cur->contains(head)) (*cur)[head] = nlohmann::json::object();
    cur = &(*cur)[head];
  }
  nlohmann::json parsed = nlohmann::json::parse(value, nullptr, false);
  if (parsed.is_discarded())
    (*cur)[key] = value;
  else
    (*cur)[key] = parsed;
}

std::string config_hash(const nlohmann::json& j) {
  std::string s = j.dump();
  std::uint64_t hash = 1469598103934665603ull;
  for (unsigned char c : s) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(hash));
  return buf;
}

Instruments build_instruments(const RunConfig& cfg, bool need_grid) {
  Instruments ins{nullptr, nullptr, Grid(), 0.75, Side::Plus, SolveOptions{}};

  std::shared_ptr<LayeredPartition> part;
  if (cfg.geometry.kind == "planar") {
    int dim = cfg.grid.N >= 2 ? cfg.grid.N : 2;
    Point axis = cfg.geometry.axis;
    if (cfg.grid.N == 1) axis = {1, 0, 0};  // 1-D mode: stack along x
    part = std::make_shared<LayeredPartition>(
        LayeredPartition::planar(dim, cfg.geometry.breakpoints, axis));
  } else {
    require(cfg.grid.N >= 2, ErrorCode::Config,
            "cylindrical geometry requires N >= 2");
    part = std::make_shared<LayeredPartition>(
        LayeredPartition::concentric(cfg.grid.N, cfg.geometry.breakpoints));
  }
  ins.partition = part;

  std::optional<Perturbation> pert;
  if (cfg.perturbation) {
    Perturbation p;
    p.kind = cfg.perturbation->kind == "short" ? PerturbationKind::ShortRange
                                               : PerturbationKind::LongRange;
    p.profile = cfg.perturbation->profile == "power"
                    ? PerturbationProfile::PowerDecay
                    : (cfg.perturbation->profile == "gaussian"
                           ? PerturbationProfile::GaussianBump
                           : PerturbationProfile::Table);
    p.c1 = cfg.perturbation->c1;
    p.epsilon = cfg.perturbation->epsilon;
    p.sign = cfg.perturbation->sign;
    p.center = cfg.perturbation->center;
    p.width = cfg.perturbation->width;
    p.table = cfg.perturbation->table;
    pert = p;
  }
  ins.medium =
      std::make_shared<MediumProfile>(ins.partition, cfg.medium.nus, pert);

  if (need_grid) {
    SpongeParams sp;
    if (!cfg.grid.sponge.off) {
      sp.width = cfg.grid.sponge.width < 0 ? cfg.grid.rmax / 4
                                           : cfg.grid.sponge.width;
      sp.strength = cfg.grid.sponge.strength;  // < 0 = auto at assembly
      if (sp.strength == 0) sp.strength = -1;
      sp.exponent = cfg.grid.sponge.exponent;
    }
    double lam_max = 0;
    for (double l : cfg.experiment.lambda_list) lam_max = std::max(lam_max, l);
    double mu_max = ins.medium->M0();
    if (cfg.perturbation) mu_max += std::abs(cfg.perturbation->c1);
    double kmax = lam_max > 0 ? std::sqrt(lam_max * mu_max) : 0;
    ins.grid = Grid::build(cfg.grid.N, cfg.grid.rmax, cfg.grid.h, sp, kmax);
  }

  ins.side = cfg.experiment.side == "-" ? Side::Minus : Side::Plus;
  ins.delta = cfg.experiment.delta;
  if (ins.delta == 0) {
    ins.delta = 0.75;
    if (cfg.perturbation)
      ins.delta = std::min(0.75, 0.5 + cfg.perturbation->epsilon / 4.0);
  }

  const SolverConfig& sc = cfg.experiment.solver;
  ins.solver.method = sc.method == "dense"
                          ? SolveMethod::DenseDirect
                          : (sc.method == "tridiagonal" ? SolveMethod::Tridiagonal
                                                        : SolveMethod::Krylov);
  ins.solver.tol = sc.tol;
  ins.solver.max_iter = sc.max_iter;
  ins.solver.restart = sc.restart;
  ins.solver.precond = sc.precond == "none"
                           ? PreconditionerKind::None
                           : PreconditionerKind::DiagonalComplexShift;
  return ins;
}

SlabStack slab_stack_from(const RunConfig& cfg) {
  require(cfg.geometry.kind == "planar", ErrorCode::Config,
          "the 1-D oracle needs a planar stack");
  SlabStack st;
  st.breakpoints = cfg.geometry.breakpoints;
  const auto& nus = cfg.medium.nus;
  require(nus.size() == st.breakpoints.size() + 1, ErrorCode::Config,
          "medium.nus must have one value per region");
  st.nu_left = nus.front();
  st.nu_right = nus.back();
  st.slab_nus.assign(nus.begin() + 1, nus.end() - 1);
  return st;
}

}  // namespace laplab
