#ifndef LAPLAB_CORE_CONFIG_HPP
#define LAPLAB_CORE_CONFIG_HPP

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/experiments.hpp"
#include "core/grid.hpp"
#include "core/medium.hpp"
#include "core/oracle1d.hpp"
#include "core/solver.hpp"

namespace laplab {

struct GeometryConfig {
  std::string kind;  // "planar" | "cylindrical"
  std::vector<double> breakpoints;
  Point axis{0, 0, 0};  // planar only; zero = default axis
  std::string index_set = "auto";
};

struct MediumConfig {
  std::vector<double> nus;
  std::string extension_rule = "repeat_last";
};

struct PerturbationConfig {
  std::string kind;     // "short" | "long"
  std::string profile;  // "power" | "gaussian" | "table"
  double c1 = 0;
  double epsilon = 0.25;
  double sign = 1;
  Point center{0, 0, 0};
  double width = 1;
  std::vector<std::pair<double, double>> table;
};

struct SpongeConfig {
  bool off = false;
  double width = -1;     // < 0: default rmax/4
  double strength = -1;  // < 0: automatic 2 max(Re k)
  double exponent = 2;
};

struct GridConfig {
  int N = 2;
  double rmax = 8;
  double h = 0.25;
  SpongeConfig sponge;
};

struct SolverConfig {
  std::string method = "krylov";  // krylov | dense | tridiagonal
  double tol = 1e-8;
  int max_iter = 20000;
  int restart = 200;
  std::string precond = "diagonal";  // diagonal | none
};

struct SourceConfig {
  std::string kind = "gaussian";  // gaussian | ball | point
  double width = 1;
  double r_cut = 3;
  double radius = 1;
  Point center{0, 0, 0};
  double y = 0;
};

struct ExperimentConfig {
  std::string name;  // validate | solve | sweep | eigscan | identity | oracle
  std::vector<double> lambda_list{1.0};
  double eta0 = 1.0;
  double factor = 2.0;
  int count = 8;
  std::string side = "+";
  double delta = 0;  // 0 = choose the default for the medium
  SourceConfig f_spec;
  SolverConfig solver;
  // eigscan
  std::vector<double> eta_list;
  double plateau_tol = 1e-3;
  int num_samples = 3;
  double lambda0 = 0;
  // solve
  double eta = 0.01;
  // identity
  double shell_lo = 1.0, shell_hi = 4.0;
  std::string alpha = "inv_sqrt_mu0";  // or "one"
  double ratio_threshold = 0.7;
  // oracle
  std::vector<double> h_list;
  double X = 0;  // comparison interval half-width; 0 = rmax
  double max_rel_error = 0.02;
  bool compute_identity = false;
};

struct OutputConfig {
  std::string dir = "out";
  std::vector<std::string> formats{"csv", "json"};
};

struct RunConfig {
  GeometryConfig geometry;
  MediumConfig medium;
  std::optional<PerturbationConfig> perturbation;
  GridConfig grid;
  ExperimentConfig experiment;
  OutputConfig output;
  std::uint64_t seed = 0;
};

// Strict parse: unknown keys and malformed values raise Config errors with
// the offending key path.
RunConfig parse_config(const nlohmann::json& j);
nlohmann::json load_config_file(const std::string& path);

// --set key.path=value overrides applied to the raw document; values parse as
// JSON when possible and fall back to strings.
void apply_override(nlohmann::json& j, const std::string& dotted_key,
                    const std::string& value);

// Stable content hash (FNV-1a over the canonical dump).
std::string config_hash(const nlohmann::json& j);

// Constructed domain objects ready for the experiment drivers.
struct Instruments {
  std::shared_ptr<const LayeredPartition> partition;
  std::shared_ptr<MediumProfile> medium;
  Grid grid;
  double delta = 0.75;
  Side side = Side::Plus;
  SolveOptions solver;
};

Instruments build_instruments(const RunConfig& cfg, bool need_grid = true);

SlabStack slab_stack_from(const RunConfig& cfg);

}  // namespace laplab

#endif
