// lap-lab: command-line front end over the laplab shared library.
//
// Usage: lap-lab <command> --config <file> [--set key.path=value ...]
//                [--out <dir>] [--quiet]
// Commands: validate, solve, sweep, eigscan, identity, oracle.
// Exit codes: 0 success, 2 verdict failure, 1 error.

#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "laplab.h"

int main(int argc, char** argv) {
  CLI::App app{"lap-lab: layered-media reduced wave laboratory"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::vector<std::string> overrides;
  bool quiet = false;

  const std::vector<std::string> names{"validate", "solve",    "sweep",
                                       "eigscan",  "identity", "oracle"};
  const std::vector<std::string> descriptions{
      "geometry and medium certificates",
      "single resolvent solve at (lambda, eta)",
      "limiting-absorption sweep with radiation-bound measurements",
      "eigenvalue scan via resolvent-norm plateaus",
      "radial energy identity residual study at h and h/2",
      "1-D finite-difference vs closed-form stratified comparison"};

  for (std::size_t i = 0; i < names.size(); ++i) {
    CLI::App* sub = app.add_subcommand(names[i], descriptions[i]);
    sub->add_option("--config", config_path, "JSON config file")->required();
    sub->add_option("--set", overrides,
                    "override as key.path=value (repeatable)");
    sub->add_option("--out", out_dir, "output directory (overrides config)");
    sub->add_flag("--quiet", quiet, "suppress the manifest echo");
  }

  CLI11_PARSE(app, argc, argv);
  std::string command = app.get_subcommands().front()->get_name();

  laplab_config* cfg = laplab_config_from_file(config_path.c_str());
  if (!cfg) {
    std::fprintf(stderr, "lap-lab: %s\n", laplab_last_error());
    return 1;
  }

  for (const std::string& ov : overrides) {
    std::size_t eq = ov.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "lap-lab: --set expects key.path=value, got '%s'\n",
                   ov.c_str());
      laplab_config_free(cfg);
      return 1;
    }
    std::string key = ov.substr(0, eq), value = ov.substr(eq + 1);
    int rc = laplab_config_override(cfg, key.c_str(), value.c_str());
    if (rc != LAPLAB_OK) {
      std::fprintf(stderr, "lap-lab: override '%s' rejected: %s\n", ov.c_str(),
                   laplab_last_error());
      laplab_config_free(cfg);
      return 1;
    }
  }

  char* manifest = nullptr;
  int rc = laplab_run(cfg, command.c_str(),
                      out_dir.empty() ? nullptr : out_dir.c_str(), &manifest);
  if (manifest) {
    if (!quiet) std::printf("%s\n", manifest);
    laplab_string_free(manifest);
  }
  if (rc != LAPLAB_OK && rc != LAPLAB_VERDICT_FAIL)
    std::fprintf(stderr, "lap-lab: %s\n", laplab_last_error());
  laplab_config_free(cfg);

  if (rc == LAPLAB_OK) return 0;
  if (rc == LAPLAB_VERDICT_FAIL) return 2;
  return 1;
}
