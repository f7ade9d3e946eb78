#ifndef LAPLAB_CORE_RUN_HPP
#define LAPLAB_CORE_RUN_HPP

#include <string>

#include <json.hpp>

namespace laplab {

struct RunResult {
  int exit_code = 0;  // 0 ok, 1 error, 2 verdict failure
  nlohmann::json manifest;
};

const char* laplab_version_string();

// Dispatch one command against a parsed config document. Artifacts (CSV/JSON
// plus manifest.json) are written under out_dir (or the config's output.dir).
// Errors are serialized into the manifest and map to exit code 1; negative
// verdicts (failed certificates, missed tolerances, contradictions) map to 2.
RunResult run_command(const std::string& command, nlohmann::json config_json,
                      const std::string& out_dir_override = "");

}  // namespace laplab

#endif
