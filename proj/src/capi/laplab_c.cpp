#include "laplab.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "core/config.hpp"
#include "core/run.hpp"
#include "core/types.hpp"

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

int status_from(laplab::ErrorCode code) {
  using laplab::ErrorCode;
  switch (code) {
    case ErrorCode::Config: return LAPLAB_ERR_CONFIG;
    case ErrorCode::Io: return LAPLAB_ERR_IO;
    case ErrorCode::NoConvergence: return LAPLAB_ERR_NO_CONVERGENCE;
    case ErrorCode::Precondition:
    case ErrorCode::DeltaOutOfRange:
    case ErrorCode::BadResolution:
    case ErrorCode::WrongArity:
    case ErrorCode::EmptyWindow:
    case ErrorCode::NotHomogeneous:
      return LAPLAB_ERR_PRECONDITION;
    default: return LAPLAB_ERR_INTERNAL;
  }
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

struct laplab_config {
  nlohmann::json doc;
};

extern "C" {

const char* laplab_version(void) { return laplab::laplab_version_string(); }

const char* laplab_last_error(void) { return g_last_error.c_str(); }

laplab_config* laplab_config_from_file(const char* path) {
  if (!path) {
    set_error("null path");
    return nullptr;
  }
  try {
    nlohmann::json j = laplab::load_config_file(path);
    laplab::parse_config(j);  // validate eagerly
    return new laplab_config{std::move(j)};
  } catch (const std::exception& e) {
    set_error(e.what());
    return nullptr;
  }
}

laplab_config* laplab_config_from_json(const char* json_text) {
  if (!json_text) {
    set_error("null config text");
    return nullptr;
  }
  try {
    nlohmann::json j = nlohmann::json::parse(json_text);
    laplab::parse_config(j);
    return new laplab_config{std::move(j)};
  } catch (const std::exception& e) {
    set_error(e.what());
    return nullptr;
  }
}

void laplab_config_free(laplab_config* cfg) { delete cfg; }

int laplab_config_override(laplab_config* cfg, const char* dotted_key,
                           const char* value) {
  if (!cfg || !dotted_key || !value) {
    set_error("null argument");
    return LAPLAB_ERR_INVALID_HANDLE;
  }
  try {
    nlohmann::json trial = cfg->doc;
    laplab::apply_override(trial, dotted_key, value);
    laplab::parse_config(trial);  // reject overrides that break the schema
    cfg->doc = std::move(trial);
    return LAPLAB_OK;
  } catch (const laplab::Error& e) {
    set_error(e.what());
    return status_from(e.code());
  } catch (const std::exception& e) {
    set_error(e.what());
    return LAPLAB_ERR_INTERNAL;
  }
}

char* laplab_config_hash(const laplab_config* cfg) {
  if (!cfg) {
    set_error("null config");
    return nullptr;
  }
  return dup_string(laplab::config_hash(cfg->doc));
}

int laplab_run(laplab_config* cfg, const char* command, const char* out_dir,
               char** manifest_json) {
  if (!cfg || !command) {
    set_error("null argument");
    return LAPLAB_ERR_INVALID_HANDLE;
  }
  try {
    laplab::RunResult res = laplab::run_command(
        command, cfg->doc, out_dir ? std::string(out_dir) : std::string());
    if (manifest_json) *manifest_json = dup_string(res.manifest.dump(2));
    if (res.exit_code == 0) return LAPLAB_OK;
    if (res.exit_code == 2) {
      set_error("verdict failure (see manifest)");
      return LAPLAB_VERDICT_FAIL;
    }
    // errors were serialized into the manifest
    std::string msg = "run failed";
    if (res.manifest.contains("errors") && !res.manifest["errors"].empty())
      msg = res.manifest["errors"][0].value("message", msg);
    set_error(msg);
    return LAPLAB_ERR_INTERNAL;
  } catch (const laplab::Error& e) {
    set_error(e.what());
    return status_from(e.code());
  } catch (const std::exception& e) {
    set_error(e.what());
    return LAPLAB_ERR_INTERNAL;
  }
}

void laplab_string_free(char* s) { std::free(s); }

}  // extern "C"
