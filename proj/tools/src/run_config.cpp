#include "promptfold/run_config.hpp"

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "promptfold/errors.hpp"

namespace promptfold {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (!known.contains(key)) {
      throw ConfigError("unknown key '" + key + "' in " + where);
    }
  }
}

std::string resolve(const std::string& path, const std::string& base_dir) {
  if (path.empty() || base_dir.empty() || std::filesystem::path(path).is_absolute()) {
    return path;
  }
  return (std::filesystem::path(base_dir) / path).lexically_normal().string();
}

template <typename T>
void take(const json& obj, const char* key, T& target) {
  if (obj.contains(key) && !obj[key].is_null()) {
    target = obj[key].get<T>();
  }
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text, const std::string& base_dir) {
  RunConfig c;
  try {
    json doc = json::parse(json_text);
    reject_unknown(doc,
                   {"tokenizer", "preprompt", "templates", "catalog", "compressed_set", "dataset", "scene_dir",
                    "transcript", "backend", "executor", "mode", "seed", "fixed_type", "fallback_type",
                    "entry_point", "comment_prefix", "timestamp", "required_api_names", "workers",
                    "generic_bundle", "limits"},
                   "configuration");
    take(doc, "tokenizer", c.tokenizer);
    if (doc.contains("preprompt")) {
      const auto& p = doc["preprompt"];
      reject_unknown(p, {"definitions", "snippets", "instruction"}, "preprompt");
      take(p, "definitions", c.definitions);
      take(p, "snippets", c.snippets);
      take(p, "instruction", c.instruction);
    }
    take(doc, "templates", c.templates);
    take(doc, "catalog", c.catalog);
    take(doc, "compressed_set", c.compressed_set);
    take(doc, "dataset", c.dataset);
    take(doc, "scene_dir", c.scene_dir);
    take(doc, "transcript", c.transcript);
    if (doc.contains("backend")) {
      const auto& b = doc["backend"];
      reject_unknown(b,
                     {"kind", "dialect", "base_url", "model", "key_env", "context_window", "requests_per_minute",
                      "max_attempts", "timeout_ms"},
                     "backend");
      take(b, "kind", c.backend.kind);
      take(b, "dialect", c.backend.dialect);
      take(b, "base_url", c.backend.base_url);
      take(b, "model", c.backend.model);
      take(b, "key_env", c.backend.key_env);
      take(b, "context_window", c.backend.context_window);
      take(b, "requests_per_minute", c.backend.requests_per_minute);
      take(b, "max_attempts", c.backend.max_attempts);
      take(b, "timeout_ms", c.backend.timeout_ms);
    }
    if (doc.contains("executor")) {
      const auto& e = doc["executor"];
      reject_unknown(e, {"kind", "stub", "command", "inline_scenes"}, "executor");
      take(e, "kind", c.executor.kind);
      take(e, "stub", c.executor.stub);
      take(e, "command", c.executor.command);
      take(e, "inline_scenes", c.executor.inline_scenes);
    }
    take(doc, "mode", c.mode);
    if (doc.contains("seed") && !doc["seed"].is_null()) {
      c.seed = doc["seed"].get<std::uint64_t>();
    }
    take(doc, "fixed_type", c.fixed_type);
    take(doc, "fallback_type", c.fallback_type);
    take(doc, "entry_point", c.entry_point);
    take(doc, "comment_prefix", c.comment_prefix);
    take(doc, "timestamp", c.timestamp);
    take(doc, "required_api_names", c.required_api_names);
    take(doc, "workers", c.workers);
    take(doc, "generic_bundle", c.generic_bundle);
    if (doc.contains("limits")) {
      const auto& l = doc["limits"];
      reject_unknown(l,
                     {"time_limit_ms", "memory_limit_mb", "max_attempts", "codegen_max_tokens",
                      "classify_max_tokens", "compress_max_tokens"},
                     "limits");
      take(l, "time_limit_ms", c.limits.time_limit_ms);
      take(l, "memory_limit_mb", c.limits.memory_limit_mb);
      take(l, "max_attempts", c.limits.max_attempts);
      take(l, "codegen_max_tokens", c.limits.codegen_max_tokens);
      take(l, "classify_max_tokens", c.limits.classify_max_tokens);
      take(l, "compress_max_tokens", c.limits.compress_max_tokens);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad configuration: ") + e.what());
  }

  for (std::string* path : {&c.definitions, &c.snippets, &c.instruction, &c.templates, &c.catalog,
                            &c.compressed_set, &c.dataset, &c.scene_dir, &c.transcript, &c.executor.stub}) {
    *path = resolve(*path, base_dir);
  }
  if (c.tokenizer.starts_with("bpe:")) {
    c.tokenizer = "bpe:" + resolve(c.tokenizer.substr(4), base_dir);
  }
  validate_run_config(c);
  return c;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError("cannot read configuration '" + path + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  auto dir = std::filesystem::absolute(path).parent_path().string();
  return parse_run_config(ss.str(), dir);
}

void validate_run_config(const RunConfig& c) {
  static const std::set<std::string> modes = {"adaptive",    "oracle_type",        "random_type",
                                              "fixed_type",  "simple_compression", "no_compression"};
  if (!modes.contains(c.mode)) {
    throw ConfigError("unknown mode '" + c.mode + "'");
  }
  if (c.mode == "random_type" && !c.seed) {
    throw ConfigError("random_type mode requires a seed");
  }
  if (c.mode == "fixed_type" && c.fixed_type.empty()) {
    throw ConfigError("fixed_type mode requires fixed_type");
  }
  if (c.backend.kind != "replay" && c.backend.kind != "http") {
    throw ConfigError("backend kind must be replay or http");
  }
  if (c.executor.kind != "none" && c.executor.kind != "stub" && c.executor.kind != "subprocess") {
    throw ConfigError("executor kind must be none, stub or subprocess");
  }
  if (c.workers < 1) {
    throw ConfigError("workers must be at least 1");
  }
  if (c.limits.max_attempts < 1 || c.limits.codegen_max_tokens < 1 || c.limits.classify_max_tokens < 1 ||
      c.limits.compress_max_tokens < 1 || c.limits.time_limit_ms < 1) {
    throw ConfigError("limits must be positive");
  }
}

}  // namespace promptfold
