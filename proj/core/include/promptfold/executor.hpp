#pragma once

#include <array>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace promptfold {

enum class ExecStatus { ok, coding_error, timeout, sandbox_unavailable };

std::string_view to_string(ExecStatus status) noexcept;
/// Throws InvalidArgument on unknown names.
ExecStatus parse_exec_status(std::string_view text);

struct TraceEvent {
  std::string name;
  std::string args;
  std::string result;

  bool operator==(const TraceEvent&) const = default;
};

struct ExecutionResult {
  ExecStatus status = ExecStatus::sandbox_unavailable;
  /// Present iff status is ok.
  std::optional<std::string> answer;
  std::vector<TraceEvent> trace;
  std::string stderr_tail;
  /// Pipeline stage that failed ("classify", "generate", ...) when the
  /// error did not come from execution itself.
  std::string stage;
  bool protocol_error = false;

  bool operator==(const ExecutionResult&) const = default;
};

/// A scene fixture as read from `<scene_id>.json`.
struct SceneObject {
  std::string name;
  /// left, lower, right, upper in pixels, origin bottom-left.
  std::array<double, 4> bbox{};
  std::map<std::string, std::string> attributes;
  double depth = 0.0;
};

struct SceneFixture {
  std::string scene_id;
  double width = 0;
  double height = 0;
  std::vector<SceneObject> objects;
  std::map<std::string, std::string> query_overrides;
  std::map<std::string, std::string> global_facts;
  /// Original JSON text, forwarded to the sandbox unchanged.
  std::string json;
};

/// Throws ConfigError on malformed fixtures or violated bbox invariants.
SceneFixture parse_scene(std::string_view json_text);
SceneFixture load_scene(const std::string& scene_dir, const std::string& scene_id);

struct ExecutionRequest {
  std::string program;
  std::string entry_point = "execute_command";
  std::string scene;
  /// Full fixture JSON; when set it is sent instead of the scene id.
  std::string scene_json;
  int time_limit_ms = 5000;
  int memory_limit_mb = 512;
};

/// One request line of the sandbox protocol (no trailing newline).
std::string encode_request(const ExecutionRequest& request);
/// One response line of the sandbox protocol. Unparsable lines become a
/// coding_error with protocol_error set.
ExecutionResult decode_response(std::string_view line);
/// Response JSON object text, as stored in recorded stubs.
std::string encode_response(const ExecutionResult& result);

/// Runs generated programs against a scene. Instances may be used from one
/// thread at a time; pipelines create one per worker.
class Executor {
 public:
  virtual ~Executor() = default;
  virtual ExecutionResult execute(const ExecutionRequest& request) = 0;
  virtual std::string id() const = 0;
};

/// Always answers sandbox_unavailable.
class UnavailableExecutor final : public Executor {
 public:
  ExecutionResult execute(const ExecutionRequest& request) override;
  std::string id() const override { return "unavailable"; }
};

/// Serves recorded responses keyed by (sha256 of program, scene id), read
/// from `{ "program_sha256", "scene", "response": {...} }` lines. Unknown
/// keys answer sandbox_unavailable. Thread-safe.
class StubExecutor final : public Executor {
 public:
  static std::shared_ptr<StubExecutor> parse(std::string_view jsonl);
  static std::shared_ptr<StubExecutor> load(const std::string& path);

  ExecutionResult execute(const ExecutionRequest& request) override;
  std::string id() const override { return "stub"; }
  std::size_t size() const noexcept { return responses_.size(); }

 private:
  std::map<std::pair<std::string, std::string>, ExecutionResult> responses_;
};

}  // namespace promptfold
