#pragma once

#include <chrono>
#include <string>
#include <vector>

#include "promptfold/executor.hpp"

namespace promptfold {

struct SubprocessOptions {
  /// Command line of the sandbox server, e.g. {"python3", "-m", "sandbox", "--scene-dir", dir}.
  std::vector<std::string> argv;
  /// Hard deadline per request on top of the sandbox's own limit.
  std::chrono::milliseconds grace{1000};
  /// When non-empty, scene fixtures are read from here and sent inline.
  std::string scene_dir;
  /// Child stderr goes to the parent's stderr instead of /dev/null.
  bool forward_stderr = false;
};

/// Talks to a sandbox child process over its stdin/stdout, one JSON line
/// per request and response. The child is spawned lazily, and killed and
/// respawned when it misses a deadline or dies.
class SubprocessExecutor final : public Executor {
 public:
  explicit SubprocessExecutor(SubprocessOptions options);
  ~SubprocessExecutor() override;
  SubprocessExecutor(const SubprocessExecutor&) = delete;
  SubprocessExecutor& operator=(const SubprocessExecutor&) = delete;

  ExecutionResult execute(const ExecutionRequest& request) override;
  std::string id() const override { return "subprocess"; }

  /// Number of child processes started so far.
  int spawn_count() const noexcept { return spawns_; }

 private:
  bool ensure_child(std::string& error);
  void kill_child();
  bool read_line(std::string& line, std::chrono::steady_clock::time_point deadline, bool& timed_out);

  SubprocessOptions options_;
  int pid_ = -1;
  int fd_ = -1;
  std::string buffer_;
  int spawns_ = 0;
};

}  // namespace promptfold
