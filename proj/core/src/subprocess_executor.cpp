#include "promptfold/subprocess_executor.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

namespace promptfold {

SubprocessExecutor::SubprocessExecutor(SubprocessOptions options) : options_(std::move(options)) {}

SubprocessExecutor::~SubprocessExecutor() { kill_child(); }

bool SubprocessExecutor::ensure_child(std::string& error) {
  if (pid_ > 0) {
    return true;
  }
  if (options_.argv.empty()) {
    error = "no sandbox command configured";
    return false;
  }
  int sv[2];
  if (socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, sv) != 0) {
    error = std::string("socketpair: ") + std::strerror(errno);
    return false;
  }
  // exec failures are reported through a close-on-exec pipe.
  int status_pipe[2];
  if (pipe2(status_pipe, O_CLOEXEC) != 0) {
    error = std::string("pipe: ") + std::strerror(errno);
    close(sv[0]);
    close(sv[1]);
    return false;
  }
  std::vector<char*> args;
  for (auto& a : options_.argv) {
    args.push_back(a.data());
  }
  args.push_back(nullptr);

  pid_t pid = fork();
  if (pid < 0) {
    error = std::string("fork: ") + std::strerror(errno);
    close(sv[0]);
    close(sv[1]);
    close(status_pipe[0]);
    close(status_pipe[1]);
    return false;
  }
  if (pid == 0) {
    dup2(sv[1], STDIN_FILENO);
    dup2(sv[1], STDOUT_FILENO);
    if (!options_.forward_stderr) {
      int devnull = open("/dev/null", O_WRONLY);
      if (devnull >= 0) {
        dup2(devnull, STDERR_FILENO);
      }
    }
    execvp(args[0], args.data());
    int err = errno;
    [[maybe_unused]] auto n = write(status_pipe[1], &err, sizeof err);
    _exit(127);
  }
  close(sv[1]);
  close(status_pipe[1]);
  int child_errno = 0;
  ssize_t n;
  do {
    n = read(status_pipe[0], &child_errno, sizeof child_errno);
  } while (n < 0 && errno == EINTR);
  close(status_pipe[0]);
  if (n > 0) {
    error = "cannot start sandbox '" + options_.argv[0] + "': " + std::strerror(child_errno);
    close(sv[0]);
    waitpid(pid, nullptr, 0);
    return false;
  }
  pid_ = pid;
  fd_ = sv[0];
  buffer_.clear();
  ++spawns_;
  return true;
}

void SubprocessExecutor::kill_child() {
  if (fd_ >= 0) {
    close(fd_);
    fd_ = -1;
  }
  if (pid_ > 0) {
    kill(pid_, SIGKILL);
    waitpid(pid_, nullptr, 0);
    pid_ = -1;
  }
  buffer_.clear();
}

bool SubprocessExecutor::read_line(std::string& line, std::chrono::steady_clock::time_point deadline,
                                   bool& timed_out) {
  timed_out = false;
  for (;;) {
    if (auto nl = buffer_.find('\n'); nl != std::string::npos) {
      line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      return true;
    }
    auto left = std::chrono::ceil<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) {
      timed_out = true;
      return false;
    }
    pollfd p{fd_, POLLIN, 0};
    int rc = poll(&p, 1, static_cast<int>(left.count()));
    if (rc < 0 && errno == EINTR) {
      continue;
    }
    if (rc == 0) {
      continue;
    }
    if (rc < 0) {
      return false;
    }
    char buf[4096];
    ssize_t n = recv(fd_, buf, sizeof buf, 0);
    if (n < 0 && errno == EINTR) {
      continue;
    }
    if (n <= 0) {
      return false;
    }
    buffer_.append(buf, static_cast<std::size_t>(n));
  }
}

ExecutionResult SubprocessExecutor::execute(const ExecutionRequest& request) {
  ExecutionRequest req = request;
  ExecutionResult out;
  if (!options_.scene_dir.empty() && req.scene_json.empty()) {
    try {
      req.scene_json = load_scene(options_.scene_dir, req.scene).json;
    } catch (const std::exception& e) {
      out.status = ExecStatus::sandbox_unavailable;
      out.stderr_tail = e.what();
      return out;
    }
  }
  std::string line = encode_request(req) + "\n";

  // One respawn when the child turns out to be dead before answering.
  for (int round = 0; round < 2; ++round) {
    std::string error;
    if (!ensure_child(error)) {
      out.status = ExecStatus::sandbox_unavailable;
      out.stderr_tail = error;
      return out;
    }
    auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(req.time_limit_ms) +
                    options_.grace;
    std::size_t sent = 0;
    bool write_failed = false;
    while (sent < line.size()) {
      ssize_t n = send(fd_, line.data() + sent, line.size() - sent, MSG_NOSIGNAL);
      if (n < 0 && errno == EINTR) {
        continue;
      }
      if (n <= 0) {
        write_failed = true;
        break;
      }
      sent += static_cast<std::size_t>(n);
    }
    if (write_failed) {
      kill_child();
      continue;
    }
    std::string reply;
    bool timed_out = false;
    if (read_line(reply, deadline, timed_out)) {
      return decode_response(reply);
    }
    kill_child();
    if (timed_out) {
      out.status = ExecStatus::timeout;
      out.stderr_tail = "sandbox missed the deadline; process restarted";
      return out;
    }
  }
  out.status = ExecStatus::sandbox_unavailable;
  out.stderr_tail = "sandbox process exited without answering";
  return out;
}

}  // namespace promptfold
