#include "aebo/external_blackbox.hpp"

#include <cerrno>
#include <csignal>
#include <cstring>
#include <limits>
#include <mutex>
#include <thread>

#include <fcntl.h>
#include <poll.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <json.hpp>

namespace aebo {

namespace {

using Clock = std::chrono::steady_clock;

void ignore_sigpipe() {
  static std::once_flag once;
  std::call_once(once, [] { std::signal(SIGPIPE, SIG_IGN); });
}

void write_all(int fd, const std::string& data) {
  std::size_t off = 0;
  while (off < data.size()) {
    const ssize_t n = ::write(fd, data.data() + off, data.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw ProtocolError(std::string("write to child failed: ") + std::strerror(errno));
    }
    off += static_cast<std::size_t>(n);
  }
}

}  // namespace

std::string format_request(const Vector& x) {
  nlohmann::json j;
  j["x"] = std::vector<double>(x.data(), x.data() + x.size());
  return j.dump();
}

Evaluation parse_reply(const std::string& line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error&) {
    throw ProtocolError("malformed reply (not JSON): " + line);
  }
  if (!j.is_object() || !j.contains("y")) throw ProtocolError("malformed reply (missing \"y\"): " + line);
  const auto& y = j["y"];
  Evaluation ev;
  if (y.is_null()) {
    ev.y = std::numeric_limits<double>::quiet_NaN();
    ev.feasible = false;
  } else if (y.is_number()) {
    ev.y = y.get<double>();
    ev.feasible = true;
  } else {
    throw ProtocolError("malformed reply (\"y\" must be a number or null): " + line);
  }
  if (j.contains("feasible")) {
    if (!j["feasible"].is_boolean()) throw ProtocolError("malformed reply (\"feasible\" must be boolean): " + line);
    ev.feasible = ev.feasible && j["feasible"].get<bool>();
  }
  return ev;
}

ExternalProcess::ExternalProcess(const std::string& command, std::chrono::milliseconds timeout)
    : timeout_(timeout) {
  ignore_sigpipe();
  int in_pipe[2];
  int out_pipe[2];
  if (::pipe2(in_pipe, O_CLOEXEC) != 0) throw ProtocolError("pipe failed");
  if (::pipe2(out_pipe, O_CLOEXEC) != 0) {
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    throw ProtocolError("pipe failed");
  }
  const pid_t pid = ::fork();
  if (pid < 0) {
    for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1]}) ::close(fd);
    throw ProtocolError("fork failed");
  }
  if (pid == 0) {
    ::setpgid(0, 0);  // own process group so the whole command tree can be killed
    ::dup2(in_pipe[0], STDIN_FILENO);
    ::dup2(out_pipe[1], STDOUT_FILENO);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::setpgid(pid, pid);
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  pid_ = pid;
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
}

ExternalProcess::~ExternalProcess() { shutdown(); }

void ExternalProcess::shutdown() {
  if (to_child_ >= 0) ::close(to_child_);
  if (from_child_ >= 0) ::close(from_child_);
  to_child_ = from_child_ = -1;
  if (pid_ <= 0) return;
  // Closing stdin asks the child to exit; give it a moment before killing it.
  for (int i = 0; i < 50; ++i) {
    if (::waitpid(pid_, nullptr, WNOHANG) == pid_) {
      ::kill(-pid_, SIGKILL);  // reap anything the shell left behind
      pid_ = -1;
      return;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
  ::kill(-pid_, SIGKILL);
  ::waitpid(pid_, nullptr, 0);
  pid_ = -1;
}

std::string ExternalProcess::read_line() {
  const auto deadline = Clock::now() + timeout_;
  for (;;) {
    if (const auto nl = buffer_.find('\n'); nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return line;
    }
    const auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
    if (remaining.count() <= 0) throw ProtocolError("timed out waiting for the child's reply");
    pollfd pfd{from_child_, POLLIN, 0};
    const int rc = ::poll(&pfd, 1, static_cast<int>(std::min<long long>(remaining.count(), 1 << 30)));
    if (rc < 0) {
      if (errno == EINTR) continue;
      throw ProtocolError("poll failed");
    }
    if (rc == 0) continue;
    char chunk[4096];
    const ssize_t n = ::read(from_child_, chunk, sizeof chunk);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw ProtocolError("read from child failed");
    }
    if (n == 0) throw ProtocolError("child exited before replying");
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

Evaluation ExternalProcess::evaluate(const Vector& x) {
  if (pid_ <= 0) throw ProtocolError("child process is not running");
  write_all(to_child_, format_request(x) + "\n");
  Evaluation ev = parse_reply(read_line());
  ++evaluations_;
  return ev;
}

BlackBox external_blackbox(const std::string& command, int dim, std::chrono::milliseconds timeout) {
  auto process = std::make_shared<ExternalProcess>(command, timeout);
  BlackBox bb;
  bb.dim = dim;
  bb.evaluate = [process, dim](const Vector& x) {
    if (x.size() != dim) throw std::invalid_argument("external black box: dimension mismatch");
    return process->evaluate(x);
  };
  return bb;
}

}  // namespace aebo
