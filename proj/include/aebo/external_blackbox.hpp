#pragma once

#include <chrono>
#include <memory>
#include <stdexcept>
#include <string>

#include "aebo/optimizer.hpp"

namespace aebo {

/// Raised when the child process breaks the line protocol, times out, or exits.
class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A long-lived child process evaluated over line-delimited JSON.
///
/// Request (one line to the child's stdin):   {"x":[x_1,...,x_d]}
/// Reply   (one line from the child's stdout): {"y":<number>|null,"feasible":<bool>}
///
/// A null `y` is reported as NaN and marks the point infeasible. The command runs under
/// /bin/sh -c and is reused for every evaluation.
class ExternalProcess {
 public:
  ExternalProcess(const std::string& command, std::chrono::milliseconds timeout = std::chrono::seconds(3600));
  ~ExternalProcess();

  ExternalProcess(const ExternalProcess&) = delete;
  ExternalProcess& operator=(const ExternalProcess&) = delete;

  Evaluation evaluate(const Vector& x);
  [[nodiscard]] int evaluations() const { return evaluations_; }

 private:
  std::string read_line();
  void shutdown();

  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::chrono::milliseconds timeout_;
  std::string buffer_;
  int evaluations_ = 0;
};

/// Parses one reply line; throws ProtocolError on anything malformed.
Evaluation parse_reply(const std::string& line);
std::string format_request(const Vector& x);

BlackBox external_blackbox(const std::string& command, int dim,
                           std::chrono::milliseconds timeout = std::chrono::seconds(3600));

}  // namespace aebo
