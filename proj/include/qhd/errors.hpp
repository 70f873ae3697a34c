#pragma once

#include <stdexcept>
#include <string>

namespace qhd {

// Invalid physical input or a state outside the model's domain (e.g. vacuum).
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

struct SolverError : std::runtime_error {
  double last_residual;
  SolverError(const std::string& what, double residual)
      : std::runtime_error(what), last_residual(residual) {}
};

struct ParseError : std::runtime_error {
  int line;  // 1-based, 0 when the problem is not tied to a line
  ParseError(const std::string& what, int line_no)
      : std::runtime_error(line_no > 0 ? "line " + std::to_string(line_no) + ": " + what : what),
        line(line_no) {}
};

}  // namespace qhd
