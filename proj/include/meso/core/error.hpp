#pragma once

#include <stdexcept>
#include <string>

namespace meso {

enum class ErrorCode {
  invalid_argument,
  incompatible,
  parse,
  io,
  validation,
  singular,
  diverged,
  not_converged,
};

const char* to_string(ErrorCode code) noexcept;

/// Base of every exception thrown by the core.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(ErrorCode::parse, what), line_(line) {}
  /// 1-based line of the offending token, 0 when unknown.
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Fixed-point iteration failure; carries the last measured sweep ratio.
class SolverError : public Error {
 public:
  SolverError(ErrorCode code, const std::string& what, int iterations,
              double ratio)
      : Error(code, what), iterations_(iterations), ratio_(ratio) {}
  int iterations() const noexcept { return iterations_; }
  double ratio() const noexcept { return ratio_; }

 private:
  int iterations_;
  double ratio_;
};

}  // namespace meso
