#pragma once

#include <stdexcept>
#include <string>

namespace ssf {

enum class ErrorKind {
  capability,   // requested derivative order / feature not supported
  domain,       // argument outside the admissible range
  divergence,   // integrand or series does not converge
  accuracy,     // numerical tolerance could not be met
  refinement,   // grid refinement or tail bound failed
  range,        // sampled range insufficient for the requested quantity
  unsupported,  // valid request, no numerics implemented (e.g. d = 2)
  usage         // malformed configuration or CLI invocation
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Accuracy failure that still carries the best available estimate.
class AccuracyError : public Error {
 public:
  AccuracyError(const std::string& what, double partial, double bound)
      : Error(ErrorKind::accuracy, what), partial_(partial), bound_(bound) {}

  double partial_result() const noexcept { return partial_; }
  double error_bound() const noexcept { return bound_; }

 private:
  double partial_;
  double bound_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace ssf
