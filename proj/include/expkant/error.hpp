#pragma once

#include <stdexcept>
#include <string>

namespace expkant {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad parameters, malformed configs, unknown builtins.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Non-finite values or an empty summation window during evaluation.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

// An admissibility condition a theorem depends on did not hold.
class PreconditionError : public Error {
 public:
  PreconditionError(std::string condition, const std::string& detail)
      : Error("precondition " + condition + " failed: " + detail),
        condition_(std::move(condition)) {}

  const std::string& condition() const noexcept { return condition_; }

 private:
  std::string condition_;
};

}  // namespace expkant
