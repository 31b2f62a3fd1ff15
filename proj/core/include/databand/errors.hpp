#pragma once

#include <stdexcept>
#include <string>

namespace databand {

// Base class for all engine errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad configuration or input data (CLI exit code 2).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A rejection sampler ran out of attempts: the prior (or deal mix) and the
// constraints are in conflict (CLI exit code 3).
class SamplingConflictError : public Error {
 public:
  SamplingConflictError(const std::string& what, double acceptance_estimate,
                        std::string worst_check)
      : Error(what),
        acceptance_estimate_(acceptance_estimate),
        worst_check_(std::move(worst_check)) {}

  double acceptance_estimate() const { return acceptance_estimate_; }
  const std::string& worst_check() const { return worst_check_; }

 private:
  double acceptance_estimate_ = 0.0;
  std::string worst_check_;
};

// File could not be read or written (CLI exit code 4).
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace databand
