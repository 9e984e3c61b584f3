#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace layoffcast {

// Base for every error raised by the library. CLI exit codes map from the
// concrete type (see tools/main.cpp).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParameterDomainError : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

// The expected count never fell below the baseline within the integration
// horizon; the caller should extend the horizon.
class HorizonExceededError : public Error {
 public:
  HorizonExceededError(const std::string& what, double horizon)
      : Error(what), horizon_(horizon) {}
  double horizon() const { return horizon_; }

 private:
  double horizon_;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class EmptyInputError : public Error {
 public:
  using Error::Error;
};

class DegenerateFitError : public Error {
 public:
  using Error::Error;
};

class InvalidStartError : public Error {
 public:
  using Error::Error;
};

// Optimizer ran out of evaluations. Carries the best point found so far in
// optimizer coordinates together with its log-likelihood.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> best,
                   double best_loglik)
      : Error(what), best_(std::move(best)), best_loglik_(best_loglik) {}
  const std::vector<double>& best() const { return best_; }
  double best_loglik() const { return best_loglik_; }

 private:
  std::vector<double> best_;
  double best_loglik_;
};

}  // namespace layoffcast
