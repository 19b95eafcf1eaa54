#pragma once

#include <stdexcept>
#include <string>

namespace shotnoise {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument violates a documented precondition (negative intensity, t > T, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// tau = 0 was passed to an operation that needs a strictly positive maturity.
class DegenerateMaturityError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// The Poisson series could not reach the requested tail mass before n_max.
class TruncationError : public Error {
 public:
  TruncationError(const std::string& what, double achieved_tail)
      : Error(what), achieved_tail_(achieved_tail) {}
  double achieved_tail() const noexcept { return achieved_tail_; }

 private:
  double achieved_tail_;
};

/// A numerical integration did not meet its tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double achieved_error)
      : Error(what), achieved_error_(achieved_error) {}
  double achieved_error() const noexcept { return achieved_error_; }

 private:
  double achieved_error_;
};

/// A sensitivity was requested exactly at the transition-density atom (sigma = 0, l = 0),
/// where the delta is discontinuous. Evaluate at l +/- eps instead.
class KinkError : public Error {
 public:
  using Error::Error;
};

/// A function handed to a numerical routine returned a non-finite value.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

}  // namespace shotnoise
