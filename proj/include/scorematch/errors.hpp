#pragma once

#include <stdexcept>
#include <string>

namespace scorematch {

/// Base class for everything this library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// The score matching Gram system is singular: the model space is not
/// estimable from the given observations.
class NotEstimableError : public Error {
 public:
  NotEstimableError(const std::string& msg, int rank, double smallest_sv,
                    double largest_sv)
      : Error(msg), rank(rank), smallest_sv(smallest_sv),
        largest_sv(largest_sv) {}

  int rank = 0;
  double smallest_sv = 0.0;
  double largest_sv = 0.0;
};

/// Heuristic detection of an unbounded likelihood ascent ray.
class MleNonexistentError : public Error {
 public:
  using Error::Error;
};

/// A matrix handed to from_matrix lies outside the model space.
class NotInSpanError : public Error {
 public:
  NotInSpanError(const std::string& msg, double residual)
      : Error(msg), residual(residual) {}

  double residual = 0.0;
};

}  // namespace scorematch
