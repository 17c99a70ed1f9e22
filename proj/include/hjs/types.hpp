#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace hjs {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Base class of every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input: wrong dimensions, malformed expressions or scenario fields.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure failed to reach its tolerance.
class NumericalError : public Error {
 public:
  using Error::Error;
};

inline void require_dim(const Vector& v, Eigen::Index n, const char* what) {
  if (v.size() != n) {
    throw ValidationError(std::string(what) + ": expected dimension " + std::to_string(n) +
                          ", got " + std::to_string(v.size()));
  }
}

/// Axis-aligned box [lower, upper].
struct Box {
  Vector lower;
  Vector upper;

  Eigen::Index dim() const { return lower.size(); }
  Vector center() const { return 0.5 * (lower + upper); }
};

}  // namespace hjs
