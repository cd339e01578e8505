#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace formspace {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A matrix that must be full rank (or SPD) failed the rank tolerance.
class RankError : public Error {
 public:
  using Error::Error;
};

/// A geodesic parameter reached or passed the blow-up time.
class BlowupError : public Error {
 public:
  using Error::Error;
};

/// An iterative solver stopped without meeting its tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, int iterations, double residual)
      : Error(what), iterations_(iterations), residual_(residual) {}
  int iterations() const { return iterations_; }
  double residual() const { return residual_; }

 private:
  int iterations_;
  double residual_;
};

/// Gram matrices of two inputs that were required to agree do not.
/// For fields, `indices` lists every offending sample.
class GramMismatch : public Error {
 public:
  explicit GramMismatch(const std::string& what, std::vector<std::size_t> indices = {})
      : Error(what), indices_(std::move(indices)) {}
  const std::vector<std::size_t>& indices() const { return indices_; }

 private:
  std::vector<std::size_t> indices_;
};

/// Two fields are defined on different sample manifolds.
class ManifoldMismatch : public Error {
 public:
  using Error::Error;
};

/// A pointwise operation failed at one sample of a field.
class PointwiseFailure : public Error {
 public:
  PointwiseFailure(const std::string& what, std::size_t index)
      : Error(what), index_(index) {}
  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

}  // namespace formspace
