#pragma once

// The quotient of M+(n,m) by SO(n): the projection A -> A^T A onto the
// symmetric positive definite matrices Sym+(m), equipped with
//
//   <h, k>_g = 1/4 tr(g^{-1} h g^{-1} k) sqrt(det g).

#include "formspace/fiber_solver.hpp"

namespace formspace {

/// A symmetric positive definite m x m matrix.
class SPDMatrix {
 public:
  /// Throws ShapeError if not square or not symmetric within 1e-12 (relative
  /// to max(1, ||g||)), RankError if an eigenvalue is <= rank_tol * max(lambda_max, 1).
  explicit SPDMatrix(Matrix entries, double rank_tol = kDefaultRankTol);

  const Matrix& matrix() const { return entries_; }
  Eigen::Index m() const { return entries_.rows(); }

 private:
  Matrix entries_;
};

/// An element of SO(n).
class Rotation {
 public:
  /// Throws Error unless O^T O = I and det O = 1 within 1e-10.
  explicit Rotation(Matrix entries);

  const Matrix& matrix() const { return entries_; }
  Eigen::Index n() const { return entries_.rows(); }

 private:
  Matrix entries_;
};

double ebin_inner(const SPDMatrix& g, const Matrix& h, const Matrix& k);

/// A^T A for any n x m matrix.
Matrix project(const Matrix& a);

/// Symmetric square root by eigendecomposition; eigenvalues above -1e-12
/// (relative) are clamped at zero.
Matrix sqrt_psd(const Matrix& g);

/// [sqrt(g); 0], the horizontal representative of g in M+(n,m).
FullRankMatrix polar_lift(const SPDMatrix& g, Eigen::Index n, double rank_tol = kDefaultRankTol);

/// Some O in SO(n) with A = O B, built from the polar factors of A and B
/// completed to oriented orthonormal bases. Requires
/// ||A^T A - B^T B||_F <= tol ||A^T A||_F; throws GramMismatch otherwise.
/// When n - m >= 2 the completion, hence O, is not unique.
Rotation align(const FullRankMatrix& a, const FullRankMatrix& b, double tol = 1e-8);

struct SymDistanceResult {
  double value = 0.0;
  /// Minimizing rotation: value ~ distance(lift(g), rotation * lift(h)).
  Matrix rotation;
  DistanceMethod method = DistanceMethod::shooting;
  int iterations = 0;
};

/// Quotient distance min_O distance(lift(g), O lift(h)) over O = exp(X) in
/// SO(n), X skew. Gradient descent on X with seeded restarts (restart 0 at
/// the identity, then random generators of norm <= pi). Never exceeds
/// distance(polar_lift(g), polar_lift(h)).
SymDistanceResult sym_distance(const SPDMatrix& g, const SPDMatrix& h, Eigen::Index n,
                               const SolverOptions& opts = {}, int rotation_restarts = 8);

}  // namespace formspace
