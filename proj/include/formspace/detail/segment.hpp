#pragma once

#include "formspace/fiber_core.hpp"

namespace formspace::detail {

/// Length of lin(a, b) and its Euclidean gradients with respect to both
/// endpoints. Throws RankError if a quadrature node is rank deficient.
struct SegmentEval {
  double length = 0.0;
  Matrix grad_a;
  Matrix grad_b;
};

/// segment_length without the endpoint rank checks, for endpoints already
/// known to be full rank.
double interior_length(const Matrix& a, const Matrix& b, double rank_tol);

SegmentEval segment_length_and_gradient(const Matrix& a, const Matrix& b, double rank_tol);

}  // namespace formspace::detail
