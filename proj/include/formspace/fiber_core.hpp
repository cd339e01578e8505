#pragma once

// Closed-form geometry of the space M+(n,m) of full-rank n x m matrices
// (n > m) with the metric
//
//   <U, V>_A = tr(U (A^T A)^{-1} V^T) * sqrt(det(A^T A)).

#include <Eigen/Dense>

#include <limits>
#include <vector>

#include "formspace/errors.hpp"

namespace formspace {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// A matrix is full rank iff sigma_min > rank_tol * max(sigma_max, 1).
inline constexpr double kDefaultRankTol = 1e-9;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

bool is_full_rank(const Matrix& a, double rank_tol = kDefaultRankTol);

/// Singular values in decreasing order.
Vector singular_values(const Matrix& a);

/// A point of M+(n,m). Immutable; the Gram matrix, its determinant and the
/// Moore-Penrose inverse are computed once at construction.
class FullRankMatrix {
 public:
  /// Throws ShapeError unless n > m >= 1, RankError if the rank test fails.
  explicit FullRankMatrix(Matrix entries, double rank_tol = kDefaultRankTol);

  const Matrix& matrix() const { return entries_; }
  Eigen::Index n() const { return entries_.rows(); }
  Eigen::Index m() const { return entries_.cols(); }

  /// A^T A
  const Matrix& gram() const { return gram_; }
  const Matrix& gram_inverse() const { return gram_inv_; }
  /// A^+ = (A^T A)^{-1} A^T
  const Matrix& pinv() const { return pinv_; }
  double sqrt_det_gram() const { return sqrt_det_gram_; }

 private:
  Matrix entries_;
  Matrix gram_;
  Matrix gram_inv_;
  Matrix pinv_;
  double sqrt_det_gram_ = 0.0;
};

void check_same_shape(const Matrix& a, const Matrix& b, const char* what);

/// The fiber metric <U,V>_A.
double inner_product(const FullRankMatrix& a, const Matrix& u, const Matrix& v);

/// ||U||_A
double norm(const FullRankMatrix& a, const Matrix& u);

/// A^+ for a raw matrix; throws RankError if `a` is not full rank.
Matrix moore_penrose(const Matrix& a, double rank_tol = kDefaultRankTol);

/// Everything needed to evaluate the geodesic through `base` with initial
/// velocity zeta in closed form.
struct GeodesicData {
  Matrix base;
  Matrix projector;  // A A^+
  Matrix z;          // zeta A^+
  Matrix z0;         // z - tr(z)/m * A A^+
  double tr_z = 0.0;
  Matrix omega;      // z0 - z0^T
  double q = 0.0;    // tr(z0 z0^T)
  double blowup = kInfinity;
  Eigen::Index m = 0;
};

GeodesicData geodesic_data(const FullRankMatrix& a, const Matrix& zeta);

struct FsCoefficients {
  double f = 1.0;
  double s = 0.0;
};

/// f(t) = m/4 q t^2 + (1 + tr(Z) t / 2)^2 and s(t) = int_0^t dsigma / f(sigma).
/// Throws BlowupError for t < 0 or t >= blowup.
FsCoefficients fs_coefficients(const GeodesicData& g, double t);

/// Geodesic point at parameter t:
///   f(t)^{1/m} exp(s(t) omega) exp(s(t) Z0^T A A^+) A.
/// Throws BlowupError if t is outside [0, blowup) and RankError if the
/// result fails the rank test (numerical breakdown).
Matrix exp_map(const GeodesicData& g, double t, double rank_tol = kDefaultRankTol);
Matrix exp_map(const FullRankMatrix& a, const Matrix& zeta, double t,
               double rank_tol = kDefaultRankTol);

/// det(A^T A)^{1/4}; zero for rank-deficient input.
double volume_quarter(const Matrix& a);

/// (2 / sqrt(m)) |det(A^T A)^{1/4} - det(B^T B)^{1/4}|, a lower bound for the
/// length of any path joining A and B.
double lower_bound(const Matrix& a, const Matrix& b);

/// Matrix exponential by Pade(13) scaling and squaring.
Matrix expm(const Matrix& x);

/// A piecewise-linear curve in M+(n,m) through its control matrices.
class PLPath {
 public:
  /// Throws ShapeError for fewer than two controls or mixed shapes and
  /// RankError if a control is not full rank.
  explicit PLPath(std::vector<Matrix> controls, double rank_tol = kDefaultRankTol);

  /// The straight segment from a to b subdivided into `segments` pieces.
  static PLPath straight(const Matrix& a, const Matrix& b, int segments,
                         double rank_tol = kDefaultRankTol);

  const std::vector<Matrix>& controls() const { return controls_; }
  int segments() const { return static_cast<int>(controls_.size()) - 1; }
  const Matrix& front() const { return controls_.front(); }
  const Matrix& back() const { return controls_.back(); }
  double rank_tol() const { return rank_tol_; }

  /// Inserts the midpoint of every segment.
  PLPath refined() const;

 private:
  std::vector<Matrix> controls_;
  double rank_tol_;
};

/// Length of lin(a, b) by 16-node Gauss-Legendre quadrature. Throws
/// RankError if an endpoint or a quadrature node leaves M+(n,m).
double segment_length(const Matrix& a, const Matrix& b, double rank_tol = kDefaultRankTol);

double path_length(const PLPath& path);

/// Energy of the arc-length-proportional parametrization, i.e. length^2.
double path_energy(const PLPath& path);

}  // namespace formspace
