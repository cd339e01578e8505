#pragma once

// Geodesic distance on M+(n,m) and on its completion M+(n,m) u {0}.

#include <cstdint>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "formspace/fiber_core.hpp"

namespace formspace {

/// Solver settings shared by every distance query. One record is used for a
/// whole batch (e.g. all points of a field).
struct SolverOptions {
  double rank_tol = kDefaultRankTol;
  /// Frobenius tolerance on exp_map(A, zeta, 1) - B for the shooting route.
  double endpoint_tol = 1e-10;
  int max_newton_iters = 60;
  /// Final number of segments of the PL route (reached by midpoint doubling).
  int pl_segments = 16;
  /// Maximum coordinate-descent sweeps per refinement level.
  int pl_iters = 500;
  /// PL restarts; restart 0 starts from the straight segment.
  int restarts = 3;
  std::uint64_t seed = 0x5eedULL;
  bool use_shooting = true;
  bool use_pl = true;
};

enum class DistanceMethod { shooting, pl, through_singular };

std::string_view to_string(DistanceMethod m);

struct DistanceResult {
  double value = 0.0;
  DistanceMethod method = DistanceMethod::shooting;
  /// Initial velocity (shooting) or path (pl); empty for through_singular.
  std::variant<std::monostate, Matrix, PLPath> certificate;
  double lower = 0.0;
  int iterations = 0;
  /// Value of each route; empty when the route was disabled or failed.
  std::optional<double> shooting_value;
  std::optional<double> pl_value;
  double singular_value = kInfinity;
};

struct LogMapResult {
  Matrix zeta;
  int iterations = 0;
  double residual = 0.0;
};

/// Initial velocity zeta with ||exp_map(A, zeta, 1) - B||_F <= endpoint_tol.
/// Damped Gauss-Newton on the shooting residual from zeta0 = B - A (or
/// `initial` when given); if that stalls, continuation along lin(A, B).
/// Throws ConvergenceError on failure.
LogMapResult log_map(const FullRankMatrix& a, const FullRankMatrix& b,
                     const SolverOptions& opts = {}, const Matrix* initial = nullptr);

struct PLResult {
  PLPath path;
  /// Discrete energy k * sum_i L_i^2 after each sweep, starting with the input.
  std::vector<double> energy_history;
  int sweeps = 0;
};

/// Coordinate-wise descent on the interior controls of `path` (endpoints are
/// fixed). A trial move is accepted only if it lowers the discrete energy
/// without lengthening the path, and is rejected if any quadrature node of
/// the touched segments fails the rank test.
PLResult pl_shorten(const PLPath& path, int iters, double stall_tol = 1e-13);

/// k * sum_i L_i^2 over the k segments; >= length^2 with equality for
/// equal-length segments.
double discrete_energy(const PLPath& path);

/// Distance to the singular stratum, (2 / sqrt(m)) det(A^T A)^{1/4}.
double dist_to_singular(const Matrix& a);

/// Best of the shooting route, the PL route and the route through the
/// completion's cone point. Each pair is solved from its entrywise
/// lexicographically smaller endpoint, so the value is exactly symmetric; the
/// certificate is always expressed from `a`.
DistanceResult distance(const FullRankMatrix& a, const FullRankMatrix& b,
                        const SolverOptions& opts = {});

/// A point of M+(n,m) u {0}: rank-deficient matrices are stored as zero.
class CompletionPoint {
 public:
  explicit CompletionPoint(const Matrix& entries, double rank_tol = kDefaultRankTol);

  const Matrix& matrix() const { return matrix_; }
  bool is_singular() const { return singular_; }

  friend bool operator==(const CompletionPoint& a, const CompletionPoint& b) {
    return a.singular_ == b.singular_ && a.matrix_ == b.matrix_;
  }

 private:
  Matrix matrix_;
  bool singular_ = false;
};

double completion_distance(const CompletionPoint& p, const CompletionPoint& q,
                           const SolverOptions& opts = {});

}  // namespace formspace
