#pragma once

// Discretized one-form fields: a field is one n x m matrix per sample point of
// a weighted point set standing in for (M, mu_g0). All field distances are
// weighted L2 sums of pointwise fiber distances.

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "formspace/fiber_solver.hpp"
#include "formspace/quotient_geometry.hpp"

namespace formspace {

class SampledManifold {
 public:
  /// Throws ShapeError on size mismatch, non-positive weights, duplicate
  /// identifiers or n <= m.
  SampledManifold(std::vector<std::string> ids, std::vector<double> weights, Eigen::Index n,
                  Eigen::Index m);

  /// nx * ny grid on the flat torus with equal weights summing to 1;
  /// identifiers are "i_j".
  static std::shared_ptr<const SampledManifold> torus_grid(int nx, int ny, Eigen::Index n,
                                                           Eigen::Index m);

  std::size_t size() const { return ids_.size(); }
  const std::vector<std::string>& ids() const { return ids_; }
  const std::vector<double>& weights() const { return weights_; }
  Eigen::Index n() const { return n_; }
  Eigen::Index m() const { return m_; }
  double total_weight() const;

  friend bool operator==(const SampledManifold& a, const SampledManifold& b) {
    return a.n_ == b.n_ && a.m_ == b.m_ && a.ids_ == b.ids_ && a.weights_ == b.weights_;
  }

 private:
  std::vector<std::string> ids_;
  std::vector<double> weights_;
  Eigen::Index n_;
  Eigen::Index m_;
};

using ManifoldPtr = std::shared_ptr<const SampledManifold>;

template <typename Value>
struct Field {
  ManifoldPtr manifold;
  std::vector<Value> values;

  std::size_t size() const { return values.size(); }
};

using OneFormField = Field<FullRankMatrix>;
using CompletionField = Field<CompletionPoint>;
using MetricField = Field<SPDMatrix>;
using RotationField = Field<Rotation>;

/// Builds a one-form field; throws PointwiseFailure naming the first
/// value that is not a full-rank n x m matrix.
OneFormField make_one_form_field(ManifoldPtr manifold, const std::vector<Matrix>& values,
                                 double rank_tol = kDefaultRankTol);

/// Throws ManifoldMismatch unless both manifolds have the same identifiers,
/// weights and shape.
void check_same_manifold(const SampledManifold& a, const SampledManifold& b);

/// sqrt(sum_k w_k d(alpha_k, beta_k)^2), summed in sample order.
double field_distance(const OneFormField& alpha, const OneFormField& beta,
                      const SolverOptions& opts = {});
double field_distance(const CompletionField& alpha, const CompletionField& beta,
                      const SolverOptions& opts = {});

/// Per-sample fiber distances, in sample order.
std::vector<DistanceResult> pointwise_distances(const OneFormField& alpha, const OneFormField& beta,
                                                const SolverOptions& opts = {});

/// Pointwise geodesics between two fields, solved once and evaluated at any t.
class FieldGeodesic {
 public:
  /// Throws PointwiseFailure (with the sample index) if a pointwise log map
  /// does not converge.
  FieldGeodesic(const OneFormField& alpha, const OneFormField& beta, const SolverOptions& opts = {});

  OneFormField at(double t) const;

  /// Initial velocities, one per sample.
  const std::vector<Matrix>& velocities() const { return zetas_; }

  /// sqrt(sum_k w_k ||zeta_k||^2), the constant speed of the field path.
  double length() const;

 private:
  OneFormField alpha_;
  std::vector<GeodesicData> geodesics_;
  std::vector<Matrix> zetas_;
  SolverOptions opts_;
};

/// exp_map(alpha_k, log_map(alpha_k, beta_k), t) at every sample.
OneFormField field_interpolate(const OneFormField& alpha, const OneFormField& beta, double t,
                               const SolverOptions& opts = {});

MetricField metric_field(const OneFormField& alpha);

/// sqrt(sum_k w_k sym_distance(g_k, g'_k)^2); `n` is the lifting dimension.
double ebin_field_distance(const MetricField& g, const MetricField& h, Eigen::Index n,
                           const SolverOptions& opts = {});

/// Pointwise align(alpha_k, beta_k): alpha_k = O_k beta_k. Throws
/// GramMismatch listing every offending sample.
RotationField field_align(const OneFormField& alpha, const OneFormField& beta, double tol = 1e-8);

/// O_k * alpha_k at every sample.
OneFormField rotate(const RotationField& o, const OneFormField& alpha);

/// Replaces rank-deficient values by zero. Throws PointwiseFailure for
/// non-finite entries or a wrong shape, Error if the volume is not finite.
CompletionField canonicalize(const std::vector<Matrix>& raw, ManifoldPtr manifold,
                             double rank_tol = kDefaultRankTol);

/// sum_k w_k sqrt(det(alpha_k^T alpha_k))
double field_volume(const OneFormField& alpha);
double field_volume(const CompletionField& alpha);

}  // namespace formspace
