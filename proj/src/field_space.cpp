#include "formspace/field_space.hpp"

#include <cmath>
#include <set>

namespace formspace {

SampledManifold::SampledManifold(std::vector<std::string> ids, std::vector<double> weights,
                                 Eigen::Index n, Eigen::Index m)
    : ids_(std::move(ids)), weights_(std::move(weights)), n_(n), m_(m) {
  if (m_ < 1 || n_ <= m_) throw ShapeError("sampled manifold requires n > m >= 1");
  if (ids_.size() != weights_.size()) throw ShapeError("identifier and weight counts differ");
  if (ids_.empty()) throw ShapeError("sampled manifold has no points");
  std::set<std::string> seen;
  for (std::size_t k = 0; k < ids_.size(); ++k) {
    if (!(weights_[k] > 0.0) || !std::isfinite(weights_[k])) {
      throw ShapeError("weight of point '" + ids_[k] + "' must be positive");
    }
    if (!seen.insert(ids_[k]).second) throw ShapeError("duplicate point id '" + ids_[k] + "'");
  }
}

std::shared_ptr<const SampledManifold> SampledManifold::torus_grid(int nx, int ny, Eigen::Index n,
                                                                   Eigen::Index m) {
  if (nx < 1 || ny < 1) throw ShapeError("torus grid needs at least one point per axis");
  std::vector<std::string> ids;
  const double w = 1.0 / (static_cast<double>(nx) * ny);
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) ids.push_back(std::to_string(i) + "_" + std::to_string(j));
  }
  std::vector<double> weights(ids.size(), w);
  return std::make_shared<const SampledManifold>(std::move(ids), std::move(weights), n, m);
}

double SampledManifold::total_weight() const {
  double s = 0.0;
  for (double w : weights_) s += w;
  return s;
}

void check_same_manifold(const SampledManifold& a, const SampledManifold& b) {
  if (&a == &b) return;
  if (!(a == b)) throw ManifoldMismatch("fields live on different sample manifolds");
}

namespace {

template <typename A, typename B>
void check_fields(const Field<A>& a, const Field<B>& b) {
  if (!a.manifold || !b.manifold) throw ManifoldMismatch("field has no manifold");
  check_same_manifold(*a.manifold, *b.manifold);
  if (a.size() != a.manifold->size() || b.size() != b.manifold->size()) {
    throw ShapeError("field value count differs from its manifold");
  }
}

}  // namespace

OneFormField make_one_form_field(ManifoldPtr manifold, const std::vector<Matrix>& values,
                                 double rank_tol) {
  if (values.size() != manifold->size()) throw ShapeError("field value count differs from manifold");
  OneFormField f{manifold, {}};
  f.values.reserve(values.size());
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (values[k].rows() != manifold->n() || values[k].cols() != manifold->m()) {
      throw PointwiseFailure("value at point '" + manifold->ids()[k] + "' has the wrong shape", k);
    }
    try {
      f.values.emplace_back(values[k], rank_tol);
    } catch (const Error& e) {
      throw PointwiseFailure("value at point '" + manifold->ids()[k] + "': " + e.what(), k);
    }
  }
  return f;
}

std::vector<DistanceResult> pointwise_distances(const OneFormField& alpha, const OneFormField& beta,
                                                const SolverOptions& opts) {
  check_fields(alpha, beta);
  std::vector<DistanceResult> out;
  out.reserve(alpha.size());
  for (std::size_t k = 0; k < alpha.size(); ++k) {
    out.push_back(distance(alpha.values[k], beta.values[k], opts));
  }
  return out;
}

double field_distance(const OneFormField& alpha, const OneFormField& beta,
                      const SolverOptions& opts) {
  const auto d = pointwise_distances(alpha, beta, opts);
  const auto& w = alpha.manifold->weights();
  double sum = 0.0;
  for (std::size_t k = 0; k < d.size(); ++k) sum += w[k] * d[k].value * d[k].value;
  return std::sqrt(sum);
}

double field_distance(const CompletionField& alpha, const CompletionField& beta,
                      const SolverOptions& opts) {
  check_fields(alpha, beta);
  const auto& w = alpha.manifold->weights();
  double sum = 0.0;
  for (std::size_t k = 0; k < alpha.size(); ++k) {
    const double d = completion_distance(alpha.values[k], beta.values[k], opts);
    sum += w[k] * d * d;
  }
  return std::sqrt(sum);
}

FieldGeodesic::FieldGeodesic(const OneFormField& alpha, const OneFormField& beta,
                             const SolverOptions& opts)
    : alpha_(alpha), opts_(opts) {
  check_fields(alpha, beta);
  geodesics_.reserve(alpha.size());
  zetas_.reserve(alpha.size());
  for (std::size_t k = 0; k < alpha.size(); ++k) {
    try {
      LogMapResult lm = log_map(alpha.values[k], beta.values[k], opts);
      geodesics_.push_back(geodesic_data(alpha.values[k], lm.zeta));
      zetas_.push_back(std::move(lm.zeta));
    } catch (const ConvergenceError& e) {
      throw PointwiseFailure("log map failed at point '" + alpha.manifold->ids()[k] + "': " + e.what(),
                             k);
    }
  }
}

OneFormField FieldGeodesic::at(double t) const {
  OneFormField out{alpha_.manifold, {}};
  out.values.reserve(geodesics_.size());
  for (std::size_t k = 0; k < geodesics_.size(); ++k) {
    try {
      out.values.emplace_back(exp_map(geodesics_[k], t, opts_.rank_tol), opts_.rank_tol);
    } catch (const Error& e) {
      throw PointwiseFailure("geodesic evaluation failed at point '" + alpha_.manifold->ids()[k] +
                                 "': " + e.what(),
                             k);
    }
  }
  return out;
}

double FieldGeodesic::length() const {
  const auto& w = alpha_.manifold->weights();
  double sum = 0.0;
  for (std::size_t k = 0; k < zetas_.size(); ++k) {
    sum += w[k] * inner_product(alpha_.values[k], zetas_[k], zetas_[k]);
  }
  return std::sqrt(sum);
}

OneFormField field_interpolate(const OneFormField& alpha, const OneFormField& beta, double t,
                               const SolverOptions& opts) {
  if (!(t >= 0.0 && t <= 1.0)) throw Error("interpolation parameter must lie in [0, 1]");
  return FieldGeodesic(alpha, beta, opts).at(t);
}

MetricField metric_field(const OneFormField& alpha) {
  MetricField out{alpha.manifold, {}};
  out.values.reserve(alpha.size());
  for (const FullRankMatrix& a : alpha.values) out.values.emplace_back(a.gram());
  return out;
}

double ebin_field_distance(const MetricField& g, const MetricField& h, Eigen::Index n,
                           const SolverOptions& opts) {
  check_fields(g, h);
  const auto& w = g.manifold->weights();
  double sum = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double d = sym_distance(g.values[k], h.values[k], n, opts).value;
    sum += w[k] * d * d;
  }
  return std::sqrt(sum);
}

RotationField field_align(const OneFormField& alpha, const OneFormField& beta, double tol) {
  check_fields(alpha, beta);
  std::vector<std::size_t> bad;
  std::string names;
  RotationField out{alpha.manifold, {}};
  out.values.reserve(alpha.size());
  for (std::size_t k = 0; k < alpha.size(); ++k) {
    try {
      out.values.push_back(align(alpha.values[k], beta.values[k], tol));
    } catch (const GramMismatch&) {
      bad.push_back(k);
      names += (names.empty() ? "" : ", ") + alpha.manifold->ids()[k];
    }
  }
  if (!bad.empty()) throw GramMismatch("Gram mismatch at points: " + names, std::move(bad));
  return out;
}

OneFormField rotate(const RotationField& o, const OneFormField& alpha) {
  check_fields(o, alpha);
  OneFormField out{alpha.manifold, {}};
  out.values.reserve(alpha.size());
  for (std::size_t k = 0; k < alpha.size(); ++k) {
    out.values.emplace_back(o.values[k].matrix() * alpha.values[k].matrix());
  }
  return out;
}

CompletionField canonicalize(const std::vector<Matrix>& raw, ManifoldPtr manifold,
                             double rank_tol) {
  if (raw.size() != manifold->size()) throw ShapeError("field value count differs from manifold");
  CompletionField out{manifold, {}};
  out.values.reserve(raw.size());
  for (std::size_t k = 0; k < raw.size(); ++k) {
    if (raw[k].rows() != manifold->n() || raw[k].cols() != manifold->m()) {
      throw PointwiseFailure("value at point '" + manifold->ids()[k] + "' has the wrong shape", k);
    }
    if (!raw[k].allFinite()) {
      throw PointwiseFailure("value at point '" + manifold->ids()[k] + "' is not finite", k);
    }
    out.values.emplace_back(raw[k], rank_tol);
  }
  if (!std::isfinite(field_volume(out))) throw Error("completion field has infinite volume");
  return out;
}

double field_volume(const OneFormField& alpha) {
  const auto& w = alpha.manifold->weights();
  double sum = 0.0;
  for (std::size_t k = 0; k < alpha.size(); ++k) sum += w[k] * alpha.values[k].sqrt_det_gram();
  return sum;
}

double field_volume(const CompletionField& alpha) {
  const auto& w = alpha.manifold->weights();
  double sum = 0.0;
  for (std::size_t k = 0; k < alpha.size(); ++k) {
    const double vq = volume_quarter(alpha.values[k].matrix());
    sum += w[k] * vq * vq;
  }
  return sum;
}

}  // namespace formspace
