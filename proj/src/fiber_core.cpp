#include "formspace/fiber_core.hpp"

#include <cmath>
#include <string>

namespace formspace {

namespace {

// Below this, the traceless part of Z is roundoff from the trace split.
constexpr double kZeroTracelessRel = 1e-24;

std::string shape_string(const Matrix& a) {
  return std::to_string(a.rows()) + "x" + std::to_string(a.cols());
}

}  // namespace

Vector singular_values(const Matrix& a) {
  return Eigen::JacobiSVD<Matrix>(a).singularValues();
}

bool is_full_rank(const Matrix& a, double rank_tol) {
  if (a.size() == 0 || a.rows() < a.cols()) return false;
  if (!a.allFinite()) return false;
  const Vector sv = singular_values(a);
  return sv(sv.size() - 1) > rank_tol * std::max(sv(0), 1.0);
}

void check_same_shape(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError(std::string(what) + ": shape mismatch (" + shape_string(a) + " vs " +
                     shape_string(b) + ")");
  }
}

FullRankMatrix::FullRankMatrix(Matrix entries, double rank_tol) : entries_(std::move(entries)) {
  const Eigen::Index n = entries_.rows();
  const Eigen::Index m = entries_.cols();
  if (m < 1 || n <= m) {
    throw ShapeError("full-rank matrix must be n x m with n > m >= 1, got " +
                     shape_string(entries_));
  }
  if (!entries_.allFinite()) throw RankError("matrix has non-finite entries");
  const Vector sv = singular_values(entries_);
  if (!(sv(m - 1) > rank_tol * std::max(sv(0), 1.0))) {
    throw RankError("matrix is not full rank (sigma_min = " + std::to_string(sv(m - 1)) + ")");
  }
  gram_ = entries_.transpose() * entries_;
  gram_inv_ = gram_.llt().solve(Matrix::Identity(m, m));
  pinv_ = gram_inv_ * entries_.transpose();
  sqrt_det_gram_ = sv.prod();
}

double inner_product(const FullRankMatrix& a, const Matrix& u, const Matrix& v) {
  check_same_shape(a.matrix(), u, "inner_product");
  check_same_shape(a.matrix(), v, "inner_product");
  return (u * a.gram_inverse()).cwiseProduct(v).sum() * a.sqrt_det_gram();
}

double norm(const FullRankMatrix& a, const Matrix& u) {
  return std::sqrt(std::max(0.0, inner_product(a, u, u)));
}

Matrix moore_penrose(const Matrix& a, double rank_tol) {
  return FullRankMatrix(a, rank_tol).pinv();
}

GeodesicData geodesic_data(const FullRankMatrix& a, const Matrix& zeta) {
  check_same_shape(a.matrix(), zeta, "geodesic_data");
  GeodesicData g;
  g.base = a.matrix();
  g.m = a.m();
  g.projector = a.matrix() * a.pinv();
  g.z = zeta * a.pinv();
  g.tr_z = g.z.trace();
  g.z0 = g.z - (g.tr_z / static_cast<double>(g.m)) * g.projector;
  g.q = g.z0.squaredNorm();
  if (g.q <= kZeroTracelessRel * std::max(1.0, g.tr_z * g.tr_z)) {
    g.q = 0.0;
    g.z0.setZero();
  }
  g.omega = g.z0 - g.z0.transpose();
  g.blowup = (g.q == 0.0 && g.tr_z < 0.0) ? 2.0 / std::abs(g.tr_z) : kInfinity;
  return g;
}

FsCoefficients fs_coefficients(const GeodesicData& g, double t) {
  if (!(t >= 0.0)) throw BlowupError("geodesic parameter must be >= 0");
  if (t >= g.blowup) {
    throw BlowupError("geodesic parameter " + std::to_string(t) + " reaches blow-up time " +
                      std::to_string(g.blowup));
  }
  const double m = static_cast<double>(g.m);
  const double lin = 1.0 + 0.5 * g.tr_z * t;
  FsCoefficients c;
  c.f = 0.25 * m * g.q * t * t + lin * lin;
  if (g.q == 0.0) {
    c.s = t / lin;
  } else {
    // atan2 picks the branch that keeps s continuous once 2 + tr(Z) t < 0.
    const double r = std::sqrt(m * g.q);
    c.s = (2.0 / r) * std::atan2(r * t, 2.0 + g.tr_z * t);
  }
  return c;
}

Matrix exp_map(const GeodesicData& g, double t, double rank_tol) {
  const FsCoefficients c = fs_coefficients(g, t);
  if (t == 0.0) return g.base;
  const double scale = std::pow(c.f, 1.0 / static_cast<double>(g.m));
  Matrix out;
  if (g.q == 0.0) {
    out = scale * g.base;
  } else {
    const Matrix rotation = expm(c.s * g.omega);
    const Matrix shear = expm(c.s * (g.z0.transpose() * g.projector));
    out = scale * (rotation * (shear * g.base));
  }
  if (!is_full_rank(out, rank_tol)) {
    throw RankError("geodesic left M+(n,m) at t = " + std::to_string(t));
  }
  return out;
}

Matrix exp_map(const FullRankMatrix& a, const Matrix& zeta, double t, double rank_tol) {
  return exp_map(geodesic_data(a, zeta), t, rank_tol);
}

double volume_quarter(const Matrix& a) {
  if (a.size() == 0 || a.rows() < a.cols()) return 0.0;
  return std::sqrt(singular_values(a).prod());
}

double lower_bound(const Matrix& a, const Matrix& b) {
  check_same_shape(a, b, "lower_bound");
  return 2.0 / std::sqrt(static_cast<double>(a.cols())) *
         std::abs(volume_quarter(a) - volume_quarter(b));
}

}  // namespace formspace
