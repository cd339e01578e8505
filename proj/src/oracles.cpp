#include "formspace/oracles.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/tanh_sinh.hpp>

namespace formspace::oracles {

InstanceGenerator::InstanceGenerator(std::uint64_t seed, Eigen::Index n, Eigen::Index m, double lo,
                                     double hi)
    : rng_(seed), n_(n), m_(m), lo_(lo), hi_(hi) {
  if (m_ < 1 || n_ <= m_) throw ShapeError("instance generator requires n > m >= 1");
  if (!(lo_ > 0.0 && hi_ >= lo_)) throw ShapeError("instance generator needs 0 < lo <= hi");
}

Matrix InstanceGenerator::orthonormal_columns(Eigen::Index rows, Eigen::Index cols) {
  Matrix g(rows, cols);
  for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = rng_.normal();
  const Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(rows, cols);
  // Sign fix makes the distribution Haar rather than QR-convention dependent.
  const Matrix& r = qr.matrixQR();
  for (Eigen::Index j = 0; j < cols; ++j) {
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  }
  return q;
}

Matrix InstanceGenerator::rotation(Eigen::Index dim) {
  Matrix q = orthonormal_columns(dim, dim);
  if (q.determinant() < 0.0) q.col(0) *= -1.0;
  return q;
}

Matrix InstanceGenerator::full_rank() {
  const Matrix u = orthonormal_columns(n_, m_);
  const Matrix v = orthonormal_columns(m_, m_);
  Vector sigma(m_);
  for (Eigen::Index i = 0; i < m_; ++i) sigma(i) = rng_.uniform(lo_, hi_);
  return u * sigma.asDiagonal() * v.transpose();
}

Matrix InstanceGenerator::gaussian(double scale) {
  Matrix g(n_, m_);
  for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = rng_.normal();
  return g * (scale / g.norm());
}

FullRankMatrix random_full_rank(InstanceGenerator& gen) { return FullRankMatrix(gen.full_rank()); }

std::vector<double> fd_speed_profile(const FullRankMatrix& a, const Matrix& zeta, double t_max,
                                     int steps, double h) {
  const GeodesicData g = geodesic_data(a, zeta);
  if (t_max + 2.0 * h >= g.blowup) throw BlowupError("speed profile crosses the blow-up time");
  std::vector<double> out;
  out.reserve(steps);
  for (int i = 0; i < steps; ++i) {
    const double t = steps > 1 ? t_max * i / (steps - 1) : 0.0;
    Matrix vel;
    if (t < h) {
      const Matrix x0 = exp_map(g, t);
      vel = (-3.0 * x0 + 4.0 * exp_map(g, t + h) - exp_map(g, t + 2.0 * h)) / (2.0 * h);
    } else {
      vel = (exp_map(g, t + h) - exp_map(g, t - h)) / (2.0 * h);
    }
    out.push_back(norm(FullRankMatrix(exp_map(g, t)), vel));
  }
  return out;
}

double radial_integral_oracle(double r0, double r1, Eigen::Index m) {
  if (m < 1) throw ShapeError("radial oracle needs m >= 1");
  if (r0 < 0.0 || r1 < 0.0) throw Error("radial oracle needs non-negative radii");
  if (r0 == r1) return 0.0;
  const double lo = std::min(r0, r1);
  const double hi = std::max(r0, r1);
  const double md = static_cast<double>(m);
  // ||A0||^2 at r A0 is tr(A0 (r^2 A0^T A0)^{-1} A0^T) r^m = m r^{m-2}.
  auto element = [md](double r) { return std::sqrt(md * std::pow(r, md - 2.0)); };
  boost::math::quadrature::tanh_sinh<double> integrator;
  return integrator.integrate(element, lo, hi);
}

double cone_distance_rank_one(const Vector& a, const Vector& b) {
  const double ra = a.norm();
  const double rb = b.norm();
  const double rho_a = 2.0 * std::sqrt(ra);
  const double rho_b = 2.0 * std::sqrt(rb);
  if (ra == 0.0 || rb == 0.0) return std::abs(rho_a - rho_b);
  const double c = std::clamp(a.dot(b) / (ra * rb), -1.0, 1.0);
  const double half = 0.5 * std::acos(c);
  return std::sqrt(std::max(0.0, rho_a * rho_a + rho_b * rho_b - 2.0 * rho_a * rho_b * std::cos(half)));
}

std::vector<double> sampled_speeds(const std::vector<Matrix>& samples) {
  const std::size_t count = samples.size();
  if (count < 3) throw Error("sampled curves need at least three samples");
  const double dt = 1.0 / static_cast<double>(count - 1);
  std::vector<double> speed(count);
  for (std::size_t i = 0; i < count; ++i) {
    Matrix vel;
    if (i == 0) {
      vel = (-3.0 * samples[0] + 4.0 * samples[1] - samples[2]) / (2.0 * dt);
    } else if (i == count - 1) {
      vel = (3.0 * samples[i] - 4.0 * samples[i - 1] + samples[i - 2]) / (2.0 * dt);
    } else {
      vel = (samples[i + 1] - samples[i - 1]) / (2.0 * dt);
    }
    // ||V||_X^2 = tr(V (X^T X)^{-1} V^T) sqrt(det X^T X), evaluated directly.
    const Matrix& x = samples[i];
    const Matrix gram = x.transpose() * x;
    const double q = (vel * gram.inverse() * vel.transpose()).trace();
    speed[i] = std::sqrt(std::max(0.0, q) * std::sqrt(gram.determinant()));
  }
  return speed;
}

double trapezoid(const std::vector<double>& values) {
  if (values.size() < 2) return 0.0;
  const double dt = 1.0 / static_cast<double>(values.size() - 1);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < values.size(); ++i) total += 0.5 * dt * (values[i] + values[i + 1]);
  return total;
}

double sampled_curve_length(const std::vector<Matrix>& samples) {
  return trapezoid(sampled_speeds(samples));
}

}  // namespace formspace::oracles
