#pragma once

// Random instances and independent reference computations for checking the
// geometry: nothing here calls the distance solvers.

#include <cstdint>
#include <vector>

#include "formspace/fiber_core.hpp"
#include "formspace/rng.hpp"

namespace formspace::oracles {

/// Draws n x m matrices U diag(sigma) V^T with U having orthonormal columns,
/// V orthogonal and each sigma_i uniform in [lo, hi], so sigma_min lies in
/// [lo, hi] by construction.
class InstanceGenerator {
 public:
  InstanceGenerator(std::uint64_t seed, Eigen::Index n, Eigen::Index m, double lo = 0.5,
                    double hi = 2.0);

  Eigen::Index n() const { return n_; }
  Eigen::Index m() const { return m_; }
  Rng& rng() { return rng_; }

  Matrix full_rank();
  /// Uniformly distributed (Haar) element of SO(dim).
  Matrix rotation(Eigen::Index dim);
  Matrix orthonormal_columns(Eigen::Index rows, Eigen::Index cols);
  /// Gaussian n x m matrix rescaled to Frobenius norm `scale`.
  Matrix gaussian(double scale = 1.0);

 private:
  Rng rng_;
  Eigen::Index n_;
  Eigen::Index m_;
  double lo_;
  double hi_;
};

FullRankMatrix random_full_rank(InstanceGenerator& gen);

/// Central-difference speeds ||(x(t+h) - x(t-h)) / 2h||_{x(t)} of the
/// geodesic x(t) = exp_map(A, zeta, t) at t_i = i * t_max / (steps - 1)
/// (second-order one-sided difference at t = 0). Throws BlowupError if
/// t_max + h reaches the blow-up time.
std::vector<double> fd_speed_profile(const FullRankMatrix& a, const Matrix& zeta, double t_max,
                                     int steps, double h = 1e-5);

/// Length of the ray r -> r A0 for r in [r0, r1] where det(A0^T A0) = 1:
/// the integral of sqrt(m) r^{m/2 - 1} dr, by tanh-sinh quadrature.
double radial_integral_oracle(double r0, double r1, Eigen::Index m);

/// Exact distance for m = 1. R^n \ {0} with |dx|^2 / |x| is a flat cone of
/// total angle pi in the coordinate rho = 2 sqrt(|x|), so
///   d(a, b)^2 = rho_a^2 + rho_b^2 - 2 rho_a rho_b cos(theta / 2)
/// with theta the angle between a and b.
double cone_distance_rank_one(const Vector& a, const Vector& b);

/// Central-difference speeds (one-sided second order at the ends) of a curve
/// sampled at equally spaced parameters on [0, 1], measured in the fiber
/// metric at each sample.
std::vector<double> sampled_speeds(const std::vector<Matrix>& samples);

/// Trapezoid rule for values on an equally spaced grid over [0, 1].
double trapezoid(const std::vector<double>& values);

/// Numerical length of a curve sampled at equally spaced parameters on
/// [0, 1]: trapezoid rule on central-difference speeds of the samples,
/// measured in the fiber metric at each sample.
double sampled_curve_length(const std::vector<Matrix>& samples);

}  // namespace formspace::oracles
