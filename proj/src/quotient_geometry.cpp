#include "formspace/quotient_geometry.hpp"

#include <cmath>
#include <numbers>
#include <optional>

#include "formspace/rng.hpp"

namespace formspace {

SPDMatrix::SPDMatrix(Matrix entries, double rank_tol) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols() || entries_.rows() < 1) {
    throw ShapeError("SPD matrix must be square and non-empty");
  }
  if (!entries_.allFinite()) throw ShapeError("SPD matrix has non-finite entries");
  const double scale = std::max(1.0, entries_.norm());
  if ((entries_ - entries_.transpose()).norm() > 1e-12 * scale) {
    throw ShapeError("matrix is not symmetric");
  }
  entries_ = 0.5 * (entries_ + entries_.transpose());
  const Vector ev = Eigen::SelfAdjointEigenSolver<Matrix>(entries_, Eigen::EigenvaluesOnly).eigenvalues();
  if (!(ev(0) > rank_tol * std::max(ev(ev.size() - 1), 1.0))) {
    throw RankError("matrix is not positive definite");
  }
}

Rotation::Rotation(Matrix entries) : entries_(std::move(entries)) {
  const Eigen::Index n = entries_.rows();
  if (n != entries_.cols() || n < 1) throw ShapeError("rotation must be square");
  if ((entries_.transpose() * entries_ - Matrix::Identity(n, n)).norm() > 1e-10) {
    throw Error("rotation is not orthogonal");
  }
  if (std::abs(entries_.determinant() - 1.0) > 1e-10) throw Error("rotation has det != +1");
}

double ebin_inner(const SPDMatrix& g, const Matrix& h, const Matrix& k) {
  check_same_shape(g.matrix(), h, "ebin_inner");
  check_same_shape(g.matrix(), k, "ebin_inner");
  const Eigen::LLT<Matrix> llt(g.matrix());
  const Matrix gh = llt.solve(h);
  const Matrix gk = llt.solve(k);
  const Matrix& l = llt.matrixLLT();
  double sqrt_det = 1.0;
  for (Eigen::Index i = 0; i < l.rows(); ++i) sqrt_det *= l(i, i);
  return 0.25 * (gh * gk).trace() * sqrt_det;
}

Matrix project(const Matrix& a) { return a.transpose() * a; }

Matrix sqrt_psd(const Matrix& g) {
  const Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (g + g.transpose()));
  Vector ev = es.eigenvalues();
  const double drift = 1e-12 * std::max(1.0, ev.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) < -drift) throw RankError("sqrt_psd: matrix has a negative eigenvalue");
    ev(i) = std::sqrt(std::max(0.0, ev(i)));
  }
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

FullRankMatrix polar_lift(const SPDMatrix& g, Eigen::Index n, double rank_tol) {
  const Eigen::Index m = g.m();
  if (n <= m) throw ShapeError("polar_lift requires n > m");
  Matrix lift = Matrix::Zero(n, m);
  lift.topRows(m) = sqrt_psd(g.matrix());
  return FullRankMatrix(std::move(lift), rank_tol);
}

namespace {

// Completes the orthonormal columns of `q` to an orthonormal basis of R^n,
// taking canonical basis vectors in index order and skipping those within
// 1e-8 of the current span, then flips the last column so that det = +1.
Matrix complete_basis(const Matrix& q) {
  const Eigen::Index n = q.rows();
  Matrix basis(n, n);
  basis.leftCols(q.cols()) = q;
  Eigen::Index filled = q.cols();
  for (Eigen::Index e = 0; e < n && filled < n; ++e) {
    Vector v = Vector::Unit(n, e);
    for (int pass = 0; pass < 2; ++pass) {
      v -= basis.leftCols(filled) * (basis.leftCols(filled).transpose() * v);
    }
    const double len = v.norm();
    if (len < 1e-8) continue;
    basis.col(filled++) = v / len;
  }
  if (basis.determinant() < 0.0) basis.col(n - 1) *= -1.0;
  return basis;
}

Matrix polar_factor(const FullRankMatrix& a) {
  // A (A^T A)^{-1/2}
  const Eigen::SelfAdjointEigenSolver<Matrix> es(a.gram());
  const Vector inv_sqrt = es.eigenvalues().cwiseSqrt().cwiseInverse();
  return a.matrix() * (es.eigenvectors() * inv_sqrt.asDiagonal() * es.eigenvectors().transpose());
}

}  // namespace

Rotation align(const FullRankMatrix& a, const FullRankMatrix& b, double tol) {
  check_same_shape(a.matrix(), b.matrix(), "align");
  const double mismatch = (a.gram() - b.gram()).norm();
  if (mismatch > tol * a.gram().norm()) {
    throw GramMismatch("align: Gram matrices differ by " + std::to_string(mismatch));
  }
  const Matrix oa = complete_basis(polar_factor(a));
  const Matrix ob = complete_basis(polar_factor(b));
  return Rotation(oa * ob.transpose());
}

namespace {

Matrix skew_from(const Vector& x, Eigen::Index n) {
  Matrix s = Matrix::Zero(n, n);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      s(i, j) = x(k);
      s(j, i) = -x(k);
      ++k;
    }
  }
  return s;
}

// Shooting length from `lg` to O * `lh`, warm-started from `guess`; falls
// back to the full distance solver when shooting does not converge.
class RotatedObjective {
 public:
  RotatedObjective(const FullRankMatrix& lg, const FullRankMatrix& lh, const SolverOptions& opts)
      : lg_(lg), lh_(lh), opts_(opts) {}

  double operator()(const Vector& x, Matrix* zeta_io = nullptr) const {
    const Matrix o = expm(skew_from(x, lg_.n()));
    const FullRankMatrix target(o * lh_.matrix(), opts_.rank_tol);
    try {
      const LogMapResult lm = log_map(lg_, target, opts_, zeta_io);
      if (zeta_io) *zeta_io = lm.zeta;
      return norm(lg_, lm.zeta);
    } catch (const ConvergenceError&) {
      return distance(lg_, target, opts_).value;
    }
  }

 private:
  const FullRankMatrix& lg_;
  const FullRankMatrix& lh_;
  const SolverOptions& opts_;
};

}  // namespace

SymDistanceResult sym_distance(const SPDMatrix& g, const SPDMatrix& h, Eigen::Index n,
                               const SolverOptions& opts, int rotation_restarts) {
  check_same_shape(g.matrix(), h.matrix(), "sym_distance");
  const FullRankMatrix lg = polar_lift(g, n, opts.rank_tol);
  const FullRankMatrix lh = polar_lift(h, n, opts.rank_tol);
  SymDistanceResult out;
  out.rotation = Matrix::Identity(n, n);
  if (g.matrix() == h.matrix()) return out;

  const Eigen::Index dim = n * (n - 1) / 2;
  const RotatedObjective objective(lg, lh, opts);
  Rng rng(mix_seed(opts.seed, 0x50d1ULL));

  double best = kInfinity;
  Vector best_x = Vector::Zero(dim);
  for (int r = 0; r < std::max(1, rotation_restarts); ++r) {
    Vector x = Vector::Zero(dim);
    if (r > 0) {
      for (Eigen::Index i = 0; i < dim; ++i) x(i) = rng.normal();
      // Skew generator norm = sqrt(2) |x|; draw it uniformly in (0, pi].
      x *= rng.uniform(0.05, 1.0) * std::numbers::pi / (std::sqrt(2.0) * x.norm());
    }
    Matrix zeta = lh.matrix() - lg.matrix();
    double fx = objective(x, &zeta);
    double step = 0.5;
    for (int it = 0; it < 100 && dim > 0; ++it) {
      ++out.iterations;
      Vector grad(dim);
      const double hstep = 1e-6;
      for (Eigen::Index i = 0; i < dim; ++i) {
        Vector xp = x;
        Vector xm = x;
        xp(i) += hstep;
        xm(i) -= hstep;
        Matrix zp = zeta;
        Matrix zm = zeta;
        grad(i) = (objective(xp, &zp) - objective(xm, &zm)) / (2.0 * hstep);
      }
      const double gnorm = grad.norm();
      if (gnorm < 1e-8) break;
      bool accepted = false;
      for (int ls = 0; ls < 30; ++ls) {
        const Vector trial = x - step * grad;
        Matrix zt = zeta;
        const double ft = objective(trial, &zt);
        if (ft <= fx - 1e-4 * step * gnorm * gnorm) {
          x = trial;
          zeta = zt;
          const double gain = fx - ft;
          fx = ft;
          step *= 2.0;
          accepted = true;
          if (gain <= 1e-12 * std::max(1.0, fx)) it = 100;
          break;
        }
        step *= 0.5;
      }
      if (!accepted) break;
    }
    if (fx < best) {
      best = fx;
      best_x = x;
    }
  }

  // Certify the minimizer with the full solver; the cone-point route does not
  // depend on the rotation.
  const Matrix o = expm(skew_from(best_x, n));
  const DistanceResult full = distance(lg, FullRankMatrix(o * lh.matrix(), opts.rank_tol), opts);
  out.rotation = o;
  out.value = best;
  out.method = DistanceMethod::shooting;
  if (full.value < out.value) {
    out.value = full.value;
    out.method = full.method;
  }
  if (!best_x.isZero()) {
    const DistanceResult at_identity = distance(lg, lh, opts);
    if (at_identity.value < out.value) {
      out.value = at_identity.value;
      out.method = at_identity.method;
      out.rotation = Matrix::Identity(n, n);
    }
  }
  return out;
}

}  // namespace formspace
