#include "formspace/fiber_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "formspace/detail/segment.hpp"
#include "formspace/rng.hpp"

namespace formspace {

std::string_view to_string(DistanceMethod m) {
  switch (m) {
    case DistanceMethod::shooting:
      return "shooting";
    case DistanceMethod::pl:
      return "pl";
    case DistanceMethod::through_singular:
      return "through_singular";
  }
  return "unknown";
}

namespace {

using MapVec = Eigen::Map<const Vector>;

MapVec as_vector(const Matrix& x) { return MapVec(x.data(), x.size()); }

Matrix as_matrix(const Vector& v, Eigen::Index rows, Eigen::Index cols) {
  return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

// exp_map(A, zeta, 1) - B, or nothing if the geodesic does not reach t = 1.
std::optional<Vector> shooting_residual(const FullRankMatrix& a, const Matrix& b,
                                        const Matrix& zeta, double rank_tol) {
  try {
    const GeodesicData g = geodesic_data(a, zeta);
    if (g.blowup <= 1.0) return std::nullopt;
    const Matrix end = exp_map(g, 1.0, rank_tol);
    return Vector(as_vector(end) - as_vector(b));
  } catch (const Error&) {
    return std::nullopt;
  }
}

struct NewtonOutcome {
  bool converged = false;
  Matrix zeta;
  int iterations = 0;
  double residual = kInfinity;
};

NewtonOutcome gauss_newton(const FullRankMatrix& a, const Matrix& b, Matrix zeta,
                           const SolverOptions& opts) {
  NewtonOutcome out;
  const Eigen::Index rows = b.rows();
  const Eigen::Index cols = b.cols();
  const Eigen::Index dim = b.size();

  std::optional<Vector> r = shooting_residual(a, b, zeta, opts.rank_tol);
  if (!r) return out;
  double rnorm = r->norm();

  for (int it = 0; it < opts.max_newton_iters; ++it) {
    out.iterations = it;
    if (rnorm <= opts.endpoint_tol) break;

    // Central-difference Jacobian of the shooting map.
    const double h = 1e-6 * std::max(1.0, zeta.norm());
    Matrix jac(dim, dim);
    for (Eigen::Index j = 0; j < dim; ++j) {
      Matrix plus = zeta;
      Matrix minus = zeta;
      plus.data()[j] += h;
      minus.data()[j] -= h;
      const auto rp = shooting_residual(a, b, plus, opts.rank_tol);
      const auto rm = shooting_residual(a, b, minus, opts.rank_tol);
      if (rp && rm) {
        jac.col(j) = (*rp - *rm) / (2.0 * h);
      } else if (rp) {
        jac.col(j) = (*rp - *r) / h;
      } else if (rm) {
        jac.col(j) = (*r - *rm) / h;
      } else {
        return out;
      }
    }
    const Vector step = jac.colPivHouseholderQr().solve(-*r);
    if (!step.allFinite()) return out;

    bool accepted = false;
    for (double lambda = 1.0; lambda > 1e-10; lambda *= 0.5) {
      const Matrix trial = zeta + lambda * as_matrix(step, rows, cols);
      const auto rt = shooting_residual(a, b, trial, opts.rank_tol);
      if (rt && rt->norm() < rnorm) {
        zeta = trial;
        r = rt;
        rnorm = rt->norm();
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    out.iterations = it + 1;
  }
  out.zeta = std::move(zeta);
  out.residual = rnorm;
  out.converged = rnorm <= opts.endpoint_tol;
  return out;
}

}  // namespace

LogMapResult log_map(const FullRankMatrix& a, const FullRankMatrix& b, const SolverOptions& opts,
                     const Matrix* initial) {
  check_same_shape(a.matrix(), b.matrix(), "log_map");
  if (a.matrix() == b.matrix()) {
    return {Matrix::Zero(a.n(), a.m()), 0, 0.0};
  }
  const Matrix zeta0 = initial ? *initial : Matrix(b.matrix() - a.matrix());
  NewtonOutcome direct = gauss_newton(a, b.matrix(), zeta0, opts);
  int total = direct.iterations;
  if (direct.converged) return {direct.zeta, total, direct.residual};

  // Continuation: track the solution for targets sliding along lin(A, B).
  Matrix zeta = Matrix::Zero(a.n(), a.m());
  double lambda = 0.0;
  double dl = 0.25;
  while (lambda < 1.0) {
    const double next = std::min(1.0, lambda + dl);
    const Matrix target = (1.0 - next) * a.matrix() + next * b.matrix();
    NewtonOutcome stage;
    if (is_full_rank(target, opts.rank_tol)) {
      const Matrix guess = lambda > 0.0 ? Matrix(zeta * (next / lambda)) : Matrix(target - a.matrix());
      stage = gauss_newton(a, target, guess, opts);
      total += stage.iterations;
    }
    if (stage.converged) {
      zeta = stage.zeta;
      lambda = next;
      dl = std::min(2.0 * dl, 0.5);
    } else {
      dl *= 0.5;
      if (dl < 1e-4) {
        throw ConvergenceError("log_map: shooting did not converge", total, direct.residual);
      }
    }
  }
  return {zeta, total, (exp_map(a, zeta, 1.0, opts.rank_tol) - b.matrix()).norm()};
}

double discrete_energy(const PLPath& path) {
  const auto& c = path.controls();
  const double k = static_cast<double>(path.segments());
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < c.size(); ++i) {
    const double l = detail::interior_length(c[i], c[i + 1], path.rank_tol());
    sum += l * l;
  }
  return k * sum;
}

PLResult pl_shorten(const PLPath& path, int iters, double stall_tol) {
  std::vector<Matrix> x = path.controls();
  const int k = path.segments();
  const double kd = static_cast<double>(k);
  const double tol = path.rank_tol();

  std::vector<double> len(k);
  for (int i = 0; i < k; ++i) len[i] = detail::interior_length(x[i], x[i + 1], tol);
  auto energy = [&] {
    double s = 0.0;
    for (double l : len) s += l * l;
    return kd * s;
  };

  PLResult out{path, {energy()}, 0};
  std::vector<double> step(k + 1, 1.0 / (4.0 * kd));

  for (int sweep = 0; sweep < iters && k > 1; ++sweep) {
    bool moved = false;
    for (int j = 1; j < k; ++j) {
      const detail::SegmentEval left = detail::segment_length_and_gradient(x[j - 1], x[j], tol);
      const detail::SegmentEval right = detail::segment_length_and_gradient(x[j], x[j + 1], tol);
      const Matrix grad = 2.0 * kd * (left.length * left.grad_b + right.length * right.grad_a);

      // Riemannian gradient: grad_E (X^T X) / sqrt(det X^T X).
      const FullRankMatrix here(x[j], tol);
      const Matrix dir = -grad * here.gram() / here.sqrt_det_gram();
      const double slope = grad.cwiseProduct(dir).sum();
      if (!(slope < 0.0)) continue;

      const double local_e = kd * (left.length * left.length + right.length * right.length);
      const double local_l = left.length + right.length;
      for (int attempt = 0; attempt < 30; ++attempt) {
        const Matrix trial = x[j] + step[j] * dir;
        double l1 = 0.0;
        double l2 = 0.0;
        if (!is_full_rank(trial, tol)) {
          step[j] *= 0.5;
          continue;
        }
        try {
          l1 = detail::interior_length(x[j - 1], trial, tol);
          l2 = detail::interior_length(trial, x[j + 1], tol);
        } catch (const RankError&) {
          step[j] *= 0.5;
          continue;
        }
        const double e = kd * (l1 * l1 + l2 * l2);
        if (e <= local_e + 1e-4 * step[j] * slope && e < local_e && l1 + l2 <= local_l) {
          x[j] = trial;
          len[j - 1] = l1;
          len[j] = l2;
          moved = true;
          step[j] = std::min(step[j] * 2.0, 4.0 / kd);
          break;
        }
        step[j] *= 0.5;
      }
    }
    const double e_prev = out.energy_history.back();
    const double e_now = energy();
    out.energy_history.push_back(e_now);
    out.sweeps = sweep + 1;
    if (!moved || e_prev - e_now <= stall_tol * e_prev) break;
  }
  out.path = PLPath(std::move(x), tol);
  return out;
}

double dist_to_singular(const Matrix& a) {
  return 2.0 / std::sqrt(static_cast<double>(a.cols())) * volume_quarter(a);
}

namespace {

// Relative per-sweep energy decrease below which a PL level is considered
// converged inside distance().
constexpr double kPlStall = 1e-6;

struct PLOutcome {
  std::optional<PLPath> path;
  double length = kInfinity;
  int sweeps = 0;
};

// Coarsest level of the midpoint-doubling hierarchy ending at `segments`.
int coarse_segments(int segments) {
  int k = std::max(1, segments);
  while (k > 4 && k % 2 == 0) k /= 2;
  return k;
}

std::optional<PLPath> initial_path(const Matrix& a, const Matrix& b, int segments, int restart,
                                   const SolverOptions& opts) {
  if (restart == 0) {
    try {
      PLPath p = PLPath::straight(a, b, segments, opts.rank_tol);
      discrete_energy(p);
      return p;
    } catch (const Error&) {
    }
  }
  // Smooth random detour: a bump sin(pi u) along a random direction plus a
  // small independent jitter per control.
  Rng rng(mix_seed(opts.seed, static_cast<std::uint64_t>(restart)));
  const double scale = 0.3 * std::max((b - a).norm(), 1e-3);
  for (int attempt = 0; attempt < 20; ++attempt) {
    Matrix dir(a.rows(), a.cols());
    for (Eigen::Index i = 0; i < dir.size(); ++i) dir.data()[i] = rng.normal();
    dir *= scale / dir.norm();
    std::vector<Matrix> c;
    for (int i = 0; i <= segments; ++i) {
      const double u = static_cast<double>(i) / segments;
      Matrix p = (1.0 - u) * a + u * b;
      if (i > 0 && i < segments) {
        p += std::sin(std::numbers::pi * u) * dir;
        for (Eigen::Index e = 0; e < p.size(); ++e) p.data()[e] += 0.05 * scale * rng.normal();
      }
      c.push_back(std::move(p));
    }
    c.front() = a;
    c.back() = b;
    try {
      PLPath p(std::move(c), opts.rank_tol);
      discrete_energy(p);
      return p;
    } catch (const Error&) {
    }
  }
  return std::nullopt;
}

PLOutcome pl_route(const Matrix& a, const Matrix& b, const SolverOptions& opts) {
  PLOutcome best;
  const int coarse = coarse_segments(opts.pl_segments);
  for (int r = 0; r < std::max(1, opts.restarts); ++r) {
    std::optional<PLPath> start = initial_path(a, b, coarse, r, opts);
    if (!start) continue;
    PLResult res = pl_shorten(*start, opts.pl_iters, kPlStall);
    int sweeps = res.sweeps;
    while (res.path.segments() < opts.pl_segments) {
      res = pl_shorten(res.path.refined(), opts.pl_iters, kPlStall);
      sweeps += res.sweeps;
    }
    const double l = path_length(res.path);
    if (l < best.length) {
      best.length = l;
      best.path = res.path;
      best.sweeps = sweeps;
    }
  }
  return best;
}

}  // namespace

namespace {

DistanceResult distance_ordered(const FullRankMatrix& a, const FullRankMatrix& b,
                                const SolverOptions& opts) {
  DistanceResult res;
  res.lower = lower_bound(a.matrix(), b.matrix());
  if (a.matrix() == b.matrix()) {
    res.value = 0.0;
    res.certificate = Matrix(Matrix::Zero(a.n(), a.m()));
    res.shooting_value = 0.0;
    return res;
  }

  res.value = kInfinity;
  if (opts.use_shooting) {
    try {
      LogMapResult lm = log_map(a, b, opts);
      const double v = norm(a, lm.zeta);
      res.shooting_value = v;
      res.value = v;
      res.method = DistanceMethod::shooting;
      res.iterations = lm.iterations;
      res.certificate = std::move(lm.zeta);
    } catch (const ConvergenceError&) {
    }
  }
  if (opts.use_pl) {
    PLOutcome pl = pl_route(a.matrix(), b.matrix(), opts);
    if (pl.path && opts.use_shooting && (!res.shooting_value || pl.length < *res.shooting_value)) {
      // B - A can lead shooting to a longer geodesic or nowhere; retry from
      // the initial velocity of the shortened path.
      const auto& c = pl.path->controls();
      Matrix guess = c[1] - c[0];
      const double speed = norm(a, guess);
      if (speed > 0.0) {
        guess *= pl.length / speed;
        try {
          LogMapResult lm = log_map(a, b, opts, &guess);
          const double v = norm(a, lm.zeta);
          if (!res.shooting_value || v < *res.shooting_value) {
            res.shooting_value = v;
            res.value = v;
            res.method = DistanceMethod::shooting;
            res.iterations = lm.iterations;
            res.certificate = std::move(lm.zeta);
          }
        } catch (const ConvergenceError&) {
        }
      }
    }
    if (pl.path) {
      res.pl_value = pl.length;
      if (pl.length < res.value) {
        res.value = pl.length;
        res.method = DistanceMethod::pl;
        res.iterations = pl.sweeps;
        res.certificate = *pl.path;
      }
    }
  }
  res.singular_value = dist_to_singular(a.matrix()) + dist_to_singular(b.matrix());
  if (res.singular_value < res.value) {
    res.value = res.singular_value;
    res.method = DistanceMethod::through_singular;
    res.iterations = 0;
    res.certificate = std::monostate{};
  }
  return res;
}

bool entrywise_less(const Matrix& x, const Matrix& y) {
  return std::lexicographical_compare(x.data(), x.data() + x.size(), y.data(), y.data() + y.size());
}

}  // namespace

DistanceResult distance(const FullRankMatrix& a, const FullRankMatrix& b,
                        const SolverOptions& opts) {
  check_same_shape(a.matrix(), b.matrix(), "distance");
  if (!entrywise_less(b.matrix(), a.matrix())) return distance_ordered(a, b, opts);

  // Solved from b so that distance(a, b) and distance(b, a) agree bit for bit.
  DistanceResult res = distance_ordered(b, a, opts);
  if (auto* path = std::get_if<PLPath>(&res.certificate)) {
    std::vector<Matrix> controls(path->controls().rbegin(), path->controls().rend());
    res.certificate = PLPath(std::move(controls), path->rank_tol());
  } else if (auto* zeta_b = std::get_if<Matrix>(&res.certificate)) {
    const GeodesicData g = geodesic_data(b, *zeta_b);
    const double h = 1e-6;
    const Matrix guess = (exp_map(g, 1.0 - h, opts.rank_tol) - exp_map(g, 1.0, opts.rank_tol)) / h;
    try {
      res.certificate = log_map(a, b, opts, &guess).zeta;
    } catch (const ConvergenceError&) {
      res.certificate = std::monostate{};
    }
  }
  return res;
}

CompletionPoint::CompletionPoint(const Matrix& entries, double rank_tol) {
  if (entries.cols() < 1 || entries.rows() <= entries.cols()) {
    throw ShapeError("completion point must be n x m with n > m >= 1");
  }
  if (!entries.allFinite()) throw ShapeError("completion point has non-finite entries");
  if (is_full_rank(entries, rank_tol)) {
    matrix_ = entries;
  } else {
    matrix_ = Matrix::Zero(entries.rows(), entries.cols());
    singular_ = true;
  }
}

double completion_distance(const CompletionPoint& p, const CompletionPoint& q,
                           const SolverOptions& opts) {
  check_same_shape(p.matrix(), q.matrix(), "completion_distance");
  if (p.is_singular() && q.is_singular()) return 0.0;
  if (p.is_singular()) return dist_to_singular(q.matrix());
  if (q.is_singular()) return dist_to_singular(p.matrix());
  return distance(FullRankMatrix(p.matrix(), opts.rank_tol),
                  FullRankMatrix(q.matrix(), opts.rank_tol), opts)
      .value;
}

}  // namespace formspace
