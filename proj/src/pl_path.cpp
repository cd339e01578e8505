#include <array>
#include <cmath>

#include <boost/math/quadrature/gauss.hpp>

#include "formspace/detail/segment.hpp"
#include "formspace/fiber_core.hpp"

namespace formspace {

namespace {

constexpr int kNodes = 16;

struct Rule {
  std::array<double, kNodes> x;  // nodes on [0, 1]
  std::array<double, kNodes> w;
};

const Rule& gauss_rule() {
  static const Rule rule = [] {
    using Gauss = boost::math::quadrature::gauss<double, kNodes>;
    const auto& abscissa = Gauss::abscissa();
    const auto& weights = Gauss::weights();
    Rule r{};
    int k = 0;
    // Boost stores the non-negative half of the symmetric rule on [-1, 1].
    for (std::size_t i = 0; i < abscissa.size(); ++i) {
      r.x[k] = 0.5 * (1.0 + abscissa[i]);
      r.w[k++] = 0.5 * weights[i];
      r.x[k] = 0.5 * (1.0 - abscissa[i]);
      r.w[k++] = 0.5 * weights[i];
    }
    return r;
  }();
  return rule;
}

// Inverse Gram matrix and sqrt(det G) at a quadrature node X, G = X^T X.
struct NodeEval {
  Matrix gram_inv;
  double vol = 0.0;
};

NodeEval eval_node(const Matrix& x, double rank_tol) {
  const Matrix gram = x.transpose() * x;
  Eigen::LLT<Matrix> llt(gram);
  if (llt.info() == Eigen::Success) {
    NodeEval e{llt.solve(Matrix::Identity(gram.rows(), gram.cols())), 1.0};
    const Matrix& l = llt.matrixLLT();
    for (Eigen::Index i = 0; i < l.rows(); ++i) e.vol *= l(i, i);
    // sigma_min^2 >= 1 / tr(G^{-1}) and sigma_max^2 <= tr(G). Nodes passing
    // this with a wide margin skip the SVD rank test.
    const double sigma_min_lb = 1.0 / std::sqrt(e.gram_inv.trace());
    const double sigma_max_ub = std::sqrt(gram.trace());
    if (std::isfinite(sigma_min_lb) && sigma_min_lb > 1e3 * rank_tol * std::max(sigma_max_ub, 1.0)) {
      return e;
    }
  }
  if (!is_full_rank(x, rank_tol)) throw RankError("path segment leaves M+(n,m)");
  Eigen::JacobiSVD<Matrix> svd(x, Eigen::ComputeThinV);
  const Vector inv_s2 = svd.singularValues().array().square().inverse();
  return {svd.matrixV() * inv_s2.asDiagonal() * svd.matrixV().transpose(),
          svd.singularValues().prod()};
}

}  // namespace

PLPath::PLPath(std::vector<Matrix> controls, double rank_tol)
    : controls_(std::move(controls)), rank_tol_(rank_tol) {
  if (controls_.size() < 2) throw ShapeError("PL path needs at least two control matrices");
  for (const Matrix& c : controls_) {
    check_same_shape(controls_.front(), c, "PLPath");
    if (!is_full_rank(c, rank_tol_)) throw RankError("PL path control is not full rank");
  }
}

PLPath PLPath::straight(const Matrix& a, const Matrix& b, int segments, double rank_tol) {
  if (segments < 1) throw ShapeError("PL path needs at least one segment");
  check_same_shape(a, b, "PLPath::straight");
  std::vector<Matrix> controls;
  controls.reserve(segments + 1);
  for (int i = 0; i <= segments; ++i) {
    const double u = static_cast<double>(i) / segments;
    controls.push_back((1.0 - u) * a + u * b);
  }
  controls.back() = b;
  return PLPath(std::move(controls), rank_tol);
}

PLPath PLPath::refined() const {
  std::vector<Matrix> out;
  out.reserve(2 * controls_.size() - 1);
  for (std::size_t i = 0; i + 1 < controls_.size(); ++i) {
    out.push_back(controls_[i]);
    out.push_back(0.5 * (controls_[i] + controls_[i + 1]));
  }
  out.push_back(controls_.back());
  return PLPath(std::move(out), rank_tol_);
}

double segment_length(const Matrix& a, const Matrix& b, double rank_tol) {
  check_same_shape(a, b, "segment_length");
  eval_node(a, rank_tol);
  eval_node(b, rank_tol);
  return detail::interior_length(a, b, rank_tol);
}

double detail::interior_length(const Matrix& a, const Matrix& b, double rank_tol) {
  const Rule& rule = gauss_rule();
  const Matrix d = b - a;
  double length = 0.0;
  for (int k = 0; k < kNodes; ++k) {
    const NodeEval node = eval_node((1.0 - rule.x[k]) * a + rule.x[k] * b, rank_tol);
    const double c = (d * node.gram_inv).cwiseProduct(d).sum();
    length += rule.w[k] * std::sqrt(std::max(0.0, c) * node.vol);
  }
  return length;
}

double path_length(const PLPath& path) {
  double total = 0.0;
  const auto& c = path.controls();
  for (std::size_t i = 0; i + 1 < c.size(); ++i) total += detail::interior_length(c[i], c[i + 1], path.rank_tol());
  return total;
}

double path_energy(const PLPath& path) {
  const double l = path_length(path);
  return l * l;
}

namespace detail {

// With X(u) = (1-u) A + u B, D = B - A, H = (X^T X)^{-1}, v = sqrt(det X^T X)
// and c = tr(D H D^T), the squared speed is phi = c v and
//   d phi / dX = v (c X H - 2 X H D^T D H),   d phi / dD = 2 v D H.
SegmentEval segment_length_and_gradient(const Matrix& a, const Matrix& b, double rank_tol) {
  check_same_shape(a, b, "segment_length_and_gradient");
  const Rule& rule = gauss_rule();
  const Matrix d = b - a;
  SegmentEval out;
  out.grad_a = Matrix::Zero(a.rows(), a.cols());
  out.grad_b = Matrix::Zero(a.rows(), a.cols());
  for (int k = 0; k < kNodes; ++k) {
    const double u = rule.x[k];
    const Matrix x = (1.0 - u) * a + u * b;
    const NodeEval node = eval_node(x, rank_tol);
    const Matrix& h = node.gram_inv;
    const double vol = node.vol;
    const Matrix dh = d * h;
    const double c = dh.cwiseProduct(d).sum();
    const double phi = std::max(0.0, c) * vol;
    const double speed = std::sqrt(phi);
    out.length += rule.w[k] * speed;
    if (speed <= 0.0) continue;
    const Matrix xh = x * h;
    const Matrix dphi_dx = vol * (c * xh - 2.0 * x * (dh.transpose() * dh));
    const Matrix dphi_dd = 2.0 * vol * dh;
    const double scale = rule.w[k] / (2.0 * speed);
    out.grad_b += scale * (u * dphi_dx + dphi_dd);
    out.grad_a += scale * ((1.0 - u) * dphi_dx - dphi_dd);
  }
  return out;
}

}  // namespace detail

}  // namespace formspace
