// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Every random instance is drawn from the seeds below.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "formspace/field_space.hpp"
#include "formspace/oracles.hpp"

using namespace formspace;

namespace {

constexpr std::uint64_t kSeedGeodesics = 1001;
constexpr std::uint64_t kSeedLowerBound = 1004;
constexpr std::uint64_t kSeedSingular = 1005;
constexpr std::uint64_t kSeedOracle = 1006;
constexpr std::uint64_t kSeedFields = 1007;
constexpr std::uint64_t kSeedQuotient = 1008;
constexpr std::uint64_t kSeedAlign = 1009;
constexpr std::uint64_t kSeedAxioms = 1011;

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

Eigen::Index pick(Rng& rng, Eigen::Index lo, Eigen::Index hi) {
  return lo + static_cast<Eigen::Index>(rng.next_u64() % static_cast<std::uint64_t>(hi - lo + 1));
}

// Shared instance set for criteria 2 and 3: 1000 (A, zeta), n <= 6, m <= 4.
struct GeodesicInstance {
  FullRankMatrix a;
  Matrix zeta;
};

std::vector<GeodesicInstance> geodesic_instances() {
  Rng shapes(kSeedGeodesics);
  std::vector<GeodesicInstance> out;
  for (int i = 0; i < 1000; ++i) {
    const Eigen::Index m = pick(shapes, 1, 4);
    const Eigen::Index n = pick(shapes, m + 1, 6);
    oracles::InstanceGenerator gen(mix_seed(kSeedGeodesics, i), n, m);
    const Matrix a = gen.full_rank();
    const double scale = gen.rng().uniform(0.1, 2.0);
    out.push_back({FullRankMatrix(a), gen.gaussian(scale)});
  }
  return out;
}

double sample_horizon(const GeodesicData& g) { return std::min(g.blowup, 2.0); }

Outcome worked_geodesic() {
  const Matrix a = Matrix::Identity(2, 1);
  Matrix zeta(2, 1);
  zeta << 0, 1;
  const GeodesicData g = geodesic_data(FullRankMatrix(a), zeta);
  double worst = 0.0;
  for (int i = 0; i <= 100; ++i) {
    const double t = 2.0 * i / 101.0;
    Matrix expected(2, 1);
    expected << 1 - t * t / 4, t;
    worst = std::max(worst, (exp_map(g, t) - expected).cwiseAbs().maxCoeff());
  }
  return {worst <= 1e-9, fmt("101 t-values in [0,2), max abs error %.3g (tol 1e-9)", worst)};
}

Outcome volume_identity(const std::vector<GeodesicInstance>& set) {
  double worst = 0.0;
  for (const auto& inst : set) {
    const GeodesicData g = geodesic_data(inst.a, inst.zeta);
    const double horizon = sample_horizon(g);
    for (int i = 0; i < 10; ++i) {
      const double t = 0.1 * i * horizon;
      const Matrix x = exp_map(g, t);
      const double lhs = std::sqrt((x.transpose() * x).determinant());
      const double rhs = fs_coefficients(g, t).f * inst.a.sqrt_det_gram();
      worst = std::max(worst, std::abs(lhs - rhs) / rhs);
    }
  }
  return {worst <= 1e-9, fmt("1000 instances x 10 t, max relative error %.3g (tol 1e-9)", worst)};
}

Outcome constant_speed(const std::vector<GeodesicInstance>& set) {
  double worst = 0.0;
  for (const auto& inst : set) {
    const GeodesicData g = geodesic_data(inst.a, inst.zeta);
    const double speed = norm(inst.a, inst.zeta);
    const auto profile = oracles::fd_speed_profile(inst.a, inst.zeta, 0.9 * sample_horizon(g), 10);
    const auto [lo, hi] = std::minmax_element(profile.begin(), profile.end());
    worst = std::max(worst, (*hi - *lo) / speed);
    for (double v : profile) worst = std::max(worst, std::abs(v - speed) / speed);
  }
  return {worst <= 1e-4, fmt("1000 instances, max relative speed spread %.3g (tol 1e-4)", worst)};
}

Outcome lower_bound_criterion() {
  Rng shapes(kSeedLowerBound);
  double worst_gap = kInfinity;
  for (int i = 0; i < 200; ++i) {
    const Eigen::Index m = pick(shapes, 1, 3);
    const Eigen::Index n = pick(shapes, m + 1, 5);
    oracles::InstanceGenerator gen(mix_seed(kSeedLowerBound, i), n, m);
    const FullRankMatrix a(gen.full_rank());
    const FullRankMatrix b(gen.full_rank());
    const DistanceResult d = distance(a, b);
    worst_gap = std::min(worst_gap, d.value - d.lower);
  }
  double worst_radial = 0.0;
  for (int i = 0; i < 50; ++i) {
    const Eigen::Index m = pick(shapes, 1, 3);
    const Eigen::Index n = pick(shapes, m + 1, 5);
    oracles::InstanceGenerator gen(mix_seed(kSeedLowerBound, 1000 + i), n, m);
    const Matrix a = gen.full_rank();
    const double c = gen.rng().uniform(0.25, 4.0);
    const DistanceResult d = distance(FullRankMatrix(a), FullRankMatrix(c * a));
    worst_radial = std::max(worst_radial, std::abs(d.value - d.lower));
  }
  const bool pass = worst_gap >= -1e-8 && worst_radial <= 1e-6;
  return {pass, fmt("200 pairs, min(value - bound) %.3g (tol -1e-8); 50 radial pairs, max |value - bound| %.3g "
                    "(tol 1e-6)",
                    worst_gap, worst_radial)};
}

Outcome dist_to_singular_criterion() {
  oracles::InstanceGenerator gen(kSeedSingular, 3, 2);
  double worst_excess = 0.0;
  double worst_bound = 0.0;
  for (int i = 0; i < 50; ++i) {
    const Matrix a = gen.full_rank();
    const double closed = dist_to_singular(a);
    // Start from a detour towards the near-singular end point eps * A, then
    // let coordinate descent straighten it.
    const double eps = 1e-4;
    std::vector<Matrix> controls;
    const Matrix bump = gen.gaussian(0.3);
    for (int k = 0; k <= 16; ++k) {
      const double u = k / 16.0;
      controls.push_back((1 - u) * a + u * eps * a + std::sin(M_PI * u) * bump);
    }
    const PLResult shortened = pl_shorten(PLPath(controls), 500);
    const Matrix& end = shortened.path.back();
    // Remaining distance from eps * A to the stratum is that of pure scaling.
    const double reach = path_length(shortened.path) + dist_to_singular(end);
    worst_excess = std::max(worst_excess, reach / closed - 1.0);
    worst_bound = std::max(worst_bound, std::abs(closed - lower_bound(a, Matrix::Zero(3, 2))));
  }
  const bool pass = worst_excess <= 0.01 && worst_bound <= 1e-10;
  return {pass, fmt("50 matrices, PL reach exceeds closed form by at most %.3g (tol 1%%); |closed - bound| <= %.3g "
                    "(tol 1e-10)",
                    worst_excess, worst_bound)};
}

Outcome oracle_agreement() {
  Rng shapes(kSeedOracle);
  const auto start = std::chrono::steady_clock::now();
  double worst = 0.0;
  int failures = 0;
  // For pairs without a shooting solution: how far PL sits above the route
  // through the cone point.
  double cone_excess = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Eigen::Index m = pick(shapes, 1, 3);
    const Eigen::Index n = pick(shapes, m + 1, 5);
    oracles::InstanceGenerator gen(mix_seed(kSeedOracle, i), n, m);
    const FullRankMatrix a(gen.full_rank());
    const FullRankMatrix b(gen.full_rank());
    const DistanceResult d = distance(a, b);
    if (!d.shooting_value || !d.pl_value) {
      ++failures;
      if (d.pl_value) cone_excess = std::max(cone_excess, *d.pl_value / d.singular_value - 1.0);
      continue;
    }
    worst = std::max(worst, std::abs(*d.shooting_value - *d.pl_value) / *d.shooting_value);
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool pass = failures == 0 && worst <= 0.01 && seconds <= 60.0;
  std::string detail = fmt("100 pairs, max relative gap %.3g (tol 1%%), %.1f s (limit 60 s)", worst, seconds);
  if (failures > 0) {
    detail += fmt("; no geodesic found for %g pairs, their PL value is within %.2g of the cone-point route",
                  failures, cone_excess);
  }
  return {pass, detail};
}

Outcome field_geodesic_length() {
  const Eigen::Index n = 3;
  const Eigen::Index m = 2;
  const auto manifold = SampledManifold::torus_grid(10, 5, n, m);
  oracles::InstanceGenerator gen(kSeedFields, n, m);
  std::vector<Matrix> av;
  std::vector<Matrix> bv;
  for (std::size_t k = 0; k < manifold->size(); ++k) {
    av.push_back(gen.full_rank());
    bv.push_back(gen.full_rank());
  }
  const OneFormField alpha = make_one_form_field(manifold, av);
  const OneFormField beta = make_one_form_field(manifold, bv);
  const FieldGeodesic path(alpha, beta);
  const int samples = 32;
  std::vector<std::vector<Matrix>> per_point(manifold->size());
  for (int i = 0; i < samples; ++i) {
    const OneFormField f = path.at(static_cast<double>(i) / (samples - 1));
    for (std::size_t k = 0; k < f.size(); ++k) per_point[k].push_back(f.values[k].matrix());
  }
  std::vector<double> field_speed(samples, 0.0);
  for (std::size_t k = 0; k < manifold->size(); ++k) {
    const auto speeds = oracles::sampled_speeds(per_point[k]);
    for (int i = 0; i < samples; ++i) field_speed[i] += manifold->weights()[k] * speeds[i] * speeds[i];
  }
  for (double& v : field_speed) v = std::sqrt(v);
  const double length = oracles::trapezoid(field_speed);
  const double dist = field_distance(alpha, beta);
  const double rel = std::abs(length - dist) / dist;
  return {rel <= 0.02, fmt("N=50, path length %.6f vs field distance %.6f, relative %.3g (tol 2%%)", length, dist,
                           rel)};
}

Outcome quotient_criterion() {
  const SPDMatrix one(Matrix::Constant(1, 1, 1.0));
  const SPDMatrix four(Matrix::Constant(1, 1, 4.0));
  const double exact = 2 * (std::sqrt(2.0) - 1);
  const double v = sym_distance(one, four, 2).value;
  const double rel = std::abs(v - exact) / exact;
  Rng shapes(kSeedQuotient);
  double worst = -kInfinity;
  int violations = 0;
  for (int i = 0; i < 100; ++i) {
    const Eigen::Index m = pick(shapes, 1, 2);
    const Eigen::Index n = pick(shapes, m + 1, 3);
    oracles::InstanceGenerator gen(mix_seed(kSeedQuotient, i), n, m);
    const Matrix a = gen.full_rank();
    const Matrix b = gen.full_rank();
    const double lhs = sym_distance(SPDMatrix(project(a)), SPDMatrix(project(b)), n).value;
    const double rhs = distance(FullRankMatrix(a), FullRankMatrix(b)).value;
    worst = std::max(worst, lhs - rhs);
    if (lhs > rhs + 1e-3) ++violations;
  }
  const bool pass = rel <= 0.01 && violations == 0;
  return {pass, fmt("sym_distance([1],[4],2) relative error %.3g (tol 1%%); 100 pairs, max excess %.3g, "
                    "violations %g (tol 1e-3)",
                    rel, worst, violations)};
}

Outcome alignment_criterion() {
  Rng shapes(kSeedAlign);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Eigen::Index m = pick(shapes, 1, 3);
    const Eigen::Index n = pick(shapes, m + 1, 5);
    oracles::InstanceGenerator gen(mix_seed(kSeedAlign, i), n, m);
    const Matrix b = gen.full_rank();
    const Matrix a = gen.rotation(n) * b;
    const Rotation o = align(FullRankMatrix(a), FullRankMatrix(b));
    worst = std::max(worst, (a - o.matrix() * b).norm());
  }
  oracles::InstanceGenerator gen(mix_seed(kSeedAlign, 999), 4, 2);
  const auto manifold = SampledManifold::torus_grid(5, 4, 4, 2);
  std::vector<Matrix> bv;
  std::vector<Rotation> truth;
  for (std::size_t k = 0; k < manifold->size(); ++k) {
    bv.push_back(gen.full_rank());
    truth.emplace_back(gen.rotation(4));
  }
  const OneFormField beta = make_one_form_field(manifold, bv);
  const OneFormField alpha = rotate(RotationField{manifold, truth}, beta);
  const RotationField o = field_align(alpha, beta);
  double worst_field = 0.0;
  for (std::size_t k = 0; k < manifold->size(); ++k) {
    worst_field =
        std::max(worst_field, (alpha.values[k].matrix() - o.values[k].matrix() * beta.values[k].matrix()).norm());
  }
  const bool pass = worst <= 1e-8 && worst_field <= 1e-8;
  return {pass, fmt("100 pairs, max residual %.3g; 20-point field, max residual %.3g (tol 1e-8)", worst,
                    worst_field)};
}

Outcome completion_criterion() {
  Matrix s1(3, 2);
  s1 << 1, 2, 2, 4, 0, 0;
  Matrix s2(3, 2);
  s2 << 0, 0, 0, 3, 0, 1;
  Matrix f1(3, 2);
  f1 << 1, 0, 0, 1, 0, 0;
  Matrix f2(3, 2);
  f2 << 1, 0, 0.5, 1, 0, 2;
  const std::vector<CompletionPoint> points = {CompletionPoint(s1), CompletionPoint(s2),
                                               CompletionPoint(Matrix::Zero(3, 2)), CompletionPoint(f1),
                                               CompletionPoint(f2), CompletionPoint(Matrix(f1))};
  int wrong = 0;
  std::string notes;
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = 0; j < points.size(); ++j) {
      const double d = completion_distance(points[i], points[j]);
      const bool equal = points[i] == points[j];
      if ((d == 0.0) != equal) ++wrong;
      if (points[i].is_singular() != points[j].is_singular()) {
        const Matrix& full = points[i].is_singular() ? points[j].matrix() : points[i].matrix();
        if (d != dist_to_singular(full)) ++wrong;
      }
    }
  }
  const bool singular_pair = completion_distance(points[0], points[1]) == 0.0;
  return {wrong == 0 && singular_pair,
          fmt("6x6 test matrix, %g misclassified pairs; two distinct singular matrices at distance %g", wrong,
              completion_distance(points[0], points[1]))};
}

Outcome metric_axioms() {
  Rng shapes(kSeedAxioms);
  int asymmetric = 0;
  double worst = -kInfinity;
  for (int i = 0; i < 100; ++i) {
    const Eigen::Index m = pick(shapes, 1, 3);
    const Eigen::Index n = pick(shapes, m + 1, 5);
    oracles::InstanceGenerator gen(mix_seed(kSeedAxioms, i), n, m);
    const FullRankMatrix a(gen.full_rank());
    const FullRankMatrix b(gen.full_rank());
    const FullRankMatrix c(gen.full_rank());
    const double ab = distance(a, b).value;
    const double bc = distance(b, c).value;
    const double ac = distance(a, c).value;
    if (ab != distance(b, a).value) ++asymmetric;
    worst = std::max({worst, ac - ab - bc, ab - ac - bc, bc - ab - ac});
  }
  double worst_field = -kInfinity;
  for (int i = 0; i < 20; ++i) {
    const auto manifold = SampledManifold::torus_grid(2, 2, 3, 2);
    oracles::InstanceGenerator gen(mix_seed(kSeedAxioms, 1000 + i), 3, 2);
    auto field = [&] {
      std::vector<Matrix> v;
      for (std::size_t k = 0; k < manifold->size(); ++k) v.push_back(gen.full_rank());
      return make_one_form_field(manifold, v);
    };
    const OneFormField x = field();
    const OneFormField y = field();
    const OneFormField z = field();
    const double xy = field_distance(x, y);
    const double yz = field_distance(y, z);
    const double xz = field_distance(x, z);
    if (xy != field_distance(y, x)) ++asymmetric;
    worst_field = std::max({worst_field, xz - xy - yz, xy - xz - yz, yz - xy - xz});
  }
  const bool pass = asymmetric == 0 && worst <= 1e-3 && worst_field <= 1e-3;
  return {pass, fmt("asymmetric pairs %g; max triangle excess %.3g over 100 fiber triples, %.3g over 20 field "
                    "triples (tol 1e-3)",
                    asymmetric, worst, worst_field)};
}

}  // namespace

int main() {
  const auto geodesics = geodesic_instances();
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"worked geodesic", worked_geodesic},
      {"volume identity", [&] { return volume_identity(geodesics); }},
      {"constant speed", [&] { return constant_speed(geodesics); }},
      {"distance lower bound", lower_bound_criterion},
      {"distance to singular stratum", dist_to_singular_criterion},
      {"shooting/PL agreement", oracle_agreement},
      {"field path length equals field distance", field_geodesic_length},
      {"quotient distance", quotient_criterion},
      {"alignment round trip", alignment_criterion},
      {"completion identification", completion_criterion},
      {"metric axioms", metric_axioms},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome out;
    const auto start = std::chrono::steady_clock::now();
    try {
      out = criteria[i].second();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    if (!out.pass) ++failed;
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %2zu %s: %s [%.1f s]\n", out.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                out.detail.c_str(), seconds);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
