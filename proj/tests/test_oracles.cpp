#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "formspace/oracles.hpp"

using namespace formspace;

TEST(Rng, DeterministicAndRestorable) {
  Rng a(42);
  Rng b(42);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
  const std::string state = a.save_state();
  const double x = a.normal();
  const double y = a.uniform();
  b.restore_state(state);
  EXPECT_EQ(b.normal(), x);
  EXPECT_EQ(b.uniform(), y);
  EXPECT_NE(mix_seed(1, 0), mix_seed(1, 1));
}

TEST(Rng, UniformRangeAndNormalMoments) {
  Rng r(7);
  double sum = 0;
  double sq = 0;
  const int count = 20000;
  for (int i = 0; i < count; ++i) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    const double z = r.normal();
    sum += z;
    sq += z * z;
  }
  EXPECT_NEAR(sum / count, 0.0, 0.03);
  EXPECT_NEAR(sq / count, 1.0, 0.05);
}

TEST(InstanceGenerator, SameSeedSameMatrix) {
  oracles::InstanceGenerator g1(5, 4, 3);
  oracles::InstanceGenerator g2(5, 4, 3);
  EXPECT_EQ(oracles::random_full_rank(g1).matrix(), oracles::random_full_rank(g2).matrix());
}

TEST(InstanceGenerator, SpectrumInRange) {
  oracles::InstanceGenerator gen(6, 5, 3, 0.5, 2.0);
  for (int i = 0; i < 200; ++i) {
    const Vector s = singular_values(gen.full_rank());
    EXPECT_GE(s.minCoeff(), 0.5 - 1e-12);
    EXPECT_LE(s.maxCoeff(), 2.0 + 1e-12);
  }
  const Matrix o = gen.rotation(5);
  EXPECT_LT((o.transpose() * o - Matrix::Identity(5, 5)).norm(), 1e-12);
  EXPECT_NEAR(o.determinant(), 1.0, 1e-12);
}

TEST(InstanceGenerator, DistinctSeedsNoCollisions) {
  std::set<std::vector<double>> seen;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    oracles::InstanceGenerator gen(seed, 3, 2);
    const Matrix a = gen.full_rank();
    seen.insert(std::vector<double>(a.data(), a.data() + a.size()));
  }
  EXPECT_EQ(seen.size(), 1000u);
}

TEST(RadialOracle, Examples) {
  EXPECT_NEAR(oracles::radial_integral_oracle(1, 2, 1), 2 * (std::sqrt(2.0) - 1), 1e-12);
  EXPECT_NEAR(oracles::radial_integral_oracle(0, 1, 1), 2.0, 1e-10);
  EXPECT_EQ(oracles::radial_integral_oracle(1.5, 1.5, 3), 0.0);
}

TEST(RadialOracle, TightLowerBoundOnRays) {
  oracles::InstanceGenerator gen(8, 4, 3);
  for (int i = 0; i < 20; ++i) {
    Matrix a0 = gen.full_rank();
    a0 /= std::pow((a0.transpose() * a0).determinant(), 1.0 / (2 * 3));
    const double r0 = gen.rng().uniform(0.3, 1.0);
    const double r1 = gen.rng().uniform(1.0, 3.0);
    EXPECT_NEAR(oracles::radial_integral_oracle(r0, r1, 3), lower_bound(r0 * a0, r1 * a0), 1e-10);
  }
}

TEST(SpeedProfile, Examples) {
  Matrix a(2, 1);
  a << 1, 0;
  Matrix zeta(2, 1);
  zeta << 0, 1;
  const FullRankMatrix fa(a);
  for (double v : oracles::fd_speed_profile(fa, zeta, 1.5, 16)) EXPECT_NEAR(v, 1.0, 1e-4);
  for (double v : oracles::fd_speed_profile(fa, Matrix::Zero(2, 1), 1.0, 5)) EXPECT_EQ(v, 0.0);
  const auto scaled = oracles::fd_speed_profile(fa, 0.5 * zeta, 1.5, 16);
  for (double v : scaled) EXPECT_NEAR(v, 0.5, 1e-4);
  EXPECT_THROW(oracles::fd_speed_profile(fa, -a, 2.5, 16), BlowupError);
}

TEST(ConeOracle, Examples) {
  Vector a(2);
  a << 1, 0;
  Vector b(2);
  b << 0.75, 1;
  EXPECT_NEAR(oracles::cone_distance_rank_one(a, b), 1.0, 1e-12);
  EXPECT_NEAR(oracles::cone_distance_rank_one(a, 2 * a), 2 * (std::sqrt(2.0) - 1), 1e-12);
  // Antipodal directions are a right angle apart on the developed cone.
  EXPECT_NEAR(oracles::cone_distance_rank_one(a, -a), 2 * std::sqrt(2.0), 1e-12);
}

TEST(SampledCurve, GeodesicLength) {
  Matrix a(2, 1);
  a << 1, 0;
  Matrix zeta(2, 1);
  zeta << 0, 1;
  std::vector<Matrix> samples;
  for (int i = 0; i <= 64; ++i) samples.push_back(exp_map(FullRankMatrix(a), zeta, i / 64.0));
  EXPECT_NEAR(oracles::sampled_curve_length(samples), 1.0, 1e-3);
}
