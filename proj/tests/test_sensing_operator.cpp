#include "gapcs/sensing_operator.hpp"

#include <gtest/gtest.h>

#include "gapcs/rip.hpp"
#include "gapcs/rng.hpp"
#include "gapcs/synth.hpp"

namespace {

using gapcs::build_operator;
using gapcs::apply_gram_inverse;

Eigen::MatrixXd scaled_identity2() { return 2.0 * Eigen::MatrixXd::Identity(2, 2); }

TEST(BuildOperator, ScaledIdentityEigenvalues) {
  const auto op = build_operator(scaled_identity2());
  EXPECT_DOUBLE_EQ(op.e_max(), 4.0);
  EXPECT_DOUBLE_EQ(op.e_min(), 4.0);
}

TEST(BuildOperator, DiagonalGramEigenvalues) {
  Eigen::MatrixXd a(2, 3);
  a << 1, 0, 0,
       0, 2, 0;
  const auto op = build_operator(a);
  EXPECT_DOUBLE_EQ(op.e_max(), 4.0);
  EXPECT_DOUBLE_EQ(op.e_min(), 1.0);
}

TEST(BuildOperator, RankDeficientGramThrows) {
  Eigen::MatrixXd a(2, 2);
  a << 1, 1,
       1, 1;
  EXPECT_THROW(build_operator(a), gapcs::SingularGram);
}

TEST(BuildOperator, TallMatrixThrows) {
  Eigen::MatrixXd a(3, 2);
  a.setOnes();
  EXPECT_THROW(build_operator(a), gapcs::DimensionError);
  EXPECT_THROW(build_operator(a, 1e-12), gapcs::DimensionError);
}

TEST(BuildOperator, ExplicitToleranceIsAbsolute) {
  Eigen::MatrixXd a(2, 3);
  a << 1, 0, 0,
       0, 2, 0;
  EXPECT_NO_THROW(build_operator(a, 0.5));
  EXPECT_THROW(build_operator(a, 1.5), gapcs::SingularGram);
  EXPECT_THROW(build_operator(a, 0.0), gapcs::DomainError);
}

TEST(ApplyGramInverse, ScaledIdentity) {
  const auto op = build_operator(scaled_identity2());
  Eigen::VectorXd v(2);
  v << 4, 8;
  const Eigen::VectorXd u = apply_gram_inverse(op, v);
  EXPECT_NEAR(u[0], 1.0, 1e-14);
  EXPECT_NEAR(u[1], 2.0, 1e-14);
}

TEST(ApplyGramInverse, ZeroMapsToZero) {
  const auto op = build_operator(scaled_identity2());
  const Eigen::VectorXd u = apply_gram_inverse(op, Eigen::VectorXd::Zero(2));
  EXPECT_EQ(u.norm(), 0.0);
}

TEST(ApplyGramInverse, InverseOfForward) {
  const Eigen::MatrixXd a = gapcs::gen_sensing_matrix(6, 10, gapcs::MatrixKind::Gaussian, 42);
  const auto op = build_operator(a);
  const Eigen::MatrixXd gram = a * a.transpose();
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(6);
  const Eigen::VectorXd u = apply_gram_inverse(op, gram * ones);
  EXPECT_LT((u - ones).norm() / ones.norm(), 1e-10);
}

TEST(ApplyGramInverse, LengthMismatchThrows) {
  const auto op = build_operator(scaled_identity2());
  EXPECT_THROW(apply_gram_inverse(op, Eigen::VectorXd::Zero(3)),
               gapcs::DimensionError);
}

TEST(SensingOperator, GramSolveRoundTripManyVectors) {
  const Eigen::MatrixXd a = gapcs::gen_sensing_matrix(12, 30, gapcs::MatrixKind::Gaussian, 3);
  const auto op = build_operator(a);
  const Eigen::MatrixXd gram = a * a.transpose();
  gapcs::SplitRng rng(99, 0);
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::VectorXd v(12);
    for (int i = 0; i < 12; ++i) v[i] = rng.normal();
    const Eigen::VectorXd back = gram * apply_gram_inverse(op, v);
    EXPECT_LT((back - v).norm() / v.norm(), 1e-10);
  }
}

TEST(SensingOperator, EMaxDominatesOneMinusDelta) {
  for (std::uint64_t seed : {1, 2, 3}) {
    const Eigen::MatrixXd a =
        gapcs::gen_sensing_matrix(5, 9, gapcs::MatrixKind::Gaussian, seed);
    const auto op = build_operator(a);
    for (int s = 1; s <= 3; ++s) {
      const double delta = gapcs::rip_constant_exact(op, s);
      EXPECT_GE(op.e_max(), 1.0 - delta - 1e-12);
    }
  }
}

// For any x, y: ||x + y||^2 <= 2 (||x||^2 + ||y||^2).
TEST(NormInequality, HoldsOnRandomPairs) {
  gapcs::SplitRng rng(5, 0);
  for (int trial = 0; trial < 1000; ++trial) {
    Eigen::VectorXd x(16), y(16);
    for (int i = 0; i < 16; ++i) {
      x[i] = rng.normal();
      y[i] = rng.normal();
    }
    EXPECT_LE((x + y).squaredNorm(),
              2.0 * (x.squaredNorm() + y.squaredNorm()) + 1e-12);
  }
}

}  // namespace
