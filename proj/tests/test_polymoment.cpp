#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "gdnn/forms.hpp"
#include "gdnn/monomials.hpp"
#include "gdnn/rng.hpp"

using namespace gdnn;

TEST(Monomials, GradedLexEnumeration) {
  MonomialBasis b(2, 2);
  ASSERT_EQ(b.size(), 3);
  EXPECT_EQ(b[0], (MultiIndex{2, 0}));
  EXPECT_EQ(b[1], (MultiIndex{1, 1}));
  EXPECT_EQ(b[2], (MultiIndex{0, 2}));
  for (int i = 0; i < b.size(); ++i) EXPECT_EQ(b.index_of(b[i]), i);
}

TEST(Monomials, Counts) {
  EXPECT_EQ(MonomialBasis(4, 2).size(), 10);
  EXPECT_EQ(MonomialBasis::count(16, 4), 3876);
  EXPECT_EQ(monomial_basis(16, 4)->size(), 3876);
  EXPECT_THROW(check_basis_cap(100, 8), std::length_error);
}

TEST(Moments, MomentMatrixExamples) {
  // n = 1: I(1,4) = {x^4}, I(1,2) = {x^2}
  Eigen::VectorXd y1(1);
  y1 << 7.5;
  Eigen::MatrixXd m1 = moment_matrix(1, 2, y1);
  ASSERT_EQ(m1.rows(), 1);
  EXPECT_EQ(m1(0, 0), 7.5);

  // moments of the Dirac measure at (1,1): all-ones rank-1 matrix
  Eigen::Vector2d pt(1, 1);
  MomentVector mv = MomentVector::of_point(pt);
  Eigen::MatrixXd m = moment_matrix(mv);
  EXPECT_TRUE(m.isApprox(Eigen::MatrixXd::Ones(3, 3)));

  CounterRng rng(1);
  MomentVector r(3);
  r.y = rng.gaussian_vector(r.y.size());
  Eigen::MatrixXd mr = moment_matrix(r);
  EXPECT_TRUE(mr.isApprox(mr.transpose()));
}

TEST(Moments, PointMomentsAreRankOne) {
  CounterRng rng(2);
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::VectorXd x = rng.gaussian_vector(3);
    Eigen::MatrixXd m = moment_matrix(MomentVector::of_point(x));
    Eigen::VectorXd mono = monomial_vector(3, 2, x);
    EXPECT_TRUE(m.isApprox(mono * mono.transpose(), 1e-12));
  }
}

TEST(Forms, MultiplyQuadraticsExamples) {
  Eigen::Matrix2d q1 = Eigen::Matrix2d::Zero(), q2 = Eigen::Matrix2d::Zero();
  q1(0, 0) = 1;
  q2(1, 1) = 1;
  Form f11 = multiply_quadratics(q1, q1);
  EXPECT_EQ(f11.coeffs[f11.basis->index_of({4, 0})], 1.0);
  EXPECT_EQ(f11.coeffs.cwiseAbs().sum(), 1.0);
  Form f12 = multiply_quadratics(q1, q2);
  EXPECT_EQ(f12.coeffs[f12.basis->index_of({2, 2})], 1.0);
  EXPECT_EQ(f12.coeffs.cwiseAbs().sum(), 1.0);
}

TEST(Forms, MultiplyQuadraticsPointwiseOracle) {
  CounterRng rng(3);
  const int n = 4;
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::MatrixXd q = Eigen::MatrixXd::NullaryExpr(
        n, n, [&](int, int) { return rng.gaussian(); });
    q = (0.5 * (q + q.transpose())).eval();
    Eigen::MatrixXd r = Eigen::MatrixXd::NullaryExpr(
        n, n, [&](int, int) { return rng.gaussian(); });
    r = (0.5 * (r + r.transpose())).eval();
    Form f = multiply_quadratics(q, r);
    for (int pt = 0; pt < 20; ++pt) {
      Eigen::VectorXd x = rng.gaussian_vector(n);
      double expect = x.dot(q * x) * x.dot(r * x);
      EXPECT_NEAR(f.evaluate(x), expect, 1e-12 * (1.0 + std::abs(expect)));
    }
  }
}

TEST(Forms, MultiplyByNormPower) {
  Form theta(2, 2);
  theta.coeffs[theta.basis->index_of({2, 0})] = 1.0;  // x1^2
  Form same = multiply_by_norm_power(theta, 0);
  EXPECT_TRUE(same.coeffs.isApprox(theta.coeffs));
  Form lifted = multiply_by_norm_power(theta, 1);
  EXPECT_EQ(lifted.degree, 4);
  EXPECT_EQ(lifted.coeffs[lifted.basis->index_of({4, 0})], 1.0);
  EXPECT_EQ(lifted.coeffs[lifted.basis->index_of({2, 2})], 1.0);
  EXPECT_EQ(lifted.coeffs.cwiseAbs().sum(), 2.0);

  CounterRng rng(4);
  Form rnd(3, 2);
  rnd.coeffs = rng.gaussian_vector(rnd.coeffs.size());
  Form r2 = multiply_by_norm_power(rnd, 2);
  for (int pt = 0; pt < 10; ++pt) {
    Eigen::VectorXd x = rng.gaussian_vector(3);
    double expect = std::pow(x.squaredNorm(), 2) * rnd.evaluate(x);
    EXPECT_NEAR(r2.evaluate(x), expect, 1e-12 * (1.0 + std::abs(expect)));
  }
}

TEST(Moments, DualitySampling) {
  // y' theta >= 0 for theta induced by psd Gram matrices and y in M_{n,4}
  CounterRng rng(5);
  const int n = 3;
  MomentStructure ms = moment_structure(n);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXd U = Eigen::MatrixXd::NullaryExpr(
        ms.half->size(), ms.half->size(),
        [&](int, int) { return rng.gaussian(); });
    Eigen::MatrixXd G = U * U.transpose();
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(ms.full->size());
    for (std::size_t d = 0; d < ms.positions.size(); ++d)
      for (auto [a, b] : ms.positions[d])
        theta[static_cast<int>(d)] += (a == b ? 1.0 : 2.0) * G(a, b);

    MomentVector y(n);
    for (int k = 0; k < 4; ++k) {
      Eigen::VectorXd x = rng.gaussian_vector(n);
      y.y += rng.uniform() * MomentVector::of_point(x).y;
    }
    EXPECT_GE(y.y.dot(theta), -1e-8 * (1.0 + y.y.norm() * theta.norm()));
  }
}
