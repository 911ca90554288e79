#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "gdnn/rng.hpp"
#include "gdnn/sos.hpp"

using namespace gdnn;

TEST(Sos, ExplicitSquareIsFeasible) {
  // (x1^2 - x2^2)^2 = x1^4 - 2 x1^2 x2^2 + x2^4
  Form theta(2, 4);
  theta.coeffs[theta.basis->index_of({4, 0})] = 1.0;
  theta.coeffs[theta.basis->index_of({2, 2})] = -2.0;
  theta.coeffs[theta.basis->index_of({0, 4})] = 1.0;
  SosResult r = sos_decompose(theta);
  ASSERT_EQ(r.status, SosStatus::Feasible);
  EXPECT_GE(r.certificate.min_eigenvalue, -1e-7);
  EXPECT_LE(r.certificate.match_residual, 1e-6);
}

TEST(Sos, PointwiseNegativeIsInfeasibleWithWitness) {
  // x1^2 x2^2 - x1^4 is negative at (1,0)
  Form theta(2, 4);
  theta.coeffs[theta.basis->index_of({2, 2})] = 1.0;
  theta.coeffs[theta.basis->index_of({4, 0})] = -1.0;
  SosResult r = sos_decompose(theta);
  ASSERT_EQ(r.status, SosStatus::Infeasible);
  ASSERT_EQ(r.dual_witness.size(), theta.coeffs.size());
  EXPECT_LT(r.dual_witness.dot(theta.coeffs), 0.0);
  Eigen::MatrixXd My = moment_matrix(2, 2, r.dual_witness);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(My,
                                                    Eigen::EigenvaluesOnly);
  EXPECT_GE(es.eigenvalues().minCoeff(),
            -1e-7 * (1.0 + es.eigenvalues().cwiseAbs().maxCoeff()));
}

TEST(Sos, RandomSumsOfSquaresAreFeasible) {
  CounterRng rng(9);
  const int n = 3;
  MomentStructure ms = moment_structure(n);
  for (int trial = 0; trial < 8; ++trial) {
    Form theta(n, 4);
    for (int k = 0; k < 3; ++k) {
      Eigen::VectorXd g = rng.gaussian_vector(ms.half->size());
      Eigen::MatrixXd G = g * g.transpose();
      for (std::size_t d = 0; d < ms.positions.size(); ++d)
        for (auto [a, b] : ms.positions[d])
          theta.coeffs[static_cast<int>(d)] += (a == b ? 1.0 : 2.0) * G(a, b);
    }
    SosResult r = sos_decompose(theta);
    ASSERT_EQ(r.status, SosStatus::Feasible);
    // reconstruct theta from the Gram certificate
    Eigen::VectorXd rec = Eigen::VectorXd::Zero(theta.coeffs.size());
    for (std::size_t d = 0; d < ms.positions.size(); ++d)
      for (auto [a, b] : ms.positions[d])
        rec[static_cast<int>(d)] +=
            (a == b ? 1.0 : 2.0) * r.certificate.gram(a, b);
    EXPECT_LE((rec - theta.coeffs).cwiseAbs().maxCoeff(),
              1e-6 * (1.0 + theta.coeffs.cwiseAbs().maxCoeff()));
  }
}

TEST(Sos, ZeroFormFeasible) {
  Form theta(2, 4);
  SosResult r = sos_decompose(theta);
  EXPECT_EQ(r.status, SosStatus::Feasible);
}
