#include "gdnn/solver.hpp"

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "gdnn/rng.hpp"

using namespace gdnn;

TEST(Solver, SchurComplementSdp) {
  // min x11 s.t. [[x11, 1], [1, 1]] psd  ->  x11 = 1
  BlockConicProgram p;
  int X = p.add_psd_block(2);
  p.obj_mat(X, 0, 0, 1.0);
  int c1 = p.add_constraint(1.0);
  p.con_mat(c1, X, 0, 1, 0.5);  // symmetric entry 0.5 -> <A,X> = X01
  int c2 = p.add_constraint(1.0);
  p.con_mat(c2, X, 1, 1, 1.0);
  Solution s = solve(p);
  ASSERT_EQ(s.status, SolveStatus::Optimal);
  EXPECT_NEAR(s.primal_obj, 1.0, 1e-6);
  EXPECT_NEAR(s.primal[X].mat(0, 0), 1.0, 1e-5);
}

TEST(Solver, TrivialLp) {
  // min x s.t. x >= 3: x - u = 3, u >= 0
  BlockConicProgram p;
  int x = p.add_free_block(1);
  int u = p.add_nonneg_block(1);
  p.obj_vec(x, 0, 1.0);
  int c = p.add_constraint(3.0);
  p.con_vec(c, x, 0, 1.0);
  p.con_vec(c, u, 0, -1.0);
  Solution s = solve(p);
  ASSERT_EQ(s.status, SolveStatus::Optimal);
  EXPECT_NEAR(s.primal_obj, 3.0, 1e-7);
}

TEST(Solver, TrivialSocp) {
  // min x1 s.t. (x1, x2) in L2, x2 = 1
  BlockConicProgram p;
  int x = p.add_soc_block(2);
  p.obj_vec(x, 0, 1.0);
  int c = p.add_constraint(1.0);
  p.con_vec(c, x, 1, 1.0);
  Solution s = solve(p);
  ASSERT_EQ(s.status, SolveStatus::Optimal);
  EXPECT_NEAR(s.primal_obj, 1.0, 1e-7);
}

TEST(Solver, NonnegLpWithKnownOptimum) {
  // Construct primal-dual optimal pair for an LP in standard form and check
  // both the LP and its diagonal-SDP embedding hit the constructed optimum.
  CounterRng rng(101);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 6, m = 3;
    Eigen::MatrixXd A = Eigen::MatrixXd::NullaryExpr(
        m, n, [&](int, int) { return rng.gaussian(); });
    Eigen::VectorXd xstar = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd sstar = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) {
      if (i % 2 == 0)
        xstar[i] = 0.5 + rng.uniform();
      else
        sstar[i] = 0.5 + rng.uniform();
    }
    Eigen::VectorXd ystar = rng.gaussian_vector(m);
    Eigen::VectorXd b = A * xstar;
    Eigen::VectorXd c = A.transpose() * ystar + sstar;
    const double opt = c.dot(xstar);

    BlockConicProgram lp;
    int xb = lp.add_nonneg_block(n);
    for (int i = 0; i < n; ++i) lp.obj_vec(xb, i, c[i]);
    for (int i = 0; i < m; ++i) {
      int ci = lp.add_constraint(b[i]);
      for (int j = 0; j < n; ++j) lp.con_vec(ci, xb, j, A(i, j));
    }
    Solution s1 = solve(lp);
    ASSERT_EQ(s1.status, SolveStatus::Optimal);
    EXPECT_NEAR(s1.primal_obj, opt, 1e-6 * (1.0 + std::abs(opt)));

    // diagonal SDP embedding of the same data
    BlockConicProgram sdp;
    int Xb = sdp.add_psd_block(n);
    for (int i = 0; i < n; ++i) sdp.obj_mat(Xb, i, i, c[i]);
    for (int i = 0; i < m; ++i) {
      int ci = sdp.add_constraint(b[i]);
      for (int j = 0; j < n; ++j) sdp.con_mat(ci, Xb, j, j, A(i, j));
    }
    // off-diagonals are unconstrained in the data; they stay bounded because
    // X must remain psd with fixed-scale diagonal, and the optimum equals the
    // LP optimum attained at a diagonal X.
    Solution s2 = solve(sdp);
    ASSERT_EQ(s2.status, SolveStatus::Optimal);
    EXPECT_NEAR(s2.primal_obj, opt, 1e-6 * (1.0 + std::abs(opt)));

    KktReport k = verify_kkt(sdp, s2);
    EXPECT_LE(k.eq_residual, 1e-6);
    EXPECT_LE(k.complementarity, 1e-6);
    EXPECT_GE(s2.primal_obj, s2.dual_obj - 1e-6 * (1.0 + std::abs(opt)));
  }
}

TEST(Solver, MixedBlocksWeakDuality) {
  // random feasible mixed-cone programs built from a known interior point
  for (int trial = 0; trial < 10; ++trial) {
    CounterRng rng(1000 + trial);
    Eigen::MatrixXd U = Eigen::MatrixXd::NullaryExpr(
        3, 3, [&](int, int) { return rng.gaussian(); });
    Eigen::MatrixXd X0 = U * U.transpose() + Eigen::MatrixXd::Identity(3, 3);
    Eigen::VectorXd q0 = rng.gaussian_vector(3);
    q0[0] = q0.tail(2).norm() + 1.0;
    Eigen::VectorXd n0(2);
    n0 << 1.0 + rng.uniform(), 2.0 + rng.uniform();

    BlockConicProgram q;
    int Xq = q.add_psd_block(3);
    int sq = q.add_soc_block(3);
    int nq = q.add_nonneg_block(2);
    const int m = 4;
    std::vector<std::vector<std::tuple<int, int, double>>> me(m);
    std::vector<std::vector<std::pair<int, double>>> se(m), ne(m);
    std::vector<double> rhs(m, 0.0);
    for (int k = 0; k < m; ++k) {
      for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) {
          double v = rng.gaussian();
          me[k].emplace_back(i, j, v);
          rhs[k] += (i == j ? 1.0 : 2.0) * v * X0(i, j);
        }
      for (int i = 0; i < 3; ++i) {
        double v = rng.gaussian();
        se[k].emplace_back(i, v);
        rhs[k] += v * q0[i];
      }
      for (int i = 0; i < 2; ++i) {
        double v = rng.gaussian();
        ne[k].emplace_back(i, v);
        rhs[k] += v * n0[i];
      }
    }
    // objective C = A*(y0) + S0 with S0 interior, so the dual is feasible
    // and the primal bounded
    Eigen::VectorXd y0 = rng.gaussian_vector(m);
    Eigen::MatrixXd V = Eigen::MatrixXd::NullaryExpr(
        3, 3, [&](int, int) { return rng.gaussian(); });
    Eigen::MatrixXd S0 = V * V.transpose() + Eigen::MatrixXd::Identity(3, 3);
    Eigen::VectorXd ss0 = rng.gaussian_vector(3);
    ss0[0] = ss0.tail(2).norm() + 0.5;
    Eigen::Vector2d sn0(0.7, 1.3);
    Eigen::MatrixXd Cmat = S0;
    Eigen::VectorXd Csoc = ss0, Cnno = sn0;
    for (int k = 0; k < m; ++k) {
      for (auto& [i, j, v] : me[k]) {
        Cmat(i, j) += y0[k] * v;
        if (i != j) Cmat(j, i) += y0[k] * v;
      }
      for (auto& [i, v] : se[k]) Csoc[i] += y0[k] * v;
      for (auto& [i, v] : ne[k]) Cnno[i] += y0[k] * v;
    }
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j) q.obj_mat(Xq, i, j, Cmat(i, j));
    for (int i = 0; i < 3; ++i) q.obj_vec(sq, i, Csoc[i]);
    for (int i = 0; i < 2; ++i) q.obj_vec(nq, i, Cnno[i]);
    for (int k = 0; k < m; ++k) {
      int c = q.add_constraint(rhs[k]);
      for (auto& [i, j, v] : me[k]) q.con_mat(c, Xq, i, j, v);
      for (auto& [i, v] : se[k]) q.con_vec(c, sq, i, v);
      for (auto& [i, v] : ne[k]) q.con_vec(c, nq, i, v);
    }
    Solution s = solve(q);
    ASSERT_TRUE(s.usable(1e-7)) << to_string(s.status);
    EXPECT_GE(s.primal_obj, s.dual_obj - 1e-6 * (1.0 + std::abs(s.primal_obj)));
    EXPECT_LE(std::abs(s.primal_obj - s.dual_obj),
              1e-6 * (1.0 + std::abs(s.primal_obj)));
    KktReport k = verify_kkt(q, s);
    EXPECT_LE(k.eq_residual, 1e-6);
    EXPECT_GE(k.cone_violation, -1e-8);
  }
}

TEST(Solver, FeasibilityWrapper) {
  {
    // X psd with X11 = -1: infeasible
    BlockConicProgram p;
    int X = p.add_psd_block(2);
    int c = p.add_constraint(-1.0);
    p.con_mat(c, X, 0, 0, 1.0);
    FeasibilityResult r = solve_feasibility(p);
    ASSERT_FALSE(r.indeterminate);
    EXPECT_FALSE(r.feasible);
    EXPECT_LE(r.t_star, -0.9);
  }
  {
    // X psd with trace = 1: feasible
    BlockConicProgram p;
    int X = p.add_psd_block(3);
    int c = p.add_constraint(1.0);
    for (int i = 0; i < 3; ++i) p.con_mat(c, X, i, i, 1.0);
    FeasibilityResult r = solve_feasibility(p);
    ASSERT_FALSE(r.indeterminate);
    EXPECT_TRUE(r.feasible);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(r.point[0].mat,
                                                      Eigen::EigenvaluesOnly);
    EXPECT_GE(es.eigenvalues().minCoeff(), -1e-9);
    EXPECT_NEAR(r.point[0].mat.trace(), 1.0, 1e-6);
  }
  {
    // random system built around a known interior point
    CounterRng rng(77);
    BlockConicProgram p;
    int X = p.add_psd_block(3);
    Eigen::MatrixXd U = Eigen::MatrixXd::NullaryExpr(
        3, 3, [&](int, int) { return rng.gaussian(); });
    Eigen::MatrixXd X0 = U * U.transpose() + Eigen::MatrixXd::Identity(3, 3);
    for (int k = 0; k < 3; ++k) {
      double rhs = 0.0;
      std::vector<std::tuple<int, int, double>> ent;
      for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) {
          double v = rng.gaussian();
          ent.emplace_back(i, j, v);
          rhs += (i == j ? 1.0 : 2.0) * v * X0(i, j);
        }
      int c = p.add_constraint(rhs);
      for (auto& [i, j, v] : ent) p.con_mat(c, X, i, j, v);
    }
    FeasibilityResult r = solve_feasibility(p);
    ASSERT_FALSE(r.indeterminate);
    EXPECT_TRUE(r.feasible);
  }
}
