#include "gdnn/io.hpp"

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "gdnn/rng.hpp"
#include "gdnn/solver.hpp"

using namespace gdnn;

TEST(Io, ConeSpecRoundTrip) {
  ConeSpec spec = cone_spec_from_json(
      R"({"blocks":[{"kind":"nonneg","dim":3},{"kind":"soc","dim":4},{"kind":"psd","order":2}]})");
  EXPECT_EQ(spec.ambient_dim(), 3 + 4 + 3);
  ConeSpec again = cone_spec_from_json(cone_spec_to_json(spec));
  EXPECT_EQ(again.ambient_dim(), spec.ambient_dim());
  EXPECT_EQ(again.rank(), spec.rank());
  EXPECT_EQ(again.nonneg_like_indices(), spec.nonneg_like_indices());
}

TEST(Io, MatrixJsonAndText) {
  CounterRng rng(1);
  Eigen::MatrixXd m = Eigen::MatrixXd::NullaryExpr(
      3, 3, [&](int, int) { return rng.gaussian(); });
  Eigen::MatrixXd back = matrix_from_json(matrix_to_json(m));
  EXPECT_TRUE(back.isApprox(m));

  write_file("/tmp/gdnn_test_matrix.txt", "1 2 3\n4 5 6\n");
  Eigen::MatrixXd t = load_matrix("/tmp/gdnn_test_matrix.txt");
  EXPECT_EQ(t.rows(), 2);
  EXPECT_EQ(t(1, 2), 6.0);
}

TEST(Io, FormAndMomentRoundTrip) {
  Form f(3, 4);
  f.coeffs[f.basis->index_of({2, 0, 2})] = 1.5;
  f.coeffs[f.basis->index_of({1, 2, 1})] = -0.25;
  Form g = form_from_json(form_to_json(f));
  EXPECT_TRUE(g.coeffs.isApprox(f.coeffs));

  CounterRng rng(2);
  MomentVector y(3);
  y.y = rng.gaussian_vector(y.y.size());
  MomentVector z = moment_vector_from_json(moment_vector_to_json(y));
  EXPECT_TRUE(z.y.isApprox(y.y));
}

TEST(Io, InstanceRoundTrip) {
  MisocpInstance inst;
  inst.n = 4;
  inst.c = Eigen::Vector4d(0.5, -1, 2, 0);
  inst.binary = {2, 4};
  inst.seed = 99;
  MisocpInstance back = instance_from_json(instance_to_json(inst));
  EXPECT_EQ(back.n, 4);
  EXPECT_TRUE(back.c.isApprox(inst.c));
  EXPECT_EQ(back.binary, inst.binary);
  EXPECT_EQ(back.seed, 99u);
}

TEST(Io, ProgramRoundTripSolvesIdentically) {
  BlockConicProgram p;
  int X = p.add_psd_block(2);
  int u = p.add_nonneg_block(1);
  p.obj_mat(X, 0, 0, 1.0);
  int c1 = p.add_constraint(1.0);
  p.con_mat(c1, X, 0, 1, 0.5);
  int c2 = p.add_constraint(1.0);
  p.con_mat(c2, X, 1, 1, 1.0);
  p.con_vec(c2, u, 0, 0.0);
  BlockConicProgram q = program_from_json(program_to_json(p));
  Solution sp = solve(p);
  Solution sq = solve(q);
  ASSERT_EQ(sp.status, SolveStatus::Optimal);
  ASSERT_EQ(sq.status, SolveStatus::Optimal);
  EXPECT_EQ(sp.primal_obj, sq.primal_obj);
}
