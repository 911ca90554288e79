#include "gdnn/experiments.hpp"

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "gdnn/forms.hpp"
#include "gdnn/membership.hpp"

using namespace gdnn;

TEST(GenerateInstance, BinaryCountAndDeterminism) {
  MisocpInstance a = generate_instance(5, 7);
  EXPECT_EQ(a.binary.size(), 2u);  // round(0.4 * 5)
  MisocpInstance b = generate_instance(10, 7);
  EXPECT_EQ(b.binary.size(), 4u);
  for (int i : b.binary) {
    EXPECT_GE(i, 2);
    EXPECT_LE(i, 10);
  }
  MisocpInstance c = generate_instance(5, 7);
  EXPECT_TRUE(a.c.isApprox(c.c));
  EXPECT_EQ(a.binary, c.binary);
  MisocpInstance d = generate_instance(5, 8);
  EXPECT_FALSE(a.c.isApprox(d.c));
}

TEST(M44, SelfCheckAndTiedEntries) {
  EXPECT_NO_THROW(m44_selfcheck());
  CounterRng rng(3);
  M44Sample s = generate_m44_vector(rng);
  // tying identities hold whether or not the draw was accepted
  EXPECT_EQ(s.matrix(0, 1), s.matrix(4, 4));  // M(1,2) = M(5,5)
  EXPECT_EQ(s.matrix(1, 0), s.matrix(4, 4));
  EXPECT_EQ(s.matrix(4, 9), s.matrix(6, 7));  // M(5,10) = M(7,8)
  EXPECT_TRUE(s.matrix.isApprox(s.matrix.transpose()));
}

TEST(M44, AcceptedSamplesAreMomentMatrices) {
  // scan indexed draws for a few accepted samples and verify every
  // coincidence class of M_{4,4} agrees exactly
  auto ms = moment_structure(4);
  int found = 0;
  for (std::uint64_t d = 0; d < 2000000 && found < 3; ++d) {
    M44Sample s = m44_indexed_draw(99, d);
    if (!s.accepted) continue;
    ++found;
    ASSERT_EQ(s.y.n, 4);
    Eigen::MatrixXd M = moment_matrix(s.y);
    // reading back through the graded-lex moment structure must reproduce a
    // matrix with identical tied classes; both are permutation-equivalent
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M,
                                                      Eigen::EigenvaluesOnly);
    EXPECT_GE(es.eigenvalues().minCoeff(), -1e-9 * std::abs(M.trace()));
    for (const auto& pos : ms.positions) {
      for (std::size_t k = 1; k < pos.size(); ++k)
        EXPECT_EQ(M(pos[0].first, pos[0].second),
                  M(pos[k].first, pos[k].second));
    }
  }
  EXPECT_EQ(found, 3) << "sampler acceptance collapsed";
}

TEST(M44, AcceptanceRatePositive) {
  // measured acceptance is about 2e-5, so a million indexed draws make a
  // zero count astronomically unlikely
  int accepted = 0;
  for (std::uint64_t d = 0; d < 1000000; ++d)
    if (m44_indexed_draw(5, d).accepted) ++accepted;
  EXPECT_GT(accepted, 0);
}

TEST(Fig1, SmallRunIsDeterministicAndConsistent) {
  Fig1Report a = run_fig1(10, 2024, 1);
  Fig1Report b = run_fig1(10, 2024, 2);
  ASSERT_EQ(a.records.size(), 10u);
  ASSERT_EQ(b.records.size(), 10u);
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    EXPECT_EQ(a.records[i].trs_value, b.records[i].trs_value);
    EXPECT_EQ(a.records[i].linear_cases_min, b.records[i].linear_cases_min);
  }
  EXPECT_EQ(a.attempts, b.attempts);
  EXPECT_EQ(a.negatives, 0);
  EXPECT_GT(a.min_linear_cases, 0.0);

  // each lifted matrix is an NN member by construction
  ConeSpec spec({{BlockKind::Nonneg, 1}, {BlockKind::SecondOrder, 3}});
  C0Map map = build_c0_map(spec);
  int checked = 0;
  for (std::uint64_t d = 0; checked < 2; ++d) {
    M44Sample s = m44_indexed_draw(2024, d);
    if (!s.accepted) continue;
    ++checked;
    Eigen::MatrixXd X = map.apply(s.y);
    MembershipResult r = nn_membership(spec, X, 1e-6);
    ASSERT_FALSE(r.solver_failure);
    EXPECT_TRUE(r.member);
    EXPECT_TRUE(zvp_membership(spec, X, 1e-6).member);
  }
}

TEST(Tables, TinySweepOrderings) {
  TableOptions opts;
  opts.n_list = {3};
  opts.seeds_per_n = 2;
  opts.variants = {"misocp", "nn", "zvp", "bd", "sdp"};
  opts.nn_cap = 4;
  TableReport rep = run_tables(opts, 11);
  EXPECT_EQ(rep.cells.size(), 10u);
  EXPECT_EQ(rep.ordering_violations, 0);
  EXPECT_EQ(rep.bd_le_nn_total, 2);
  std::string csv = table_report_csv(rep);
  EXPECT_NE(csv.find("n,no"), std::string::npos);
  EXPECT_NE(csv.find("misocp_value"), std::string::npos);

  // cap marker
  TableOptions capped = opts;
  capped.nn_cap = 2;
  TableReport rep2 = run_tables(capped, 11);
  bool saw_skip = false;
  for (const auto& c : rep2.cells)
    if (c.variant == "nn") saw_skip = saw_skip || c.skipped;
  EXPECT_TRUE(saw_skip);
  EXPECT_NE(table_report_csv(rep2).find("OOM"), std::string::npos);
}

TEST(Tables, WorkerCountDoesNotChangeValues) {
  TableOptions opts;
  opts.n_list = {3};
  opts.seeds_per_n = 2;
  opts.variants = {"misocp", "zvp"};
  TableReport a = run_tables(opts, 5);
  opts.workers = 2;
  TableReport b = run_tables(opts, 5);
  ASSERT_EQ(a.cells.size(), b.cells.size());
  for (std::size_t i = 0; i < a.cells.size(); ++i)
    EXPECT_NEAR(a.cells[i].value, b.cells[i].value,
                1e-9 * (1.0 + std::abs(a.cells[i].value)));
}
