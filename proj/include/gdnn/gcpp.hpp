#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "gdnn/cone_spec.hpp"
#include "gdnn/conic_program.hpp"
#include "gdnn/rng.hpp"
#include "gdnn/solver.hpp"

namespace gdnn {

/// min c'x  s.t.  0 <= x1 <= 2, 0 <= xi <= 1 (i >= 2), xi binary on B,
/// x in L^n.
struct MisocpInstance {
  int n = 0;
  Eigen::VectorXd c;
  std::vector<int> binary;  // 1-based indices, subset of {2,...,n}
  std::uint64_t seed = 0;

  void validate() const;
};

/// Standard-form GCPP over K = R+^{2n+1} x L^n obtained from the Burer
/// lift with slack variables z = (u, v, x); the lifted matrix is indexed by
/// (1, z).
struct GcppProblem {
  int n = 0;
  int dim = 0;  // 3n + 1
  ConeSpec cone;
  Eigen::MatrixXd objective;
  std::vector<std::vector<MatEntry>> rows;
  Eigen::VectorXd rhs;

  int u_coord(int i) const { return i; }            // 1-based i
  int v_coord(int i) const { return n + i; }        // 1-based i
  int x_coord(int i) const { return 2 * n + i; }    // 1-based i

  double row_value(int r, const Eigen::MatrixXd& Y) const;
};

GcppProblem burer_reformulate(const MisocpInstance& inst);

/// Slack-completed lifted vector (1, u, v, x) of a feasible point.
Eigen::VectorXd lifted_point(const MisocpInstance& inst,
                             const Eigen::VectorXd& x);

enum class RelaxationVariant { Sdp, Zvp, Nn };

RelaxationVariant relaxation_variant_from_string(const std::string& s);

struct RelaxationBuild {
  RelaxationVariant variant = RelaxationVariant::Sdp;
  BlockConicProgram program;
  int y_block = 0;  // psd block: Y itself (Sdp/Zvp) or M(y) (Nn)
};

/// Builds the GDNNP/SDP relaxation. The SDP variant adds `sdp_reg` * I to
/// the objective (numerical-stability shift); the others do not.
RelaxationBuild build_relaxation(const GcppProblem& g, RelaxationVariant v,
                                 double sdp_reg = 0.005);

/// Recovers the lifted matrix Y from a relaxation solution (for Nn this is
/// C0 of the recovered moment vector).
Eigen::MatrixXd recover_lifted_matrix(const GcppProblem& g,
                                      const RelaxationBuild& build,
                                      const Solution& sol);

struct ExchangeParams {
  double tau = 1e-5;
  double dual_prune = 1e-12;
  int fixed_soc_samples = 1000;
  int max_inner_total = 500;
  int accel_consecutive = 5;
  SolverOptions solver;
};

struct ExchangeTraceEntry {
  int outer = 0;
  int inner = 0;
  int active_cuts = 0;
  double objective = 0.0;
  double gamma = 0.0;
  std::string cut_source;  // empty when no cut was added
};

struct ExchangeResult {
  double value = 0.0;
  Eigen::MatrixXd lifted;
  SolveStatus status = SolveStatus::Numerical;
  std::vector<ExchangeTraceEntry> trace;
  int subproblem_solves = 0;
  int final_active_cuts = 0;
};

/// Explicit exchange method for the BD GDNNP relaxation: alternates the
/// finite-cut subproblem P(J') with the shifted separation oracle under the
/// vanishing slack schedule gamma_k = 0.5^k.
ExchangeResult solve_bd_exchange(const GcppProblem& g,
                                 const ExchangeParams& params, CounterRng& rng);

struct BruteForceResult {
  double value = std::numeric_limits<double>::infinity();
  Eigen::VectorXd argmin;
  int branches = 0;
  int infeasible_branches = 0;
  int failed_branches = 0;
};

/// Reference optimum by enumerating all binary fixings and solving the
/// continuous second-order cone restriction of each.
BruteForceResult misocp_bruteforce(const MisocpInstance& inst,
                                   const SolverOptions& opts = {});

}  // namespace gdnn
