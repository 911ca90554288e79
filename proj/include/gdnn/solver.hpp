#pragma once

#include "gdnn/conic_program.hpp"

namespace gdnn {

/// Infeasible-start primal-dual Mehrotra predictor-corrector with
/// Nesterov-Todd scaling; dense Schur complement with Cholesky and one
/// round of iterative refinement.
struct SolverOptions {
  double gap_tol = 1e-8;
  double feas_tol = 1e-8;
  int max_iter = 200;
  double step_frac = 0.99;
  bool verbose = false;
  // Initialization: infeasible start at x = xi*e, s = eta*e (big-M-free).
  double init_scale = 10.0;
};

Solution solve(const BlockConicProgram& prog, const SolverOptions& opts = {});

struct KktReport {
  double eq_residual;       // ||A(X) - b||_inf / (1 + ||b||_inf)
  double cone_violation;    // most negative block eigenvalue of the primal
  double complementarity;   // <X, S> / (1 + |obj|)
  double dual_residual;     // ||C - A*(y) - S||_max / (1 + ||C||_max)
};

KktReport verify_kkt(const BlockConicProgram& prog, const Solution& sol);

struct FeasibilityResult {
  bool feasible = false;
  double t_star = 0.0;
  SolveStatus status = SolveStatus::Numerical;
  bool indeterminate = false;
  std::vector<BlockValue> point;  // cone-feasible point when feasible
  Eigen::VectorXd dual_witness;   // equality multipliers otherwise
};

/// Phase-I wrapper: max t s.t. X_b - t e_b in K_b for every cone block and
/// the equality constraints of `prog` hold (its objective is ignored).
/// Feasible iff t* >= -eps. t is capped at `shift_cap` to keep the phase-I
/// problem bounded.
FeasibilityResult solve_feasibility(const BlockConicProgram& prog,
                                    const SolverOptions& opts = {},
                                    double eps = 1e-7,
                                    double shift_cap = 1.0);

}  // namespace gdnn
