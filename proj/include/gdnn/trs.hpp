#pragma once

#include <Eigen/Core>

namespace gdnn {

/// minimize v'Bv + 2b'v + c over the unit sphere ||v|| = 1.
struct TrsProblem {
  Eigen::MatrixXd B;
  Eigen::VectorXd b;
  double c = 0.0;
};

struct TrsSolution {
  double value = 0.0;
  Eigen::VectorXd v;
  double multiplier = 0.0;  // mu with (B - mu I)v = -b, mu <= lambda_min(B)
};

/// Exact global solution via eigendecomposition and safeguarded Newton on
/// the secular equation, with explicit hard-case handling.
TrsSolution solve_trs(const TrsProblem& p);

}  // namespace gdnn
