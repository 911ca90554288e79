#pragma once

#include <memory>

#include <Eigen/Core>

#include "gdnn/monomials.hpp"

namespace gdnn {

/// Homogeneous polynomial of the given degree, stored as a coefficient
/// vector over the monomial basis I(n, degree).
struct Form {
  int n = 0;
  int degree = 0;
  Eigen::VectorXd coeffs;
  std::shared_ptr<const MonomialBasis> basis;

  Form() = default;
  Form(int n_, int degree_);

  double evaluate(const Eigen::VectorXd& x) const;
};

/// Coefficient vector over degree-4 monomials in n variables.
struct MomentVector {
  int n = 0;
  Eigen::VectorXd y;
  std::shared_ptr<const MonomialBasis> basis;

  MomentVector() = default;
  explicit MomentVector(int n_);

  /// Degree-4 moments of the Dirac measure at x.
  static MomentVector of_point(const Eigen::VectorXd& x);
};

/// Matrix over I(n,2) with (a,b) entry y_{alpha_a + alpha_b}.
Eigen::MatrixXd moment_matrix(const MomentVector& y);

/// Same layout for an arbitrary vector over I(n, 2m).
Eigen::MatrixXd moment_matrix(int n, int m, const Eigen::VectorXd& y);

/// Exact expansion of (x'Qx)(x'Rx) into degree-4 monomial coefficients.
Form multiply_quadratics(const Eigen::MatrixXd& q, const Eigen::MatrixXd& r);

/// Coefficients of (sum_i x_i^2)^r * theta.
Form multiply_by_norm_power(const Form& theta, int r);

/// Degree-2 monomial vector [x^alpha]_{alpha in I(n,2)} at a point.
Eigen::VectorXd monomial_vector(int n, int m, const Eigen::VectorXd& x);

/// Position classes of the degree-2 moment matrix: positions[d] lists the
/// (row, col) pairs (row <= col) of M_{n,2} carrying y_d; the first entry
/// is the representative.
struct MomentStructure {
  std::shared_ptr<const MonomialBasis> half;  // I(n,2)
  std::shared_ptr<const MonomialBasis> full;  // I(n,4)
  std::vector<std::vector<std::pair<int, int>>> positions;
};

MomentStructure moment_structure(int n);

}  // namespace gdnn
