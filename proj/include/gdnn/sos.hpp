#pragma once

#include "gdnn/forms.hpp"
#include "gdnn/solver.hpp"

namespace gdnn {

/// PSD Gram matrix over I(n, m) reproducing a degree-2m form.
struct GramCertificate {
  Eigen::MatrixXd gram;
  double min_eigenvalue = 0.0;
  double match_residual = 0.0;  // worst coefficient-matching error
};

enum class SosStatus { Feasible, Infeasible, SolverFailure };

struct SosResult {
  SosStatus status = SosStatus::SolverFailure;
  double t_star = 0.0;  // phase-I margin, scaled to the normalized form
  GramCertificate certificate;    // when feasible
  Eigen::VectorXd dual_witness;   // y over I(n,2m) with M(y) psd, y'theta < 0
};

/// Decides theta in Sigma_{n,2m} as the phase-I SDP
/// "max t s.t. G >= tI, coefficients of G match theta"; feasible iff
/// t* >= -eps.
SosResult sos_decompose(const Form& theta, double eps = 1e-7,
                        const SolverOptions& opts = {});

}  // namespace gdnn
