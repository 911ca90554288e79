#pragma once

#include <stdexcept>

#include <Eigen/Core>

#include "gdnn/cone_spec.hpp"
#include "gdnn/trs.hpp"

namespace gdnn {

struct UnsupportedBlockError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class CutSource { NnoNno, NnoSoc, SocNno, SocSocLinear, SocSocTrs };

const char* to_string(CutSource s);

/// Either "inside N(K) up to the shift gamma" or a separating hyperplane H
/// with <X,H> > 0 and <Y,H> <= 0 for every Y in N(K), together with the
/// primitive idempotent s witnessing lambda_min(Xs) < -gamma.
struct SeparationOutcome {
  bool inside = true;
  Eigen::MatrixXd cut;
  double violation = 0.0;  // <X, cut>
  CutSource source = CutSource::NnoNno;
  Eigen::VectorXd witness;
  double case_value = 0.0;  // the violated case's value
};

/// Case minima of the four-part procedure, for diagnostics and the
/// experiment harness. trs_value is the worst TRS optimal value over all
/// second-order block pairs (quadratic scale, only meaningful when the
/// linear phase is nonnegative).
struct SeparationDiagnostics {
  double nno_nno = 0.0;
  double nno_soc = 0.0;
  double soc_nno = 0.0;
  double soc_soc_linear = 0.0;
  double trs_value = 0.0;
  bool has_nno = false;
  bool has_soc = false;
};

/// Separation oracle for N(K), K a product of nonnegative orthants and
/// second-order cones. Inside iff the minimum of the four case families is
/// >= -gamma. PsdVec blocks are unsupported.
SeparationOutcome separate(const ConeSpec& spec, const Eigen::MatrixXd& X,
                           double gamma = 0.0);

SeparationDiagnostics evaluate_separation_cases(const ConeSpec& spec,
                                                const Eigen::MatrixXd& X);

/// Quadratic data of f_gh over the sphere S^{n_h-2} for a pair of
/// second-order blocks, optionally with the exchange-method shift folded in.
TrsProblem soc_pair_trs(const ConeSpec& spec, const Eigen::MatrixXd& X, int g,
                        int h, double gamma = 0.0);

}  // namespace gdnn
