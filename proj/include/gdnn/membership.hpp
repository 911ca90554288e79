#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "gdnn/cone_spec.hpp"
#include "gdnn/forms.hpp"
#include "gdnn/separation.hpp"
#include "gdnn/solver.hpp"
#include "gdnn/sos.hpp"

namespace gdnn {

/// Generators of K_ZVP,0(K): the J_h matrices of the second-order blocks,
/// the J_h^{ij} matrices of the PsdVec blocks, and the index set I_{>=0}
/// supporting the nonnegative part.
struct ZvpGenerators {
  std::vector<Eigen::MatrixXd> j_mats;
  std::vector<std::string> j_labels;  // "J[h]" or "J[h](i,j)"
  std::vector<int> nonneg_index_set;
};

ZvpGenerators zvp_generators(const ConeSpec& spec);

struct KzvpDecomposition {
  Eigen::MatrixXd psd_part;
  Eigen::VectorXd j_multipliers;
  Eigen::MatrixXd nonneg_part;
};

struct MembershipResult {
  bool member = false;
  std::string witness;  // violated condition id, or certificate kind
  double value = 0.0;   // violation value, or feasibility margin
  std::optional<GramCertificate> gram;          // knn certificate
  std::optional<MomentVector> moment;           // nn certificate
  std::optional<Eigen::VectorXd> dual_moment;   // knn infeasibility witness
  std::optional<KzvpDecomposition> decomposition;  // kzvp0 certificate
  std::optional<SeparationOutcome> cut;         // bd cut
  bool solver_failure = false;
};

/// X in DNN_ZVP(K): psd, <J, X> >= 0 for every generator, and X_{IJ} >= 0
/// on I_{>=0} x I_{>=0}. Closed-form checks; the witness names the first
/// violated condition in that order.
MembershipResult zvp_membership(const ConeSpec& spec, const Eigen::MatrixXd& X,
                                double tol = 1e-7);

/// A in K_ZVP,0(K): SDP feasibility of A = P + sum t J + N. Input is
/// normalized by its Frobenius norm; `value` is the phase-I margin on the
/// normalized copy.
MembershipResult kzvp0_membership(const ConeSpec& spec,
                                  const Eigen::MatrixXd& A, double tol = 1e-7);

/// A in K_NN,r(K): SOS membership of (sum x_i^2)^r (x o x)' A (x o x).
MembershipResult knn_membership(const ConeSpec& spec, const Eigen::MatrixXd& A,
                                int level = 0, double tol = 1e-7);

/// Per-entry coefficient lists of the linear map y -> C0(y); entry (I,J),
/// I <= J, is sum of coeff * y_delta with deltas in basis order.
struct C0Map {
  int n = 0;
  std::shared_ptr<const MonomialBasis> basis;  // I(n,4)
  std::vector<std::vector<std::pair<int, double>>> entries;

  int entry_index(int I, int J) const;  // I <= J
  Eigen::MatrixXd apply(const MomentVector& y) const;
};

C0Map build_c0_map(const ConeSpec& spec);

Eigen::MatrixXd nn_c0(const ConeSpec& spec, const MomentVector& y);

/// X in DNN_NN(K) = C0(K): SDP feasibility of "exists y, M(y) psd,
/// C0(y) = X". The certificate is the moment vector.
MembershipResult nn_membership(const ConeSpec& spec, const Eigen::MatrixXd& X,
                               double tol = 1e-7);

/// X in DNN_BD(K) = S+ cap N(K); delegates to the separation oracle.
/// Throws UnsupportedBlockError on PsdVec blocks.
MembershipResult bd_membership(const ConeSpec& spec, const Eigen::MatrixXd& X,
                               double tol = 1e-7);

}  // namespace gdnn
