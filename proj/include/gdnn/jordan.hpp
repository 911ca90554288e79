#pragma once

#include <vector>

#include <Eigen/Core>

#include "gdnn/cone_spec.hpp"
#include "gdnn/rng.hpp"

namespace gdnn {

/// Eigenvalues and the Jordan frame of an algebra element, blockwise
/// embedded into the ambient space. Eigenvalues are sorted ascending within
/// each block; idempotents line up with them.
struct SpectralDecomposition {
  Eigen::VectorXd eigenvalues;
  std::vector<Eigen::VectorXd> idempotents;

  Eigen::VectorXd reconstruct() const;
};

/// Per global coordinate I, the symmetric matrix Q_I with
/// (x o x)_I = x' Q_I x.
struct QuadFormTable {
  std::vector<Eigen::MatrixXd> q;

  Eigen::VectorXd evaluate(const Eigen::VectorXd& x) const;
};

Eigen::VectorXd jordan_product(const ConeSpec& spec, const Eigen::VectorXd& x,
                               const Eigen::VectorXd& y);

Eigen::VectorXd identity_element(const ConeSpec& spec);

SpectralDecomposition spectral_decompose(const ConeSpec& spec,
                                         const Eigen::VectorXd& x);

double min_eigenvalue(const ConeSpec& spec, const Eigen::VectorXd& x);

/// Uniform random primitive idempotent of the given block, embedded with
/// zeros elsewhere.
Eigen::VectorXd sample_primitive_idempotent(const ConeSpec& spec,
                                            int block_index, CounterRng& rng);

/// All primitive idempotents of the nonnegative-orthant part plus the
/// second-order and PsdVec leading frames are infinite; this returns the
/// finite unit-coordinate idempotents e_I for I in the nonneg-like set of
/// pure nonneg blocks only (used by exchange-style scans).
std::vector<Eigen::VectorXd> nonneg_unit_idempotents(const ConeSpec& spec);

/// svec with the sqrt(2) off-diagonal convention: <A,B> = svec(A)'svec(B).
Eigen::VectorXd svec(const Eigen::MatrixXd& m);
Eigen::MatrixXd smat(const Eigen::VectorXd& v);

QuadFormTable square_quadratic_forms(const ConeSpec& spec);

/// Quadratic representation P(u)v = 2 u o (u o v) - (u o u) o v.
Eigen::VectorXd quad_rep_apply(const ConeSpec& spec, const Eigen::VectorXd& u,
                               const Eigen::VectorXd& v);

/// Spectral function: applies f to the eigenvalues. Throws if f is applied
/// outside its domain (e.g. sqrt of a negative eigenvalue).
Eigen::VectorXd spectral_map(const ConeSpec& spec, const Eigen::VectorXd& x,
                             double (*f)(double));

}  // namespace gdnn
