#include "gdnn/sos.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace gdnn {

SosResult sos_decompose(const Form& theta, double eps,
                        const SolverOptions& opts) {
  if (theta.degree % 2 != 0)
    throw std::invalid_argument("sos_decompose: degree must be even");
  const int n = theta.n;
  const int m = theta.degree / 2;
  auto half = monomial_basis(n, m);
  auto full = theta.basis;
  const int N = half->size();

  SosResult out;
  const double scale = theta.coeffs.cwiseAbs().maxCoeff();
  if (scale == 0.0) {
    out.status = SosStatus::Feasible;
    out.t_star = 0.0;
    out.certificate.gram = Eigen::MatrixXd::Zero(N, N);
    return out;
  }
  const Eigen::VectorXd tc = theta.coeffs / scale;

  // positions of each monomial class in the Gram matrix
  std::vector<std::vector<std::pair<int, int>>> positions(full->size());
  for (int a = 0; a < N; ++a)
    for (int b = a; b < N; ++b)
      positions[full->index_of(multi_index_sum((*half)[a], (*half)[b]))]
          .emplace_back(a, b);

  // max t  s.t.  X = G - tI psd, coefficient matching, t <= cap
  BlockConicProgram p;
  const int X = p.add_psd_block(N);
  const int tb = p.add_free_block(1);
  const int cap = p.add_nonneg_block(1);
  p.obj_vec(tb, 0, -1.0);
  for (int d = 0; d < full->size(); ++d) {
    const int c = p.add_constraint(tc[d]);
    int diag_count = 0;
    for (auto [a, b] : positions[d]) {
      p.con_mat(c, X, a, b, 1.0);
      if (a == b) ++diag_count;
    }
    if (diag_count > 0) p.con_vec(c, tb, 0, static_cast<double>(diag_count));
  }
  {
    const int c = p.add_constraint(10.0);
    p.con_vec(c, tb, 0, 1.0);
    p.con_vec(c, cap, 0, 1.0);
  }

  Solution sol = solve(p, opts);
  if (!sol.usable(1e-6)) {
    out.status = SosStatus::SolverFailure;
    return out;
  }
  const double t = sol.primal[tb].vec[0];
  out.t_star = t;
  if (t >= -eps) {
    out.status = SosStatus::Feasible;
    Eigen::MatrixXd G = sol.primal[X].mat;
    G.diagonal().array() += t;
    G *= scale;
    out.certificate.gram = G;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G,
                                                      Eigen::EigenvaluesOnly);
    out.certificate.min_eigenvalue = es.eigenvalues().minCoeff();
    double worst = 0.0;
    for (int d = 0; d < full->size(); ++d) {
      double sum = 0.0;
      for (auto [a, b] : positions[d]) sum += (a == b ? 1.0 : 2.0) * G(a, b);
      worst = std::max(worst, std::abs(sum - theta.coeffs[d]));
    }
    out.certificate.match_residual = worst;
  } else {
    out.status = SosStatus::Infeasible;
    // the matching-row multipliers satisfy M(y) <= 0 and theta'y > 0, so
    // -y is the separating moment vector
    out.dual_witness = -sol.dual.head(full->size());
  }
  return out;
}

}  // namespace gdnn
