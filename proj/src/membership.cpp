#include "gdnn/membership.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "gdnn/jordan.hpp"

namespace gdnn {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

double min_eig_sym(const MatrixXd& X) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(X, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

void check_square(const ConeSpec& spec, const MatrixXd& X) {
  if (X.rows() != spec.ambient_dim() || X.cols() != spec.ambient_dim())
    throw std::invalid_argument("matrix does not match cone ambient dim");
}

}  // namespace

ZvpGenerators zvp_generators(const ConeSpec& spec) {
  const int n = spec.ambient_dim();
  ZvpGenerators g;
  g.nonneg_index_set = spec.nonneg_like_indices();
  for (int h = 0; h < spec.num_blocks(); ++h) {
    const Block& b = spec.block(h);
    if (b.kind == BlockKind::SecondOrder) {
      MatrixXd J = MatrixXd::Zero(n, n);
      const int off = spec.block_offset(h);
      J(off, off) = 1.0;
      for (int i = 1; i < b.dim; ++i) J(off + i, off + i) = -1.0;
      g.j_mats.push_back(std::move(J));
      g.j_labels.push_back("J[" + std::to_string(h) + "]");
    } else if (b.kind == BlockKind::PsdVec) {
      for (int i = 0; i < b.order; ++i)
        for (int j = i + 1; j < b.order; ++j) {
          MatrixXd J = MatrixXd::Zero(n, n);
          const int pii = spec.psd_entry_index(h, i, i);
          const int pjj = spec.psd_entry_index(h, j, j);
          const int pij = spec.psd_entry_index(h, i, j);
          J(pii, pjj) = 1.0;
          J(pjj, pii) = 1.0;
          J(pij, pij) = -1.0;
          g.j_mats.push_back(std::move(J));
          g.j_labels.push_back("J[" + std::to_string(h) + "](" +
                               std::to_string(i + 1) + "," +
                               std::to_string(j + 1) + ")");
        }
    }
  }
  return g;
}

MembershipResult zvp_membership(const ConeSpec& spec, const MatrixXd& X,
                                double tol) {
  check_square(spec, X);
  MembershipResult r;
  const double psd_tol = tol * std::max(1.0, std::abs(X.trace()));
  const double lmin = min_eig_sym(X);
  if (lmin < -psd_tol) {
    r.member = false;
    r.witness = "psd";
    r.value = lmin;
    return r;
  }
  ZvpGenerators g = zvp_generators(spec);
  for (std::size_t k = 0; k < g.j_mats.size(); ++k) {
    const double v = (g.j_mats[k].array() * X.array()).sum();
    if (v < -tol) {
      r.member = false;
      r.witness = g.j_labels[k];
      r.value = v;
      return r;
    }
  }
  for (std::size_t a = 0; a < g.nonneg_index_set.size(); ++a)
    for (std::size_t b = a; b < g.nonneg_index_set.size(); ++b) {
      const int I = g.nonneg_index_set[a];
      const int J = g.nonneg_index_set[b];
      if (X(I, J) < -tol) {
        r.member = false;
        r.witness = "N[" + std::to_string(I) + "," + std::to_string(J) + "]";
        r.value = X(I, J);
        return r;
      }
    }
  r.member = true;
  r.witness = "zvp_checks";
  r.value = lmin;
  return r;
}

MembershipResult kzvp0_membership(const ConeSpec& spec, const MatrixXd& A,
                                  double tol) {
  check_square(spec, A);
  MembershipResult r;
  const int n = spec.ambient_dim();
  const double scale = A.norm();
  const MatrixXd An = scale > 0 ? MatrixXd(A / scale) : A;

  ZvpGenerators g = zvp_generators(spec);
  const auto& idx = g.nonneg_index_set;
  const int nj = static_cast<int>(g.j_mats.size());
  const int nn = static_cast<int>(idx.size());

  // max t s.t. P - tI = A - sum t_h J_h - N with t_h >= 0, N supported and
  // nonnegative on I_{>=0} x I_{>=0}
  BlockConicProgram p;
  const int P = p.add_psd_block(n);
  const int tj = nj > 0 ? p.add_nonneg_block(nj) : -1;
  const int nb = nn > 0 ? p.add_nonneg_block(nn * (nn + 1) / 2) : -1;
  const int tb = p.add_free_block(1);
  const int cap = p.add_nonneg_block(1);
  p.obj_vec(tb, 0, -1.0);

  std::vector<std::vector<int>> nonneg_id(n, std::vector<int>(n, -1));
  {
    int k = 0;
    for (int a = 0; a < nn; ++a)
      for (int b = a; b < nn; ++b) {
        nonneg_id[idx[a]][idx[b]] = k;
        nonneg_id[idx[b]][idx[a]] = k;
        ++k;
      }
  }
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      const int c = p.add_constraint(An(i, j));
      p.con_mat(c, P, i, j, (i == j) ? 1.0 : 0.5);
      if (i == j) p.con_vec(c, tb, 0, 1.0);
      for (int k = 0; k < nj; ++k)
        if (g.j_mats[k](i, j) != 0.0) p.con_vec(c, tj, k, g.j_mats[k](i, j));
      if (nonneg_id[i][j] >= 0) p.con_vec(c, nb, nonneg_id[i][j], 1.0);
    }
  {
    const int c = p.add_constraint(1.0);
    p.con_vec(c, tb, 0, 1.0);
    p.con_vec(c, cap, 0, 1.0);
  }

  Solution sol = solve(p);
  if (!sol.usable(1e-6)) {
    r.solver_failure = true;
    r.witness = to_string(sol.status);
    return r;
  }
  const double t = sol.primal[tb].vec[0];
  r.value = t;
  r.member = t >= -tol;
  if (r.member) {
    KzvpDecomposition dec;
    dec.psd_part = sol.primal[P].mat;
    dec.psd_part.diagonal().array() += t;
    dec.psd_part *= scale;
    dec.j_multipliers =
        nj > 0 ? VectorXd(scale * sol.primal[tj].vec) : VectorXd();
    dec.nonneg_part = MatrixXd::Zero(n, n);
    for (int a = 0; a < nn; ++a)
      for (int b = a; b < nn; ++b) {
        const double v = scale * sol.primal[nb].vec[nonneg_id[idx[a]][idx[b]]];
        dec.nonneg_part(idx[a], idx[b]) = v;
        dec.nonneg_part(idx[b], idx[a]) = v;
      }
    r.decomposition = std::move(dec);
    r.witness = "decomposition";
  } else {
    r.witness = "no_decomposition";
  }
  return r;
}

MembershipResult knn_membership(const ConeSpec& spec, const MatrixXd& A,
                                int level, double tol) {
  check_square(spec, A);
  if (level < 0) throw std::invalid_argument("knn_membership: level < 0");
  const int n = spec.ambient_dim();
  check_basis_cap(n, 2 * level + 4);

  MembershipResult r;
  const double scale = A.norm();
  const MatrixXd An = scale > 0 ? MatrixXd(A / scale) : A;

  // P(x;A) = (x o x)' A (x o x) expanded through the quadratic-form table
  QuadFormTable qt = square_quadratic_forms(spec);
  Form pform(n, 4);
  for (int I = 0; I < n; ++I)
    for (int J = I; J < n; ++J) {
      if (An(I, J) == 0.0) continue;
      const double w = (I == J) ? An(I, J) : 2.0 * An(I, J);
      Form prod = multiply_quadratics(qt.q[I], qt.q[J]);
      pform.coeffs += w * prod.coeffs;
    }
  Form lifted = multiply_by_norm_power(pform, level);

  SosResult sr = sos_decompose(lifted, tol);
  if (sr.status == SosStatus::SolverFailure) {
    r.solver_failure = true;
    r.witness = "solver_failure";
    return r;
  }
  r.value = sr.t_star;
  r.member = sr.status == SosStatus::Feasible;
  if (r.member) {
    GramCertificate cert = sr.certificate;
    cert.gram *= scale;
    cert.min_eigenvalue *= scale;
    r.gram = std::move(cert);
    r.witness = "sos_gram";
  } else {
    r.witness = "sos_infeasible";
    r.dual_moment = sr.dual_witness;
  }
  return r;
}

int C0Map::entry_index(int I, int J) const {
  // upper-triangular row-major: (I,J) with I <= J
  return I * n - I * (I - 1) / 2 + (J - I);
}

MatrixXd C0Map::apply(const MomentVector& y) const {
  if (y.n != n) throw std::invalid_argument("C0Map: moment vector size");
  MatrixXd out(n, n);
  for (int I = 0; I < n; ++I)
    for (int J = I; J < n; ++J) {
      double v = 0.0;
      for (const auto& [d, c] : entries[entry_index(I, J)]) v += c * y.y[d];
      out(I, J) = v;
      out(J, I) = v;
    }
  return out;
}

C0Map build_c0_map(const ConeSpec& spec) {
  const int n = spec.ambient_dim();
  C0Map map;
  map.n = n;
  map.basis = monomial_basis(n, 4);
  QuadFormTable qt = square_quadratic_forms(spec);
  map.entries.resize(n * (n + 1) / 2);
  for (int I = 0; I < n; ++I)
    for (int J = I; J < n; ++J) {
      Form prod = multiply_quadratics(qt.q[I], qt.q[J]);
      auto& lst = map.entries[map.entry_index(I, J)];
      for (int d = 0; d < prod.basis->size(); ++d)
        if (prod.coeffs[d] != 0.0) lst.emplace_back(d, prod.coeffs[d]);
    }
  return map;
}

MatrixXd nn_c0(const ConeSpec& spec, const MomentVector& y) {
  return build_c0_map(spec).apply(y);
}

MembershipResult nn_membership(const ConeSpec& spec, const MatrixXd& X,
                               double tol) {
  check_square(spec, X);
  MembershipResult r;
  const int n = spec.ambient_dim();
  const double scale = X.norm();
  const MatrixXd Xn = scale > 0 ? MatrixXd(X / scale) : X;

  MomentStructure ms = moment_structure(n);
  C0Map map = build_c0_map(spec);
  const int N2 = ms.half->size();

  // max t s.t. M(y) >= tI and C0(y) = X, on the shifted matrix variable
  BlockConicProgram p;
  const int M = p.add_psd_block(N2);
  const int tb = p.add_free_block(1);
  const int cap = p.add_nonneg_block(1);
  p.obj_vec(tb, 0, -1.0);

  auto entry_coeff = [](int a, int b) { return a == b ? 1.0 : 0.5; };

  // tying rows: X_M[pos] = y - t on diagonal positions and y elsewhere, so
  // positions of one monomial class satisfy
  // X[k] - X[0] + t (diag_k - diag_0) = 0
  for (std::size_t d = 0; d < ms.positions.size(); ++d) {
    const auto& pos = ms.positions[d];
    for (std::size_t k = 1; k < pos.size(); ++k) {
      const int c = p.add_constraint(0.0);
      p.con_mat(c, M, pos[k].first, pos[k].second,
                entry_coeff(pos[k].first, pos[k].second));
      p.con_mat(c, M, pos[0].first, pos[0].second,
                -entry_coeff(pos[0].first, pos[0].second));
      const double tc = (pos[k].first == pos[k].second ? 1.0 : 0.0) -
                        (pos[0].first == pos[0].second ? 1.0 : 0.0);
      if (tc != 0.0) p.con_vec(c, tb, 0, tc);
    }
  }
  // C0 rows on representative positions
  for (int I = 0; I < n; ++I)
    for (int J = I; J < n; ++J) {
      const int c = p.add_constraint(Xn(I, J));
      double tcoef = 0.0;
      for (const auto& [d, coef] : map.entries[map.entry_index(I, J)]) {
        const auto [a, b] = ms.positions[d][0];
        p.con_mat(c, M, a, b, coef * entry_coeff(a, b));
        if (a == b) tcoef += coef;
      }
      if (tcoef != 0.0) p.con_vec(c, tb, 0, tcoef);
    }
  {
    const int c = p.add_constraint(10.0);
    p.con_vec(c, tb, 0, 1.0);
    p.con_vec(c, cap, 0, 1.0);
  }

  Solution sol = solve(p);
  if (!sol.usable(1e-6)) {
    r.solver_failure = true;
    r.witness = to_string(sol.status);
    return r;
  }
  const double t = sol.primal[tb].vec[0];
  r.value = t;
  r.member = t >= -tol;
  if (r.member) {
    MomentVector y(n);
    for (std::size_t d = 0; d < ms.positions.size(); ++d) {
      const auto [a, b] = ms.positions[d][0];
      y.y[static_cast<int>(d)] =
          scale * (sol.primal[M].mat(a, b) + (a == b ? t : 0.0));
    }
    r.moment = std::move(y);
    r.witness = "moment_vector";
  } else {
    r.witness = "no_moment_vector";
  }
  return r;
}

MembershipResult bd_membership(const ConeSpec& spec, const MatrixXd& X,
                               double tol) {
  check_square(spec, X);
  if (spec.has_psd_block())
    throw UnsupportedBlockError(
        "bd_membership over PsdVec blocks is unsupported");
  MembershipResult r;
  const double psd_tol = tol * std::max(1.0, std::abs(X.trace()));
  const double lmin = min_eig_sym(X);
  if (lmin < -psd_tol) {
    r.member = false;
    r.witness = "psd";
    r.value = lmin;
    return r;
  }
  SeparationOutcome so = separate(spec, X, tol);
  if (so.inside) {
    r.member = true;
    r.witness = "bd_checks";
    r.value = lmin;
  } else {
    r.member = false;
    r.witness = std::string("cut_") + to_string(so.source);
    r.value = so.case_value;
    r.cut = std::move(so);
  }
  return r;
}

}  // namespace gdnn
