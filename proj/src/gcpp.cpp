#include "gdnn/gcpp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "gdnn/jordan.hpp"
#include "gdnn/membership.hpp"
#include "gdnn/separation.hpp"

namespace gdnn {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

void add_row_entry(std::vector<MatEntry>& row, int r, int c, double v) {
  if (r > c) std::swap(r, c);
  row.push_back({r, c, v});
}

// Every feasible lifted matrix is singular along the slack-tie directions,
// so the feasible set is exactly {T M T' : M psd over (1, x)} with
// T mapping u -> x and v -> bound - x. Building the relaxations on M keeps
// the values identical and gives the reduced problem a strictly feasible
// point.
MatrixXd lift_reduction(const GcppProblem& g) {
  MatrixXd T = MatrixXd::Zero(g.dim, g.n + 1);
  T(0, 0) = 1.0;
  for (int i = 1; i <= g.n; ++i) {
    T(g.u_coord(i), i) = 1.0;
    T(g.v_coord(i), 0) = (i == 1) ? 2.0 : 1.0;
    T(g.v_coord(i), i) = -1.0;
    T(g.x_coord(i), i) = 1.0;
  }
  return T;
}

MatrixXd dense_row(const GcppProblem& g, const std::vector<MatEntry>& row) {
  MatrixXd A = MatrixXd::Zero(g.dim, g.dim);
  for (const auto& e : row) {
    A(e.row, e.col) += e.value;
    if (e.row != e.col) A(e.col, e.row) += e.value;
  }
  return A;
}

// rows proportional to t0 t0' collapse onto the M00 = 1 row after the
// reduction; they are consistent duplicates and would make the Schur
// system exactly singular
bool reduces_to_homogenization_row(const MatrixXd& At, double rhs) {
  const int m = static_cast<int>(At.rows());
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      if ((i != 0 || j != 0) && At(i, j) != 0.0) return false;
  return std::abs(rhs - At(0, 0)) <= 1e-9 * (1.0 + std::abs(At(0, 0)));
}

void emit_reduced(BlockConicProgram& p, int blk, int con, const MatrixXd& At,
                  bool objective) {
  const int m = static_cast<int>(At.rows());
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j) {
      if (At(i, j) == 0.0) continue;
      if (objective)
        p.obj_mat(blk, i, j, At(i, j));
      else
        p.con_mat(con, blk, i, j, At(i, j));
    }
}

}  // namespace

void MisocpInstance::validate() const {
  if (n < 1) throw std::invalid_argument("instance needs n >= 1");
  if (c.size() != n) throw std::invalid_argument("objective length mismatch");
  for (int i : binary)
    if (i < 2 || i > n)
      throw std::invalid_argument("binary indices must lie in {2,...,n}");
}

GcppProblem burer_reformulate(const MisocpInstance& inst) {
  inst.validate();
  const int n = inst.n;
  GcppProblem g;
  g.n = n;
  g.dim = 3 * n + 1;
  g.cone = ConeSpec({{BlockKind::Nonneg, 2 * n + 1},
                     {BlockKind::SecondOrder, n}});
  g.objective = MatrixXd::Zero(g.dim, g.dim);
  for (int i = 1; i <= n; ++i) {
    g.objective(0, g.x_coord(i)) = 0.5 * inst.c[i - 1];
    g.objective(g.x_coord(i), 0) = 0.5 * inst.c[i - 1];
  }

  std::vector<double> rhs;
  // Y00 = 1
  {
    std::vector<MatEntry> row;
    add_row_entry(row, 0, 0, 1.0);
    g.rows.push_back(std::move(row));
    rhs.push_back(1.0);
  }
  // linear system rows a'z = b on the first column, and their squared
  // diagonal counterparts a' Z a = b^2
  auto push_linear = [&](const std::vector<std::pair<int, double>>& a,
                         double b) {
    std::vector<MatEntry> row;
    for (auto [coord, v] : a) add_row_entry(row, 0, coord, 0.5 * v);
    g.rows.push_back(std::move(row));
    rhs.push_back(b);

    std::vector<MatEntry> diag;
    for (std::size_t p = 0; p < a.size(); ++p)
      for (std::size_t q = p; q < a.size(); ++q)
        add_row_entry(diag, a[p].first, a[q].first,
                      a[p].second * a[q].second);
    g.rows.push_back(std::move(diag));
    rhs.push_back(b * b);
  };
  for (int i = 1; i <= n; ++i)
    push_linear({{g.x_coord(i), 1.0}, {g.u_coord(i), -1.0}}, 0.0);
  for (int i = 1; i <= n; ++i)
    push_linear({{g.x_coord(i), 1.0}, {g.v_coord(i), 1.0}},
                i == 1 ? 2.0 : 1.0);
  // binary links -Z_ii + z_i = 0
  for (int i : inst.binary) {
    std::vector<MatEntry> row;
    add_row_entry(row, g.x_coord(i), g.x_coord(i), -1.0);
    add_row_entry(row, 0, g.x_coord(i), 0.5);
    g.rows.push_back(std::move(row));
    rhs.push_back(0.0);
  }
  g.rhs = Eigen::Map<VectorXd>(rhs.data(), static_cast<long>(rhs.size()));
  return g;
}

double GcppProblem::row_value(int r, const MatrixXd& Y) const {
  double v = 0.0;
  for (const auto& e : rows[r])
    v += (e.row == e.col ? 1.0 : 2.0) * e.value * Y(e.row, e.col);
  return v;
}

VectorXd lifted_point(const MisocpInstance& inst, const VectorXd& x) {
  const int n = inst.n;
  if (x.size() != n) throw std::invalid_argument("point length mismatch");
  VectorXd z(3 * n + 1);
  z[0] = 1.0;
  for (int i = 1; i <= n; ++i) {
    z[i] = x[i - 1];                                  // u = x
    z[n + i] = (i == 1 ? 2.0 : 1.0) - x[i - 1];       // v = bound - x
    z[2 * n + i] = x[i - 1];
  }
  return z;
}

RelaxationVariant relaxation_variant_from_string(const std::string& s) {
  if (s == "sdp") return RelaxationVariant::Sdp;
  if (s == "zvp") return RelaxationVariant::Zvp;
  if (s == "nn") return RelaxationVariant::Nn;
  throw std::invalid_argument("unknown relaxation variant: " + s);
}

RelaxationBuild build_relaxation(const GcppProblem& g, RelaxationVariant v,
                                 double sdp_reg) {
  RelaxationBuild out;
  out.variant = v;
  BlockConicProgram& p = out.program;

  if (v == RelaxationVariant::Sdp || v == RelaxationVariant::Zvp) {
    const MatrixXd T = lift_reduction(g);
    const int M = p.add_psd_block(g.n + 1);
    out.y_block = M;
    {
      MatrixXd C = g.objective;
      if (v == RelaxationVariant::Sdp)
        C += sdp_reg * MatrixXd::Identity(g.dim, g.dim);
      MatrixXd Ct = T.transpose() * C * T;
      emit_reduced(p, M, 0, Ct, true);
    }
    bool have_homogenization = false;
    for (std::size_t r = 0; r < g.rows.size(); ++r) {
      MatrixXd At = T.transpose() * dense_row(g, g.rows[r]) * T;
      if (At.cwiseAbs().maxCoeff() < 1e-14) continue;  // slack-tie row
      if (reduces_to_homogenization_row(At, g.rhs[static_cast<int>(r)])) {
        if (have_homogenization) continue;
        have_homogenization = true;
      }
      const int c = p.add_constraint(g.rhs[static_cast<int>(r)]);
      emit_reduced(p, M, c, At, false);
    }
    if (v == RelaxationVariant::Zvp) {
      ZvpGenerators gen = zvp_generators(g.cone);
      const auto& idx = gen.nonneg_index_set;
      const int nn = static_cast<int>(idx.size());
      const int slack =
          p.add_nonneg_block(static_cast<int>(gen.j_mats.size()) +
                             nn * (nn + 1) / 2);
      int k = 0;
      for (const auto& J : gen.j_mats) {
        const int c = p.add_constraint(0.0);
        emit_reduced(p, M, c, MatrixXd(T.transpose() * J * T), false);
        p.con_vec(c, slack, k++, -1.0);
      }
      for (int a = 0; a < nn; ++a)
        for (int b = a; b < nn; ++b) {
          MatrixXd E = MatrixXd::Zero(g.dim, g.dim);
          E(idx[a], idx[b]) += 0.5;
          E(idx[b], idx[a]) += 0.5;
          const int c = p.add_constraint(0.0);
          emit_reduced(p, M, c, MatrixXd(T.transpose() * E * T), false);
          p.con_vec(c, slack, k++, -1.0);
        }
    }
    return out;
  }

  // NN: decision vector y over I(dim, 4), encoded through the psd moment
  // matrix M(y) with tying constraints; objective and equality rows act on
  // C0(y) through the coefficient map
  check_basis_cap(g.dim, 4);
  MomentStructure ms = moment_structure(g.dim);
  C0Map map = build_c0_map(g.cone);
  const int N2 = ms.half->size();
  const int N4 = ms.full->size();
  const int M = p.add_psd_block(N2);
  out.y_block = M;
  auto ec = [](int a, int b) { return a == b ? 1.0 : 0.5; };

  auto lift_functional = [&](const std::vector<MatEntry>& row) {
    VectorXd gvec = VectorXd::Zero(N4);
    for (const auto& e : row) {
      const double w = (e.row == e.col ? 1.0 : 2.0) * e.value;
      for (const auto& [d, coef] : map.entries[map.entry_index(e.row, e.col)])
        gvec[d] += w * coef;
    }
    return gvec;
  };

  {
    std::vector<MatEntry> crow;
    for (int i = 0; i < g.dim; ++i)
      for (int j = i; j < g.dim; ++j)
        if (g.objective(i, j) != 0.0)
          crow.push_back({i, j, g.objective(i, j)});
    VectorXd gv = lift_functional(crow);
    for (int d = 0; d < N4; ++d)
      if (gv[d] != 0.0) {
        const auto [a, b] = ms.positions[d][0];
        p.obj_mat(M, a, b, gv[d] * ec(a, b));
      }
  }
  for (std::size_t d = 0; d < ms.positions.size(); ++d) {
    const auto& pos = ms.positions[d];
    for (std::size_t k = 1; k < pos.size(); ++k) {
      const int c = p.add_constraint(0.0);
      p.con_mat(c, M, pos[k].first, pos[k].second,
                ec(pos[k].first, pos[k].second));
      p.con_mat(c, M, pos[0].first, pos[0].second,
                -ec(pos[0].first, pos[0].second));
    }
  }
  for (std::size_t r = 0; r < g.rows.size(); ++r) {
    VectorXd gv = lift_functional(g.rows[r]);
    const int c = p.add_constraint(g.rhs[static_cast<int>(r)]);
    for (int d = 0; d < N4; ++d)
      if (gv[d] != 0.0) {
        const auto [a, b] = ms.positions[d][0];
        p.con_mat(c, M, a, b, gv[d] * ec(a, b));
      }
  }
  return out;
}

MatrixXd recover_lifted_matrix(const GcppProblem& g,
                               const RelaxationBuild& build,
                               const Solution& sol) {
  if (build.variant != RelaxationVariant::Nn) {
    const MatrixXd T = lift_reduction(g);
    return T * sol.primal[build.y_block].mat * T.transpose();
  }
  MomentStructure ms = moment_structure(g.dim);
  MomentVector y(g.dim);
  for (std::size_t d = 0; d < ms.positions.size(); ++d) {
    const auto [a, b] = ms.positions[d][0];
    y.y[static_cast<int>(d)] = sol.primal[build.y_block].mat(a, b);
  }
  return nn_c0(g.cone, y);
}

ExchangeResult solve_bd_exchange(const GcppProblem& g,
                                 const ExchangeParams& params,
                                 CounterRng& rng) {
  if (g.cone.has_psd_block())
    throw UnsupportedBlockError("exchange method needs a nonneg x soc cone");
  ExchangeResult out;
  const int dim = g.dim;
  const MatrixXd T = lift_reduction(g);

  // fixed idempotent pool: the unit vectors of the nonneg part plus random
  // second-order idempotents
  std::vector<VectorXd> jfix = nonneg_unit_idempotents(g.cone);
  int soc_block = -1;
  for (int h = 0; h < g.cone.num_blocks(); ++h)
    if (g.cone.block(h).kind == BlockKind::SecondOrder) soc_block = h;
  for (int k = 0; k < params.fixed_soc_samples && soc_block >= 0; ++k)
    jfix.push_back(sample_primitive_idempotent(g.cone, soc_block, rng));

  std::vector<VectorXd> cuts;

  auto solve_subproblem = [&](Solution& sol,
                              std::vector<double>& cut_dual_norms) -> bool {
    BlockConicProgram p;
    const int M = p.add_psd_block(g.n + 1);
    emit_reduced(p, M, 0, MatrixXd(T.transpose() * g.objective * T), true);
    bool have_homogenization = false;
    for (std::size_t r = 0; r < g.rows.size(); ++r) {
      MatrixXd At = T.transpose() * dense_row(g, g.rows[r]) * T;
      if (At.cwiseAbs().maxCoeff() < 1e-14) continue;  // slack-tie row
      if (reduces_to_homogenization_row(At, g.rhs[static_cast<int>(r)])) {
        if (have_homogenization) continue;
        have_homogenization = true;
      }
      const int c = p.add_constraint(g.rhs[static_cast<int>(r)]);
      emit_reduced(p, M, c, At, false);
    }
    std::vector<int> first_row(cuts.size());
    for (std::size_t s = 0; s < cuts.size(); ++s) {
      // Ys - w = 0 with w in K, one row per coordinate, expressed on M
      std::vector<int> wblk(g.cone.num_blocks());
      for (int h = 0; h < g.cone.num_blocks(); ++h)
        wblk[h] = g.cone.block(h).kind == BlockKind::Nonneg
                      ? p.add_nonneg_block(g.cone.block(h).dim)
                      : p.add_soc_block(g.cone.block(h).dim);
      first_row[s] = p.num_constraints();
      const VectorXd sigma = T.transpose() * cuts[s];
      for (int h = 0; h < g.cone.num_blocks(); ++h) {
        const int off = g.cone.block_offset(h);
        for (int local = 0; local < g.cone.block(h).dim; ++local) {
          const int c0 = off + local;
          const VectorXd tc = T.row(c0);
          MatrixXd At =
              0.5 * (tc * sigma.transpose() + sigma * tc.transpose());
          const int c = p.add_constraint(0.0);
          emit_reduced(p, M, c, At, false);
          p.con_vec(c, wblk[h], local, -1.0);
        }
      }
    }
    sol = solve(p, params.solver);
    ++out.subproblem_solves;
    if (!sol.usable(1e-6)) return false;
    cut_dual_norms.assign(cuts.size(), 0.0);
    for (std::size_t s = 0; s < cuts.size(); ++s)
      cut_dual_norms[s] = sol.dual.segment(first_row[s], dim).norm();
    return true;
  };

  Solution sol;
  std::vector<double> dual_norms;
  if (!solve_subproblem(sol, dual_norms)) {
    // the empty-cut subproblem is unbounded whenever the objective touches a
    // continuous coordinate; seed the unit idempotents and retry
    cuts = nonneg_unit_idempotents(g.cone);
    if (!solve_subproblem(sol, dual_norms)) {
      out.status = sol.status;
      return out;
    }
  }

  int total_inner = 0;
  double gamma = 1.0;
  bool accelerate = false;
  const VectorXd e = identity_element(g.cone);
  for (int outer = 0;; ++outer) {
    gamma = accelerate ? params.tau : std::pow(0.5, outer);
    int added_this_round = 0;
    for (;;) {
      MatrixXd Y = T * sol.primal[0].mat * T.transpose();
      // next violated idempotent: fixed pool first, then the oracle
      VectorXd snew;
      std::string source;
      double worst = -gamma;
      for (const auto& s : jfix) {
        const double v = min_eigenvalue(g.cone, Y * s);
        if (v < worst) {
          worst = v;
          snew = s;
          source = "jfix";
        }
      }
      if (snew.size() == 0) {
        SeparationOutcome so = separate(g.cone, Y, gamma);
        if (!so.inside) {
          snew = so.witness;
          source = to_string(so.source);
        }
      }
      if (snew.size() == 0) break;  // case (b): no violation at this gamma

      cuts.push_back(snew);
      ++added_this_round;
      if (++total_inner > params.max_inner_total) {
        out.status = SolveStatus::MaxIter;
        out.value = sol.primal_obj;
        out.lifted = T * sol.primal[0].mat * T.transpose();
        out.final_active_cuts = static_cast<int>(cuts.size());
        return out;
      }
      if (!solve_subproblem(sol, dual_norms)) {
        out.status = sol.status;
        out.value = sol.primal_obj;
        out.lifted = T * sol.primal[0].mat * T.transpose();
        return out;
      }
      // prune cuts whose multipliers vanished
      std::vector<VectorXd> kept;
      for (std::size_t s = 0; s < cuts.size(); ++s)
        if (dual_norms[s] > params.dual_prune) kept.push_back(cuts[s]);
      cuts.swap(kept);

      out.trace.push_back({outer, added_this_round,
                           static_cast<int>(cuts.size()), sol.primal_obj,
                           gamma, source});
    }
    out.trace.push_back({outer, added_this_round,
                         static_cast<int>(cuts.size()), sol.primal_obj, gamma,
                         ""});
    if (gamma <= params.tau) break;
    accelerate = added_this_round >= params.accel_consecutive;
  }

  // normal termination with a usable final subproblem counts as solved
  out.status = sol.usable(1e-6) ? SolveStatus::Optimal : sol.status;
  out.value = sol.primal_obj;
  out.lifted = T * sol.primal[0].mat * T.transpose();
  out.final_active_cuts = static_cast<int>(cuts.size());
  return out;
}

BruteForceResult misocp_bruteforce(const MisocpInstance& inst,
                                   const SolverOptions& opts) {
  inst.validate();
  if (inst.binary.size() > 25)
    throw std::invalid_argument("too many binary variables to enumerate");
  const int n = inst.n;
  const int nb = static_cast<int>(inst.binary.size());
  BruteForceResult out;

  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << nb); ++mask) {
    ++out.branches;
    double fixed_sq = 0.0;
    std::vector<double> fix(nb);
    for (int k = 0; k < nb; ++k) {
      fix[k] = (mask >> k) & 1 ? 1.0 : 0.0;
      fixed_sq += fix[k];
    }
    if (fixed_sq > 4.0 + 1e-12) {
      ++out.infeasible_branches;
      continue;
    }
    if (std::abs(fixed_sq - 4.0) <= 1e-12) {
      // unique feasible point: x1 = 2, all continuous coordinates 0
      VectorXd x = VectorXd::Zero(n);
      x[0] = 2.0;
      for (int k = 0; k < nb; ++k) x[inst.binary[k] - 1] = fix[k];
      const double val = inst.c.dot(x);
      if (val < out.value) {
        out.value = val;
        out.argmin = x;
      }
      continue;
    }

    BlockConicProgram p;
    const int xb = p.add_soc_block(n);
    std::vector<bool> is_binary(n + 1, false);
    for (int i : inst.binary) is_binary[i] = true;
    int nslack = 1;  // x1 upper bound
    for (int i = 2; i <= n; ++i)
      if (!is_binary[i]) nslack += 2;
    const int sb = p.add_nonneg_block(nslack);
    for (int i = 0; i < n; ++i) p.obj_vec(xb, i, inst.c[i]);
    int sk = 0;
    {
      const int c = p.add_constraint(2.0);  // x1 + s = 2
      p.con_vec(c, xb, 0, 1.0);
      p.con_vec(c, sb, sk++, 1.0);
    }
    for (int k = 0; k < nb; ++k) {
      const int c = p.add_constraint(fix[k]);
      p.con_vec(c, xb, inst.binary[k] - 1, 1.0);
    }
    for (int i = 2; i <= n; ++i) {
      if (is_binary[i]) continue;
      int c = p.add_constraint(0.0);  // x_i - u = 0
      p.con_vec(c, xb, i - 1, 1.0);
      p.con_vec(c, sb, sk++, -1.0);
      c = p.add_constraint(1.0);  // x_i + v = 1
      p.con_vec(c, xb, i - 1, 1.0);
      p.con_vec(c, sb, sk++, 1.0);
    }
    Solution sol = solve(p, opts);
    if (!sol.usable(1e-6)) {
      if (sol.status == SolveStatus::PrimalInfeasible)
        ++out.infeasible_branches;
      else
        ++out.failed_branches;
      continue;
    }
    if (sol.primal_obj < out.value) {
      out.value = sol.primal_obj;
      out.argmin = sol.primal[xb].vec;
    }
  }
  return out;
}

}  // namespace gdnn
