#include "gdnn/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace gdnn {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// second-order cone (arrow) algebra on plain vectors

double soc_det(const VectorXd& x) {
  return x[0] * x[0] - x.tail(x.size() - 1).squaredNorm();
}

VectorXd soc_prod(const VectorXd& x, const VectorXd& y) {
  VectorXd out(x.size());
  out[0] = x.dot(y);
  out.tail(x.size() - 1) =
      x[0] * y.tail(y.size() - 1) + y[0] * x.tail(x.size() - 1);
  return out;
}

VectorXd soc_sqrt(const VectorXd& x) {
  const double nrm = x.tail(x.size() - 1).norm();
  const double lp = x[0] + nrm, lm = x[0] - nrm;
  if (lm < 0) throw std::domain_error("soc_sqrt of non-member");
  const double sp = std::sqrt(lp), sm = std::sqrt(lm);
  VectorXd out(x.size());
  out[0] = 0.5 * (sp + sm);
  if (nrm > 0)
    out.tail(x.size() - 1) = (0.5 * (sp - sm) / nrm) * x.tail(x.size() - 1);
  else
    out.tail(x.size() - 1).setZero();
  return out;
}

VectorXd soc_inv(const VectorXd& x) {
  const double d = soc_det(x);
  VectorXd out(x.size());
  out[0] = x[0] / d;
  out.tail(x.size() - 1) = -x.tail(x.size() - 1) / d;
  return out;
}

// P(u)v = 2u(u'v) - det(u) Rv with Rv = (v1, -vbar)
VectorXd soc_quad_rep(const VectorXd& u, const VectorXd& v) {
  const double d = soc_det(u);
  VectorXd out = 2.0 * u.dot(v) * u;
  out[0] -= d * v[0];
  out.tail(u.size() - 1) += d * v.tail(v.size() - 1);
  return out;
}

// solve L(lam) u = v for the arrow operator L(lam)
VectorXd soc_lsolve(const VectorXd& lam, const VectorXd& v) {
  const double det = soc_det(lam);
  const auto lbar = lam.tail(lam.size() - 1);
  const auto vbar = v.tail(v.size() - 1);
  VectorXd out(lam.size());
  out[0] = (lam[0] * v[0] - lbar.dot(vbar)) / det;
  out.tail(lam.size() - 1) = (vbar - out[0] * lbar) / lam[0];
  return out;
}

double soc_step_to_boundary(const VectorXd& x, const VectorXd& dx) {
  const double a = soc_det(dx);
  const double b = 2.0 * (x[0] * dx[0] -
                          x.tail(x.size() - 1).dot(dx.tail(dx.size() - 1)));
  const double c = soc_det(x);
  double best = kInf;
  if (a == 0.0) {
    if (b < 0) best = -c / b;
  } else {
    const double disc = b * b - 4 * a * c;
    if (disc >= 0) {
      // cancellation-safe root pair q/a, c/q
      const double sq = std::sqrt(disc);
      const double q = -0.5 * (b + (b >= 0 ? sq : -sq));
      if (q != 0.0) {
        const double r = c / q;
        if (r > 0) best = std::min(best, r);
      }
      const double r = q / a;
      if (r > 0) best = std::min(best, r);
    }
  }
  return best;
}

// ---------------------------------------------------------------------------

struct Scaling {
  // Psd
  MatrixXd R, Rinv, W;
  VectorXd d;  // scaled point eigenvalues
  // Soc
  VectorXd w, whalf, whalfinv, lam;
  // Nonneg
  VectorXd wdiag, lamdiag;
};

struct Iterate {
  std::vector<BlockValue> x;  // cone and free blocks
  std::vector<BlockValue> s;  // dual slacks (cone blocks only)
  VectorXd y;
};

class Ipm {
 public:
  Ipm(const BlockConicProgram& prog, const SolverOptions& opts)
      : p_(prog), opts_(opts), m_(prog.num_constraints()),
        nb_(prog.num_blocks()) {
    p_.validate();
    b_ = p_.rhs();
    for (int blk = 0; blk < nb_; ++blk) {
      const auto& vb = p_.block(blk);
      if (vb.kind == VarKind::Free) {
        free_blocks_.push_back(blk);
        nfree_ += vb.size;
      } else {
        cone_blocks_.push_back(blk);
        switch (vb.kind) {
          case VarKind::Psd: nu_ += vb.size; break;
          case VarKind::Soc: nu_ += 2; break;
          case VarKind::Nonneg: nu_ += vb.size; break;
          default: break;
        }
      }
    }
    build_touch_lists();
  }

  Solution run();

 private:
  void build_touch_lists();
  void initialize(Iterate& it) const;
  void compute_residuals(const Iterate& it);
  bool compute_scalings(const Iterate& it);
  void assemble_schur();
  bool factorize();
  // Solve the bordered KKT system for (dy, dfree).
  bool solve_kkt(const VectorXd& rhs_y, const VectorXd& rhs_f, VectorXd& dy,
                 VectorXd& df) const;
  // One Newton solve given the scaled complementarity targets g.
  void newton(const Iterate& it, const std::vector<BlockValue>& g,
              std::vector<BlockValue>& dx, VectorXd& dfree, VectorXd& dy,
              std::vector<BlockValue>& ds) const;
  double step_primal(const Iterate& it, const std::vector<BlockValue>& dx) const;
  double step_dual(const Iterate& it, const std::vector<BlockValue>& ds) const;
  bool iterate_interior(const Iterate& it) const;

  // linear operator helpers
  VectorXd apply_A(const std::vector<BlockValue>& v) const;
  void apply_At(const VectorXd& y, std::vector<BlockValue>& out) const;
  std::vector<BlockValue> zero_blocks(bool cone_only) const;

  // scaling applications on one block
  BlockValue apply_W2(int blk, const BlockValue& v) const;       // P(w)
  BlockValue unscale_primal(int blk, const BlockValue& g) const; // R g R'
  BlockValue scale_primal(int blk, const BlockValue& v) const;   // Rinv v Rinv'
  BlockValue scale_dual(int blk, const BlockValue& v) const;     // R' v R
  BlockValue scaled_prod(int blk, const BlockValue& a, const BlockValue& b) const;
  BlockValue lambda_solve(int blk, const BlockValue& g) const;
  BlockValue lambda_block(int blk) const;

  const BlockConicProgram& p_;
  SolverOptions opts_;
  int m_;
  int nb_;
  int nfree_ = 0;
  double nu_ = 0.0;
  VectorXd b_;
  std::vector<int> cone_blocks_, free_blocks_;
  // per block: list of (constraint index) touching it
  std::vector<std::vector<int>> touch_;

  // iteration workspace
  std::vector<Scaling> scal_;
  MatrixXd schur_;
  MatrixXd fmat_;  // m x nfree
  Eigen::LLT<MatrixXd> llt_;
  MatrixXd minv_f_;
  Eigen::PartialPivLU<MatrixXd> border_lu_;
  VectorXd rp_, rf_;
  std::vector<BlockValue> rd_;
  double pobj_ = 0, dobj_ = 0, mu_ = 0;
  mutable std::string last_note_;
  double rel_gap_ = kInf, rel_p_ = kInf, rel_d_ = kInf;
  double bnorm_ = 1, cnorm_ = 1;
};

void Ipm::build_touch_lists() {
  touch_.assign(nb_, {});
  for (int i = 0; i < m_; ++i) {
    const auto& row = p_.constraint(i);
    for (int blk = 0; blk < nb_; ++blk) {
      if (!row.mat[blk].empty() || !row.vec[blk].empty())
        touch_[blk].push_back(i);
    }
  }
  fmat_.resize(m_, nfree_);
  fmat_.setZero();
  int col0 = 0;
  for (int fb : free_blocks_) {
    for (int i : touch_[fb])
      for (const auto& e : p_.constraint(i).vec[fb])
        fmat_(i, col0 + e.index) += e.value;
    col0 += p_.block(fb).size;
  }
}

std::vector<BlockValue> Ipm::zero_blocks(bool cone_only) const {
  std::vector<BlockValue> out(nb_);
  for (int blk = 0; blk < nb_; ++blk) {
    const auto& vb = p_.block(blk);
    if (vb.kind == VarKind::Psd)
      out[blk].mat = MatrixXd::Zero(vb.size, vb.size);
    else if (vb.kind != VarKind::Free || !cone_only)
      out[blk].vec = VectorXd::Zero(vb.size);
  }
  return out;
}

void Ipm::initialize(Iterate& it) const {
  it.x = zero_blocks(false);
  it.s = zero_blocks(true);
  it.y = VectorXd::Zero(m_);
  double bmax = m_ > 0 ? b_.cwiseAbs().maxCoeff() : 0.0;
  double cmax = 0.0;
  for (int blk = 0; blk < nb_; ++blk) {
    for (const auto& e : p_.objective().mat[blk]) cmax = std::max(cmax, std::abs(e.value));
    for (const auto& e : p_.objective().vec[blk]) cmax = std::max(cmax, std::abs(e.value));
  }
  const double xi = opts_.init_scale * std::max(1.0, bmax);
  const double eta = opts_.init_scale * std::max(1.0, cmax);
  for (int blk : cone_blocks_) {
    const auto& vb = p_.block(blk);
    switch (vb.kind) {
      case VarKind::Psd:
        it.x[blk].mat = xi * MatrixXd::Identity(vb.size, vb.size);
        it.s[blk].mat = eta * MatrixXd::Identity(vb.size, vb.size);
        break;
      case VarKind::Soc:
        it.x[blk].vec.setZero();
        it.x[blk].vec[0] = xi;
        it.s[blk].vec.setZero();
        it.s[blk].vec[0] = eta;
        break;
      case VarKind::Nonneg:
        it.x[blk].vec.setConstant(xi);
        it.s[blk].vec.setConstant(eta);
        break;
      default:
        break;
    }
  }
}

VectorXd Ipm::apply_A(const std::vector<BlockValue>& v) const {
  VectorXd out = VectorXd::Zero(m_);
  for (int i = 0; i < m_; ++i)
    out[i] = block_inner(p_.constraint(i), v, p_.blocks());
  return out;
}

void Ipm::apply_At(const VectorXd& y, std::vector<BlockValue>& out) const {
  for (int blk = 0; blk < nb_; ++blk) {
    const auto& vb = p_.block(blk);
    if (vb.kind == VarKind::Psd) {
      out[blk].mat.setZero();
      for (int i : touch_[blk]) {
        const double yi = y[i];
        if (yi == 0.0) continue;
        for (const auto& e : p_.constraint(i).mat[blk]) {
          out[blk].mat(e.row, e.col) += yi * e.value;
          if (e.row != e.col) out[blk].mat(e.col, e.row) += yi * e.value;
        }
      }
    } else {
      out[blk].vec.setZero();
      for (int i : touch_[blk]) {
        const double yi = y[i];
        if (yi == 0.0) continue;
        for (const auto& e : p_.constraint(i).vec[blk])
          out[blk].vec[e.index] += yi * e.value;
      }
    }
  }
}

void Ipm::compute_residuals(const Iterate& it) {
  // objective values
  pobj_ = block_inner(p_.objective(), it.x, p_.blocks());
  dobj_ = b_.dot(it.y);

  rp_ = b_ - apply_A(it.x);

  std::vector<BlockValue> aty = zero_blocks(false);
  apply_At(it.y, aty);
  rd_ = zero_blocks(false);
  double dmax = 0.0;
  for (int blk = 0; blk < nb_; ++blk) {
    const auto& vb = p_.block(blk);
    if (vb.kind == VarKind::Free) {
      rd_[blk].vec = -aty[blk].vec;
      for (const auto& e : p_.objective().vec[blk])
        rd_[blk].vec[e.index] += e.value;
      dmax = std::max(dmax, rd_[blk].vec.cwiseAbs().maxCoeff());
    } else if (vb.kind == VarKind::Psd) {
      rd_[blk].mat = -aty[blk].mat - it.s[blk].mat;
      for (const auto& e : p_.objective().mat[blk]) {
        rd_[blk].mat(e.row, e.col) += e.value;
        if (e.row != e.col) rd_[blk].mat(e.col, e.row) += e.value;
      }
      dmax = std::max(dmax, rd_[blk].mat.cwiseAbs().maxCoeff());
    } else {
      rd_[blk].vec = -aty[blk].vec - it.s[blk].vec;
      for (const auto& e : p_.objective().vec[blk])
        rd_[blk].vec[e.index] += e.value;
      dmax = std::max(dmax, rd_[blk].vec.cwiseAbs().maxCoeff());
    }
  }

  double gap = 0.0;
  for (int blk : cone_blocks_) {
    const auto& vb = p_.block(blk);
    if (vb.kind == VarKind::Psd)
      gap += (it.x[blk].mat.array() * it.s[blk].mat.array()).sum();
    else
      gap += it.x[blk].vec.dot(it.s[blk].vec);
  }
  mu_ = nu_ > 0 ? gap / nu_ : 0.0;

  rel_gap_ = std::abs(pobj_ - dobj_) / (1.0 + std::abs(pobj_) + std::abs(dobj_));
  rel_p_ = (m_ > 0 ? rp_.cwiseAbs().maxCoeff() : 0.0) / bnorm_;
  rel_d_ = dmax / cnorm_;
}

bool Ipm::compute_scalings(const Iterate& it) {
  scal_.assign(nb_, Scaling{});
  for (int blk : cone_blocks_) {
    const auto& vb = p_.block(blk);
    Scaling& sc = scal_[blk];
    switch (vb.kind) {
      case VarKind::Psd: {
        Eigen::LLT<MatrixXd> lltx(it.x[blk].mat);
        if (lltx.info() != Eigen::Success) return false;
        MatrixXd L = lltx.matrixL();
        MatrixXd M = L.transpose() * it.s[blk].mat * L;
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(M);
        if (es.info() != Eigen::Success) return false;
        if (es.eigenvalues().minCoeff() <= 0) return false;
        VectorXd dq = es.eigenvalues().array().pow(0.25);  // D^{1/4}
        sc.R = L * es.eigenvectors() * dq.cwiseInverse().asDiagonal();
        // Rinv = D^{1/4} U' L^{-1}
        sc.Rinv = dq.asDiagonal() * es.eigenvectors().transpose() *
                  L.triangularView<Eigen::Lower>().solve(
                      MatrixXd::Identity(vb.size, vb.size));
        sc.W = sc.R * sc.R.transpose();
        sc.d = es.eigenvalues().array().sqrt();
        break;
      }
      case VarKind::Soc: {
        if (soc_det(it.x[blk].vec) <= 0 || it.x[blk].vec[0] <= 0) return false;
        if (soc_det(it.s[blk].vec) <= 0 || it.s[blk].vec[0] <= 0) return false;
        VectorXd xh = soc_sqrt(it.x[blk].vec);
        VectorXd z = soc_quad_rep(xh, it.s[blk].vec);
        VectorXd zmh = soc_inv(soc_sqrt(z));
        sc.w = soc_quad_rep(xh, zmh);
        sc.whalf = soc_sqrt(sc.w);
        sc.whalfinv = soc_inv(sc.whalf);
        sc.lam = soc_quad_rep(sc.whalfinv, it.x[blk].vec);
        if (soc_det(sc.lam) <= 0) return false;
        break;
      }
      case VarKind::Nonneg: {
        if (it.x[blk].vec.minCoeff() <= 0 || it.s[blk].vec.minCoeff() <= 0)
          return false;
        sc.wdiag = (it.x[blk].vec.array() / it.s[blk].vec.array()).sqrt().matrix();
        sc.lamdiag = (it.x[blk].vec.array() * it.s[blk].vec.array()).sqrt().matrix();
        break;
      }
      default:
        break;
    }
  }
  return true;
}

void Ipm::assemble_schur() {
  schur_.setZero(m_, m_);
  for (int blk : cone_blocks_) {
    const auto& vb = p_.block(blk);
    const auto& rows = touch_[blk];
    const Scaling& sc = scal_[blk];
    if (vb.kind == VarKind::Psd) {
      const MatrixXd& W = sc.W;
      // scaled entry values: off-diagonals count twice
      std::vector<std::vector<MatEntry>> ent(rows.size());
      for (std::size_t a = 0; a < rows.size(); ++a) {
        ent[a] = p_.constraint(rows[a]).mat[blk];
        for (auto& e : ent[a])
          if (e.row != e.col) e.value *= 2.0;
      }
      for (std::size_t a = 0; a < rows.size(); ++a) {
        for (std::size_t c = a; c < rows.size(); ++c) {
          double acc = 0.0;
          for (const auto& ea : ent[a])
            for (const auto& ec : ent[c])
              acc += ea.value * ec.value *
                     (W(ea.row, ec.row) * W(ea.col, ec.col) +
                      W(ea.row, ec.col) * W(ea.col, ec.row));
          schur_(rows[a], rows[c]) += 0.5 * acc;
          if (a != c) schur_(rows[c], rows[a]) += 0.5 * acc;
        }
      }
    } else if (vb.kind == VarKind::Soc) {
      const int d = vb.size;
      const int t = static_cast<int>(rows.size());
      MatrixXd cols = MatrixXd::Zero(d, t);
      for (int a = 0; a < t; ++a)
        for (const auto& e : p_.constraint(rows[a]).vec[blk])
          cols(e.index, a) += e.value;
      VectorXd u = cols.transpose() * sc.w;
      const double det = soc_det(sc.w);
      MatrixXd rcols = cols;
      rcols.bottomRows(d - 1) *= -1.0;
      MatrixXd sub = 2.0 * u * u.transpose() - det * (cols.transpose() * rcols);
      for (int a = 0; a < t; ++a)
        for (int c = 0; c < t; ++c) schur_(rows[a], rows[c]) += sub(a, c);
    } else if (vb.kind == VarKind::Nonneg) {
      // scatter by coordinate
      const VectorXd w2 = sc.wdiag.array().square();
      std::vector<std::vector<VecEntry>> bycoord(vb.size);
      for (int i : rows)
        for (const auto& e : p_.constraint(i).vec[blk])
          bycoord[e.index].push_back({i, e.value});
      for (int k = 0; k < vb.size; ++k) {
        const auto& lst = bycoord[k];
        for (std::size_t a = 0; a < lst.size(); ++a)
          for (std::size_t c = a; c < lst.size(); ++c) {
            double v = w2[k] * lst[a].value * lst[c].value;
            schur_(lst[a].index, lst[c].index) += v;
            if (a != c) schur_(lst[c].index, lst[a].index) += v;
          }
      }
    }
  }
}

bool Ipm::factorize() {
  double reg = 0.0;
  const double scale =
      m_ > 0 ? schur_.diagonal().cwiseAbs().maxCoeff() : 1.0;
  for (int attempt = 0; attempt < 4; ++attempt) {
    MatrixXd M = schur_;
    if (reg > 0) M.diagonal().array() += reg;
    llt_.compute(M);
    if (llt_.info() == Eigen::Success) {
      if (nfree_ > 0) {
        minv_f_ = llt_.solve(fmat_);
        MatrixXd small = fmat_.transpose() * minv_f_;
        border_lu_.compute(small);
      }
      return true;
    }
    reg = (reg == 0.0) ? 1e-12 * std::max(1.0, scale) : reg * 1000.0;
  }
  return false;
}

bool Ipm::solve_kkt(const VectorXd& rhs_y, const VectorXd& rhs_f, VectorXd& dy,
                    VectorXd& df) const {
  const double rnorm0 = rhs_y.norm() + rhs_f.norm();
  if (nfree_ == 0) {
    dy = llt_.solve(rhs_y);
    for (int round = 0; round < 3; ++round) {
      VectorXd r = rhs_y - schur_ * dy;
      if (r.norm() <= 1e-13 * (1.0 + rnorm0)) break;
      dy += llt_.solve(r);
    }
    df.resize(0);
    return true;
  }
  VectorXd t1 = llt_.solve(rhs_y);
  df = border_lu_.solve(fmat_.transpose() * t1 - rhs_f);
  dy = t1 - minv_f_ * df;
  for (int round = 0; round < 3; ++round) {
    VectorXd ry = rhs_y - schur_ * dy - fmat_ * df;
    VectorXd rf = rhs_f - fmat_.transpose() * dy;
    if (ry.norm() + rf.norm() <= 1e-13 * (1.0 + rnorm0)) break;
    VectorXd t2 = llt_.solve(ry);
    VectorXd df2 = border_lu_.solve(fmat_.transpose() * t2 - rf);
    df += df2;
    dy += t2 - minv_f_ * df2;
  }
  return true;
}

BlockValue Ipm::apply_W2(int blk, const BlockValue& v) const {
  const auto& vb = p_.block(blk);
  const Scaling& sc = scal_[blk];
  BlockValue out;
  if (vb.kind == VarKind::Psd)
    out.mat = sc.W * v.mat * sc.W;
  else if (vb.kind == VarKind::Soc)
    out.vec = soc_quad_rep(sc.w, v.vec);
  else
    out.vec = (sc.wdiag.array().square() * v.vec.array()).matrix();
  return out;
}

BlockValue Ipm::unscale_primal(int blk, const BlockValue& g) const {
  const auto& vb = p_.block(blk);
  const Scaling& sc = scal_[blk];
  BlockValue out;
  if (vb.kind == VarKind::Psd)
    out.mat = sc.R * g.mat * sc.R.transpose();
  else if (vb.kind == VarKind::Soc)
    out.vec = soc_quad_rep(sc.whalf, g.vec);
  else
    out.vec = sc.wdiag.cwiseProduct(g.vec);
  return out;
}

BlockValue Ipm::scale_primal(int blk, const BlockValue& v) const {
  const auto& vb = p_.block(blk);
  const Scaling& sc = scal_[blk];
  BlockValue out;
  if (vb.kind == VarKind::Psd)
    out.mat = sc.Rinv * v.mat * sc.Rinv.transpose();
  else if (vb.kind == VarKind::Soc)
    out.vec = soc_quad_rep(sc.whalfinv, v.vec);
  else
    out.vec = v.vec.cwiseQuotient(sc.wdiag);
  return out;
}

BlockValue Ipm::scale_dual(int blk, const BlockValue& v) const {
  const auto& vb = p_.block(blk);
  const Scaling& sc = scal_[blk];
  BlockValue out;
  if (vb.kind == VarKind::Psd)
    out.mat = sc.R.transpose() * v.mat * sc.R;
  else if (vb.kind == VarKind::Soc)
    out.vec = soc_quad_rep(sc.whalf, v.vec);
  else
    out.vec = sc.wdiag.cwiseProduct(v.vec);
  return out;
}

BlockValue Ipm::scaled_prod(int blk, const BlockValue& a,
                            const BlockValue& b) const {
  const auto& vb = p_.block(blk);
  BlockValue out;
  if (vb.kind == VarKind::Psd)
    out.mat = 0.5 * (a.mat * b.mat + b.mat * a.mat);
  else if (vb.kind == VarKind::Soc)
    out.vec = soc_prod(a.vec, b.vec);
  else
    out.vec = a.vec.cwiseProduct(b.vec);
  return out;
}

BlockValue Ipm::lambda_block(int blk) const {
  const auto& vb = p_.block(blk);
  const Scaling& sc = scal_[blk];
  BlockValue out;
  if (vb.kind == VarKind::Psd)
    out.mat = sc.d.asDiagonal();
  else if (vb.kind == VarKind::Soc)
    out.vec = sc.lam;
  else
    out.vec = sc.lamdiag;
  return out;
}

BlockValue Ipm::lambda_solve(int blk, const BlockValue& g) const {
  const auto& vb = p_.block(blk);
  const Scaling& sc = scal_[blk];
  BlockValue out;
  if (vb.kind == VarKind::Psd) {
    out.mat = g.mat;
    for (int i = 0; i < vb.size; ++i)
      for (int j = 0; j < vb.size; ++j)
        out.mat(i, j) *= 2.0 / (sc.d[i] + sc.d[j]);
  } else if (vb.kind == VarKind::Soc) {
    out.vec = soc_lsolve(sc.lam, g.vec);
  } else {
    out.vec = g.vec.cwiseQuotient(sc.lamdiag);
  }
  return out;
}

void Ipm::newton(const Iterate& it, const std::vector<BlockValue>& g,
                 std::vector<BlockValue>& dx, VectorXd& dfree, VectorXd& dy,
                 std::vector<BlockValue>& ds) const {
  // rhs_y = r_p - A(Xg) + A(W rd W) over cone blocks
  std::vector<BlockValue> tmp = zero_blocks(false);
  for (int blk : cone_blocks_) {
    BlockValue xg = unscale_primal(blk, g[blk]);
    BlockValue wrdw = apply_W2(blk, rd_[blk]);
    if (p_.block(blk).kind == VarKind::Psd)
      tmp[blk].mat = wrdw.mat - xg.mat;
    else
      tmp[blk].vec = wrdw.vec - xg.vec;
  }
  VectorXd rhs_y = rp_ + apply_A(tmp);
  VectorXd rhs_f(nfree_);
  int c0 = 0;
  for (int fb : free_blocks_) {
    rhs_f.segment(c0, p_.block(fb).size) = rd_[fb].vec;
    c0 += p_.block(fb).size;
  }

  solve_kkt(rhs_y, rhs_f, dy, dfree);

  std::vector<BlockValue> aty = zero_blocks(false);
  apply_At(dy, aty);
  dx = zero_blocks(false);
  ds = zero_blocks(true);
  for (int blk : cone_blocks_) {
    if (p_.block(blk).kind == VarKind::Psd) {
      ds[blk].mat = rd_[blk].mat - aty[blk].mat;
      dx[blk].mat = unscale_primal(blk, g[blk]).mat - apply_W2(blk, ds[blk]).mat;
    } else {
      ds[blk].vec = rd_[blk].vec - aty[blk].vec;
      dx[blk].vec = unscale_primal(blk, g[blk]).vec - apply_W2(blk, ds[blk]).vec;
    }
  }
  int f0 = 0;
  for (int fb : free_blocks_) {
    dx[fb].vec = dfree.segment(f0, p_.block(fb).size);
    f0 += p_.block(fb).size;
  }
}

double Ipm::step_primal(const Iterate& it,
                        const std::vector<BlockValue>& dx) const {
  double alpha = kInf;
  for (int blk : cone_blocks_) {
    const auto& vb = p_.block(blk);
    if (vb.kind == VarKind::Psd) {
      // in scaled coordinates X = R D R' with D = diag(d), so the boundary
      // factor comes from the well-conditioned D^{-1/2} Rinv dX Rinv' D^{-1/2}
      const Scaling& sc = scal_[blk];
      const VectorXd dis = sc.d.cwiseSqrt().cwiseInverse();
      MatrixXd G = sc.Rinv * dx[blk].mat * sc.Rinv.transpose();
      G = dis.asDiagonal() * G * dis.asDiagonal();
      Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (G + G.transpose()),
                                                 Eigen::EigenvaluesOnly);
      double lmin = es.eigenvalues().minCoeff();
      if (lmin < 0) alpha = std::min(alpha, -1.0 / lmin);
    } else if (vb.kind == VarKind::Soc) {
      alpha = std::min(alpha, soc_step_to_boundary(it.x[blk].vec, dx[blk].vec));
    } else {
      for (int i = 0; i < vb.size; ++i)
        if (dx[blk].vec[i] < 0)
          alpha = std::min(alpha, -it.x[blk].vec[i] / dx[blk].vec[i]);
    }
  }
  return alpha;
}

double Ipm::step_dual(const Iterate& it,
                      const std::vector<BlockValue>& ds) const {
  double alpha = kInf;
  for (int blk : cone_blocks_) {
    const auto& vb = p_.block(blk);
    if (vb.kind == VarKind::Psd) {
      // S = Rinv' D Rinv, so scale by D^{-1/2} R' dS R D^{-1/2}
      const Scaling& sc = scal_[blk];
      const VectorXd dis = sc.d.cwiseSqrt().cwiseInverse();
      MatrixXd G = sc.R.transpose() * ds[blk].mat * sc.R;
      G = dis.asDiagonal() * G * dis.asDiagonal();
      Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (G + G.transpose()),
                                                 Eigen::EigenvaluesOnly);
      double lmin = es.eigenvalues().minCoeff();
      if (lmin < 0) alpha = std::min(alpha, -1.0 / lmin);
    } else if (vb.kind == VarKind::Soc) {
      alpha = std::min(alpha, soc_step_to_boundary(it.s[blk].vec, ds[blk].vec));
    } else {
      for (int i = 0; i < vb.size; ++i)
        if (ds[blk].vec[i] < 0)
          alpha = std::min(alpha, -it.s[blk].vec[i] / ds[blk].vec[i]);
    }
  }
  return alpha;
}

bool Ipm::iterate_interior(const Iterate& it) const {
  for (int blk : cone_blocks_) {
    const auto& vb = p_.block(blk);
    switch (vb.kind) {
      case VarKind::Psd: {
        Eigen::LLT<MatrixXd> lx(it.x[blk].mat);
        if (lx.info() != Eigen::Success) return false;
        Eigen::LLT<MatrixXd> ls(it.s[blk].mat);
        if (ls.info() != Eigen::Success) return false;
        break;
      }
      case VarKind::Soc:
        if (it.x[blk].vec[0] <= 0 || soc_det(it.x[blk].vec) <= 0) return false;
        if (it.s[blk].vec[0] <= 0 || soc_det(it.s[blk].vec) <= 0) return false;
        break;
      case VarKind::Nonneg:
        if (it.x[blk].vec.minCoeff() <= 0) return false;
        if (it.s[blk].vec.minCoeff() <= 0) return false;
        break;
      default:
        break;
    }
  }
  return true;
}

Solution Ipm::run() {
  Solution sol;
  Iterate it;
  initialize(it);

  bnorm_ = 1.0 + (m_ > 0 ? b_.cwiseAbs().maxCoeff() : 0.0);
  double cmax = 0.0;
  for (int blk = 0; blk < nb_; ++blk) {
    for (const auto& e : p_.objective().mat[blk])
      cmax = std::max(cmax, std::abs(e.value));
    for (const auto& e : p_.objective().vec[blk])
      cmax = std::max(cmax, std::abs(e.value));
  }
  cnorm_ = 1.0 + cmax;

  int stalls = 0;
  double mu0 = 0.0;
  double prev_alpha = 1.0;
  Iterate best_it;
  double best_score = kInf;
  for (int iter = 0; iter < opts_.max_iter; ++iter) {
    compute_residuals(it);
    if (iter == 0) mu0 = mu_;
    const double score = std::max({rel_gap_, rel_p_, rel_d_});
    if (score < best_score) {
      best_score = score;
      best_it = it;
    } else if (score > 1e3 * best_score || !std::isfinite(score) ||
               mu_ < 0.0) {
      // endgame degradation: fall back to the best iterate seen
      if (opts_.verbose) std::printf("stop: degradation at it %d\n", iter);
      sol.status = SolveStatus::Numerical;
      sol.iterations = iter;
      break;
    }

    if (!std::isfinite(mu_) || mu_ > 1e10 * (mu0 + 1.0)) {
      // divergence; classify as a dual-infeasibility ray when the iterate
      // looks like one, otherwise give up
      double xn = 0.0;
      for (int blk : cone_blocks_)
        xn += p_.block(blk).kind == VarKind::Psd ? it.x[blk].mat.squaredNorm()
                                                 : it.x[blk].vec.squaredNorm();
      xn = std::sqrt(xn);
      const double axn = (b_ - rp_).norm();
      sol.status = (pobj_ < 0 && axn <= 1e-6 * xn) ? SolveStatus::DualInfeasible
                                                   : SolveStatus::Numerical;
      sol.iterations = iter;
      break;
    }
    if (opts_.verbose)
      std::printf("it %3d  pobj % .6e dobj % .6e gap %.2e rp %.2e rd %.2e mu %.2e%s\n",
                  iter, pobj_, dobj_, rel_gap_, rel_p_, rel_d_, mu_,
                  last_note_.c_str());
    last_note_.clear();

    if (rel_gap_ <= opts_.gap_tol && rel_p_ <= opts_.feas_tol &&
        rel_d_ <= opts_.feas_tol) {
      sol.status = SolveStatus::Optimal;
      sol.iterations = iter;
      break;
    }

    // infeasibility heuristics
    const double ynorm = m_ > 0 ? it.y.cwiseAbs().maxCoeff() : 0.0;
    if (ynorm > 1e8 * bnorm_) {
      double bty = b_.dot(it.y);
      if (bty > 0 && rel_d_ * cnorm_ / std::max(1.0, bty) < 1e-10) {
        sol.status = SolveStatus::PrimalInfeasible;
        sol.iterations = iter;
        break;
      }
    }

    if (!compute_scalings(it)) {
      if (opts_.verbose) std::printf("stop: scaling failure at it %d\n", iter);
      sol.status = SolveStatus::Numerical;
      sol.iterations = iter;
      break;
    }
    assemble_schur();
    if (!factorize()) {
      if (opts_.verbose)
        std::printf("stop: factorization failure at it %d\n", iter);
      sol.status = SolveStatus::Numerical;
      sol.iterations = iter;
      break;
    }

    // predictor (affine): g = -lambda
    std::vector<BlockValue> g(nb_);
    for (int blk : cone_blocks_) {
      g[blk] = lambda_block(blk);
      if (p_.block(blk).kind == VarKind::Psd)
        g[blk].mat *= -1.0;
      else
        g[blk].vec *= -1.0;
    }
    std::vector<BlockValue> dx_a, ds_a;
    VectorXd dy_a, df_a;
    newton(it, g, dx_a, df_a, dy_a, ds_a);
    const double frac =
        std::min(opts_.step_frac, 0.9 + 0.09 * std::min(1.0, prev_alpha));
    double ap = step_primal(it, dx_a);
    double ad = step_dual(it, ds_a);
    ap = std::min(1.0, frac * ap);
    ad = std::min(1.0, frac * ad);

    // Mehrotra centering parameter
    double gap_now = mu_ * nu_;
    double gap_aff = 0.0;
    for (int blk : cone_blocks_) {
      if (p_.block(blk).kind == VarKind::Psd)
        gap_aff += ((it.x[blk].mat + ap * dx_a[blk].mat).array() *
                    (it.s[blk].mat + ad * ds_a[blk].mat).array())
                       .sum();
      else
        gap_aff += (it.x[blk].vec + ap * dx_a[blk].vec)
                       .dot(it.s[blk].vec + ad * ds_a[blk].vec);
    }
    gap_aff = std::max(gap_aff, 0.0);
    double sigma = std::pow(gap_aff / std::max(gap_now, 1e-300), 3.0);
    sigma = std::min(1.0, std::max(sigma, 1e-8));

    // corrector: g = Llam^{-1}(sigma*mu*e - lam o lam - dxhat o dshat)
    for (int blk : cone_blocks_) {
      const auto& vb = p_.block(blk);
      BlockValue dxh = scale_primal(blk, dx_a[blk]);
      BlockValue dsh = scale_dual(blk, ds_a[blk]);
      BlockValue cross = scaled_prod(blk, dxh, dsh);
      BlockValue lam = lambda_block(blk);
      BlockValue G;
      if (vb.kind == VarKind::Psd) {
        G.mat = -lam.mat * lam.mat - cross.mat;
        G.mat.diagonal().array() += sigma * mu_;
      } else if (vb.kind == VarKind::Soc) {
        G.vec = -soc_prod(lam.vec, lam.vec) - cross.vec;
        G.vec[0] += sigma * mu_;
      } else {
        G.vec = -lam.vec.cwiseProduct(lam.vec) - cross.vec;
        G.vec.array() += sigma * mu_;
      }
      g[blk] = lambda_solve(blk, G);
    }
    std::vector<BlockValue> dx, ds;
    VectorXd dy, df;
    newton(it, g, dx, df, dy, ds);
    ap = step_primal(it, dx);
    ad = step_dual(it, ds);
    ap = std::min(1.0, frac * ap);
    ad = std::min(1.0, frac * ad);
    prev_alpha = std::min(ap, ad);

    if (opts_.verbose)
      last_note_ = "  ap=" + std::to_string(ap) + " ad=" + std::to_string(ad) +
                   " sigma=" + std::to_string(sigma);
    if (std::min(ap, ad) < 1e-7) {
      if (++stalls >= 5) {
        sol.status = SolveStatus::Numerical;
        sol.iterations = iter;
        break;
      }
    } else {
      stalls = 0;
    }

    // apply the step, backtracking if rounding pushed an iterate out of the
    // cone interior (the boundary estimate degrades with the conditioning)
    Iterate trial;
    auto try_step = [&](const std::vector<BlockValue>& px,
                        const VectorXd& py,
                        const std::vector<BlockValue>& ps, double& a_p,
                        double& a_d) {
      for (int bt = 0; bt < 30; ++bt) {
        trial = it;
        for (int blk : cone_blocks_) {
          if (p_.block(blk).kind == VarKind::Psd) {
            trial.x[blk].mat += a_p * px[blk].mat;
            trial.s[blk].mat += a_d * ps[blk].mat;
            trial.x[blk].mat =
                0.5 * (trial.x[blk].mat + trial.x[blk].mat.transpose());
            trial.s[blk].mat =
                0.5 * (trial.s[blk].mat + trial.s[blk].mat.transpose());
          } else {
            trial.x[blk].vec += a_p * px[blk].vec;
            trial.s[blk].vec += a_d * ps[blk].vec;
          }
        }
        for (int fb : free_blocks_) trial.x[fb].vec += a_p * px[fb].vec;
        trial.y = it.y + a_d * py;
        if (iterate_interior(trial)) return true;
        a_p *= 0.5;
        a_d *= 0.5;
      }
      return false;
    };
    bool interior_ok = try_step(dx, dy, ds, ap, ad);
    if (!interior_ok) {
      // pure centering retry: aim back at the central path at the current mu
      for (int blk : cone_blocks_) {
        const auto& vb = p_.block(blk);
        BlockValue lam = lambda_block(blk);
        BlockValue G;
        if (vb.kind == VarKind::Psd) {
          G.mat = -lam.mat * lam.mat;
          G.mat.diagonal().array() += mu_;
        } else if (vb.kind == VarKind::Soc) {
          G.vec = -soc_prod(lam.vec, lam.vec);
          G.vec[0] += mu_;
        } else {
          G.vec = -lam.vec.cwiseProduct(lam.vec);
          G.vec.array() += mu_;
        }
        g[blk] = lambda_solve(blk, G);
      }
      newton(it, g, dx, df, dy, ds);
      ap = std::min(1.0, frac * step_primal(it, dx));
      ad = std::min(1.0, frac * step_dual(it, ds));
      interior_ok = try_step(dx, dy, ds, ap, ad);
    }
    if (!interior_ok) {
      if (opts_.verbose)
        std::printf("stop: step rejected at the cone boundary, it %d\n", iter);
      sol.status = SolveStatus::Numerical;
      sol.iterations = iter;
      break;
    }
    it = std::move(trial);

    if (iter == opts_.max_iter - 1) {
      sol.status = SolveStatus::MaxIter;
      sol.iterations = opts_.max_iter;
    }
  }
  // report the best iterate seen; upgrade the status if it already meets
  // the tolerances
  compute_residuals(it);
  if (best_score < std::max({rel_gap_, rel_p_, rel_d_}) &&
      !best_it.x.empty()) {
    it = best_it;
    compute_residuals(it);
  }
  if (sol.status != SolveStatus::PrimalInfeasible &&
      sol.status != SolveStatus::DualInfeasible && rel_gap_ <= opts_.gap_tol &&
      rel_p_ <= opts_.feas_tol && rel_d_ <= opts_.feas_tol) {
    sol.status = SolveStatus::Optimal;
  }
  sol.primal = it.x;
  sol.dual_slack = it.s;
  sol.dual = it.y;
  sol.primal_obj = pobj_;
  sol.dual_obj = dobj_;
  sol.gap = rel_gap_;
  sol.primal_res = rel_p_;
  sol.dual_res = rel_d_;
  return sol;
}

}  // namespace

Solution solve(const BlockConicProgram& prog, const SolverOptions& opts) {
  Ipm ipm(prog, opts);
  return ipm.run();
}

KktReport verify_kkt(const BlockConicProgram& prog, const Solution& sol) {
  KktReport rep{};
  const int m = prog.num_constraints();
  double binf = 0, einf = 0;
  for (int i = 0; i < m; ++i) {
    double ax = block_inner(prog.constraint(i), sol.primal, prog.blocks());
    binf = std::max(binf, std::abs(prog.rhs()[i]));
    einf = std::max(einf, std::abs(ax - prog.rhs()[i]));
  }
  rep.eq_residual = einf / (1.0 + binf);

  double viol = 0.0, comp = 0.0;
  for (int blk = 0; blk < prog.num_blocks(); ++blk) {
    const auto& vb = prog.block(blk);
    switch (vb.kind) {
      case VarKind::Psd: {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
            sol.primal[blk].mat, Eigen::EigenvaluesOnly);
        viol = std::min(viol, es.eigenvalues().minCoeff());
        comp += (sol.primal[blk].mat.array() * sol.dual_slack[blk].mat.array())
                    .sum();
        break;
      }
      case VarKind::Soc:
        viol = std::min(viol, sol.primal[blk].vec[0] -
                                  sol.primal[blk].vec.tail(vb.size - 1).norm());
        comp += sol.primal[blk].vec.dot(sol.dual_slack[blk].vec);
        break;
      case VarKind::Nonneg:
        viol = std::min(viol, sol.primal[blk].vec.minCoeff());
        comp += sol.primal[blk].vec.dot(sol.dual_slack[blk].vec);
        break;
      case VarKind::Free:
        break;
    }
  }
  rep.cone_violation = viol;
  rep.complementarity = comp / (1.0 + std::abs(sol.primal_obj));

  // dual residual
  double dmax = 0, cmax = 0;
  for (int blk = 0; blk < prog.num_blocks(); ++blk) {
    const auto& vb = prog.block(blk);
    if (vb.kind == VarKind::Psd) {
      Eigen::MatrixXd R = Eigen::MatrixXd::Zero(vb.size, vb.size);
      for (const auto& e : prog.objective().mat[blk]) {
        R(e.row, e.col) += e.value;
        if (e.row != e.col) R(e.col, e.row) += e.value;
        cmax = std::max(cmax, std::abs(e.value));
      }
      for (int i = 0; i < m; ++i)
        for (const auto& e : prog.constraint(i).mat[blk]) {
          R(e.row, e.col) -= sol.dual[i] * e.value;
          if (e.row != e.col) R(e.col, e.row) -= sol.dual[i] * e.value;
        }
      R -= sol.dual_slack[blk].mat;
      dmax = std::max(dmax, R.cwiseAbs().maxCoeff());
    } else {
      Eigen::VectorXd r = Eigen::VectorXd::Zero(vb.size);
      for (const auto& e : prog.objective().vec[blk]) {
        r[e.index] += e.value;
        cmax = std::max(cmax, std::abs(e.value));
      }
      for (int i = 0; i < m; ++i)
        for (const auto& e : prog.constraint(i).vec[blk])
          r[e.index] -= sol.dual[i] * e.value;
      if (vb.kind != VarKind::Free) r -= sol.dual_slack[blk].vec;
      dmax = std::max(dmax, r.cwiseAbs().maxCoeff());
    }
  }
  rep.dual_residual = dmax / (1.0 + cmax);
  return rep;
}

FeasibilityResult solve_feasibility(const BlockConicProgram& prog,
                                    const SolverOptions& opts, double eps,
                                    double shift_cap) {
  // phase-I: max t with X_b - t e_b in K_b; encoded on shifted variables.
  BlockConicProgram ph;
  const int nb = prog.num_blocks();
  for (int b = 0; b < nb; ++b) ph.add_block(prog.block(b).kind, prog.block(b).size);
  const int tblk = ph.add_free_block(1);
  const int capblk = ph.add_nonneg_block(1);
  ph.obj_vec(tblk, 0, -1.0);

  for (int i = 0; i < prog.num_constraints(); ++i) {
    const int c = ph.add_constraint(prog.rhs()[i]);
    double te = 0.0;  // <A_i, e> over cone blocks
    for (int b = 0; b < nb; ++b) {
      const auto& vb = prog.block(b);
      if (vb.kind == VarKind::Psd) {
        for (const auto& e : prog.constraint(i).mat[b]) {
          ph.con_mat(c, b, e.row, e.col, e.value);
          if (e.row == e.col) te += e.value;
        }
      } else {
        for (const auto& e : prog.constraint(i).vec[b]) {
          ph.con_vec(c, b, e.index, e.value);
          if (vb.kind == VarKind::Nonneg) te += e.value;
          else if (vb.kind == VarKind::Soc && e.index == 0) te += e.value;
        }
      }
    }
    if (te != 0.0) ph.con_vec(c, tblk, 0, te);
  }
  {
    const int c = ph.add_constraint(shift_cap);
    ph.con_vec(c, tblk, 0, 1.0);
    ph.con_vec(c, capblk, 0, 1.0);
  }

  Solution sol = solve(ph, opts);
  FeasibilityResult out;
  out.status = sol.status;
  if (!sol.usable(1e-6)) {
    out.indeterminate = true;
    return out;
  }
  const double t = sol.primal[nb].vec[0];
  out.t_star = t;
  out.feasible = t >= -eps;
  if (out.feasible) {
    out.point.resize(nb);
    for (int b = 0; b < nb; ++b) {
      const auto& vb = prog.block(b);
      out.point[b] = sol.primal[b];
      if (vb.kind == VarKind::Psd)
        out.point[b].mat.diagonal().array() += t;
      else if (vb.kind == VarKind::Soc)
        out.point[b].vec[0] += t;
      else if (vb.kind == VarKind::Nonneg)
        out.point[b].vec.array() += t;
    }
  }
  out.dual_witness = sol.dual.head(prog.num_constraints());
  return out;
}

}  // namespace gdnn
