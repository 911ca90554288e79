#include "gdnn/separation.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>

namespace gdnn {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Layout {
  std::vector<int> nno;        // all nonnegative coordinates
  std::vector<int> soc;        // second-order block ids
};

Layout make_layout(const ConeSpec& spec) {
  Layout l;
  for (int h = 0; h < spec.num_blocks(); ++h) {
    switch (spec.block(h).kind) {
      case BlockKind::Nonneg: {
        for (int i = 0; i < spec.block(h).dim; ++i)
          l.nno.push_back(spec.block_offset(h) + i);
        break;
      }
      case BlockKind::SecondOrder:
        l.soc.push_back(h);
        break;
      case BlockKind::PsdVec:
        throw UnsupportedBlockError(
            "separation over PsdVec blocks is unsupported");
    }
  }
  return l;
}

VectorXd embed_soc_idempotent(const ConeSpec& spec, int h, const VectorXd& v) {
  VectorXd s = VectorXd::Zero(spec.ambient_dim());
  const int off = spec.block_offset(h);
  s[off] = 0.5;
  s.segment(off + 1, spec.block(h).dim - 1) = 0.5 * v;
  return s;
}

// unit minimizer of v -> r'v, or e1 when r = 0
VectorXd min_direction(const VectorXd& r) {
  const double nrm = r.norm();
  if (nrm > 0) return -r / nrm;
  VectorXd v = VectorXd::Zero(r.size());
  v[0] = 1.0;
  return v;
}

}  // namespace

TrsProblem soc_pair_trs(const ConeSpec& spec, const Eigen::MatrixXd& X, int g,
                        int h, double gamma) {
  const int og = spec.block_offset(g), dg = spec.block(g).dim;
  const int oh = spec.block_offset(h), dh = spec.block(h).dim;
  const double x11 = X(og, oh);
  const VectorXd x12 = X.row(og).segment(oh + 1, dh - 1);
  const VectorXd x21 = X.col(oh).segment(og + 1, dg - 1);
  const MatrixXd x22 = X.block(og + 1, oh + 1, dg - 1, dh - 1);
  TrsProblem p;
  p.B = 0.25 * (x12 * x12.transpose() - x22.transpose() * x22);
  p.b = 0.25 * (x11 * x12 - x22.transpose() * x21) + 0.5 * gamma * x12;
  p.c = 0.25 * (x11 * x11 - x21.squaredNorm()) + gamma * x11 + gamma * gamma;
  return p;
}

const char* to_string(CutSource s) {
  switch (s) {
    case CutSource::NnoNno: return "nno_nno";
    case CutSource::NnoSoc: return "nno_soc";
    case CutSource::SocNno: return "soc_nno";
    case CutSource::SocSocLinear: return "soc_soc_linear";
    case CutSource::SocSocTrs: return "soc_soc_trs";
  }
  return "unknown";
}

SeparationOutcome separate(const ConeSpec& spec, const Eigen::MatrixXd& X,
                           double gamma) {
  const int n = spec.ambient_dim();
  if (X.rows() != n || X.cols() != n)
    throw std::invalid_argument("separate: matrix size mismatch");
  Layout l = make_layout(spec);
  SeparationOutcome out;

  // nonneg-vs-nonneg: entrywise nonnegativity
  for (int I : l.nno)
    for (int J : l.nno) {
      if (X(I, J) < -gamma) {
        out.inside = false;
        out.source = CutSource::NnoNno;
        out.case_value = X(I, J);
        out.cut = MatrixXd::Zero(n, n);
        out.cut(I, J) = -1.0;
        out.cut(J, I) = -1.0;
        out.violation = (X.array() * out.cut.array()).sum();
        out.witness = VectorXd::Zero(n);
        out.witness[J] = 1.0;
        return out;
      }
    }

  // nonneg rows against second-order idempotents (Cauchy-Schwarz minimum)
  for (int h : l.soc) {
    const int oh = spec.block_offset(h), dh = spec.block(h).dim;
    for (int I : l.nno) {
      const VectorXd row = X.row(I).segment(oh + 1, dh - 1);
      const double value = 0.5 * (X(I, oh) - row.norm());
      if (value < -gamma) {
        const VectorXd vstar = min_direction(row);
        out.inside = false;
        out.source = CutSource::NnoSoc;
        out.case_value = value;
        out.cut = MatrixXd::Zero(n, n);
        out.cut(I, oh) = -1.0;
        out.cut(oh, I) = -1.0;
        for (int j = 1; j < dh; ++j) {
          out.cut(I, oh + j) = -vstar[j - 1];
          out.cut(oh + j, I) = -vstar[j - 1];
        }
        out.violation = (X.array() * out.cut.array()).sum();
        out.witness = embed_soc_idempotent(spec, h, vstar);
        return out;
      }
    }
  }

  // second-order columns against nonneg idempotents
  for (int h : l.soc) {
    const int oh = spec.block_offset(h), dh = spec.block(h).dim;
    for (int J : l.nno) {
      const VectorXd col = X.col(J).segment(oh + 1, dh - 1);
      const double value = X(oh, J) - col.norm();
      if (value < -gamma) {
        const VectorXd vstar = min_direction(col);
        out.inside = false;
        out.source = CutSource::SocNno;
        out.case_value = value;
        out.cut = MatrixXd::Zero(n, n);
        out.cut(J, oh) = -1.0;
        out.cut(oh, J) = -1.0;
        for (int j = 1; j < dh; ++j) {
          out.cut(J, oh + j) = -vstar[j - 1];
          out.cut(oh + j, J) = -vstar[j - 1];
        }
        out.violation = (X.array() * out.cut.array()).sum();
        out.witness = VectorXd::Zero(n);
        out.witness[J] = 1.0;
        return out;
      }
    }
  }

  // soc-vs-soc, linear phase: leading coordinates of X s
  for (int g : l.soc)
    for (int h : l.soc) {
      const int og = spec.block_offset(g);
      const int oh = spec.block_offset(h), dh = spec.block(h).dim;
      const VectorXd row = X.row(og).segment(oh + 1, dh - 1);
      const double value = 0.5 * (X(og, oh) - row.norm());
      if (value < -gamma) {
        const VectorXd vstar = min_direction(row);
        out.inside = false;
        out.source = CutSource::SocSocLinear;
        out.case_value = value;
        MatrixXd B = MatrixXd::Zero(n, n);
        B(og, oh) = -1.0;
        for (int j = 1; j < dh; ++j) B(og, oh + j) = -vstar[j - 1];
        out.cut = B + B.transpose();
        out.violation = (X.array() * out.cut.array()).sum();
        out.witness = embed_soc_idempotent(spec, h, vstar);
        return out;
      }
    }

  // soc-vs-soc, TRS phase; the squared test is valid now that
  // X_{g1 I_h} s >= -gamma holds for every idempotent s
  for (int g : l.soc)
    for (int h : l.soc) {
      const int og = spec.block_offset(g), dg = spec.block(g).dim;
      const int oh = spec.block_offset(h), dh = spec.block(h).dim;
      TrsSolution ts = solve_trs(soc_pair_trs(spec, X, g, h, gamma));
      if (ts.value < 0) {
        const VectorXd vstar = ts.v;
        const VectorXd ztail =
            X.col(oh).segment(og + 1, dg - 1) +
            X.block(og + 1, oh + 1, dg - 1, dh - 1) * vstar;
        const VectorXd c = min_direction(-ztail);  // z/||z||, e1 fallback
        out.inside = false;
        out.source = CutSource::SocSocTrs;
        out.case_value = ts.value;
        MatrixXd B = MatrixXd::Zero(n, n);
        B(og, oh) = -1.0;
        for (int j = 1; j < dh; ++j) B(og, oh + j) = -vstar[j - 1];
        for (int i = 1; i < dg; ++i) {
          B(og + i, oh) = c[i - 1];
          for (int j = 1; j < dh; ++j) B(og + i, oh + j) = c[i - 1] * vstar[j - 1];
        }
        out.cut = B + B.transpose();
        out.violation = (X.array() * out.cut.array()).sum();
        out.witness = embed_soc_idempotent(spec, h, vstar);
        return out;
      }
    }

  out.inside = true;
  return out;
}

SeparationDiagnostics evaluate_separation_cases(const ConeSpec& spec,
                                                const Eigen::MatrixXd& X) {
  Layout l = make_layout(spec);
  SeparationDiagnostics d;
  d.has_nno = !l.nno.empty();
  d.has_soc = !l.soc.empty();
  d.nno_nno = kInf;
  d.nno_soc = kInf;
  d.soc_nno = kInf;
  d.soc_soc_linear = kInf;
  d.trs_value = kInf;
  for (int I : l.nno)
    for (int J : l.nno) d.nno_nno = std::min(d.nno_nno, X(I, J));
  for (int h : l.soc) {
    const int oh = spec.block_offset(h), dh = spec.block(h).dim;
    for (int I : l.nno) {
      d.nno_soc = std::min(
          d.nno_soc,
          0.5 * (X(I, oh) - X.row(I).segment(oh + 1, dh - 1).norm()));
      d.soc_nno = std::min(
          d.soc_nno, X(oh, I) - X.col(I).segment(oh + 1, dh - 1).norm());
    }
  }
  for (int g : l.soc)
    for (int h : l.soc) {
      const int og = spec.block_offset(g);
      const int oh = spec.block_offset(h), dh = spec.block(h).dim;
      d.soc_soc_linear = std::min(
          d.soc_soc_linear,
          0.5 * (X(og, oh) - X.row(og).segment(oh + 1, dh - 1).norm()));
      d.trs_value =
          std::min(d.trs_value, solve_trs(soc_pair_trs(spec, X, g, h, 0)).value);
    }
  return d;
}

}  // namespace gdnn
