#include "gdnn/jordan.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

namespace gdnn {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

void check_dim(const ConeSpec& spec, const Eigen::VectorXd& x) {
  if (x.size() != spec.ambient_dim())
    throw std::invalid_argument("vector length does not match cone spec");
}

}  // namespace

Eigen::VectorXd SpectralDecomposition::reconstruct() const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(idempotents.empty()
                                                  ? 0
                                                  : idempotents[0].size());
  for (std::size_t i = 0; i < idempotents.size(); ++i)
    out += eigenvalues[static_cast<int>(i)] * idempotents[i];
  return out;
}

Eigen::VectorXd QuadFormTable::evaluate(const Eigen::VectorXd& x) const {
  Eigen::VectorXd out(static_cast<int>(q.size()));
  for (std::size_t i = 0; i < q.size(); ++i)
    out[static_cast<int>(i)] = x.dot(q[i] * x);
  return out;
}

Eigen::VectorXd jordan_product(const ConeSpec& spec, const Eigen::VectorXd& x,
                               const Eigen::VectorXd& y) {
  check_dim(spec, x);
  check_dim(spec, y);
  Eigen::VectorXd out(spec.ambient_dim());
  for (int h = 0; h < spec.num_blocks(); ++h) {
    const Block& b = spec.block(h);
    const int off = spec.block_offset(h);
    auto xb = x.segment(off, b.dim);
    auto yb = y.segment(off, b.dim);
    switch (b.kind) {
      case BlockKind::Nonneg:
        out.segment(off, b.dim) = xb.cwiseProduct(yb);
        break;
      case BlockKind::SecondOrder: {
        out[off] = xb.dot(yb);
        out.segment(off + 1, b.dim - 1) =
            xb[0] * yb.tail(b.dim - 1) + yb[0] * xb.tail(b.dim - 1);
        break;
      }
      case BlockKind::PsdVec: {
        Eigen::MatrixXd X = smat(xb);
        Eigen::MatrixXd Y = smat(yb);
        out.segment(off, b.dim) = svec(0.5 * (X * Y + Y * X));
        break;
      }
    }
  }
  return out;
}

Eigen::VectorXd identity_element(const ConeSpec& spec) {
  Eigen::VectorXd e = Eigen::VectorXd::Zero(spec.ambient_dim());
  for (int h = 0; h < spec.num_blocks(); ++h) {
    const Block& b = spec.block(h);
    const int off = spec.block_offset(h);
    switch (b.kind) {
      case BlockKind::Nonneg:
        e.segment(off, b.dim).setOnes();
        break;
      case BlockKind::SecondOrder:
        e[off] = 1.0;
        break;
      case BlockKind::PsdVec:
        for (int i = 0; i < b.order; ++i) e[spec.psd_entry_index(h, i, i)] = 1.0;
        break;
    }
  }
  return e;
}

SpectralDecomposition spectral_decompose(const ConeSpec& spec,
                                         const Eigen::VectorXd& x) {
  check_dim(spec, x);
  SpectralDecomposition dec;
  std::vector<double> vals;
  const int n = spec.ambient_dim();
  for (int h = 0; h < spec.num_blocks(); ++h) {
    const Block& b = spec.block(h);
    const int off = spec.block_offset(h);
    auto xb = x.segment(off, b.dim);
    switch (b.kind) {
      case BlockKind::Nonneg: {
        std::vector<int> order(b.dim);
        for (int i = 0; i < b.dim; ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int c) { return xb[a] < xb[c]; });
        for (int i : order) {
          vals.push_back(xb[i]);
          Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
          c[off + i] = 1.0;
          dec.idempotents.push_back(std::move(c));
        }
        break;
      }
      case BlockKind::SecondOrder: {
        const int d = b.dim;
        Eigen::VectorXd u(d - 1);
        double nrm = xb.tail(d - 1).norm();
        if (nrm > 0.0) {
          u = xb.tail(d - 1) / nrm;
        } else {
          u.setZero();
          u[0] = 1.0;
        }
        Eigen::VectorXd cminus = Eigen::VectorXd::Zero(n);
        cminus[off] = 0.5;
        cminus.segment(off + 1, d - 1) = -0.5 * u;
        Eigen::VectorXd cplus = Eigen::VectorXd::Zero(n);
        cplus[off] = 0.5;
        cplus.segment(off + 1, d - 1) = 0.5 * u;
        vals.push_back(xb[0] - nrm);
        dec.idempotents.push_back(std::move(cminus));
        vals.push_back(xb[0] + nrm);
        dec.idempotents.push_back(std::move(cplus));
        break;
      }
      case BlockKind::PsdVec: {
        Eigen::MatrixXd X = smat(xb);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(X);
        if (es.info() != Eigen::Success)
          throw std::runtime_error("symmetric eigensolver failed");
        for (int i = 0; i < b.order; ++i) {
          Eigen::VectorXd v = es.eigenvectors().col(i);
          for (int k = 0; k < v.size(); ++k) {
            if (std::abs(v[k]) > 1e-12) {
              if (v[k] < 0) v = -v;
              break;
            }
          }
          vals.push_back(es.eigenvalues()[i]);
          Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
          c.segment(off, b.dim) = svec(v * v.transpose());
          dec.idempotents.push_back(std::move(c));
        }
        break;
      }
    }
  }
  dec.eigenvalues = Eigen::Map<Eigen::VectorXd>(vals.data(),
                                                static_cast<int>(vals.size()));
  return dec;
}

double min_eigenvalue(const ConeSpec& spec, const Eigen::VectorXd& x) {
  check_dim(spec, x);
  double mn = std::numeric_limits<double>::infinity();
  for (int h = 0; h < spec.num_blocks(); ++h) {
    const Block& b = spec.block(h);
    const int off = spec.block_offset(h);
    auto xb = x.segment(off, b.dim);
    switch (b.kind) {
      case BlockKind::Nonneg:
        if (b.dim > 0) mn = std::min(mn, xb.minCoeff());
        break;
      case BlockKind::SecondOrder:
        mn = std::min(mn, xb[0] - xb.tail(b.dim - 1).norm());
        break;
      case BlockKind::PsdVec: {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
            smat(xb), Eigen::EigenvaluesOnly);
        if (es.info() != Eigen::Success)
          throw std::runtime_error("symmetric eigensolver failed");
        mn = std::min(mn, es.eigenvalues().minCoeff());
        break;
      }
    }
  }
  return mn;
}

Eigen::VectorXd sample_primitive_idempotent(const ConeSpec& spec,
                                            int block_index, CounterRng& rng) {
  if (block_index < 0 || block_index >= spec.num_blocks())
    throw std::invalid_argument("block index out of range");
  const Block& b = spec.block(block_index);
  const int off = spec.block_offset(block_index);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(spec.ambient_dim());
  switch (b.kind) {
    case BlockKind::Nonneg:
      c[off + static_cast<int>(rng.uniform_index(b.dim))] = 1.0;
      break;
    case BlockKind::SecondOrder: {
      c[off] = 0.5;
      c.segment(off + 1, b.dim - 1) = 0.5 * rng.sphere_vector(b.dim - 1);
      break;
    }
    case BlockKind::PsdVec: {
      Eigen::VectorXd v = rng.sphere_vector(b.order);
      c.segment(off, b.dim) = svec(v * v.transpose());
      break;
    }
  }
  return c;
}

std::vector<Eigen::VectorXd> nonneg_unit_idempotents(const ConeSpec& spec) {
  std::vector<Eigen::VectorXd> out;
  for (int h = 0; h < spec.num_blocks(); ++h) {
    if (spec.block(h).kind != BlockKind::Nonneg) continue;
    const int off = spec.block_offset(h);
    for (int i = 0; i < spec.block(h).dim; ++i) {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(spec.ambient_dim());
      e[off + i] = 1.0;
      out.push_back(std::move(e));
    }
  }
  return out;
}

Eigen::VectorXd svec(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("svec: not square");
  const int n = static_cast<int>(m.rows());
  Eigen::VectorXd v(n * (n + 1) / 2);
  int k = 0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i <= j; ++i)
      v[k++] = (i == j) ? m(i, j) : kSqrt2 * m(i, j);
  return v;
}

Eigen::MatrixXd smat(const Eigen::VectorXd& v) {
  // v has length n(n+1)/2
  const int n = static_cast<int>((std::sqrt(8.0 * v.size() + 1.0) - 1.0) / 2.0 + 0.5);
  if (n * (n + 1) / 2 != v.size())
    throw std::invalid_argument("smat: invalid svec length");
  Eigen::MatrixXd m(n, n);
  int k = 0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i <= j; ++i) {
      double val = (i == j) ? v[k] : v[k] / kSqrt2;
      m(i, j) = val;
      m(j, i) = val;
      ++k;
    }
  return m;
}

QuadFormTable square_quadratic_forms(const ConeSpec& spec) {
  const int n = spec.ambient_dim();
  QuadFormTable t;
  t.q.assign(n, Eigen::MatrixXd::Zero(n, n));
  for (int h = 0; h < spec.num_blocks(); ++h) {
    const Block& b = spec.block(h);
    const int off = spec.block_offset(h);
    switch (b.kind) {
      case BlockKind::Nonneg:
        for (int i = 0; i < b.dim; ++i) t.q[off + i](off + i, off + i) = 1.0;
        break;
      case BlockKind::SecondOrder: {
        for (int i = 0; i < b.dim; ++i) t.q[off](off + i, off + i) = 1.0;
        for (int j = 1; j < b.dim; ++j) {
          t.q[off + j](off, off + j) = 1.0;
          t.q[off + j](off + j, off) = 1.0;
        }
        break;
      }
      case BlockKind::PsdVec: {
        const int m = b.order;
        for (int i = 0; i < m; ++i) {
          Eigen::MatrixXd& qd = t.q[spec.psd_entry_index(h, i, i)];
          qd(spec.psd_entry_index(h, i, i), spec.psd_entry_index(h, i, i)) = 1.0;
          for (int k = 0; k < m; ++k) {
            if (k == i) continue;
            int p = spec.psd_entry_index(h, k, i);
            qd(p, p) = 0.5;
          }
        }
        for (int i = 0; i < m; ++i)
          for (int j = i + 1; j < m; ++j) {
            Eigen::MatrixXd& qo = t.q[spec.psd_entry_index(h, i, j)];
            int pii = spec.psd_entry_index(h, i, i);
            int pij = spec.psd_entry_index(h, i, j);
            int pjj = spec.psd_entry_index(h, j, j);
            qo(pii, pij) += 0.5;
            qo(pij, pii) += 0.5;
            qo(pij, pjj) += 0.5;
            qo(pjj, pij) += 0.5;
            for (int k = 0; k < m; ++k) {
              if (k == i || k == j) continue;
              int pik = spec.psd_entry_index(h, i, k);
              int pjk = spec.psd_entry_index(h, j, k);
              qo(pik, pjk) += 0.5 / kSqrt2;
              qo(pjk, pik) += 0.5 / kSqrt2;
            }
          }
        break;
      }
    }
  }
  return t;
}

Eigen::VectorXd quad_rep_apply(const ConeSpec& spec, const Eigen::VectorXd& u,
                               const Eigen::VectorXd& v) {
  Eigen::VectorXd uv = jordan_product(spec, u, v);
  return 2.0 * jordan_product(spec, u, uv) -
         jordan_product(spec, jordan_product(spec, u, u), v);
}

Eigen::VectorXd spectral_map(const ConeSpec& spec, const Eigen::VectorXd& x,
                             double (*f)(double)) {
  SpectralDecomposition dec = spectral_decompose(spec, x);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(spec.ambient_dim());
  for (std::size_t i = 0; i < dec.idempotents.size(); ++i) {
    double fv = f(dec.eigenvalues[static_cast<int>(i)]);
    if (!std::isfinite(fv))
      throw std::domain_error("spectral_map: f(eigenvalue) not finite");
    out += fv * dec.idempotents[i];
  }
  return out;
}

}  // namespace gdnn
