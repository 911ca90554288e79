#include "gdnn/forms.hpp"

#include <cmath>
#include <stdexcept>

namespace gdnn {

Form::Form(int n_, int degree_)
    : n(n_), degree(degree_), basis(monomial_basis(n_, degree_)) {
  coeffs = Eigen::VectorXd::Zero(basis->size());
}

double Form::evaluate(const Eigen::VectorXd& x) const {
  double v = 0.0;
  for (int i = 0; i < basis->size(); ++i) {
    if (coeffs[i] == 0.0) continue;
    double term = coeffs[i];
    const MultiIndex& a = (*basis)[i];
    for (int k = 0; k < n; ++k)
      for (int p = 0; p < a[k]; ++p) term *= x[k];
    v += term;
  }
  return v;
}

MomentVector::MomentVector(int n_) : n(n_), basis(monomial_basis(n_, 4)) {
  y = Eigen::VectorXd::Zero(basis->size());
}

MomentVector MomentVector::of_point(const Eigen::VectorXd& x) {
  MomentVector mv(static_cast<int>(x.size()));
  for (int i = 0; i < mv.basis->size(); ++i) {
    const MultiIndex& a = (*mv.basis)[i];
    double v = 1.0;
    for (int k = 0; k < mv.n; ++k)
      for (int p = 0; p < a[k]; ++p) v *= x[k];
    mv.y[i] = v;
  }
  return mv;
}

Eigen::MatrixXd moment_matrix(const MomentVector& y) {
  return moment_matrix(y.n, 2, y.y);
}

Eigen::MatrixXd moment_matrix(int n, int m, const Eigen::VectorXd& y) {
  auto half = monomial_basis(n, m);
  auto full = monomial_basis(n, 2 * m);
  if (y.size() != full->size())
    throw std::invalid_argument("moment vector has wrong length");
  const int sz = half->size();
  Eigen::MatrixXd out(sz, sz);
  for (int a = 0; a < sz; ++a)
    for (int b = a; b < sz; ++b) {
      double v = y[full->index_of(multi_index_sum((*half)[a], (*half)[b]))];
      out(a, b) = v;
      out(b, a) = v;
    }
  return out;
}

Form multiply_quadratics(const Eigen::MatrixXd& q, const Eigen::MatrixXd& r) {
  if (q.rows() != q.cols() || r.rows() != r.cols() || q.rows() != r.rows())
    throw std::invalid_argument("multiply_quadratics: dimension mismatch");
  const int n = static_cast<int>(q.rows());
  Form out(n, 4);
  // gather nonzeros once; the expansion itself is exact accumulation
  struct Entry {
    int i, j;
    double v;
  };
  std::vector<Entry> qe, re;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (q(i, j) != 0.0) qe.push_back({i, j, q(i, j)});
      if (r(i, j) != 0.0) re.push_back({i, j, r(i, j)});
    }
  MultiIndex mono(n, 0);
  for (const auto& a : qe)
    for (const auto& b : re) {
      mono.assign(n, 0);
      mono[a.i]++;
      mono[a.j]++;
      mono[b.i]++;
      mono[b.j]++;
      out.coeffs[out.basis->index_of(mono)] += a.v * b.v;
    }
  return out;
}

Form multiply_by_norm_power(const Form& theta, int r) {
  if (r < 0) throw std::invalid_argument("multiply_by_norm_power: r < 0");
  Form cur = theta;
  for (int step = 0; step < r; ++step) {
    Form next(cur.n, cur.degree + 2);
    MultiIndex mono;
    for (int idx = 0; idx < cur.basis->size(); ++idx) {
      if (cur.coeffs[idx] == 0.0) continue;
      for (int i = 0; i < cur.n; ++i) {
        mono = (*cur.basis)[idx];
        mono[i] += 2;
        next.coeffs[next.basis->index_of(mono)] += cur.coeffs[idx];
      }
    }
    cur = std::move(next);
  }
  return cur;
}

MomentStructure moment_structure(int n) {
  MomentStructure ms;
  ms.half = monomial_basis(n, 2);
  ms.full = monomial_basis(n, 4);
  ms.positions.resize(ms.full->size());
  for (int a = 0; a < ms.half->size(); ++a)
    for (int b = a; b < ms.half->size(); ++b)
      ms.positions[ms.full->index_of(
                       multi_index_sum((*ms.half)[a], (*ms.half)[b]))]
          .emplace_back(a, b);
  return ms;
}

Eigen::VectorXd monomial_vector(int n, int m, const Eigen::VectorXd& x) {
  auto basis = monomial_basis(n, m);
  Eigen::VectorXd out(basis->size());
  for (int i = 0; i < basis->size(); ++i) {
    const MultiIndex& a = (*basis)[i];
    double v = 1.0;
    for (int k = 0; k < n; ++k)
      for (int p = 0; p < a[k]; ++p) v *= x[k];
    out[i] = v;
  }
  return out;
}

}  // namespace gdnn
