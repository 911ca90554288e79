#include "gdnn/trs.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace gdnn {

namespace {

double eval_objective(const TrsProblem& p, const Eigen::VectorXd& v) {
  return v.dot(p.B * v) + 2.0 * p.b.dot(v) + p.c;
}

}  // namespace

TrsSolution solve_trs(const TrsProblem& p) {
  const int d = static_cast<int>(p.B.rows());
  if (d < 1 || p.B.cols() != d || p.b.size() != d)
    throw std::invalid_argument("solve_trs: inconsistent dimensions");

  TrsSolution best;
  if (d == 1) {
    // S^0 = {-1, +1}
    const double fp = p.B(0, 0) + 2 * p.b[0] + p.c;
    const double fm = p.B(0, 0) - 2 * p.b[0] + p.c;
    best.v = Eigen::VectorXd::Constant(1, fp <= fm ? 1.0 : -1.0);
    best.value = std::min(fp, fm);
    best.multiplier = p.B(0, 0) + (fp <= fm ? p.b[0] : -p.b[0]);
    return best;
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
      0.5 * (p.B + p.B.transpose()));
  if (es.info() != Eigen::Success)
    throw std::runtime_error("solve_trs: eigensolver failed");
  const Eigen::VectorXd lam = es.eigenvalues();
  const Eigen::MatrixXd Q = es.eigenvectors();
  const Eigen::VectorXd beta = Q.transpose() * p.b;
  const double l1 = lam[0];
  const double scale =
      std::max({1.0, std::abs(l1), std::abs(lam[d - 1]), p.b.norm()});

  // work with the gap sigma = l1 - mu > 0 so the secular equation keeps
  // full relative precision arbitrarily close to the hard case
  Eigen::VectorXd dist(d);
  for (int i = 0; i < d; ++i) dist[i] = lam[i] - l1;
  auto phi = [&](double sigma) {
    double s = 0.0;
    for (int i = 0; i < d; ++i) {
      const double g = dist[i] + sigma;
      const double r = beta[i] / g;
      s += r * r;
    }
    return s;
  };
  auto phi_prime = [&](double sigma) {
    double s = 0.0;
    for (int i = 0; i < d; ++i) {
      const double g = dist[i] + sigma;
      s -= 2.0 * (beta[i] * beta[i]) / (g * g * g);
    }
    return s;
  };

  const double cluster_tol = 1e-12 * scale;
  double bmin_sq = 0.0, phi_int = 0.0;
  for (int i = 0; i < d; ++i) {
    if (dist[i] <= cluster_tol)
      bmin_sq += beta[i] * beta[i];
    else
      phi_int += (beta[i] * beta[i]) / (dist[i] * dist[i]);
  }

  if (bmin_sq == 0.0 && phi_int < 1.0) {
    // hard case: mu = l1, fill the min eigenspace to reach the sphere
    Eigen::VectorXd vhat = Eigen::VectorXd::Zero(d);
    for (int i = 0; i < d; ++i)
      if (dist[i] > cluster_tol) vhat[i] = -beta[i] / dist[i];
    const double tau = std::sqrt(std::max(0.0, 1.0 - vhat.squaredNorm()));
    vhat[0] += tau;
    best.v = Q * vhat;
    best.multiplier = l1;
  } else {
    // secular equation phi(sigma) = 1 on (0, hi]; phi decreasing
    double lo = 0.0;
    double hi = p.b.norm() + 1.0;
    double sigma = (bmin_sq > 0.0 && phi_int < 1.0)
                       ? std::sqrt(bmin_sq / (1.0 - phi_int))
                       : 0.5 * hi;
    sigma = std::min(std::max(sigma, 1e-250), hi);
    for (int iter = 0; iter < 200; ++iter) {
      const double f = phi(sigma);
      const double psi = 1.0 / std::sqrt(f) - 1.0;
      if (std::abs(psi) <= 1e-14) break;
      if (psi < 0)
        lo = sigma;  // ||v|| > 1: gap too small
      else
        hi = sigma;
      const double dpsi = -0.5 * std::pow(f, -1.5) * phi_prime(sigma);
      double next = sigma - psi / dpsi;
      if (!(next > lo && next < hi) || !std::isfinite(next))
        next = (lo == 0.0) ? 0.01 * hi : std::sqrt(lo * hi);
      if (std::abs(next - sigma) <= 1e-16 * sigma) {
        sigma = next;
        break;
      }
      sigma = next;
    }
    Eigen::VectorXd vhat(d);
    for (int i = 0; i < d; ++i) vhat[i] = -beta[i] / (dist[i] + sigma);
    best.v = Q * vhat;
    best.multiplier = l1 - sigma;
  }
  best.v /= best.v.norm();
  best.value = eval_objective(p, best.v);
  return best;
}

}  // namespace gdnn
