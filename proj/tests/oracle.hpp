#pragma once

// Test-only oracle: the theta series summed by brute force over a fixed large
// box, independent of the production truncation logic in semiabelic::theta.

#include <complex>

#include <Eigen/Dense>

namespace oracle {

using cplx = std::complex<double>;

inline cplx e2pi(cplx x) { return std::exp(cplx(0.0, 2.0 * M_PI) * x); }

// sum over n in {-R..R}^g of e((n+a)^t tau (n+a)/2 + (n+a)^t w)
inline cplx theta_sum(const Eigen::MatrixXcd& tau, const Eigen::VectorXcd& w,
                      const Eigen::VectorXd& a, int R = 30, bool grad = false,
                      int grad_dir = 0) {
  const int g = static_cast<int>(tau.rows());
  if (g == 0) return cplx(1.0, 0.0);
  cplx total(0.0, 0.0);
  Eigen::VectorXi n = Eigen::VectorXi::Constant(g, -R);
  while (true) {
    Eigen::VectorXcd m(g);
    for (int i = 0; i < g; ++i) m[i] = n[i] + a[i];
    cplx expo = 0.5 * (m.transpose() * tau * m)(0) + m.dot(w);
    cplx term = e2pi(expo);
    if (grad) term *= cplx(0.0, 2.0 * M_PI) * m[grad_dir];
    total += term;
    int i = 0;
    while (i < g && n[i] == R) n[i++] = -R;
    if (i == g) break;
    ++n[i];
  }
  return total;
}

inline cplx theta(const Eigen::MatrixXcd& tau, const Eigen::VectorXcd& z, int R = 30) {
  return theta_sum(tau, z, Eigen::VectorXd::Zero(tau.rows()), R);
}

inline cplx theta_char(const Eigen::MatrixXcd& tau, const Eigen::VectorXcd& z,
                       const std::vector<int>& eps, const std::vector<int>& delta,
                       int R = 30) {
  const int g = static_cast<int>(tau.rows());
  Eigen::VectorXd a(g);
  Eigen::VectorXcd w = z;
  for (int i = 0; i < g; ++i) {
    a[i] = 0.5 * eps[i];
    w[i] += 0.5 * delta[i];
  }
  return theta_sum(tau, w, a, R);
}

inline cplx grad_theta_char(const Eigen::MatrixXcd& tau, const Eigen::VectorXcd& z,
                            const std::vector<int>& eps, const std::vector<int>& delta,
                            int dir, int R = 30) {
  const int g = static_cast<int>(tau.rows());
  Eigen::VectorXd a(g);
  Eigen::VectorXcd w = z;
  for (int i = 0; i < g; ++i) {
    a[i] = 0.5 * eps[i];
    w[i] += 0.5 * delta[i];
  }
  return theta_sum(tau, w, a, R, true, dir);
}

}  // namespace oracle
