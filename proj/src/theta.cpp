#include "semiabelic/theta.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace semiabelic {

SiegelMatrix::SiegelMatrix(Eigen::MatrixXcd entries) {
  const auto g = entries.rows();
  if (entries.cols() != g) throw non_positive_definite("tau must be square");
  if (g > 0) {
    double scale = std::max(1.0, entries.cwiseAbs().maxCoeff());
    if ((entries - entries.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale)
      throw non_positive_definite("tau is not symmetric");
  }
  entries_ = 0.5 * (entries + entries.transpose());
  im_ = entries_.imag();
  if (g > 0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(im_, Eigen::EigenvaluesOnly);
    lambda_min_ = es.eigenvalues().minCoeff();
    if (!(lambda_min_ > 0.0))
      throw non_positive_definite("Im tau is not positive definite");
    if (lambda_min_ < 1e-6)
      throw non_positive_definite(
          "Im tau is numerically degenerate (lambda_min < 1e-6)");
    ldlt_.compute(im_);
  } else {
    lambda_min_ = std::numeric_limits<double>::infinity();
  }
}

Eigen::VectorXd SiegelMatrix::solve_im(const Eigen::VectorXd& rhs) const {
  if (genus() == 0) return Eigen::VectorXd(0);
  return ldlt_.solve(rhs);
}

bool SiegelMatrix::approx_equal(const SiegelMatrix& other, double tol) const {
  if (genus() != other.genus()) return false;
  if (genus() == 0) return true;
  return (entries_ - other.entries_).cwiseAbs().maxCoeff() <= tol;
}

Characteristic::Characteristic(std::vector<int> e, std::vector<int> d)
    : eps(std::move(e)), delta(std::move(d)) {
  if (eps.size() != delta.size())
    throw std::invalid_argument("characteristic: eps/delta length mismatch");
  for (int v : eps)
    if (v != 0 && v != 1) throw std::invalid_argument("characteristic bits must be 0/1");
  for (int v : delta)
    if (v != 0 && v != 1) throw std::invalid_argument("characteristic bits must be 0/1");
}

int Characteristic::parity() const {
  int s = 0;
  for (size_t i = 0; i < eps.size(); ++i) s += eps[i] * delta[i];
  return s & 1;
}

Eigen::VectorXcd Characteristic::point(const SiegelMatrix& tau) const {
  const int g = tau.genus();
  if (g != genus()) throw std::invalid_argument("characteristic genus mismatch");
  Eigen::VectorXd e(g), d(g);
  for (int i = 0; i < g; ++i) {
    e[i] = eps[i];
    d[i] = delta[i];
  }
  return 0.5 * (tau.entries() * e + d.cast<cplx>());
}

std::vector<Characteristic> enumerate_characteristics(int g) {
  std::vector<Characteristic> out;
  out.reserve(size_t{1} << (2 * g));
  const int n = 1 << g;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      std::vector<int> e(g), d(g);
      for (int i = 0; i < g; ++i) {
        e[i] = (a >> (g - 1 - i)) & 1;
        d[i] = (b >> (g - 1 - i)) & 1;
      }
      out.emplace_back(std::move(e), std::move(d));
    }
  }
  return out;
}

namespace {

// Shared truncated-sum kernel: sums e(Q(n+a)/2 + (n+a).w) over n in Z^g with
// |n + a - peak| <= R, optionally with the term-wise gradient 2*pi*i*(n+a).
struct SumResult {
  cplx value{0, 0};
  Eigen::VectorXcd grad;
  double sum_abs = 0.0;
};

struct TailBounds {
  double value;  // bound on sum of |term| outside radius R
  double grad;   // same with the extra 2*pi*|n+a| factor
};

TailBounds tail_bound(int g, double lambda, double peak_norm, double max_term,
                      double R) {
  // Shell j holds lattice-offset points with |u| in [R+j, R+j+1); their count
  // is bounded by the enclosing box (2(R+j)+4)^g and each term by the Gaussian
  // at the inner shell radius.
  TailBounds tb{0.0, 0.0};
  for (int j = 0;; ++j) {
    double r = R + j;
    double count = std::pow(2.0 * r + 4.0, g);
    double s = count * std::exp(-M_PI * lambda * r * r);
    tb.value += max_term * s;
    tb.grad += max_term * s * 2.0 * M_PI * (peak_norm + r + 1.0);
    if (s < 1e-4 * std::exp(-M_PI * lambda * R * R) || j > 400) break;
  }
  return tb;
}

void enumerate_box(int dim, int g, const Eigen::VectorXd& a,
                   const Eigen::VectorXd& peak, double R2, Eigen::VectorXi& n,
                   const std::function<void(const Eigen::VectorXi&)>& emit,
                   double partial) {
  if (dim == g) {
    emit(n);
    return;
  }
  double center = peak[dim] - a[dim];
  double room = std::sqrt(std::max(0.0, R2 - partial));
  int lo = static_cast<int>(std::ceil(center - room));
  int hi = static_cast<int>(std::floor(center + room));
  for (int v = lo; v <= hi; ++v) {
    n[dim] = v;
    double d = v + a[dim] - peak[dim];
    enumerate_box(dim + 1, g, a, peak, R2, n, emit, partial + d * d);
  }
}

struct KernelOut {
  ThetaValue value;
  std::vector<ThetaValue> grad;
};

KernelOut theta_kernel(const SiegelMatrix& tau, const Eigen::VectorXcd& w,
                       const Eigen::VectorXd& a, double tol, bool want_grad) {
  const int g = tau.genus();
  if (tol <= 0) throw std::invalid_argument("tol must be positive");
  KernelOut out;
  if (g == 0) {
    out.value = ThetaValue{cplx(1.0, 0.0), 0.0};
    return out;
  }
  if (w.size() != g || a.size() != g)
    throw std::invalid_argument("theta: dimension mismatch with genus");

  const double lambda = tau.lambda_min();
  // Gaussian peak of |term| over real points: minimizes x^t Y x/2 + x^t Im w.
  Eigen::VectorXd y = w.imag();
  Eigen::VectorXd peak = -tau.solve_im(y);
  double min_exponent = 0.5 * peak.dot(tau.im() * peak) + peak.dot(y);
  double max_term = std::exp(-2.0 * M_PI * min_exponent);
  double peak_norm = peak.norm();

  double R = 1.0;
  TailBounds tb = tail_bound(g, lambda, peak_norm, max_term, R);
  while ((want_grad ? tb.grad : tb.value) > 0.5 * tol) {
    R += 0.5;
    if (R > kRadiusCap)
      throw radius_overflow("theta truncation radius exceeds cap 40");
    tb = tail_bound(g, lambda, peak_norm, max_term, R);
  }

  SumResult sum;
  sum.grad = Eigen::VectorXcd::Zero(g);
  Eigen::VectorXd grad_abs = Eigen::VectorXd::Zero(g);
  Eigen::VectorXi n(g);
  const Eigen::MatrixXcd& T = tau.entries();
  auto emit = [&](const Eigen::VectorXi& ni) {
    Eigen::VectorXcd m(g);
    for (int i = 0; i < g; ++i) m[i] = cplx(ni[i] + a[i], 0.0);
    cplx expo = 0.5 * (m.transpose() * T * m)(0) + m.dot(w);
    cplx term = e2pi(expo);
    sum.value += term;
    sum.sum_abs += std::abs(term);
    if (want_grad) {
      cplx f = cplx(0.0, 2.0 * M_PI) * term;
      for (int i = 0; i < g; ++i) {
        sum.grad[i] += f * m[i].real();
        grad_abs[i] += std::abs(f) * std::abs(m[i].real());
      }
    }
  };
  enumerate_box(0, g, a, peak, R * R, n, emit, 0.0);

  double slop = 4.0 * std::numeric_limits<double>::epsilon();
  out.value.value = sum.value;
  out.value.abs_error_bound = tb.value + slop * sum.sum_abs;
  if (want_grad) {
    out.grad.resize(g);
    for (int i = 0; i < g; ++i) {
      out.grad[i].value = sum.grad[i];
      out.grad[i].abs_error_bound = tb.grad + slop * grad_abs[i];
    }
  }
  return out;
}

Eigen::VectorXd half_vector(const std::vector<int>& bits) {
  Eigen::VectorXd v(bits.size());
  for (size_t i = 0; i < bits.size(); ++i) v[i] = 0.5 * bits[i];
  return v;
}

}  // namespace

ThetaValue theta(const SiegelMatrix& tau, const Eigen::VectorXcd& z, double tol) {
  Eigen::VectorXd a = Eigen::VectorXd::Zero(tau.genus());
  return theta_kernel(tau, z, a, tol, false).value;
}

ThetaValue theta_char(const SiegelMatrix& tau, const Eigen::VectorXcd& z,
                      const Characteristic& ch, double tol) {
  const int g = tau.genus();
  if (ch.genus() != g) throw std::invalid_argument("characteristic genus mismatch");
  if (g == 0) return ThetaValue{cplx(1.0, 0.0), 0.0};
  Eigen::VectorXcd w = z + half_vector(ch.delta).cast<cplx>();
  return theta_kernel(tau, w, half_vector(ch.eps), tol, false).value;
}

std::vector<ThetaValue> grad_theta(const SiegelMatrix& tau,
                                   const Eigen::VectorXcd& z,
                                   const Characteristic& ch, double tol) {
  const int g = tau.genus();
  if (ch.genus() != g) throw std::invalid_argument("characteristic genus mismatch");
  if (g == 0) return {};
  Eigen::VectorXcd w = z + half_vector(ch.delta).cast<cplx>();
  return theta_kernel(tau, w, half_vector(ch.eps), tol, true).grad;
}

std::vector<ThetaValue> grad_theta(const SiegelMatrix& tau,
                                   const Eigen::VectorXcd& z, double tol) {
  const int g = tau.genus();
  std::vector<int> zero(g, 0);
  return grad_theta(tau, z, Characteristic(zero, zero), tol);
}

std::vector<ThetaValue> f_m(const SiegelMatrix& tau, const Characteristic& ch,
                            double tol) {
  if (!ch.odd()) throw even_characteristic("f_m requires an odd characteristic");
  return grad_theta(tau, ch.point(tau), tol);
}

std::vector<ThetaValue> f_m_via_char(const SiegelMatrix& tau,
                                     const Characteristic& ch, double tol) {
  if (!ch.odd()) throw even_characteristic("f_m requires an odd characteristic");
  const int g = tau.genus();
  Eigen::VectorXd e(g), d(g);
  for (int i = 0; i < g; ++i) {
    e[i] = ch.eps[i];
    d[i] = ch.delta[i];
  }
  cplx expo = -0.125 * (e.transpose() * tau.entries() * e.cast<cplx>())(0) -
              0.25 * e.dot(d);
  cplx pref = e2pi(expo);
  auto grad = grad_theta(tau, Eigen::VectorXcd::Zero(g), ch, tol);
  for (auto& gv : grad) {
    gv.value *= pref;
    gv.abs_error_bound *= std::abs(pref);
  }
  return grad;
}

}  // namespace semiabelic
