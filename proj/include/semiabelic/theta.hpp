#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace semiabelic {

using cplx = std::complex<double>;

/// exp(2*pi*i*x)
inline cplx e2pi(cplx x) {
  return std::exp(cplx(0.0, 2.0 * M_PI) * x);
}

struct theta_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct non_positive_definite : theta_error {
  using theta_error::theta_error;
};
struct radius_overflow : theta_error {
  using theta_error::theta_error;
};
struct even_characteristic : theta_error {
  using theta_error::theta_error;
};

/// A value together with a rigorous bound on its absolute error
/// (series truncation tail plus floating point slop).
struct ThetaValue {
  cplx value{0.0, 0.0};
  double abs_error_bound = 0.0;
};

/// Point of the Siegel upper half space H_g: symmetric complex g x g with
/// positive definite imaginary part. Entries are symmetrized on construction;
/// matrices with lambda_min(Im tau) < 1e-6 are rejected as numerically
/// degenerate (boundary points belong to the degeneration models, not here).
class SiegelMatrix {
 public:
  explicit SiegelMatrix(Eigen::MatrixXcd entries);
  SiegelMatrix() : SiegelMatrix(Eigen::MatrixXcd(0, 0)) {}

  int genus() const { return static_cast<int>(entries_.rows()); }
  const Eigen::MatrixXcd& entries() const { return entries_; }
  const Eigen::MatrixXd& im() const { return im_; }
  double lambda_min() const { return lambda_min_; }

  /// Solve (Im tau) x = rhs.
  Eigen::VectorXd solve_im(const Eigen::VectorXd& rhs) const;

  bool approx_equal(const SiegelMatrix& other, double tol = 1e-12) const;

 private:
  Eigen::MatrixXcd entries_;
  Eigen::MatrixXd im_;
  Eigen::LDLT<Eigen::MatrixXd> ldlt_;
  double lambda_min_ = 0.0;
};

/// Half-integer theta characteristic (eps, delta) in {0,1}^{2g}, labeling the
/// two-torsion point m = (tau*eps + delta)/2.
struct Characteristic {
  std::vector<int> eps;
  std::vector<int> delta;

  Characteristic() = default;
  Characteristic(std::vector<int> e, std::vector<int> d);

  int genus() const { return static_cast<int>(eps.size()); }
  int parity() const;
  bool odd() const { return parity() == 1; }

  /// m = (tau*eps + delta)/2 on the universal cover.
  Eigen::VectorXcd point(const SiegelMatrix& tau) const;
};

/// All 2^{2g} characteristics, in lexicographic (eps,delta) order.
std::vector<Characteristic> enumerate_characteristics(int g);

inline constexpr double kDefaultTol = 1e-10;
inline constexpr double kRadiusCap = 40.0;

/// theta(tau, z) = sum_{n in Z^g} e(n^t tau n / 2 + n^t z), truncated to the
/// ball |n - center| <= R around the Gaussian peak center = -(Im tau)^{-1} Im z,
/// with R chosen so the certified tail is below tol.
ThetaValue theta(const SiegelMatrix& tau, const Eigen::VectorXcd& z,
                 double tol = kDefaultTol);

/// Theta with characteristic:
/// sum_n e((n+eps/2)^t tau (n+eps/2)/2 + (n+eps/2)^t (z+delta/2)).
ThetaValue theta_char(const SiegelMatrix& tau, const Eigen::VectorXcd& z,
                      const Characteristic& ch, double tol = kDefaultTol);

/// Term-wise differentiated series; entry j is d/dz_j of theta_char.
std::vector<ThetaValue> grad_theta(const SiegelMatrix& tau,
                                   const Eigen::VectorXcd& z,
                                   const Characteristic& ch,
                                   double tol = kDefaultTol);

/// Gradient of plain theta (zero characteristic).
std::vector<ThetaValue> grad_theta(const SiegelMatrix& tau,
                                   const Eigen::VectorXcd& z,
                                   double tol = kDefaultTol);

/// f_m = grad_z theta(tau, z) at the odd two-torsion point m = (tau eps + delta)/2,
/// evaluated directly on the translated series.
std::vector<ThetaValue> f_m(const SiegelMatrix& tau, const Characteristic& ch,
                            double tol = kDefaultTol);

/// Same vector via the characteristic route:
/// e(-eps^t tau eps/8 - eps^t delta/4) * grad theta[eps,delta](tau, 0).
std::vector<ThetaValue> f_m_via_char(const SiegelMatrix& tau,
                                     const Characteristic& ch,
                                     double tol = kDefaultTol);

}  // namespace semiabelic
