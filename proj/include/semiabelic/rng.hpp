#pragma once

#include <cstdint>
#include <random>

#include "semiabelic/theta.hpp"

namespace semiabelic {

/// Seeded, cross-platform reproducible RNG. mt19937_64 produces a
/// standard-mandated bit sequence; uniforms are mapped from raw 64-bit draws
/// directly, so identical seeds give identical doubles on every platform
/// (std::uniform_real_distribution is implementation-defined and avoided).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t raw() { return gen_(); }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  int uniform_int(int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(gen_() % static_cast<std::uint64_t>(hi - lo + 1));
  }

  cplx complex_in_box(double re_half, double im_half) {
    double re = uniform(-re_half, re_half);
    double im = uniform(-im_half, im_half);
    return cplx(re, im);
  }

  /// Nonzero scalar with modulus in [0.5, 2] and random phase.
  cplx unit_annulus() {
    double r = std::exp(uniform(-std::log(2.0), std::log(2.0)));
    double phi = uniform(0.0, 2.0 * M_PI);
    return cplx(r * std::cos(phi), r * std::sin(phi));
  }

 private:
  std::mt19937_64 gen_;
};

/// Random point of H_g with lambda_min(Im tau) in roughly [0.6, 1.7].
SiegelMatrix random_siegel(int g, Rng& rng);

/// Random base shift vector with moderate imaginary part.
Eigen::VectorXcd random_shift(int dim, Rng& rng);

}  // namespace semiabelic
