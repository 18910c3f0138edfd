#pragma once

#include "semiabelic/models.hpp"

namespace semiabelic::limits {

/// Period-matrix family with tau_jj = i*t on the first n diagonal entries,
/// fixed off-diagonal entries among them, fixed rows b_j against the
/// non-degenerate base block.
struct DegeneratingFamily {
  int g = 0;
  int n = 0;
  Eigen::MatrixXcd off_diag;             // n x n, j != k entries used
  std::vector<Eigen::VectorXcd> b;       // n rows, each length g-n
  SiegelMatrix base;                     // genus g-n
  double t_min = 0.8;
  double t_max = 6.0;

  SiegelMatrix assemble(double t) const;
};

/// Riemann theta at the Mumford-shifted argument: degenerate coordinates
/// zeta_j - tau_jj/2, base coordinates zprime.
ThetaValue translated_theta(const DegeneratingFamily& fam, double t,
                            const Eigen::VectorXcd& zeta,
                            const Eigen::VectorXcd& zprime, double tol = kDefaultTol);

/// Matching semi-abelic model for the family (Rank1 / StandardRankN with
/// t_{jk} = e(tau_jk)); throws inconsistent_family on mismatch.
models::DegenerationModel limit_model(const DegeneratingFamily& fam);

struct LimitRow {
  double t = 0.0;
  double max_residual = 0.0;
};

/// Max |translated theta - semi-abelic theta| over sample points on the open
/// torus part, per grid value of t.
std::vector<LimitRow> limit_residual(const DegeneratingFamily& fam,
                                     const models::DegenerationModel& model,
                                     const std::vector<double>& t_grid,
                                     int sample_points, double tol,
                                     std::uint64_t seed);

/// Least-squares slope of -log(residual) against t, ignoring entries below
/// the 1e-12 floor.
double fitted_decay_exponent(const std::vector<LimitRow>& rows);

/// Random family of the given kind for CLI/driver use.
DegeneratingFamily random_family(int g, int n, std::uint64_t seed);

}  // namespace semiabelic::limits
