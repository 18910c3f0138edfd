#include "semiabelic/limits.hpp"

#include <cmath>

namespace semiabelic::limits {

using models::DegenerationModel;
using models::inconsistent_family;

SiegelMatrix DegeneratingFamily::assemble(double t) const {
  if (t < t_min)
    throw std::invalid_argument("t below t_min for this family");
  const int bg = g - n;
  Eigen::MatrixXcd tau = Eigen::MatrixXcd::Zero(g, g);
  for (int i = 0; i < n; ++i) {
    tau(i, i) = cplx(0.0, t);
    for (int j = 0; j < n; ++j)
      if (i != j) tau(i, j) = off_diag(i, j);
    for (int j = 0; j < bg; ++j) {
      tau(i, n + j) = b[i][j];
      tau(n + j, i) = b[i][j];
    }
  }
  for (int i = 0; i < bg; ++i)
    for (int j = 0; j < bg; ++j) tau(n + i, n + j) = base.entries()(i, j);
  return SiegelMatrix(tau);
}

ThetaValue translated_theta(const DegeneratingFamily& fam, double t,
                            const Eigen::VectorXcd& zeta,
                            const Eigen::VectorXcd& zprime, double tol) {
  if (zeta.size() != fam.n || zprime.size() != fam.g - fam.n)
    throw std::invalid_argument("translated_theta: argument dimensions");
  SiegelMatrix tau = fam.assemble(t);
  Eigen::VectorXcd z(fam.g);
  for (int i = 0; i < fam.n; ++i) z[i] = zeta[i] - 0.5 * tau.entries()(i, i);
  for (int j = 0; j < fam.g - fam.n; ++j) z[fam.n + j] = zprime[j];
  return theta(tau, z, tol);
}

models::DegenerationModel limit_model(const DegeneratingFamily& fam) {
  if (fam.n == 1) return DegenerationModel::rank1(fam.g, fam.base, fam.b[0]);
  std::map<std::pair<int, int>, cplx> t;
  for (int i = 0; i < fam.n; ++i)
    for (int j = i + 1; j < fam.n; ++j) t[{i, j}] = e2pi(fam.off_diag(i, j));
  return DegenerationModel::standard_rank_n(fam.g, fam.n, fam.base, fam.b, t);
}

namespace {

void check_consistent(const DegeneratingFamily& fam, const DegenerationModel& m) {
  bool kind_ok = (fam.n == 1 && m.kind == models::ModelKind::Rank1) ||
                 (m.kind == models::ModelKind::StandardRankN && m.k == fam.n);
  if (!kind_ok || m.g != fam.g)
    throw inconsistent_family("family and model describe different boundary points");
  if (!m.base_tau.approx_equal(fam.base, 1e-12))
    throw inconsistent_family("family/model base period matrices differ");
  for (int i = 0; i < fam.n; ++i)
    if (fam.g - fam.n > 0 &&
        (m.shifts[i] - fam.b[i]).cwiseAbs().maxCoeff() > 1e-12)
      throw inconsistent_family("family/model shifts differ");
  for (int i = 0; i < fam.n; ++i)
    for (int j = i + 1; j < fam.n; ++j) {
      cplx t = m.params.at("t" + std::to_string(i + 1) + std::to_string(j + 1));
      if (std::abs(t - e2pi(fam.off_diag(i, j))) > 1e-12 * std::abs(t))
        throw inconsistent_family("family/model gluing parameters differ");
    }
}

}  // namespace

std::vector<LimitRow> limit_residual(const DegeneratingFamily& fam,
                                     const models::DegenerationModel& model,
                                     const std::vector<double>& t_grid,
                                     int sample_points, double tol,
                                     std::uint64_t seed) {
  check_consistent(fam, model);
  const int bg = fam.g - fam.n;
  Rng rng(seed);
  // sample points on |x_j| = 1 with base z in a fixed fundamental-domain box
  std::vector<Eigen::VectorXcd> zetas, zs;
  for (int s = 0; s < sample_points; ++s) {
    Eigen::VectorXcd zeta(fam.n), z(bg);
    for (int i = 0; i < fam.n; ++i) zeta[i] = rng.uniform();
    Eigen::VectorXcd u(bg), v(bg);
    for (int i = 0; i < bg; ++i) {
      u[i] = rng.uniform(-0.4, 0.4);
      v[i] = rng.uniform(-0.4, 0.4);
    }
    if (bg > 0) z = u + fam.base.entries() * v;
    zetas.push_back(zeta);
    zs.push_back(z);
  }
  std::vector<LimitRow> rows;
  for (double t : t_grid) {
    double worst = 0.0;
    for (int s = 0; s < sample_points; ++s) {
      ThetaValue full = translated_theta(fam, t, zetas[s], zs[s], tol);
      models::ComponentPoint p;
      p.component = 0;
      p.z = zs[s];
      p.fiber.assign(fam.n, Eigen::VectorXcd::Zero(2));
      for (int i = 0; i < fam.n; ++i) {
        p.fiber[i][0] = 1.0;
        p.fiber[i][1] = e2pi(zetas[s][i]);
      }
      ThetaValue lim = eval_theta_component(model, p, tol);
      worst = std::max(worst, std::abs(full.value - lim.value));
    }
    rows.push_back({t, worst});
  }
  return rows;
}

double fitted_decay_exponent(const std::vector<LimitRow>& rows) {
  // least squares of log(residual) against t above the double-precision floor
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const auto& r : rows) {
    if (r.max_residual < 1e-12) continue;
    double y = std::log(r.max_residual);
    sx += r.t;
    sy += y;
    sxx += r.t * r.t;
    sxy += r.t * y;
    ++n;
  }
  if (n < 2) return 0.0;
  double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return -slope;
}

DegeneratingFamily random_family(int g, int n, std::uint64_t seed) {
  Rng rng(seed);
  DegeneratingFamily fam;
  fam.g = g;
  fam.n = n;
  fam.base = random_siegel(g - n, rng);
  fam.off_diag = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      cplx v = rng.complex_in_box(0.45, 0.1);
      fam.off_diag(i, j) = v;
      fam.off_diag(j, i) = v;
    }
  for (int i = 0; i < n; ++i) fam.b.push_back(random_shift(g - n, rng));
  return fam;
}

}  // namespace semiabelic::limits
