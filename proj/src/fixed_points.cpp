#include <cmath>
#include <set>

#include "semiabelic/models.hpp"

namespace semiabelic {

SiegelMatrix random_siegel(int g, Rng& rng) {
  if (g == 0) return SiegelMatrix(Eigen::MatrixXcd(0, 0));
  Eigen::MatrixXd re(g, g), q(g, g);
  for (int i = 0; i < g; ++i)
    for (int j = 0; j < g; ++j) {
      re(i, j) = rng.uniform(-0.45, 0.45);
      q(i, j) = rng.uniform(-1.0, 1.0);
    }
  re = 0.5 * (re + re.transpose()).eval();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(q);
  Eigen::MatrixXd orth = qr.householderQ();
  Eigen::VectorXd lam(g);
  for (int i = 0; i < g; ++i) lam[i] = rng.uniform(0.7, 1.7);
  Eigen::MatrixXd im = orth * lam.asDiagonal() * orth.transpose();
  im = 0.5 * (im + im.transpose()).eval();
  Eigen::MatrixXcd tau = re.cast<cplx>() + cplx(0, 1) * im.cast<cplx>();
  return SiegelMatrix(tau);
}

Eigen::VectorXcd random_shift(int dim, Rng& rng) {
  Eigen::VectorXcd b(dim);
  for (int i = 0; i < dim; ++i) b[i] = rng.complex_in_box(0.45, 0.22);
  return b;
}

namespace models {

namespace {

// e(eps^t v) for a complex vector v on the base universal cover.
cplx eps_phase(const Characteristic& ch, const Eigen::VectorXcd& v) {
  cplx s = 0.0;
  for (int i = 0; i < v.size(); ++i) s += static_cast<double>(ch.eps[i]) * v[i];
  return e2pi(s);
}

struct Builder {
  const DegenerationModel& model;
  std::vector<FixedPoint> out;

  Eigen::VectorXcd beta(int comp, int coord) const {
    return model.shift_vec(model.components[comp].factors[0].vertex[coord]);
  }

  // Fixed point on the stratum where exactly coordinates a,b of a
  // single-factor component survive: z = -m-(beta_a+beta_b)/2, u_a = 1,
  // u_b = sign (c_a/c_b) e(eps (beta_a-beta_b)/2).
  void edge(int comp, int a, int b, const Characteristic& ch, int sign, int mult,
            const std::string& stratum) {
    const auto& c = model.components[comp];
    Eigen::VectorXcd ba = beta(comp, a), bb = beta(comp, b);
    FixedPoint fp;
    fp.point.component = comp;
    fp.point.z = -ch.point(model.base_tau) - 0.5 * (ba + bb);
    fp.point.fiber = {Eigen::VectorXcd::Zero(c.factors[0].size)};
    fp.point.fiber[0][a] = 1.0;
    fp.point.fiber[0][b] = static_cast<double>(sign) * (c.coeff[a] / c.coeff[b]) *
                           eps_phase(ch, 0.5 * (ba - bb));
    fp.base_char = ch;
    fp.signs = {sign};
    fp.multiplicity = mult;
    fp.odd_flag = (sign == 1) == ch.odd();
    fp.stratum = stratum;
    out.push_back(std::move(fp));
  }

  void vertex(int comp, int v, const Characteristic& ch, int mult) {
    const auto& c = model.components[comp];
    FixedPoint fp;
    fp.point.component = comp;
    fp.point.z = -ch.point(model.base_tau) - beta(comp, v);
    fp.point.fiber = {Eigen::VectorXcd::Zero(c.factors[0].size)};
    fp.point.fiber[0][v] = 1.0;
    fp.base_char = ch;
    fp.multiplicity = mult;
    fp.odd_flag = ch.odd();
    fp.stratum = "vertex";
    out.push_back(std::move(fp));
  }
};

void check_generic_shifts(const DegenerationModel& model) {
  const int bg = model.base_genus();
  if (bg == 0) return;
  // No two theta translates of the model may differ by a two-torsion point.
  std::set<VecZ> vs;
  for (const auto& c : model.components)
    for (int m = 0; m < c.monomial_count(); ++m)
      vs.insert(c.monomial_vertex(c.unflatten(m)));
  std::vector<Eigen::VectorXcd> pts;
  for (const auto& v : vs) pts.push_back(model.shift_vec(v));
  auto chars = enumerate_characteristics(bg);
  for (size_t i = 0; i < pts.size(); ++i)
    for (size_t j = i + 1; j < pts.size(); ++j) {
      Eigen::VectorXcd d = pts[i] - pts[j];
      for (const auto& ch : chars) {
        Eigen::VectorXcd r = d - ch.point(model.base_tau);
        // distance to the lattice Z + tau Z
        Eigen::VectorXd n_guess =
            model.base_tau.solve_im(r.imag());
        Eigen::VectorXcd nv(bg);
        for (int a = 0; a < bg; ++a) nv[a] = std::round(n_guess[a]);
        Eigen::VectorXcd rem = r - model.base_tau.entries() * nv;
        double dist = 0.0;
        for (int a = 0; a < bg; ++a) {
          double re = rem[a].real() - std::round(rem[a].real());
          dist = std::max(dist, std::hypot(re, rem[a].imag()));
        }
        if (dist < 1e-6)
          throw degenerate_parameters(
              "two theta translates differ by a two-torsion point");
      }
    }
}

}  // namespace

std::vector<FixedPoint> fixed_points(const DegenerationModel& model) {
  check_generic_shifts(model);
  Builder b{model, {}};
  const int bg = model.base_genus();
  auto chars = enumerate_characteristics(bg);

  switch (model.kind) {
    case ModelKind::Rank1: {
      for (const auto& ch : chars) {
        for (int s : {1, -1}) b.edge(0, 0, 1, ch, s, 1, "interior");
        b.vertex(0, 0, ch, 2);
      }
      break;
    }
    case ModelKind::StandardRankN: {
      const int n = model.k;
      for (const auto& ch : chars) {
        for (int mu = 0; mu < (1 << n); ++mu) {
          std::vector<int> on;
          for (int j = 0; j < n; ++j)
            if (mu & (1 << j)) on.push_back(j);
          const int mult = 1 << (n - (int)on.size());
          for (int sbits = 0; sbits < (1 << on.size()); ++sbits) {
            FixedPoint fp;
            fp.point.component = 0;
            Eigen::VectorXcd half = Eigen::VectorXcd::Zero(bg);
            for (int j : on) half += 0.5 * model.shifts[j];
            fp.point.z = -ch.point(model.base_tau) - half;
            fp.point.fiber.assign(n, Eigen::VectorXcd::Zero(2));
            int sign_product = 1;
            for (int j = 0; j < n; ++j) fp.point.fiber[j][0] = 1.0;
            for (size_t a = 0; a < on.size(); ++a) {
              int j = on[a];
              int s = (sbits & (1 << a)) ? -1 : 1;
              sign_product *= s;
              fp.signs.push_back(s);
              cplx val = static_cast<double>(s) *
                         eps_phase(ch, -0.5 * model.shifts[j]);
              for (int kk : on)
                if (kk != j)
                  val /= std::sqrt(
                      model.params.at("t" + std::to_string(std::min(j, kk) + 1) +
                                      std::to_string(std::max(j, kk) + 1)));
              fp.point.fiber[j][1] = val;
            }
            fp.base_char = ch;
            fp.multiplicity = mult;
            fp.odd_flag = (sign_product == 1) == ch.odd();
            fp.stratum = "mu=" + std::to_string(mu);
            b.out.push_back(std::move(fp));
          }
        }
      }
      break;
    }
    case ModelKind::TwoP2: {
      for (const auto& ch : chars) {
        for (int s : {1, -1}) {
          b.edge(0, 1, 2, ch, s, 2, "edge(1,2)");
          b.edge(0, 0, 2, ch, s, 2, "edge(0,2)");
          b.edge(0, 0, 1, ch, s, 2, "edge(0,1)");
        }
        b.vertex(0, 0, ch, 4);
      }
      break;
    }
    case ModelKind::TwoP1xP2: {
      const cplx t13 = model.params.at("t13");
      const cplx t23 = model.params.at("t23");
      const auto& b1 = model.shifts[0];
      const auto& b2 = model.shifts[1];
      const auto& b3 = model.shifts[2];
      auto mk = [&](const Characteristic& ch, const Eigen::VectorXcd& half_sum,
                    cplx xi, int u0, cplx u_val, int u_pos, std::vector<int> signs,
                    int mult, bool odd, const std::string& stratum) {
        FixedPoint fp;
        fp.point.component = 0;
        fp.point.z = -ch.point(model.base_tau) - half_sum;
        fp.point.fiber = {Eigen::VectorXcd::Zero(2), Eigen::VectorXcd::Zero(3)};
        fp.point.fiber[0][0] = 1.0;
        fp.point.fiber[0][1] = xi;
        fp.point.fiber[1][u0] = 1.0;
        if (u_pos >= 0) fp.point.fiber[1][u_pos] = u_val;
        fp.base_char = ch;
        fp.signs = std::move(signs);
        fp.multiplicity = mult;
        fp.odd_flag = odd;
        fp.stratum = stratum;
        b.out.push_back(std::move(fp));
      };
      for (const auto& ch : chars) {
        const bool codd = ch.odd();
        for (int sx : {1, -1})
          for (int sa : {1, -1}) {
            bool odd = ((sx * sa) == 1) == codd;
            // diagonal face u0 = 0
            mk(ch, 0.5 * (b1 + b2 + b3),
               static_cast<double>(sx) / std::sqrt(t13 * t23) *
                   eps_phase(ch, -0.5 * b3),
               1,
               static_cast<double>(sa) * std::sqrt(t13 / t23) *
                   eps_phase(ch, 0.5 * (b1 - b2)),
               2, {sx, sa}, 2, odd, "face-diagonal");
            // face u1 = 0
            mk(ch, 0.5 * (b2 + b3),
               static_cast<double>(sx) / std::sqrt(t23) * eps_phase(ch, -0.5 * b3), 0,
               static_cast<double>(sa) / std::sqrt(t23) * eps_phase(ch, -0.5 * b2), 2,
               {sx, sa}, 2, odd, "face-b1");
            // face u2 = 0
            mk(ch, 0.5 * (b1 + b3),
               static_cast<double>(sx) / std::sqrt(t13) * eps_phase(ch, -0.5 * b3), 0,
               static_cast<double>(sa) / std::sqrt(t13) * eps_phase(ch, -0.5 * b1), 1,
               {sx, sa}, 2, odd, "face-b2");
          }
        for (int s : {1, -1}) {
          bool odd = (s == 1) == codd;
          // vertical edge: P2 vertex, P1 free
          mk(ch, 0.5 * b3, static_cast<double>(s) * eps_phase(ch, -0.5 * b3), 0,
             cplx(0, 0), -1, {s}, 4, odd, "edge-vertical");
          // horizontal edges: P1 at 0, pair on the triangle
          mk(ch, 0.5 * (b1 + b2), 0.0, 1,
             static_cast<double>(s) * eps_phase(ch, 0.5 * (b1 - b2)), 2, {s}, 4, odd,
             "edge-diagonal");
          mk(ch, 0.5 * b2, 0.0, 0, static_cast<double>(s) * eps_phase(ch, -0.5 * b2),
             2, {s}, 4, odd, "edge-b1");
          mk(ch, 0.5 * b1, 0.0, 0, static_cast<double>(s) * eps_phase(ch, -0.5 * b1),
             1, {s}, 4, odd, "edge-b2");
        }
        mk(ch, Eigen::VectorXcd::Zero(bg), 0.0, 0, cplx(0, 0), -1, {}, 8, codd,
           "vertex");
      }
      break;
    }
    case ModelKind::Octahedron: {
      const int F = 2;
      for (const auto& ch : chars) {
        const Eigen::VectorXcd B = model.total_shift();
        for (int s0 : {1, -1})
          for (int s2 : {1, -1})
            for (int s4 : {1, -1}) {
              FixedPoint fp;
              fp.point.component = F;
              fp.point.z = -ch.point(model.base_tau) - 0.5 * B;
              Eigen::VectorXcd y(6);
              cplx rho = static_cast<double>(s0) * eps_phase(ch, -0.5 * B);
              y[0] = 1.0;
              y[1] = rho * eps_phase(ch, model.shifts[0]);
              y[2] = static_cast<double>(s2) *
                     eps_phase(ch, 0.5 * (model.shifts[0] - model.shifts[1]));
              y[3] = rho * eps_phase(ch, model.shifts[1]) * y[2];
              y[4] = static_cast<double>(s4) *
                     eps_phase(ch, 0.5 * (model.shifts[0] - model.shifts[2]));
              y[5] = rho * eps_phase(ch, model.shifts[2]) * y[4];
              fp.point.fiber = {y};
              fp.base_char = ch;
              fp.signs = {s0, s2, s4};
              fp.multiplicity = 1;
              fp.odd_flag = (s0 == 1) == ch.odd();
              fp.stratum = "interior";
              b.out.push_back(std::move(fp));
            }
        for (int i = 0; i < 4; ++i)
          for (int j = i + 1; j < 4; ++j) {
            int a = -1, bb = -1;
            for (int c = 0; c < 4; ++c)
              if (c != i && c != j) (a < 0 ? a : bb) = c;
            for (int s : {1, -1})
              b.edge(0, a, bb, ch, s, 4,
                     "edge(" + std::to_string(i) + "," + std::to_string(j) + ")");
          }
        b.vertex(0, 0, ch, 8);
      }
      break;
    }
    case ModelKind::TwoPyramids: {
      const cplx c = model.params.at("c");
      for (const auto& ch : chars) {
        const auto& b1 = model.shifts[0];
        const auto& b2 = model.shifts[1];
        const auto& b3 = model.shifts[2];
        for (int s0 : {1, -1})
          for (int s2 : {1, -1}) {
            FixedPoint fp;
            fp.point.component = 2;  // pyramid x
            fp.point.z = -ch.point(model.base_tau) - 0.5 * model.total_shift();
            Eigen::VectorXcd x = Eigen::VectorXcd::Zero(5);
            x[1] = 1.0;
            x[2] = static_cast<double>(s0) * c * eps_phase(ch, 0.5 * (b1 + b3 - b2));
            x[3] = static_cast<double>(s2) * eps_phase(ch, 0.5 * (b1 - b2));
            x[4] = static_cast<double>(s0 * s2) * c * eps_phase(ch, 0.5 * b3);
            fp.point.fiber = {x};
            fp.base_char = ch;
            fp.signs = {s0, s2};
            fp.multiplicity = 2;
            fp.odd_flag = (s0 == 1) == ch.odd();
            fp.stratum = "face-square";
            b.out.push_back(std::move(fp));
          }
        for (int i = 0; i < 4; ++i)
          for (int j = i + 1; j < 4; ++j) {
            int a = -1, bb = -1;
            for (int cc = 0; cc < 4; ++cc)
              if (cc != i && cc != j) (a < 0 ? a : bb) = cc;
            for (int s : {1, -1})
              b.edge(0, a, bb, ch, s, 4,
                     "edge(" + std::to_string(i) + "," + std::to_string(j) + ")");
          }
        b.vertex(0, 0, ch, 8);
      }
      break;
    }
    case ModelKind::PrincipalRank3: {
      for (const auto& ch : chars) {
        for (int i = 0; i < 4; ++i)
          for (int j = i + 1; j < 4; ++j) {
            int a = -1, bb = -1;
            for (int cc = 0; cc < 4; ++cc)
              if (cc != i && cc != j) (a < 0 ? a : bb) = cc;
            for (int s : {1, -1})
              b.edge(0, a, bb, ch, s, 4,
                     "edge(" + std::to_string(i) + "," + std::to_string(j) + ")");
          }
        // the long diagonal of the middle octahedron, on component 2
        for (int s : {1, -1}) b.edge(1, 0, 3, ch, s, 4, "edge-diagonal");
        b.vertex(0, 0, ch, 8);
      }
      break;
    }
  }
  return b.out;
}

DegenerationModel DegenerationModel::random(ModelKind kind, int g, std::uint64_t seed,
                                            int n_standard) {
  const int k = torus_rank(kind, n_standard);
  for (int attempt = 0; attempt < 64; ++attempt) {
    Rng rng(seed + 1000003ULL * static_cast<std::uint64_t>(attempt));
    SiegelMatrix base = random_siegel(g - k, rng);
    std::vector<Eigen::VectorXcd> b;
    for (int i = 0; i < k; ++i) b.push_back(random_shift(g - k, rng));
    DegenerationModel m;
    try {
      switch (kind) {
        case ModelKind::Rank1:
          m = rank1(g, base, b[0]);
          break;
        case ModelKind::StandardRankN: {
          std::map<std::pair<int, int>, cplx> t;
          for (int i = 0; i < k; ++i)
            for (int j = i + 1; j < k; ++j) t[{i, j}] = rng.unit_annulus();
          m = standard_rank_n(g, k, base, b, t);
          break;
        }
        case ModelKind::TwoP2:
          m = two_p2(g, base, b[0], b[1]);
          break;
        case ModelKind::TwoP1xP2:
          m = two_p1xp2(g, base, b, rng.unit_annulus(), rng.unit_annulus());
          break;
        case ModelKind::Octahedron:
          m = octahedron(g, base, b, rng.unit_annulus(), rng.unit_annulus());
          break;
        case ModelKind::TwoPyramids:
          m = two_pyramids(g, base, b, rng.unit_annulus());
          break;
        case ModelKind::PrincipalRank3:
          m = principal_rank3(g, base, b);
          break;
      }
      // genericity: distinct translates and even fixed points bounded away
      // from the divisor
      auto fps = fixed_points(m);
      bool ok = true;
      for (const auto& fp : fps) {
        if (fp.odd_flag) continue;
        double scale = eval_scale(m, fp.point, 1e-8);
        if (std::abs(eval_theta_component(m, fp.point, 1e-8).value) <
            1e-3 * std::max(1.0, scale)) {
          ok = false;
          break;
        }
      }
      if (ok) return m;
    } catch (const degenerate_parameters&) {
      continue;
    }
  }
  throw degenerate_parameters("could not sample a generic model");
}

}  // namespace models
}  // namespace semiabelic
