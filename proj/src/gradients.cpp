#include <cmath>

#include "semiabelic/models.hpp"

namespace semiabelic::models {

namespace {

struct Chart {
  // free fiber coordinates as (factor, coord); dependent quadric coordinates
  // with their defining triples (dep = x_a * x_b / pivot for our relations)
  std::vector<std::pair<int, int>> free_coords;
  std::vector<int> pivot;                       // per factor
  // dep_coord -> (mult_a, mult_b): dep = fiber[a]*fiber[b] (pivot normalized to 1)
  std::vector<std::array<int, 3>> deps;         // (dep, a, b) on factor 0
};

bool is_singular_fiber_point(const ModelComponent& c, const ComponentPoint& p) {
  // Singular points of F(2,2) / the quadric cone: coordinate points of the
  // ambient projective space lying in every quadric (exactly one nonzero
  // coordinate belonging to a quadric pair).
  if (c.quadrics.empty()) return false;
  int nonzero = 0, last = -1;
  for (int i = 0; i < p.fiber[0].size(); ++i)
    if (std::abs(p.fiber[0][i]) > 1e-12) {
      ++nonzero;
      last = i;
    }
  if (nonzero != 1) return false;
  for (const auto& q : c.quadrics)
    if (last == q[0] || last == q[1] || last == q[2] || last == q[3]) return true;
  // the cone point of F_4: the coordinate not appearing in the quadric
  return c.label == "x" || c.label == "y" || c.label == "F";
}

Chart build_chart(const DegenerationModel& model, const ComponentPoint& p0) {
  const auto& c = model.components[p0.component];
  ComponentPoint p = normalized(p0);
  Chart chart;
  chart.pivot.resize(c.factors.size());
  for (size_t f = 0; f < c.factors.size(); ++f) {
    int piv = 0;
    for (int i = 1; i < c.factors[f].size; ++i)
      if (std::abs(p.fiber[f][i]) > std::abs(p.fiber[f][piv])) piv = i;
    chart.pivot[f] = piv;
  }
  std::vector<bool> dependent(c.factors[0].size, false);
  if (!c.quadrics.empty()) {
    const int piv = chart.pivot[0];
    for (const auto& q : c.quadrics) {
      // write the relation as pivot * dep = a * b when the pivot occurs in it
      int dep = -1, a = -1, b = -1;
      if (q[0] == piv || q[1] == piv) {
        dep = (q[0] == piv) ? q[1] : q[0];
        a = q[2];
        b = q[3];
      } else if (q[2] == piv || q[3] == piv) {
        dep = (q[2] == piv) ? q[3] : q[2];
        a = q[0];
        b = q[1];
      } else {
        // F(2,2) second relation when the pivot is in the first pair: both
        // sides free of the pivot; eliminated via the chained relation below.
        continue;
      }
      // prefer eliminating one coordinate per remaining pair: dep = a*b/pivot
      if (!dependent[dep]) {
        dependent[dep] = true;
        chart.deps.push_back({dep, a, b});
      }
    }
    // F(2,2): relations pivot*partner = a*b = c*d. With pivot in pair
    // (piv, partner): eliminate one element of each other pair.
    if (c.quadrics.size() == 2) {
      // pairs (0,1),(2,3),(4,5); pivot pair index
      auto pair_of = [](int i) { return i / 2; };
      int pp = pair_of(chart.pivot[0]);
      int partner = chart.pivot[0] ^ 1;
      chart.deps.clear();
      std::fill(dependent.begin(), dependent.end(), false);
      for (int pr = 0; pr < 3; ++pr) {
        if (pr == pp) continue;
        int keep = 2 * pr;        // keep the even index free
        int dep = 2 * pr + 1;     // |value| choice is immaterial analytically
        // dep = pivot*partner / keep = partner / keep after normalization;
        // record as dep * keep = partner * pivot
        chart.deps.push_back({dep, partner, -1 - keep});  // encode division
        dependent[dep] = true;
      }
    }
  }
  for (size_t f = 0; f < c.factors.size(); ++f)
    for (int i = 0; i < c.factors[f].size; ++i) {
      if ((int)i == chart.pivot[f]) continue;
      if (f == 0 && dependent[i]) continue;
      chart.free_coords.push_back({(int)f, i});
    }
  return chart;
}

// Reconstruct a valid point from chart displacements (pivot stays 1,
// dependent coordinates recomputed from the quadrics).
ComponentPoint chart_point(const DegenerationModel& model, const ComponentPoint& base,
                           const Chart& chart, const std::vector<cplx>& delta) {
  ComponentPoint p = normalized(base);
  const int bg = model.base_genus();
  for (size_t d = 0; d < chart.free_coords.size(); ++d) {
    auto [f, i] = chart.free_coords[d];
    p.fiber[f][i] += delta[d];
  }
  for (int j = 0; j < bg; ++j)
    p.z[j] += delta[chart.free_coords.size() + j];
  for (const auto& dep : chart.deps) {
    if (dep[2] >= 0) {
      p.fiber[0][dep[0]] = p.fiber[0][dep[1]] * p.fiber[0][dep[2]];
    } else {
      int keep = -1 - dep[2];
      p.fiber[0][dep[0]] = p.fiber[0][dep[1]] / p.fiber[0][keep];
    }
  }
  return p;
}

// theta(z0 + V.b) for a monomial, with two backends: the direct series and the
// theta_m route theta(-m+v) = e(C) e(eps v/2) theta_m(-v), v = V.b + z0 + m.
struct ThetaBackend {
  const DegenerationModel& model;
  const ComponentPoint& p;
  double tol;
  bool theta_m_route = false;
  Characteristic ch;          // base characteristic (theta_m route)
  Eigen::VectorXcd m_point;   // (tau eps + delta)/2

  ThetaValue value(const Eigen::VectorXcd& arg) const {
    if (!theta_m_route) return theta(model.base_tau, arg, tol);
    Eigen::VectorXcd v = arg + m_point;
    cplx eps_v = 0.0;
    for (int i = 0; i < v.size(); ++i)
      eps_v += 0.5 * static_cast<double>(ch.eps[i]) * v[i];
    ThetaValue tm = theta_char(model.base_tau, -v, ch, tol);
    cplx pref = e2pi(eps_v);
    return ThetaValue{pref * tm.value, std::abs(pref) * tm.abs_error_bound};
  }

  std::vector<ThetaValue> grad(const Eigen::VectorXcd& arg) const {
    if (!theta_m_route) return grad_theta(model.base_tau, arg, tol);
    Eigen::VectorXcd v = arg + m_point;
    cplx eps_v = 0.0;
    for (int i = 0; i < v.size(); ++i)
      eps_v += 0.5 * static_cast<double>(ch.eps[i]) * v[i];
    cplx pref = e2pi(eps_v);
    ThetaValue tm = theta_char(model.base_tau, -v, ch, tol);
    auto tg = grad_theta(model.base_tau, -v, ch, tol);
    std::vector<ThetaValue> out(v.size());
    for (int i = 0; i < v.size(); ++i) {
      cplx eps_term = cplx(0, M_PI) * static_cast<double>(ch.eps[i]) * tm.value;
      out[i].value = pref * (eps_term - tg[i].value);
      out[i].abs_error_bound =
          std::abs(pref) * (M_PI * tm.abs_error_bound + tg[i].abs_error_bound);
    }
    return out;
  }
};

// Analytic gradient along the chart, generic over the backend.
std::vector<ThetaValue> chart_gradient(const DegenerationModel& model,
                                       const ComponentPoint& p0, const Chart& chart,
                                       const ThetaBackend& backend) {
  const auto& c = model.components[p0.component];
  ComponentPoint p = normalized(p0);
  const int bg = model.base_genus();
  const int M = c.monomial_count();

  // raw partials with respect to every fiber coordinate, and z derivatives
  std::vector<std::vector<ThetaValue>> raw(c.factors.size());
  for (size_t f = 0; f < c.factors.size(); ++f)
    raw[f].resize(c.factors[f].size);
  std::vector<ThetaValue> dz(bg);

  for (int mm = 0; mm < M; ++mm) {
    auto idx = c.unflatten(mm);
    Eigen::VectorXcd arg = p.z + model.shift_vec(c.monomial_vertex(idx));
    cplx full = c.coeff[mm];
    for (size_t f = 0; f < idx.size(); ++f) full *= p.fiber[f][idx[f]];
    bool any_partial = false;
    for (size_t f = 0; f < idx.size(); ++f) {
      cplx others = c.coeff[mm];
      for (size_t f2 = 0; f2 < idx.size(); ++f2)
        if (f2 != f) others *= p.fiber[f2][idx[f2]];
      if (others != cplx(0, 0)) any_partial = true;
    }
    if (full == cplx(0, 0) && !any_partial) continue;
    ThetaValue tv = backend.value(arg);
    for (size_t f = 0; f < idx.size(); ++f) {
      cplx others = c.coeff[mm];
      for (size_t f2 = 0; f2 < idx.size(); ++f2)
        if (f2 != f) others *= p.fiber[f2][idx[f2]];
      if (others == cplx(0, 0)) continue;
      raw[f][idx[f]].value += others * tv.value;
      raw[f][idx[f]].abs_error_bound += std::abs(others) * tv.abs_error_bound;
    }
    if (full != cplx(0, 0)) {
      auto tg = backend.grad(arg);
      for (int j = 0; j < bg; ++j) {
        dz[j].value += full * tg[j].value;
        dz[j].abs_error_bound += std::abs(full) * tg[j].abs_error_bound;
      }
    }
  }

  // chain rule through the dependent quadric coordinates
  std::vector<ThetaValue> out;
  for (auto [f, i] : chart.free_coords) {
    ThetaValue g = raw[f][i];
    if (f == 0) {
      for (const auto& dep : chart.deps) {
        cplx dd(0, 0);
        if (dep[2] >= 0) {
          if (dep[1] == i) dd = p.fiber[0][dep[2]];
          if (dep[2] == i) dd = p.fiber[0][dep[1]];
        } else {
          int keep = -1 - dep[2];
          if (dep[1] == i) dd = 1.0 / p.fiber[0][keep];
          if (keep == i)
            dd = -p.fiber[0][dep[1]] / (p.fiber[0][keep] * p.fiber[0][keep]);
        }
        if (dd != cplx(0, 0)) {
          g.value += raw[0][dep[0]].value * dd;
          g.abs_error_bound += raw[0][dep[0]].abs_error_bound * std::abs(dd);
        }
      }
    }
    out.push_back(g);
  }
  for (int j = 0; j < bg; ++j) out.push_back(dz[j]);
  return out;
}

}  // namespace

GradientResult gradient_at(const DegenerationModel& model, const FixedPoint& fp,
                           double tol) {
  if (!fp.odd_flag)
    throw not_on_divisor("gradient_at requires a fixed point on the divisor");
  const auto& c = model.components[fp.point.component];
  if (is_singular_fiber_point(c, normalized(fp.point)))
    throw singular_point_of_component(
        "fixed point sits at a singular point of this component");
  validate_point(model, fp.point);

  Chart chart = build_chart(model, fp.point);
  GradientResult res;
  for (auto [f, i] : chart.free_coords)
    res.chart.push_back("fiber:" + c.label + ":" + std::to_string(f) + ":" +
                        std::to_string(i));
  for (int j = 0; j < model.base_genus(); ++j)
    res.chart.push_back("z:" + std::to_string(j));

  ThetaBackend direct{model, fp.point, tol, false, {}, {}};
  res.gradient = chart_gradient(model, fp.point, chart, direct);

  // theta_m-basis closed forms exist for the kinds with printed formulas
  if (model.kind == ModelKind::Rank1 || model.kind == ModelKind::TwoP2 ||
      model.kind == ModelKind::Octahedron) {
    ThetaBackend tm{model,
                    fp.point,
                    tol,
                    true,
                    fp.base_char,
                    fp.base_char.genus() > 0
                        ? fp.base_char.point(model.base_tau)
                        : Eigen::VectorXcd(0)};
    auto cf = chart_gradient(model, fp.point, chart, tm);
    res.closed_form.reserve(cf.size());
    for (const auto& v : cf) res.closed_form.push_back(v.value);
    res.has_closed_form = true;
  }
  return res;
}

std::vector<cplx> gradient_finite_difference(const DegenerationModel& model,
                                             const FixedPoint& fp, double step) {
  Chart chart = build_chart(model, fp.point);
  const int dim = (int)chart.free_coords.size() + model.base_genus();
  std::vector<cplx> out(dim);
  for (int d = 0; d < dim; ++d) {
    std::vector<cplx> dplus(dim, 0.0), dminus(dim, 0.0);
    dplus[d] = step;
    dminus[d] = -step;
    ComponentPoint pp = chart_point(model, fp.point, chart, dplus);
    ComponentPoint pm = chart_point(model, fp.point, chart, dminus);
    cplx tp = eval_theta_component(model, pp, 1e-12).value;
    cplx tmv = eval_theta_component(model, pm, 1e-12).value;
    out[d] = (tp - tmv) / (2.0 * step);
  }
  return out;
}

double direction_mismatch(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  if (a.size() != b.size() || a.empty()) return 1.0;
  cplx dot = 0.0;
  double na = 0.0, nb = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * std::conj(b[i]);
    na += std::norm(a[i]);
    nb += std::norm(b[i]);
  }
  if (na == 0.0 || nb == 0.0) return 1.0;
  double cos2 = std::norm(dot) / (na * nb);
  return std::sqrt(std::max(0.0, 1.0 - std::min(1.0, cos2)));
}

}  // namespace semiabelic::models
