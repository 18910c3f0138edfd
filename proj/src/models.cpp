#include "semiabelic/models.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>

namespace semiabelic::models {

std::string kind_name(ModelKind k) {
  switch (k) {
    case ModelKind::Rank1: return "rank1";
    case ModelKind::StandardRankN: return "standard";
    case ModelKind::TwoP2: return "two-p2";
    case ModelKind::TwoP1xP2: return "two-p1xp2";
    case ModelKind::Octahedron: return "octahedron";
    case ModelKind::TwoPyramids: return "two-pyramids";
    case ModelKind::PrincipalRank3: return "principal-rank3";
  }
  return "?";
}

ModelKind kind_from_name(const std::string& name) {
  for (ModelKind k : {ModelKind::Rank1, ModelKind::StandardRankN, ModelKind::TwoP2,
                      ModelKind::TwoP1xP2, ModelKind::Octahedron,
                      ModelKind::TwoPyramids, ModelKind::PrincipalRank3})
    if (kind_name(k) == name) return k;
  throw std::invalid_argument("unknown model kind: " + name);
}

int torus_rank(ModelKind k, int n_standard) {
  switch (k) {
    case ModelKind::Rank1: return 1;
    case ModelKind::StandardRankN: return n_standard;
    case ModelKind::TwoP2: return 2;
    default: return 3;
  }
}

int ModelComponent::monomial_count() const {
  int m = 1;
  for (const auto& f : factors) m *= f.size;
  return m;
}

std::vector<int> ModelComponent::unflatten(int m) const {
  std::vector<int> idx(factors.size());
  for (int f = static_cast<int>(factors.size()) - 1; f >= 0; --f) {
    idx[f] = m % factors[f].size;
    m /= factors[f].size;
  }
  return idx;
}

int ModelComponent::flatten(const std::vector<int>& idx) const {
  int m = 0;
  for (size_t f = 0; f < factors.size(); ++f) m = m * factors[f].size + idx[f];
  return m;
}

VecZ ModelComponent::monomial_vertex(const std::vector<int>& idx) const {
  VecZ v(factors[0].vertex[0].size(), 0);
  for (size_t f = 0; f < factors.size(); ++f) {
    const VecZ& w = factors[f].vertex[idx[f]];
    for (size_t i = 0; i < v.size(); ++i) v[i] += w[i];
  }
  return v;
}

Eigen::VectorXcd DegenerationModel::shift_vec(const VecZ& v) const {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(base_genus());
  for (int i = 0; i < k; ++i)
    if (v[i] != 0) out += static_cast<double>(v[i]) * shifts[i];
  return out;
}

Eigen::VectorXcd DegenerationModel::total_shift() const {
  VecZ ones(k, 1);
  return shift_vec(ones);
}

int DegenerationModel::component_index(const std::string& label) const {
  for (size_t i = 0; i < components.size(); ++i)
    if (components[i].label == label) return static_cast<int>(i);
  throw wrong_component("no component labeled " + label);
}

namespace {

VecZ ez(int k, int i, int sign = 1) {
  VecZ v(k, 0);
  v[i] = sign;
  return v;
}

FiberFactor p1_factor(int k, const VecZ& dir_vertex) {
  FiberFactor f;
  f.size = 2;
  f.vertex = {VecZ(k, 0), dir_vertex};
  return f;
}

GluingAssign from(int src, cplx scale = 1.0) { return GluingAssign{src, scale}; }
GluingAssign zero() { return GluingAssign{-1, 1.0}; }

InvolutionMap identity_involution(const ModelComponent& c, int dst) {
  InvolutionMap m;
  m.dst = dst;
  m.map.resize(c.factors.size());
  for (size_t f = 0; f < c.factors.size(); ++f) {
    for (int i = 0; i < c.factors[f].size; ++i)
      m.map[f].push_back({i, cplx(1.0, 0.0)});
  }
  return m;
}

GluingMap inverse_gluing(const GluingMap& g,
                         const std::vector<ModelComponent>& comps) {
  GluingMap inv;
  inv.name = g.name + "-inv";
  inv.src = g.dst;
  inv.dst = g.src;
  inv.shift = g.shift;
  for (auto& s : inv.shift) s = -s;
  const auto& dst_factors = comps[g.dst].factors;
  const auto& src_factors = comps[g.src].factors;
  // zero pattern of the inverse = destination coordinates the map sets to zero
  for (size_t f = 0; f < dst_factors.size(); ++f)
    for (int i = 0; i < dst_factors[f].size; ++i)
      if (g.assign[f][i].src_coord < 0) inv.zero_pattern.push_back({(int)f, i});
  inv.assign.resize(src_factors.size());
  for (size_t f = 0; f < src_factors.size(); ++f)
    inv.assign[f].assign(src_factors[f].size, zero());
  for (size_t f = 0; f < dst_factors.size(); ++f)
    for (int i = 0; i < dst_factors[f].size; ++i) {
      const auto& a = g.assign[f][i];
      if (a.src_coord >= 0) inv.assign[f][a.src_coord] = from(i, 1.0 / a.scale);
    }
  return inv;
}

// j o g o j : maps the involution image of g's source onto the image of its
// destination; base shift flips sign.
GluingMap conjugate_gluing(const GluingMap& g, const std::vector<ModelComponent>& comps,
                           const std::vector<InvolutionMap>& invol) {
  // involution maps component invsrc -> g.src with permutation+scale data; we
  // need its inverse direction too, but all our involutions are self-paired
  // identity-or-swap maps, so invert explicitly.
  int src2 = -1, dst2 = -1;
  for (size_t c = 0; c < invol.size(); ++c) {
    if (invol[c].dst == g.src) src2 = static_cast<int>(c);
    if ((int)c == g.dst) dst2 = invol[c].dst;
  }
  if (src2 < 0 || dst2 < 0) throw model_error("conjugate_gluing: missing involution");
  const InvolutionMap& pre = invol[src2];   // src2 -> g.src
  const InvolutionMap& post = invol[g.dst]; // g.dst -> dst2

  GluingMap out;
  out.name = g.name + "-conj";
  out.src = src2;
  out.dst = dst2;
  out.shift = g.shift;
  for (auto& s : out.shift) s = -s;
  // zero pattern: coordinate c of src2 feeds pre.map into g.src coordinate;
  // zero is required where g requires it.
  for (auto [f, c] : g.zero_pattern) {
    out.zero_pattern.push_back({f, pre.map[f][c].first});
  }
  const auto& dst_factors = comps[dst2].factors;
  out.assign.resize(dst_factors.size());
  for (size_t f = 0; f < dst_factors.size(); ++f) {
    out.assign[f].assign(dst_factors[f].size, zero());
    for (int i = 0; i < dst_factors[f].size; ++i) {
      // dst2 coord i pulls from g-image coord j0 = post.map[f][i].first, which
      // g fills from its source coord a.src_coord, fed in turn by src2 coord
      // pre.map[f][a.src_coord].first.
      int j0 = post.map[f][i].first;
      const auto& a = g.assign[f][j0];
      if (a.src_coord >= 0) {
        auto [c, s_pre] = pre.map[f][a.src_coord];
        out.assign[f][i] = from(c, post.map[f][i].second * a.scale * s_pre);
      }
    }
  }
  return out;
}

bool same_gluing(const GluingMap& a, const GluingMap& b) {
  if (a.src != b.src || a.dst != b.dst || a.shift != b.shift) return false;
  auto za = a.zero_pattern, zb = b.zero_pattern;
  std::sort(za.begin(), za.end());
  std::sort(zb.begin(), zb.end());
  if (za != zb) return false;
  // assignments equal up to one scalar per destination factor
  for (size_t f = 0; f < a.assign.size(); ++f) {
    cplx ratio(0, 0);
    for (size_t i = 0; i < a.assign[f].size(); ++i) {
      const auto& x = a.assign[f][i];
      const auto& y = b.assign[f][i];
      if ((x.src_coord < 0) != (y.src_coord < 0)) return false;
      if (x.src_coord < 0) continue;
      if (x.src_coord != y.src_coord) return false;
      cplx r = x.scale / y.scale;
      if (std::abs(ratio) == 0.0)
        ratio = r;
      else if (std::abs(r - ratio) > 1e-12 * std::abs(ratio))
        return false;
    }
  }
  return true;
}

void add_gluing(std::vector<GluingMap>& list, const GluingMap& g) {
  for (const auto& h : list)
    if (same_gluing(g, h)) return;
  list.push_back(g);
}

// Adds conjugates and inverses of the seed maps and closes the list.
void close_gluings(DegenerationModel& m) {
  std::vector<GluingMap> seeds = m.gluings;
  for (const auto& g : seeds)
    add_gluing(m.gluings, conjugate_gluing(g, m.components, m.invol));
  std::vector<GluingMap> all = m.gluings;
  for (const auto& g : all)
    add_gluing(m.gluings, inverse_gluing(g, m.components));
}

void check_model_inputs(int g, int k, const SiegelMatrix& base,
                        const std::vector<Eigen::VectorXcd>& b) {
  if (g < k) throw std::invalid_argument("genus must be at least the torus rank");
  if (base.genus() != g - k)
    throw std::invalid_argument("base_tau genus must equal g - k");
  if ((int)b.size() != k) throw std::invalid_argument("need k shift vectors");
  for (const auto& v : b)
    if (v.size() != g - k) throw std::invalid_argument("shift dimension mismatch");
}

void check_param_nonzero(const char* name, cplx v) {
  if (std::abs(v) == 0.0)
    throw std::invalid_argument(std::string("parameter ") + name + " must be nonzero");
}

}  // namespace

DegenerationModel DegenerationModel::rank1(int g, SiegelMatrix base,
                                           Eigen::VectorXcd b) {
  check_model_inputs(g, 1, base, {b});
  DegenerationModel m;
  m.kind = ModelKind::Rank1;
  m.g = g;
  m.k = 1;
  m.base_tau = std::move(base);
  m.shifts = {std::move(b)};

  ModelComponent u;
  u.label = "u";
  u.factors = {p1_factor(1, ez(1, 0))};
  u.coeff = {1.0, 1.0};  // theta(z) + x theta(z+b)
  m.components = {u};

  InvolutionMap j;  // (z,x) -> (-b-z, x^{-1})
  j.dst = 0;
  j.map = {{{1, 1.0}, {0, 1.0}}};
  m.invol = {j};

  GluingMap gl;  // (z, 0) ~ (z-b, infinity)
  gl.name = "zero-infinity";
  gl.src = gl.dst = 0;
  gl.zero_pattern = {{0, 1}};
  gl.assign = {{zero(), from(0)}};
  gl.shift = {-1};
  m.gluings = {gl};
  close_gluings(m);
  return m;
}

DegenerationModel DegenerationModel::standard_rank_n(
    int g, int n, SiegelMatrix base, std::vector<Eigen::VectorXcd> b,
    const std::map<std::pair<int, int>, cplx>& t) {
  if (n < 1 || n > 5) throw std::invalid_argument("standard rank n supports 1..5");
  check_model_inputs(g, n, base, b);
  DegenerationModel m;
  m.kind = ModelKind::StandardRankN;
  m.g = g;
  m.k = n;
  m.n_standard = n;
  m.base_tau = std::move(base);
  m.shifts = std::move(b);

  auto tval = [&](int j, int kk) -> cplx {
    auto it = t.find({std::min(j, kk), std::max(j, kk)});
    if (it == t.end()) throw std::invalid_argument("missing gluing parameter t");
    check_param_nonzero("t_{jk}", it->second);
    return it->second;
  };
  for (int j = 0; j < n; ++j)
    for (int kk = j + 1; kk < n; ++kk)
      m.params["t" + std::to_string(j + 1) + std::to_string(kk + 1)] = tval(j, kk);

  ModelComponent u;
  u.label = "u";
  for (int j = 0; j < n; ++j) u.factors.push_back(p1_factor(n, ez(n, j)));
  u.coeff.resize(u.monomial_count());
  for (int mm = 0; mm < u.monomial_count(); ++mm) {
    auto mu = u.unflatten(mm);
    cplx c = 1.0;
    for (int j = 0; j < n; ++j)
      for (int kk = j + 1; kk < n; ++kk)
        if (mu[j] == 1 && mu[kk] == 1) c *= tval(j, kk);
    u.coeff[mm] = c;
  }
  m.components = {u};

  InvolutionMap j;
  j.dst = 0;
  j.map.resize(n);
  for (int jj = 0; jj < n; ++jj) {
    cplx prod = 1.0;
    for (int kk = 0; kk < n; ++kk)
      if (kk != jj) prod *= 1.0 / tval(jj, kk);
    j.map[jj] = {{1, 1.0}, {0, prod}};  // x_j -> x_j^{-1} prod t^{-1}
  }
  m.invol = {j};

  for (int jj = 0; jj < n; ++jj) {
    GluingMap gl;
    gl.name = "face-b" + std::to_string(jj + 1);
    gl.src = gl.dst = 0;
    gl.zero_pattern = {{jj, 1}};
    gl.assign.resize(n);
    for (int kk = 0; kk < n; ++kk) {
      if (kk == jj)
        gl.assign[kk] = {zero(), from(0)};
      else
        gl.assign[kk] = {from(0), from(1, 1.0 / tval(jj, kk))};
    }
    gl.shift = ez(n, jj, -1);
    m.gluings.push_back(gl);
  }
  close_gluings(m);
  return m;
}

DegenerationModel DegenerationModel::two_p2(int g, SiegelMatrix base,
                                            Eigen::VectorXcd b1, Eigen::VectorXcd b2,
                                            cplx lambda0, cplx lambda1, cplx lambda2,
                                            cplx c) {
  check_model_inputs(g, 2, base, {b1, b2});
  check_param_nonzero("lambda0", lambda0);
  check_param_nonzero("lambda1", lambda1);
  check_param_nonzero("lambda2", lambda2);
  check_param_nonzero("c", c);
  DegenerationModel m;
  m.kind = ModelKind::TwoP2;
  m.g = g;
  m.k = 2;
  m.base_tau = std::move(base);
  m.shifts = {std::move(b1), std::move(b2)};
  m.params = {{"lambda0", lambda0}, {"lambda1", lambda1}, {"lambda2", lambda2}, {"c", c}};

  ModelComponent u, v;
  u.label = "u";
  u.factors = {{3, {VecZ{0, 0}, VecZ{1, 0}, VecZ{0, 1}}}};
  u.coeff = {lambda0, lambda1, lambda2};
  v.label = "v";
  v.factors = {{3, {VecZ{1, 1}, VecZ{0, 1}, VecZ{1, 0}}}};
  v.coeff = {lambda0, lambda1, lambda2};
  m.components = {u, v};

  m.invol = {identity_involution(u, 1), identity_involution(v, 0)};

  GluingMap diag;  // (z,(0:p:q))_u -> (z,(0:q:p))_v
  diag.name = "diagonal";
  diag.src = 0;
  diag.dst = 1;
  diag.zero_pattern = {{0, 0}};
  diag.assign = {{zero(), from(2), from(1)}};
  diag.shift = {0, 0};
  GluingMap g1;  // (z,(p:0:q))_u -> (z-b1,(q:0:p))_v
  g1.name = "face-b1";
  g1.src = 0;
  g1.dst = 1;
  g1.zero_pattern = {{0, 1}};
  g1.assign = {{from(2), zero(), from(0)}};
  g1.shift = {-1, 0};
  GluingMap g2;  // (z,(p:q:0))_u -> (z-b2,(c q:p:0))_v
  g2.name = "face-b2";
  g2.src = 0;
  g2.dst = 1;
  g2.zero_pattern = {{0, 2}};
  g2.assign = {{from(1, c), from(0), zero()}};
  g2.shift = {0, -1};
  m.gluings = {diag, g1, g2};
  close_gluings(m);
  return m;
}

DegenerationModel DegenerationModel::two_p1xp2(int g, SiegelMatrix base,
                                               std::vector<Eigen::VectorXcd> b,
                                               cplx t13, cplx t23) {
  check_model_inputs(g, 3, base, b);
  check_param_nonzero("t13", t13);
  check_param_nonzero("t23", t23);
  DegenerationModel m;
  m.kind = ModelKind::TwoP1xP2;
  m.g = g;
  m.k = 3;
  m.base_tau = std::move(base);
  m.shifts = std::move(b);
  m.params = {{"t13", t13}, {"t23", t23}};

  ModelComponent u, v;
  u.label = "u";
  u.factors = {p1_factor(3, ez(3, 2)), {3, {VecZ{0, 0, 0}, VecZ{1, 0, 0}, VecZ{0, 1, 0}}}};
  u.coeff = {1.0, 1.0, 1.0, 1.0, t13, t23};
  v.label = "v";
  v.factors = {{2, {VecZ{0, 0, 1}, VecZ{0, 0, 0}}},
               {3, {VecZ{1, 1, 0}, VecZ{0, 1, 0}, VecZ{1, 0, 0}}}};
  v.coeff = {1.0, 1.0, 1.0, 1.0, t13, t23};
  m.components = {u, v};

  m.invol = {identity_involution(u, 1), identity_involution(v, 0)};

  GluingMap diag;  // (z,(x,(0:p:q)))_u -> (z,(1/(t13 t23 x),(0:t23 q:t13 p)))_v
  diag.name = "diagonal";
  diag.src = 0;
  diag.dst = 1;
  diag.zero_pattern = {{1, 0}};
  diag.assign = {{from(1, t13 * t23), from(0)}, {zero(), from(2, t23), from(1, t13)}};
  diag.shift = {0, 0, 0};
  GluingMap g1;  // (z,(x,(p:0:q)))_u -> (z-b1,(1/(t23 x),(t23 q:0:p)))_v
  g1.name = "face-b1";
  g1.src = 0;
  g1.dst = 1;
  g1.zero_pattern = {{1, 1}};
  g1.assign = {{from(1, t23), from(0)}, {from(2, t23), zero(), from(0)}};
  g1.shift = {-1, 0, 0};
  GluingMap g2;  // (z,(x,(p:q:0)))_u -> (z-b2,(1/(t13 x),(t13 q:p:0)))_v
  g2.name = "face-b2";
  g2.src = 0;
  g2.dst = 1;
  g2.zero_pattern = {{1, 2}};
  g2.assign = {{from(1, t13), from(0)}, {from(1, t13), from(0), zero()}};
  g2.shift = {0, -1, 0};
  GluingMap g3;  // (z,(0,(u0:u1:u2)))_u -> (z-b3,(inf,(u0:u1/t13:u2/t23)))_u
  g3.name = "face-b3-u";
  g3.src = 0;
  g3.dst = 0;
  g3.zero_pattern = {{0, 1}};
  g3.assign = {{zero(), from(0)}, {from(0), from(1, 1.0 / t13), from(2, 1.0 / t23)}};
  g3.shift = {0, 0, -1};
  m.gluings = {diag, g1, g2, g3};
  close_gluings(m);
  return m;
}

DegenerationModel DegenerationModel::octahedron(int g, SiegelMatrix base,
                                                std::vector<Eigen::VectorXcd> b,
                                                cplx lambda2, cplx lambda4) {
  check_model_inputs(g, 3, base, b);
  check_param_nonzero("lambda2", lambda2);
  check_param_nonzero("lambda4", lambda4);
  DegenerationModel m;
  m.kind = ModelKind::Octahedron;
  m.g = g;
  m.k = 3;
  m.base_tau = std::move(base);
  m.shifts = std::move(b);

  const cplx mu1 = lambda4 / lambda2;
  const cplx mu2 = lambda4;
  const cplx mu3 = lambda4 * lambda4 / lambda2;
  const cplx t02 = lambda4 * lambda4;
  const cplx t12 = lambda4 * lambda4;
  const cplx t23 = 1.0 / (lambda4 * lambda4);
  const cplx t13 = lambda2 * lambda2 / (lambda4 * lambda4);
  const cplx t31 = t13;  // symmetric gluing parameter, forced by the b1-face
  m.params = {{"lambda2", lambda2}, {"lambda4", lambda4}, {"mu1", mu1},
              {"mu2", mu2},         {"mu3", mu3},         {"t31", t31},
              {"t02", t02},         {"t12", t12},         {"t23", t23},
              {"t13", t13}};

  ModelComponent u, v, F;
  u.label = "u";
  u.factors = {{4, {VecZ{0, 0, 0}, VecZ{1, 0, 0}, VecZ{0, 1, 0}, VecZ{0, 0, 1}}}};
  u.coeff = {1.0, mu1, mu2, mu3};
  v.label = "v";
  v.factors = {{4, {VecZ{1, 1, 1}, VecZ{0, 1, 1}, VecZ{1, 0, 1}, VecZ{1, 1, 0}}}};
  v.coeff = {1.0, mu1, mu2, mu3};
  F.label = "F";
  F.factors = {{6,
                {VecZ{1, 0, 0}, VecZ{0, 1, 1}, VecZ{0, 1, 0}, VecZ{1, 0, 1},
                 VecZ{0, 0, 1}, VecZ{1, 1, 0}}}};
  F.coeff = {1.0, 1.0, lambda2, lambda2, lambda4, lambda4};
  F.quadrics = {{0, 1, 2, 3}, {2, 3, 4, 5}};
  m.components = {u, v, F};

  InvolutionMap jF;  // (y0:...:y5) -> (y1:y0:y3:y2:y5:y4)
  jF.dst = 2;
  jF.map = {{{1, 1.0}, {0, 1.0}, {3, 1.0}, {2, 1.0}, {5, 1.0}, {4, 1.0}}};
  m.invol = {identity_involution(u, 1), identity_involution(v, 0), jF};

  GluingMap g0;  // (z,(p:0:q:0:r:0)) -> (z,(0:p:q:r))_u
  g0.name = "face-024";
  g0.src = 2;
  g0.dst = 0;
  g0.zero_pattern = {{0, 1}, {0, 3}, {0, 5}};
  g0.assign = {{zero(), from(0), from(2), from(4)}};
  g0.shift = {0, 0, 0};
  GluingMap g1;  // (z,(p:0:0:q:0:r)) -> (z+b1,(p:0:r:t31 q))_u
  g1.name = "face-035";
  g1.src = 2;
  g1.dst = 0;
  g1.zero_pattern = {{0, 1}, {0, 2}, {0, 4}};
  g1.assign = {{from(0), zero(), from(5), from(3, t31)}};
  g1.shift = {1, 0, 0};
  GluingMap g2;  // (z,(0:p:q:0:0:r)) -> (z+b2,(t02 q:t12 r:0:p))_u
  g2.name = "face-125";
  g2.src = 2;
  g2.dst = 0;
  g2.zero_pattern = {{0, 0}, {0, 3}, {0, 4}};
  g2.assign = {{from(2, t02), from(5, t12), zero(), from(1)}};
  g2.shift = {0, 1, 0};
  GluingMap g3;  // (z,(0:p:0:q:r:0)) -> (z+b3,(r:t13 q:t23 p:0))_u
  g3.name = "face-134";
  g3.src = 2;
  g3.dst = 0;
  g3.zero_pattern = {{0, 0}, {0, 2}, {0, 5}};
  g3.assign = {{from(4), from(3, t13), from(1, t23), zero()}};
  g3.shift = {0, 0, 1};
  m.gluings = {g0, g1, g2, g3};
  close_gluings(m);
  return m;
}

DegenerationModel DegenerationModel::two_pyramids(int g, SiegelMatrix base,
                                                  std::vector<Eigen::VectorXcd> b,
                                                  cplx c) {
  check_model_inputs(g, 3, base, b);
  check_param_nonzero("c", c);
  DegenerationModel m;
  m.kind = ModelKind::TwoPyramids;
  m.g = g;
  m.k = 3;
  m.base_tau = std::move(base);
  m.shifts = std::move(b);
  m.params = {{"c", c}};

  ModelComponent u, v, x, y;
  u.label = "u";
  u.factors = {{4, {VecZ{0, 0, 0}, VecZ{1, 0, 0}, VecZ{0, 1, 0}, VecZ{0, 0, 1}}}};
  u.coeff = {1.0, 1.0, c, 1.0};
  v.label = "v";
  v.factors = {{4, {VecZ{1, 1, 1}, VecZ{0, 1, 1}, VecZ{1, 0, 1}, VecZ{1, 1, 0}}}};
  v.coeff = {1.0, 1.0, c, 1.0};
  x.label = "x";
  x.factors = {{5,
                {VecZ{0, 0, 1}, VecZ{1, 0, 1}, VecZ{0, 1, 0}, VecZ{0, 1, 1},
                 VecZ{1, 0, 0}}}};
  x.coeff = {1.0, 1.0, 1.0 / c, c, 1.0};
  x.quadrics = {{1, 2, 3, 4}};
  y.label = "y";
  y.factors = {{5,
                {VecZ{1, 1, 0}, VecZ{0, 1, 0}, VecZ{1, 0, 1}, VecZ{1, 0, 0},
                 VecZ{0, 1, 1}}}};
  y.coeff = {1.0, 1.0, 1.0 / c, c, 1.0};
  y.quadrics = {{1, 2, 3, 4}};
  m.components = {u, v, x, y};

  m.invol = {identity_involution(u, 1), identity_involution(v, 0),
             identity_involution(x, 3), identity_involution(y, 2)};

  GluingMap m1;  // (z,(p:q:0:r:0))_x -> (z+b3,(p:q:r:0))_u
  m1.name = "x-top";
  m1.src = 2;
  m1.dst = 0;
  m1.zero_pattern = {{0, 2}, {0, 4}};
  m1.assign = {{from(0), from(1), from(3), zero()}};
  m1.shift = {0, 0, 1};
  GluingMap m2;  // (z,(p:q:0:0:r))_x -> (z-b2,(q:p:0:r))_v
  m2.name = "x-b2";
  m2.src = 2;
  m2.dst = 1;
  m2.zero_pattern = {{0, 2}, {0, 3}};
  m2.assign = {{from(1), from(0), zero(), from(4)}};
  m2.shift = {0, -1, 0};
  GluingMap m3;  // (z,(p:0:q:r:0))_x -> (z-b1,(c^2 r:0:p:q))_v
  m3.name = "x-b1";
  m3.src = 2;
  m3.dst = 1;
  m3.zero_pattern = {{0, 1}, {0, 4}};
  m3.assign = {{from(3, c * c), zero(), from(0), from(2)}};
  m3.shift = {-1, 0, 0};
  GluingMap m4;  // (z,(p:0:q:0:r))_x -> (z,(0:r:q/c^2:p))_u
  m4.name = "x-diagonal";
  m4.src = 2;
  m4.dst = 0;
  m4.zero_pattern = {{0, 1}, {0, 3}};
  m4.assign = {{zero(), from(4), from(2, 1.0 / (c * c)), from(0)}};
  m4.shift = {0, 0, 0};
  GluingMap mb;  // (z,(0:p:q:r:s))_x -> (z,(0:q/c:c p:s/c:c r))_y
  mb.name = "base-square";
  mb.src = 2;
  mb.dst = 3;
  mb.zero_pattern = {{0, 0}};
  mb.assign = {{zero(), from(2, 1.0 / c), from(1, c), from(4, 1.0 / c), from(3, c)}};
  mb.shift = {0, 0, 0};
  m.gluings = {m1, m2, m3, m4, mb};
  close_gluings(m);
  return m;
}

DegenerationModel DegenerationModel::principal_rank3(int g, SiegelMatrix base,
                                                     std::vector<Eigen::VectorXcd> b,
                                                     std::array<int, 3> permutation) {
  check_model_inputs(g, 3, base, b);
  {
    std::array<int, 3> s = permutation;
    std::sort(s.begin(), s.end());
    if (s != std::array<int, 3>{0, 1, 2})
      throw std::invalid_argument("permutation must be a permutation of 0,1,2");
  }
  DegenerationModel m;
  m.kind = ModelKind::PrincipalRank3;
  m.g = g;
  m.k = 3;
  m.base_tau = std::move(base);
  m.shifts = std::move(b);

  // Simplex vertex tables: corner tetrahedra at 0 and (1,1,1), the middle
  // octahedron split into four by the (0,0,1)-(1,1,0) diagonal. Shift vectors
  // of the theta terms reproduce the printed v^1..v^6.
  const std::vector<std::vector<VecZ>> simplex = {
      {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}},
      {{1, 1, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}},
      {{1, 1, 0}, {1, 0, 0}, {1, 0, 1}, {0, 0, 1}},
      {{0, 0, 1}, {0, 1, 1}, {0, 1, 0}, {1, 1, 0}},
      {{0, 0, 1}, {0, 1, 1}, {1, 0, 1}, {1, 1, 0}},
      {{1, 1, 1}, {0, 1, 1}, {1, 0, 1}, {1, 1, 0}}};
  auto permute = [&](const VecZ& v) {
    VecZ w(3);
    for (int i = 0; i < 3; ++i) w[i] = v[permutation[i]];
    return w;
  };
  for (int i = 0; i < 6; ++i) {
    ModelComponent c;
    c.label = std::to_string(i + 1);
    FiberFactor f;
    f.size = 4;
    for (const auto& v : simplex[i]) f.vertex.push_back(permute(v));
    c.factors = {f};
    c.coeff = {1.0, 1.0, 1.0, 1.0};
    m.components.push_back(c);
  }
  const int pair_of[6] = {5, 4, 3, 2, 1, 0};  // involution 1<->6, 2<->5, 3<->4
  for (int i = 0; i < 6; ++i)
    m.invol.push_back(identity_involution(m.components[i], pair_of[i]));

  // Face gluings from vertex matching under translations in {0, +-e_a}.
  auto vertex_index = [&](int comp, const VecZ& v) -> int {
    for (int i = 0; i < 4; ++i)
      if (m.components[comp].factors[0].vertex[i] == v) return i;
    return -1;
  };
  for (int i = 0; i < 6; ++i) {
    for (int omit = 0; omit < 4; ++omit) {
      std::vector<VecZ> face;
      for (int n = 0; n < 4; ++n)
        if (n != omit) face.push_back(m.components[i].factors[0].vertex[n]);
      bool found = false;
      for (int j = 0; j < 6 && !found; ++j) {
        std::vector<VecZ> ds = {VecZ{0, 0, 0}};
        for (int a = 0; a < 3; ++a)
          for (int s : {1, -1}) ds.push_back(ez(3, a, s));
        for (const auto& d : ds) {
          if (j == i && d == VecZ{0, 0, 0}) continue;
          bool ok = true;
          std::vector<int> img(4, -1);
          for (const auto& vtx : face) {
            VecZ w(3);
            for (int a = 0; a < 3; ++a) w[a] = vtx[a] + d[a];
            int idx = vertex_index(j, w);
            if (idx < 0) {
              ok = false;
              break;
            }
          }
          if (!ok) continue;
          GluingMap gl;
          gl.name = "face-" + std::to_string(i + 1) + "-" + std::to_string(omit);
          gl.src = i;
          gl.dst = j;
          gl.zero_pattern = {{0, omit}};
          gl.assign = {{zero(), zero(), zero(), zero()}};
          for (int n = 0; n < 4; ++n) {
            if (n == omit) continue;
            VecZ w(3);
            for (int a = 0; a < 3; ++a)
              w[a] = m.components[i].factors[0].vertex[n][a] + d[a];
            gl.assign[0][vertex_index(j, w)] = from(n);
          }
          gl.shift = {-d[0], -d[1], -d[2]};
          add_gluing(m.gluings, gl);
          found = true;
          break;
        }
      }
      if (!found) throw model_error("principal dicing: unmatched face");
    }
  }
  return m;
}

// ---------------------------------------------------------------------------
// point operations

void validate_point(const DegenerationModel& model, const ComponentPoint& p) {
  if (p.component < 0 || p.component >= (int)model.components.size())
    throw wrong_component("component index out of range");
  const auto& c = model.components[p.component];
  if (p.fiber.size() != c.factors.size())
    throw wrong_component("fiber factor count mismatch");
  for (size_t f = 0; f < c.factors.size(); ++f) {
    if ((int)p.fiber[f].size() != c.factors[f].size)
      throw wrong_component("fiber tuple length mismatch");
    if (p.fiber[f].cwiseAbs().maxCoeff() == 0.0)
      throw wrong_component("fiber tuple identically zero");
  }
  if (p.z.size() != model.base_genus())
    throw wrong_component("base coordinate dimension mismatch");
  for (const auto& q : c.quadrics) {
    const auto& y = p.fiber[0];
    double scale = std::pow(y.cwiseAbs().maxCoeff(), 2);
    if (std::abs(y[q[0]] * y[q[1]] - y[q[2]] * y[q[3]]) > 1e-12 * scale * 16)
      throw wrong_component("fiber violates the component's quadric relation");
  }
}

ComponentPoint normalized(const ComponentPoint& p) {
  ComponentPoint q = p;
  for (auto& f : q.fiber) {
    int imax = 0;
    for (int i = 1; i < f.size(); ++i)
      if (std::abs(f[i]) > std::abs(f[imax])) imax = i;
    if (std::abs(f[imax]) > 0) f /= f[imax];
  }
  return q;
}

ThetaValue eval_theta_component(const DegenerationModel& model,
                                const ComponentPoint& p, double tol) {
  validate_point(model, p);
  const auto& c = model.components[p.component];
  const int M = c.monomial_count();
  ThetaValue out;
  double theta_tol = tol / (4.0 * M);
  for (int mm = 0; mm < M; ++mm) {
    auto idx = c.unflatten(mm);
    cplx mono = c.coeff[mm];
    for (size_t f = 0; f < idx.size(); ++f) mono *= p.fiber[f][idx[f]];
    if (mono == cplx(0.0, 0.0)) continue;
    ThetaValue tv = theta(model.base_tau, p.z + model.shift_vec(c.monomial_vertex(idx)),
                          theta_tol / std::max(1.0, std::abs(mono)));
    out.value += mono * tv.value;
    out.abs_error_bound += std::abs(mono) * tv.abs_error_bound;
  }
  return out;
}

double eval_scale(const DegenerationModel& model, const ComponentPoint& p, double tol) {
  validate_point(model, p);
  const auto& c = model.components[p.component];
  double scale = 0.0;
  for (int mm = 0; mm < c.monomial_count(); ++mm) {
    auto idx = c.unflatten(mm);
    cplx mono = c.coeff[mm];
    for (size_t f = 0; f < idx.size(); ++f) mono *= p.fiber[f][idx[f]];
    if (mono == cplx(0.0, 0.0)) continue;
    ThetaValue tv =
        theta(model.base_tau, p.z + model.shift_vec(c.monomial_vertex(idx)), tol);
    scale += std::abs(mono) * std::abs(tv.value);
  }
  return std::max(scale, 1e-300);
}

namespace {

std::vector<ComponentPoint> glue_images(const DegenerationModel& model,
                                        const ComponentPoint& p0) {
  ComponentPoint p = normalized(p0);
  std::vector<ComponentPoint> out;
  for (const auto& gl : model.gluings) {
    if (gl.src != p.component) continue;
    bool on_locus = true;
    for (auto [f, i] : gl.zero_pattern)
      if (std::abs(p.fiber[f][i]) > 1e-12) {
        on_locus = false;
        break;
      }
    if (!on_locus) continue;
    ComponentPoint q;
    q.component = gl.dst;
    q.z = p.z + model.shift_vec(gl.shift);
    q.fiber.resize(gl.assign.size());
    // all gluing maps are factor-aligned: dst factor f pulls from src factor f
    for (size_t f = 0; f < gl.assign.size(); ++f) {
      q.fiber[f] = Eigen::VectorXcd::Zero((int)gl.assign[f].size());
      for (size_t i = 0; i < gl.assign[f].size(); ++i) {
        const auto& a = gl.assign[f][i];
        if (a.src_coord >= 0) q.fiber[f][i] = a.scale * p.fiber[f][a.src_coord];
      }
    }
    out.push_back(std::move(q));
  }
  return out;
}

}  // namespace

std::vector<ComponentPoint> glue(const DegenerationModel& model,
                                 const ComponentPoint& p) {
  validate_point(model, p);
  auto out = glue_images(model, p);
  if (out.empty())
    throw not_on_gluing_locus("point does not lie on any gluing locus");
  return out;
}

ComponentPoint involution(const DegenerationModel& model, const ComponentPoint& p) {
  validate_point(model, p);
  const auto& j = model.invol[p.component];
  ComponentPoint q;
  q.component = j.dst;
  q.z = -model.total_shift() - p.z;
  q.fiber.resize(j.map.size());
  for (size_t f = 0; f < j.map.size(); ++f) {
    q.fiber[f] = Eigen::VectorXcd::Zero((int)j.map[f].size());
    for (size_t i = 0; i < j.map[f].size(); ++i)
      q.fiber[f][i] = j.map[f][i].second * p.fiber[f][j.map[f][i].first];
  }
  return q;
}

ComponentPoint lattice_translate(const DegenerationModel& model,
                                 const ComponentPoint& p, const VecZ& n,
                                 const VecZ& m) {
  const int bg = model.base_genus();
  ComponentPoint q = p;
  Eigen::VectorXcd nv(bg), mv(bg);
  for (int i = 0; i < bg; ++i) {
    nv[i] = static_cast<double>(n[i]);
    mv[i] = static_cast<double>(m[i]);
  }
  if (bg > 0) q.z = p.z + model.base_tau.entries() * nv + mv;
  const auto& c = model.components[p.component];
  for (size_t f = 0; f < c.factors.size(); ++f)
    for (int i = 0; i < c.factors[f].size; ++i) {
      Eigen::VectorXcd beta = model.shift_vec(c.factors[f].vertex[i]);
      cplx phase = 0.0;
      for (int a = 0; a < bg; ++a) phase += static_cast<double>(n[a]) * beta[a];
      q.fiber[f][i] *= e2pi(phase);
    }
  return q;
}

bool fiber_equal(const ComponentPoint& a, const ComponentPoint& b, double tol) {
  if (a.component != b.component || a.fiber.size() != b.fiber.size()) return false;
  for (size_t f = 0; f < a.fiber.size(); ++f) {
    const auto& x = a.fiber[f];
    const auto& y = b.fiber[f];
    if (x.size() != y.size()) return false;
    double scale = x.cwiseAbs().maxCoeff() * y.cwiseAbs().maxCoeff();
    if (scale == 0.0) return false;
    for (int i = 0; i < x.size(); ++i)
      for (int j = i + 1; j < x.size(); ++j)
        if (std::abs(x[i] * y[j] - x[j] * y[i]) > tol * scale) return false;
  }
  return true;
}

namespace {

void all_small_vectors(int dim, int lo, int hi, std::vector<VecZ>& out) {
  out.clear();
  VecZ v(dim, lo);
  if (dim == 0) {
    out.push_back(v);
    return;
  }
  while (true) {
    out.push_back(v);
    int i = 0;
    while (i < dim && v[i] == hi) v[i++] = lo;
    if (i == dim) break;
    ++v[i];
  }
}

}  // namespace

bool equal_mod_lattice(const DegenerationModel& model, const ComponentPoint& a,
                       const ComponentPoint& b, double tol) {
  if (a.component != b.component) return false;
  const int bg = model.base_genus();
  if (bg == 0) return fiber_equal(a, b, tol);
  std::vector<VecZ> range;
  all_small_vectors(bg, -2, 2, range);
  double zscale = 1.0 + a.z.cwiseAbs().maxCoeff();
  for (const auto& n : range) {
    Eigen::VectorXcd nv(bg);
    for (int i = 0; i < bg; ++i) nv[i] = static_cast<double>(n[i]);
    Eigen::VectorXcd zt = b.z + model.base_tau.entries() * nv;
    // the integer part m is determined by rounding
    Eigen::VectorXcd diff = a.z - zt;
    VecZ mvec(bg);
    bool ok = true;
    for (int i = 0; i < bg; ++i) {
      double re = diff[i].real();
      double rounded = std::round(re);
      if (std::abs(re - rounded) > tol * zscale || std::abs(diff[i].imag()) > tol * zscale ||
          std::abs(rounded) > 2.5) {
        ok = false;
        break;
      }
      mvec[i] = static_cast<int>(rounded);
    }
    if (!ok) continue;
    ComponentPoint bt = lattice_translate(model, b, n, mvec);
    if ((a.z - bt.z).cwiseAbs().maxCoeff() <= tol * zscale && fiber_equal(a, bt, tol))
      return true;
  }
  return false;
}

std::vector<ComponentPoint> glue_orbit(const DegenerationModel& model,
                                       const ComponentPoint& p, int max_points) {
  std::vector<ComponentPoint> orbit{normalized(p)};
  std::deque<ComponentPoint> frontier{orbit.front()};
  auto seen = [&](const ComponentPoint& q) {
    for (const auto& r : orbit) {
      if (r.component != q.component) continue;
      if (q.z.size() > 0 &&
          (r.z - q.z).cwiseAbs().maxCoeff() > 1e-9 * (1.0 + q.z.cwiseAbs().maxCoeff()))
        continue;
      if (fiber_equal(r, q)) return true;
    }
    return false;
  };
  while (!frontier.empty() && (int)orbit.size() < max_points) {
    ComponentPoint q = frontier.front();
    frontier.pop_front();
    for (auto& img : glue_images(model, q)) {
      ComponentPoint n = normalized(img);
      if (!seen(n)) {
        orbit.push_back(n);
        frontier.push_back(n);
      }
    }
  }
  return orbit;
}

bool equal_mod_lattice_and_glue(const DegenerationModel& model,
                                const ComponentPoint& a, const ComponentPoint& b,
                                double tol) {
  for (const auto& q : glue_orbit(model, a))
    if (equal_mod_lattice(model, q, b, tol)) return true;
  return false;
}

bool VerificationReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const CheckResult& c) { return c.pass; });
}

}  // namespace semiabelic::models
