#include "semiabelic/dicing.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>

namespace semiabelic::dicing {

namespace {

__int128 gcd128(__int128 a, __int128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b) {
    __int128 t = a % b;
    a = b;
    b = t;
  }
  return a ? a : 1;
}

constexpr __int128 kLimit = (__int128)1 << 100;

}  // namespace

Rat::Rat(long long n, long long d) : num_(n), den_(d) {
  if (d == 0) throw dicing_error("rational with zero denominator");
  if (den_ < 0) {
    num_ = -num_;
    den_ = -den_;
  }
  __int128 g = gcd128(num_, den_);
  num_ /= g;
  den_ /= g;
}

Rat Rat::make(__int128 n, __int128 d) {
  if (d == 0) throw dicing_error("rational with zero denominator");
  if (d < 0) {
    n = -n;
    d = -d;
  }
  __int128 g = gcd128(n, d);
  n /= g;
  d /= g;
  if (n > kLimit || n < -kLimit || d > kLimit)
    throw dicing_error("rational overflow");
  Rat r;
  r.num_ = n;
  r.den_ = d;
  return r;
}

Rat Rat::operator+(const Rat& o) const {
  if (den_ == 1 && o.den_ == 1) {
    Rat r;
    r.num_ = num_ + o.num_;
    r.den_ = 1;
    return r;
  }
  return make(num_ * o.den_ + o.num_ * den_, den_ * o.den_);
}
Rat Rat::operator-(const Rat& o) const {
  if (den_ == 1 && o.den_ == 1) {
    Rat r;
    r.num_ = num_ - o.num_;
    r.den_ = 1;
    return r;
  }
  return make(num_ * o.den_ - o.num_ * den_, den_ * o.den_);
}
Rat Rat::operator*(const Rat& o) const {
  if (num_ == 0 || o.num_ == 0) return Rat();
  if (den_ == 1 && o.den_ == 1) {
    Rat r;
    r.num_ = num_ * o.num_;
    r.den_ = 1;
    if (r.num_ > kLimit || r.num_ < -kLimit) throw dicing_error("rational overflow");
    return r;
  }
  return make(num_ * o.num_, den_ * o.den_);
}
Rat Rat::operator/(const Rat& o) const {
  if (o.num_ == 0) throw dicing_error("rational division by zero");
  return make(num_ * o.den_, den_ * o.num_);
}
bool Rat::operator<(const Rat& o) const { return num_ * o.den_ < o.num_ * den_; }
double Rat::to_double() const {
  return static_cast<double>(num_) / static_cast<double>(den_);
}
long long Rat::num_ll() const { return static_cast<long long>(num_); }
long long Rat::den_ll() const { return static_cast<long long>(den_); }
std::string Rat::str() const {
  std::string s = std::to_string((long long)num_);
  if (den_ != 1) s += "/" + std::to_string((long long)den_);
  return s;
}

Rat QuadraticForm::eval(const VecZ& v) const {
  Rat s(0);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      s = s + matrix[i][j] * Rat(static_cast<long long>(v[i]) * v[j]);
  return s;
}

QuadraticForm sum_forms(const std::vector<QuadraticForm>& forms, int k) {
  QuadraticForm q;
  q.k = k;
  q.matrix.assign(k, VecQ(k, Rat(0)));
  for (const auto& f : forms) {
    if (f.k > k) throw dicing_error("form dimension exceeds k");
    for (int i = 0; i < f.k; ++i)
      for (int j = 0; j < f.k; ++j) q.matrix[i][j] = q.matrix[i][j] + f.matrix[i][j];
  }
  return q;
}

bool is_positive_definite(const QuadraticForm& q) {
  // Sylvester: all leading principal minors positive, by exact elimination.
  int k = q.k;
  std::vector<VecQ> a = q.matrix;
  for (int p = 0; p < k; ++p) {
    if (!(a[p][p] > Rat(0))) return false;
    for (int i = p + 1; i < k; ++i) {
      Rat f = a[i][p] / a[p][p];
      for (int j = p; j < k; ++j) a[i][j] = a[i][j] - f * a[p][j];
    }
  }
  return true;
}

std::vector<QuadraticForm> parse_forms(const std::string& spec) {
  struct Term {
    int i, j;  // j = -1 for xi^2
  };
  std::vector<Term> terms;
  size_t pos = 0;
  auto skip_ws = [&] {
    while (pos < spec.size() && (spec[pos] == ' ' || spec[pos] == '\t')) ++pos;
  };
  auto expect = [&](char c) {
    if (pos >= spec.size() || spec[pos] != c)
      throw parse_error(std::string("expected '") + c + "'", pos);
    ++pos;
  };
  auto read_index = [&]() -> int {
    skip_ws();
    if (pos >= spec.size() || spec[pos] != 'x') throw parse_error("expected 'x'", pos);
    ++pos;
    size_t start = pos;
    while (pos < spec.size() && isdigit(static_cast<unsigned char>(spec[pos]))) ++pos;
    if (pos == start) throw parse_error("expected variable index", pos);
    int idx = std::stoi(spec.substr(start, pos - start));
    if (idx < 1) throw parse_error("variable index must be >= 1", start);
    return idx;
  };
  auto read_square = [&] {
    skip_ws();
    expect('^');
    expect('2');
  };
  while (true) {
    skip_ws();
    if (pos >= spec.size()) throw parse_error("expected a form", pos);
    if (spec[pos] == '(') {
      ++pos;
      int i = read_index();
      skip_ws();
      if (pos >= spec.size() || spec[pos] != '-')
        throw parse_error("only differences (xi-xj)^2 are supported", pos);
      ++pos;
      int j = read_index();
      skip_ws();
      expect(')');
      read_square();
      if (i == j) throw parse_error("indices in a difference must differ", pos);
      terms.push_back({i, j});
    } else {
      int i = read_index();
      read_square();
      terms.push_back({i, -1});
    }
    skip_ws();
    if (pos >= spec.size()) break;
    expect(',');
  }
  int k = 0;
  for (const auto& t : terms) k = std::max({k, t.i, t.j});
  std::vector<QuadraticForm> out;
  for (const auto& t : terms) {
    QuadraticForm f;
    f.k = k;
    f.matrix.assign(k, VecQ(k, Rat(0)));
    int i = t.i - 1;
    if (t.j < 0) {
      f.matrix[i][i] = Rat(1);
    } else {
      int j = t.j - 1;
      f.matrix[i][i] = Rat(1);
      f.matrix[j][j] = Rat(1);
      f.matrix[i][j] = Rat(-1);
      f.matrix[j][i] = Rat(-1);
    }
    out.push_back(std::move(f));
  }
  return out;
}

// ---------------------------------------------------------------------------
// exact lower-envelope point location via simplex LP

namespace {

struct LowerEnvelope {
  int k = 0;
  std::vector<VecZ> points;
  std::vector<Rat> heights;
};

struct SupportFn {
  VecQ a;  // affine support a . x + d touching the envelope at the cell
  Rat d;
  std::vector<int> cell;  // indices of points on the support
  bool feasible = false;
  bool degenerate = false;
};

// minimize heights . lambda  s.t.  sum lambda_i (points_i, 1) = (x, 1), lambda >= 0
SupportFn locate(const LowerEnvelope& env, const VecQ& x) {
  const int rows = env.k + 1;
  const int M = static_cast<int>(env.points.size());
  const int cols = M + rows + 1;  // + artificials + rhs
  std::vector<VecQ> T(rows, VecQ(cols, Rat(0)));
  for (int r = 0; r < env.k; ++r) {
    for (int j = 0; j < M; ++j) T[r][j] = Rat(env.points[j][r]);
    T[r][M + r] = Rat(1);
    T[r][cols - 1] = x[r];
  }
  for (int j = 0; j < M; ++j) T[rows - 1][j] = Rat(1);
  T[rows - 1][M + rows - 1] = Rat(1);
  T[rows - 1][cols - 1] = Rat(1);
  for (int r = 0; r < rows; ++r)
    if (T[r][cols - 1] < Rat(0))
      for (int j = 0; j < cols; ++j) T[r][j] = -T[r][j];
  std::vector<int> basis(rows);
  for (int r = 0; r < rows; ++r) basis[r] = M + r;

  VecQ zrow(cols, Rat(0));  // maintained reduced-cost row of the active phase

  auto pivot = [&](int pr, int pc) {
    Rat piv = T[pr][pc];
    for (int j = 0; j < cols; ++j)
      if (!(T[pr][j] == Rat(0)) || j == pc) T[pr][j] = T[pr][j] / piv;
    for (int r = 0; r < rows; ++r) {
      if (r == pr) continue;
      Rat f = T[r][pc];
      if (f == Rat(0)) continue;
      for (int j = 0; j < cols; ++j)
        if (!(T[pr][j] == Rat(0))) T[r][j] = T[r][j] - f * T[pr][j];
    }
    Rat fz = zrow[pc];
    if (!(fz == Rat(0)))
      for (int j = 0; j < cols; ++j)
        if (!(T[pr][j] == Rat(0))) zrow[j] = zrow[j] - fz * T[pr][j];
    basis[pr] = pc;
  };

  auto rebuild_zrow = [&](const std::vector<Rat>& cost) {
    for (int j = 0; j < cols - 1; ++j) zrow[j] = (j < (int)cost.size()) ? cost[j] : Rat(0);
    zrow[cols - 1] = Rat(0);
    for (int r = 0; r < rows; ++r) {
      Rat cb = (basis[r] < (int)cost.size()) ? cost[basis[r]] : Rat(0);
      if (cb == Rat(0)) continue;
      for (int j = 0; j < cols; ++j)
        if (!(T[r][j] == Rat(0))) zrow[j] = zrow[j] - cb * T[r][j];
    }
  };

  auto run_simplex = [&](int limit_cols) {
    int stall = 0;
    for (int iter = 0; iter < 5000; ++iter) {
      // Dantzig pricing with a Bland fallback against cycling
      int enter = -1;
      if (stall < 40) {
        Rat best(0);
        for (int j = 0; j < limit_cols; ++j)
          if (zrow[j] < best) {
            best = zrow[j];
            enter = j;
          }
      } else {
        for (int j = 0; j < limit_cols; ++j)
          if (zrow[j] < Rat(0)) {
            enter = j;
            break;
          }
      }
      if (enter < 0) return;
      int leave = -1;
      Rat bestr(0);
      for (int r = 0; r < rows; ++r) {
        if (!(T[r][enter] > Rat(0))) continue;
        Rat ratio = T[r][cols - 1] / T[r][enter];
        if (leave < 0 || ratio < bestr ||
            (ratio == bestr && basis[r] < basis[leave])) {
          leave = r;
          bestr = ratio;
        }
      }
      if (leave < 0) throw dicing_error("unbounded LP (corrupt envelope)");
      if (bestr == Rat(0))
        ++stall;
      else
        stall = 0;
      pivot(leave, enter);
    }
    throw dicing_error("simplex iteration limit");
  };

  // phase 1: drive the artificials out
  std::vector<Rat> c1(cols - 1, Rat(0));
  for (int r = 0; r < rows; ++r) c1[M + r] = Rat(1);
  rebuild_zrow(c1);
  run_simplex(M + rows);
  Rat art_sum(0);
  for (int r = 0; r < rows; ++r)
    if (basis[r] >= M) art_sum = art_sum + T[r][cols - 1];
  SupportFn out;
  if (art_sum != Rat(0)) return out;  // infeasible: x outside the window hull
  for (int r = 0; r < rows; ++r) {
    if (basis[r] < M) continue;
    for (int j = 0; j < M; ++j)
      if (T[r][j] != Rat(0)) {
        pivot(r, j);
        break;
      }
  }
  // phase 2, artificials priced out
  std::vector<Rat> c2(cols - 1, Rat(0));
  for (int j = 0; j < M; ++j) c2[j] = env.heights[j];
  rebuild_zrow(c2);
  run_simplex(M);

  // solve a . v + d = h(v) on the basis points
  std::vector<int> bpts;
  for (int r = 0; r < rows; ++r)
    if (basis[r] < M) bpts.push_back(basis[r]);
  out.feasible = true;
  if ((int)bpts.size() < env.k + 1) {
    out.degenerate = true;
    return out;
  }
  int n = env.k + 1;
  std::vector<VecQ> A(n, VecQ(n + 1, Rat(0)));
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < env.k; ++c) A[r][c] = Rat(env.points[bpts[r]][c]);
    A[r][env.k] = Rat(1);
    A[r][n] = env.heights[bpts[r]];
  }
  for (int p = 0; p < n; ++p) {
    int pr = -1;
    for (int r = p; r < n; ++r)
      if (A[r][p] != Rat(0)) {
        pr = r;
        break;
      }
    if (pr < 0) {
      out.degenerate = true;
      return out;
    }
    std::swap(A[p], A[pr]);
    for (int r = 0; r < n; ++r) {
      if (r == p || A[r][p] == Rat(0)) continue;
      Rat f = A[r][p] / A[p][p];
      for (int c = p; c <= n; ++c) A[r][c] = A[r][c] - f * A[p][c];
    }
  }
  out.a.resize(env.k);
  for (int c = 0; c < env.k; ++c) out.a[c] = A[c][n] / A[c][c];
  out.d = A[env.k][n] / A[env.k][env.k];

  for (int j = 0; j < M; ++j) {
    Rat s = out.d;
    for (int c = 0; c < env.k; ++c) s = s + out.a[c] * Rat(env.points[j][c]);
    if (s > env.heights[j]) {
      out.degenerate = true;  // not supporting: degenerate point location
      return out;
    }
    if (s == env.heights[j]) out.cell.push_back(j);
  }
  return out;
}

VecQ perturbed(const VecQ& x, int attempt, int k) {
  VecQ y = x;
  long long q = 9973 + 211 * attempt;
  for (int i = 0; i < k; ++i)
    y[i] = y[i] + Rat((i + 1) * (attempt + 1) % 17 + 1, q * (i + 3));
  return y;
}

// Cell of the envelope containing a generic point near x; retries mild
// perturbations until the location is non-degenerate and full-dimensional.
struct Located {
  std::vector<int> cell;
  bool found = false;
};

int affine_dim_idx(const std::vector<VecZ>& pts, const std::vector<int>& idx);

Located locate_cell(const LowerEnvelope& env, const VecQ& x, bool need_full_dim) {
  Located out;
  for (int attempt = 0; attempt < 24; ++attempt) {
    VecQ y = attempt == 0 ? x : perturbed(x, attempt, env.k);
    SupportFn s = locate(env, y);
    if (!s.feasible) return out;
    if (s.degenerate) continue;
    if (need_full_dim && affine_dim_idx(env.points, s.cell) != env.k) continue;
    out.cell = s.cell;
    out.found = true;
    return out;
  }
  return out;
}

int affine_dim_idx(const std::vector<VecZ>& pts, const std::vector<int>& idx) {
  if (idx.empty()) return -1;
  int k = static_cast<int>(pts[idx[0]].size());
  std::vector<VecQ> rows;
  for (size_t i = 1; i < idx.size(); ++i) {
    VecQ r(k);
    for (int c = 0; c < k; ++c)
      r[c] = Rat(pts[idx[i]][c] - pts[idx[0]][c]);
    rows.push_back(std::move(r));
  }
  int rank = 0;
  for (int c = 0; c < k && rank < (int)rows.size(); ++c) {
    int pr = -1;
    for (int r = rank; r < (int)rows.size(); ++r)
      if (rows[r][c] != Rat(0)) {
        pr = r;
        break;
      }
    if (pr < 0) continue;
    std::swap(rows[rank], rows[pr]);
    for (int r = 0; r < (int)rows.size(); ++r) {
      if (r == rank || rows[r][c] == Rat(0)) continue;
      Rat f = rows[r][c] / rows[rank][c];
      for (int cc = c; cc < k; ++cc) rows[r][cc] = rows[r][cc] - f * rows[rank][cc];
    }
    ++rank;
  }
  return rank;
}

long long det_abs(const std::vector<VecZ>& pts) {
  // |det(v1 - v0, ..., vk - v0)| over the rationals
  int k = static_cast<int>(pts[0].size());
  std::vector<VecQ> a(k, VecQ(k));
  for (int r = 0; r < k; ++r)
    for (int c = 0; c < k; ++c) a[r][c] = Rat(pts[r + 1][c] - pts[0][c]);
  Rat det(1);
  for (int p = 0; p < k; ++p) {
    int pr = -1;
    for (int r = p; r < k; ++r)
      if (a[r][p] != Rat(0)) {
        pr = r;
        break;
      }
    if (pr < 0) return 0;
    if (pr != p) {
      std::swap(a[p], a[pr]);
      det = -det;
    }
    det = det * a[p][p];
    for (int r = p + 1; r < k; ++r) {
      Rat f = a[r][p] / a[p][p];
      for (int c = p; c < k; ++c) a[r][c] = a[r][c] - f * a[p][c];
    }
  }
  if (det < Rat(0)) det = -det;
  if (det.den_ll() != 1) throw dicing_error("non-integer simplex determinant");
  return det.num_ll();
}

VecQ centroid_of(const std::vector<VecZ>& pts, const std::vector<int>& idx) {
  int k = static_cast<int>(pts[idx[0]].size());
  VecQ c(k, Rat(0));
  for (int i : idx)
    for (int j = 0; j < k; ++j) c[j] = c[j] + Rat(pts[i][j]);
  for (int j = 0; j < k; ++j) c[j] = c[j] / Rat((long long)idx.size());
  return c;
}

// Flood fill over the lower envelope, probing across the boundary facets of
// each cell's internal triangulation.
std::vector<std::vector<int>> envelope_cells(const LowerEnvelope& env, const VecQ& start,
                                             const std::function<bool(const std::vector<int>&)>& keep,
                                             const std::function<bool()>& done);

// Exact triangulation of conv(points): lower hull with deterministic generic
// heights; retries until every cell is a simplex.
std::vector<std::vector<int>> triangulate(const std::vector<VecZ>& vertices) {
  const int k = static_cast<int>(vertices[0].size());
  for (int attempt = 0; attempt < 16; ++attempt) {
    LowerEnvelope env;
    env.k = k;
    env.points = vertices;
    long long A = 37 + 11 * attempt, B = 101 + 7 * attempt;
    for (size_t i = 0; i < vertices.size(); ++i) {
      long long ii = static_cast<long long>(i) + 1;
      env.heights.push_back(Rat((A * ii * ii + B * ii) % 2003 + 1, 128));
    }
    VecQ start = centroid_of(env.points,
                             [&] {
                               std::vector<int> all(env.points.size());
                               std::iota(all.begin(), all.end(), 0);
                               return all;
                             }());
    bool simplicial = true;
    auto cells = envelope_cells(
        env, start,
        [&](const std::vector<int>& cell) {
          if ((int)cell.size() != k + 1) simplicial = false;
          return true;
        },
        [&] { return !simplicial; });
    if (!simplicial) continue;
    return cells;
  }
  throw dicing_error("could not triangulate cell with generic heights");
}

std::vector<std::vector<int>> envelope_cells(
    const LowerEnvelope& env, const VecQ& start,
    const std::function<bool(const std::vector<int>&)>& keep,
    const std::function<bool()>& done) {
  std::vector<std::vector<int>> cells;
  std::set<std::vector<int>> seen;
  std::deque<std::vector<int>> queue;

  Located first = locate_cell(env, start, true);
  if (!first.found) throw dicing_error("could not locate a starting cell");
  std::vector<int> c0 = first.cell;
  std::sort(c0.begin(), c0.end());
  seen.insert(c0);
  if (keep(c0)) {
    cells.push_back(c0);
    queue.push_back(c0);
  }
  while (!queue.empty() && !done()) {
    std::vector<int> cell = queue.front();
    queue.pop_front();
    // boundary facets of the internal triangulation of this cell
    std::vector<VecZ> verts;
    for (int i : cell) verts.push_back(env.points[i]);
    std::vector<std::vector<int>> tris;
    if ((int)cell.size() == env.k + 1) {
      std::vector<int> all(cell.size());
      std::iota(all.begin(), all.end(), 0);
      tris.push_back(all);
    } else {
      tris = triangulate(verts);
    }
    std::map<std::vector<int>, int> facet_count;
    for (const auto& t : tris)
      for (size_t drop = 0; drop < t.size(); ++drop) {
        std::vector<int> f;
        for (size_t i = 0; i < t.size(); ++i)
          if (i != drop) f.push_back(t[i]);
        std::sort(f.begin(), f.end());
        facet_count[f]++;
      }
    VecQ cc = centroid_of(env.points, cell);
    for (const auto& [f, cnt] : facet_count) {
      if (cnt != 1) continue;  // interior facet of the triangulation
      std::vector<int> fglob;
      for (int i : f) fglob.push_back(cell[i]);
      VecQ fc = centroid_of(env.points, fglob);
      VecQ probe(env.k);
      for (int j = 0; j < env.k; ++j)
        probe[j] = fc[j] + (fc[j] - cc[j]) / Rat(1024);
      Located nb = locate_cell(env, probe, true);
      if (!nb.found) continue;  // outside the window hull
      std::vector<int> nc = nb.cell;
      std::sort(nc.begin(), nc.end());
      if (seen.count(nc)) continue;
      seen.insert(nc);
      if (keep(nc)) {
        cells.push_back(nc);
        queue.push_back(nc);
        if (done()) break;
      }
    }
  }
  return cells;
}

}  // namespace

int affine_dim(const std::vector<VecZ>& vertices) {
  std::vector<int> idx(vertices.size());
  std::iota(idx.begin(), idx.end(), 0);
  return affine_dim_idx(vertices, idx);
}

long long normalized_volume(const Cell& cell) {
  const int k = static_cast<int>(cell.vertices[0].size());
  if ((int)cell.vertices.size() == k + 1) {
    return det_abs(cell.vertices);
  }
  static std::mutex cache_mutex;
  static std::map<std::vector<VecZ>, long long> cache;
  {
    std::lock_guard<std::mutex> lock(cache_mutex);
    auto it = cache.find(cell.vertices);
    if (it != cache.end()) return it->second;
  }
  auto tris = triangulate(cell.vertices);
  long long vol = 0;
  for (const auto& t : tris) {
    std::vector<VecZ> pts;
    for (int i : t) pts.push_back(cell.vertices[i]);
    vol += det_abs(pts);
  }
  std::lock_guard<std::mutex> lock(cache_mutex);
  cache[cell.vertices] = vol;
  return vol;
}

bool cell_contains(const Cell& cell, const VecQ& point) {
  LowerEnvelope env;
  env.k = static_cast<int>(point.size());
  env.points = cell.vertices;
  env.heights.assign(cell.vertices.size(), Rat(0));
  SupportFn s = locate(env, point);
  return s.feasible;
}

Dicing delaunay_dicing(const std::vector<QuadraticForm>& forms, int k) {
  QuadraticForm Q = sum_forms(forms, k);
  if (!is_positive_definite(Q))
    throw not_positive_definite("sum of the generators is not positive definite");

  for (int window = 0; window < 2; ++window) {
    const int lo = -2 - window, hi = 3 + window;
    LowerEnvelope env;
    env.k = k;
    VecZ v(k, lo);
    while (true) {
      env.points.push_back(v);
      env.heights.push_back(Q.eval(v));
      int i = 0;
      while (i < k && v[i] == hi) v[i++] = lo;
      if (i == k) break;
      ++v[i];
    }

    VecQ start(k);
    for (int i = 0; i < k; ++i) start[i] = Rat(1, 2) + Rat(i + 1, 101);

    // The dicing is Z^k-periodic: collect one representative per translation
    // class, canonically shifted so each coordinate's minimum is 0. The class
    // volumes add up to k! exactly when every class has been seen.
    auto canonical = [&](const std::vector<int>& cell) {
      Cell cc;
      for (int i : cell) cc.vertices.push_back(env.points[i]);
      VecZ mins(k, 1000);
      for (const auto& vx : cc.vertices)
        for (int c = 0; c < k; ++c) mins[c] = std::min(mins[c], vx[c]);
      for (auto& vx : cc.vertices)
        for (int c = 0; c < k; ++c) vx[c] -= mins[c];
      std::sort(cc.vertices.begin(), cc.vertices.end());
      return cc;
    };

    bool margin_ok = true;
    long long covered = 0;
    const long long full = [&] {
      long long f = 1;
      for (int i = 2; i <= k; ++i) f *= i;
      return f;
    }();
    std::set<Cell> classes;
    auto keep = [&](const std::vector<int>& cell) {
      // expand only through cells whose bounding box still touches the cube
      for (int c = 0; c < k; ++c) {
        int mn = 1000, mx = -1000;
        for (int i : cell) {
          mn = std::min(mn, env.points[i][c]);
          mx = std::max(mx, env.points[i][c]);
        }
        if (mx < 0 || mn > 1) return false;
      }
      for (int i : cell)
        for (int c : env.points[i])
          if (c <= lo || c >= hi) margin_ok = false;
      if (margin_ok) {
        Cell cc = canonical(cell);
        if (!classes.count(cc)) {
          covered += normalized_volume(cc);
          classes.insert(std::move(cc));
        }
      }
      return true;
    };
    auto done = [&] { return covered == full || !margin_ok; };

    envelope_cells(env, start, keep, done);
    if (!margin_ok) continue;  // enlarge the window once
    if (covered != full)
      throw window_insufficient("periodic cell classes do not tile a fundamental domain");

    Dicing d;
    d.k = k;
    for (const auto& c : classes) {
      Cell cc = c;
      cc.dim = affine_dim(cc.vertices);
      d.cells.push_back(std::move(cc));
    }
    std::sort(d.cells.begin(), d.cells.end());
    return d;
  }
  throw window_insufficient("window {-3..4}^k still insufficient");
}

std::vector<long long> f_vector(const Cell& cell) {
  const auto& V = cell.vertices;
  const int n = static_cast<int>(V.size());
  const int k = static_cast<int>(V[0].size());
  const int d = affine_dim(V);
  if (d != k)
    throw dicing_error("f_vector expects a full-dimensional cell");
  // facets: supporting hyperplanes spanned by k affinely independent vertices
  std::vector<std::vector<int>> facets;
  std::vector<int> comb(k);
  std::function<void(int, int)> rec = [&](int start, int depth) {
    if (depth == k) {
      // hyperplane through the chosen vertices: solve for (a, c) up to scale
      std::vector<VecQ> rows;
      for (int i = 1; i < k; ++i) {
        VecQ r(k);
        for (int c = 0; c < k; ++c)
          r[c] = Rat(V[comb[i]][c] - V[comb[0]][c]);
        rows.push_back(std::move(r));
      }
      // normal = null space vector of rows
      std::vector<VecQ> m = rows;
      VecQ normal(k, Rat(0));
      // Gaussian elimination to find a kernel vector
      std::vector<int> pivot_col;
      int rank = 0;
      for (int c = 0; c < k && rank < (int)m.size(); ++c) {
        int pr = -1;
        for (int r = rank; r < (int)m.size(); ++r)
          if (m[r][c] != Rat(0)) {
            pr = r;
            break;
          }
        if (pr < 0) continue;
        std::swap(m[rank], m[pr]);
        for (int r = 0; r < (int)m.size(); ++r) {
          if (r == rank || m[r][c] == Rat(0)) continue;
          Rat f = m[r][c] / m[rank][c];
          for (int cc = 0; cc < k; ++cc) m[r][cc] = m[r][cc] - f * m[rank][cc];
        }
        pivot_col.push_back(c);
        ++rank;
      }
      if (rank != k - 1) return;  // affinely dependent subset
      std::vector<bool> is_pivot(k, false);
      for (int c : pivot_col) is_pivot[c] = true;
      int freec = -1;
      for (int c = 0; c < k; ++c)
        if (!is_pivot[c]) freec = c;
      normal[freec] = Rat(1);
      for (int r = rank - 1; r >= 0; --r) {
        Rat s(0);
        for (int c = 0; c < k; ++c)
          if (c != pivot_col[r]) s = s + m[r][c] * normal[c];
        normal[pivot_col[r]] = -s / m[r][pivot_col[r]];
      }
      Rat c0(0);
      for (int c = 0; c < k; ++c) c0 = c0 + normal[c] * Rat(V[comb[0]][c]);
      int side = 0;
      std::vector<int> on;
      for (int i = 0; i < n; ++i) {
        Rat s(0);
        for (int c = 0; c < k; ++c) s = s + normal[c] * Rat(V[i][c]);
        if (s == c0)
          on.push_back(i);
        else if (s > c0) {
          if (side < 0) return;
          side = 1;
        } else {
          if (side > 0) return;
          side = -1;
        }
      }
      std::sort(on.begin(), on.end());
      if (std::find(facets.begin(), facets.end(), on) == facets.end())
        facets.push_back(on);
      return;
    }
    for (int i = start; i <= n - (k - depth); ++i) {
      comb[depth] = i;
      rec(i + 1, depth + 1);
    }
  };
  rec(0, 0);

  // face lattice: close the facet vertex sets under intersection
  std::set<std::vector<int>> faces(facets.begin(), facets.end());
  bool grew = true;
  while (grew) {
    grew = false;
    std::vector<std::vector<int>> cur(faces.begin(), faces.end());
    for (size_t i = 0; i < cur.size(); ++i)
      for (size_t j = i + 1; j < cur.size(); ++j) {
        std::vector<int> inter;
        std::set_intersection(cur[i].begin(), cur[i].end(), cur[j].begin(),
                              cur[j].end(), std::back_inserter(inter));
        if (!inter.empty() && !faces.count(inter)) {
          faces.insert(inter);
          grew = true;
        }
      }
  }
  std::vector<long long> fv(d, 0);
  for (const auto& face : faces) {
    std::vector<VecZ> pts;
    for (int i : face) pts.push_back(V[i]);
    int fd = affine_dim(pts);
    if (fd < d) ++fv[fd];
  }
  return fv;
}

ToricType classify_cell(const Cell& cell) {
  const int d = affine_dim(cell.vertices);
  const long long nv = static_cast<long long>(cell.vertices.size());
  const long long vol = normalized_volume(cell);
  ToricType t;
  if ((int)cell.vertices[0].size() == d && nv <= 20) t.fvec = f_vector(cell);

  struct Row {
    int d;
    long long nv, vol;
    const char* label;
    const char* name;
  };
  static const Row table[] = {
      {1, 2, 1, "P1", "interval"},
      {2, 3, 1, "P2", "triangle"},
      {2, 4, 2, "P1xP1", "square"},
      {3, 4, 1, "P3", "tetrahedron"},
      {3, 5, 2, "F4", "square pyramid"},
      {3, 6, 3, "P1xP2", "prism"},
      {3, 6, 4, "F(2,2)", "octahedron"},
      {3, 8, 6, "P1xP1xP1", "cube"},
      {4, 5, 1, "P4", "4-simplex"},
      {4, 8, 4, "P1xP3", "tetrahedron x interval"},
      {4, 12, 12, "P1xP1xP2", "square x triangle"},
      {4, 12, 16, "P1xF(2,2)", "octahedron x interval"},
      {4, 14, 22, "X", "truncated 4-cube"},
      {4, 16, 24, "P1xP1xP1xP1", "4-cube"},
      {5, 32, 120, "P1xP1xP1xP1xP1", "5-cube"},
  };
  for (const auto& row : table)
    if (row.d == d && row.nv == nv && row.vol == vol) {
      t.label = row.label;
      t.polytope_name = row.name;
      return t;
    }
  t.label = "Other";
  t.polytope_name = "unclassified";
  return t;
}

namespace {

std::string plural(const std::string& name, long long count) {
  if (count == 1) return name;
  if (name == "tetrahedron") return "tetrahedra";
  if (name == "octahedron") return "octahedra";
  if (name == "unclassified") return "unclassified cells";
  if (name.size() >= 7 && name.substr(name.size() - 7) == "simplex")
    return name.substr(0, name.size() - 7) + "simplices";
  return name + "s";
}

StratumRow make_row(const std::string& satake, const std::string& forms) {
  StratumRow row;
  row.satake = satake;
  row.forms = forms;
  auto parsed = parse_forms(forms);
  row.codim = static_cast<int>(parsed.size());
  int k = 0;
  for (const auto& f : parsed) k = std::max(k, f.k);
  row.dicing = delaunay_dicing(parsed, k);

  std::map<std::string, std::pair<long long, long long>> by_name;  // count, vol
  std::map<std::string, long long> toric;
  for (const auto& c : row.dicing.cells) {
    ToricType t = classify_cell(c);
    auto& e = by_name[t.polytope_name];
    e.first += 1;
    e.second = normalized_volume(c);
    toric[t.label] += 1;
  }
  std::vector<std::pair<std::string, std::pair<long long, long long>>> items(
      by_name.begin(), by_name.end());
  std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
    return a.second.second > b.second.second;  // big cells first
  });
  std::ostringstream ps, ts;
  for (size_t i = 0; i < items.size(); ++i) {
    if (i) ps << " + ";
    ps << items[i].second.first << " " << plural(items[i].first, items[i].second.first);
  }
  std::vector<std::pair<std::string, long long>> titems(toric.begin(), toric.end());
  std::sort(titems.begin(), titems.end());
  for (size_t i = 0; i < titems.size(); ++i) {
    if (i) ts << " + ";
    if (titems[i].second > 1) ts << titems[i].second << " ";
    ts << titems[i].first;
  }
  row.polytope_summary = ps.str();
  row.toric_summary = ts.str();
  return row;
}

}  // namespace

std::vector<StratumRow> stratum_table() {
  std::vector<StratumRow> rows;
  rows.push_back(make_row("beta1", "x1^2"));
  rows.push_back(make_row("beta2", "x1^2,x2^2"));
  rows.push_back(make_row("beta2", "x1^2,x2^2,(x1-x2)^2"));
  rows.push_back(make_row("beta3", "x1^2,x2^2,x3^2"));
  rows.push_back(make_row("beta3", "x1^2,x2^2,(x1-x2)^2,x3^2"));
  rows.push_back(make_row("beta3", "x1^2,x2^2,(x1-x3)^2,(x2-x3)^2"));
  rows.push_back(make_row("beta3", "x1^2,x2^2,x3^2,(x1-x3)^2,(x2-x3)^2"));
  rows.push_back(
      make_row("beta3", "x1^2,x2^2,x3^2,(x1-x2)^2,(x1-x3)^2,(x2-x3)^2"));
  rows.push_back(make_row("beta4", "x1^2,x2^2,x3^2,x4^2"));
  rows.push_back(make_row("beta4", "x1^2,x2^2,(x1-x2)^2,x3^2,x4^2"));
  rows.push_back(make_row("beta4", "x1^2,x2^2,(x1-x3)^2,(x2-x3)^2,x4^2"));
  rows.push_back(make_row("beta4", "x1^2,x2^2,(x1-x4)^2,(x2-x3)^2,(x3-x4)^2"));
  rows.push_back(make_row(
      "beta4",
      "x1^2,x2^2,x3^2,x4^2,(x1-x2)^2,(x1-x3)^2,(x1-x4)^2,(x2-x3)^2,(x2-x4)^2,(x3-x4)^2"));
  rows.push_back(make_row("beta5", "x1^2,x2^2,x3^2,x4^2,x5^2"));
  return rows;
}

}  // namespace semiabelic::dicing
