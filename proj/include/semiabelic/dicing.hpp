#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace semiabelic::dicing {

struct dicing_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct parse_error : dicing_error {
  size_t position;
  parse_error(const std::string& msg, size_t pos)
      : dicing_error(msg + " at position " + std::to_string(pos)), position(pos) {}
};
struct not_positive_definite : dicing_error {
  using dicing_error::dicing_error;
};
struct window_insufficient : dicing_error {
  using dicing_error::dicing_error;
};

/// Exact rational on 128-bit integers. Every predicate in this module is
/// evaluated exactly; there is no epsilon anywhere.
class Rat {
 public:
  Rat() : num_(0), den_(1) {}
  Rat(long long n) : num_(n), den_(1) {}
  Rat(long long n, long long d);

  static Rat make(__int128 n, __int128 d);

  Rat operator+(const Rat& o) const;
  Rat operator-(const Rat& o) const;
  Rat operator*(const Rat& o) const;
  Rat operator/(const Rat& o) const;
  Rat operator-() const { return make(-num_, den_); }
  bool operator==(const Rat& o) const { return num_ == o.num_ && den_ == o.den_; }
  bool operator!=(const Rat& o) const { return !(*this == o); }
  bool operator<(const Rat& o) const;
  bool operator<=(const Rat& o) const { return *this < o || *this == o; }
  bool operator>(const Rat& o) const { return o < *this; }
  bool operator>=(const Rat& o) const { return o <= *this; }

  int sign() const { return num_ > 0 ? 1 : (num_ < 0 ? -1 : 0); }
  double to_double() const;
  long long num_ll() const;
  long long den_ll() const;
  std::string str() const;

 private:
  __int128 num_, den_;  // den > 0, gcd(num, den) = 1
};

using VecZ = std::vector<int>;
using VecQ = std::vector<Rat>;

/// Symmetric rational quadratic form on Z^k.
struct QuadraticForm {
  int k = 0;
  std::vector<VecQ> matrix;  // k x k

  Rat eval(const VecZ& v) const;
};

QuadraticForm sum_forms(const std::vector<QuadraticForm>& forms, int k);

/// Exact Sylvester-criterion positive definiteness test.
bool is_positive_definite(const QuadraticForm& q);

/// Parses a comma-separated list of "xi^2" and "(xi-xj)^2" terms into rank-1
/// forms; k is inferred from the largest index. Throws parse_error.
std::vector<QuadraticForm> parse_forms(const std::string& spec);

/// Cell of a periodic polytopal decomposition: integer vertex set.
struct Cell {
  std::vector<VecZ> vertices;  // sorted lexicographically
  int dim = 0;

  bool operator==(const Cell& o) const { return vertices == o.vertices; }
  bool operator<(const Cell& o) const { return vertices < o.vertices; }
};

/// Z^k-periodic Delaunay dicing, represented by the cells tiling [0,1]^k.
struct Dicing {
  int k = 0;
  std::vector<Cell> cells;
};

/// Lift lattice points of the window to (v, v^T Q v), take the exact lower
/// convex hull, and return the projected cells that tile the unit cube.
Dicing delaunay_dicing(const std::vector<QuadraticForm>& forms, int k);

/// Normalized volume (k! times Euclidean volume) of a full-dimensional
/// lattice cell, computed from an exact triangulation.
long long normalized_volume(const Cell& cell);

/// Affine dimension of the vertex set.
int affine_dim(const std::vector<VecZ>& vertices);

/// f-vector (face counts by dimension 0..dim-1) of the convex hull; exact.
std::vector<long long> f_vector(const Cell& cell);

/// Exact point-in-convex-hull test ( LP feasibility ).
bool cell_contains(const Cell& cell, const VecQ& point);

struct ToricType {
  std::string label;          // "P3", "F(2,2)", "P1xP2", "X", "Other", ...
  std::string polytope_name;  // "tetrahedron", "octahedron", ...
  std::vector<long long> fvec;
};

/// Classify by (dim, vertex count, normalized volume), with the f-vector
/// retained for reporting; unknown shapes come back as "Other".
ToricType classify_cell(const Cell& cell);

struct StratumRow {
  std::string satake;   // "beta1" ... "beta5"
  std::string forms;
  int codim = 0;
  std::string polytope_summary;
  std::string toric_summary;
  Dicing dicing;
};

/// The Table-1 reproduction: all fourteen printed cone rows.
std::vector<StratumRow> stratum_table();

}  // namespace semiabelic::dicing
