#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "semiabelic/rng.hpp"
#include "semiabelic/theta.hpp"

namespace semiabelic::models {

struct model_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct wrong_component : model_error {
  using model_error::model_error;
};
struct not_on_gluing_locus : model_error {
  using model_error::model_error;
};
struct not_on_divisor : model_error {
  using model_error::model_error;
};
struct singular_point_of_component : model_error {
  using model_error::model_error;
};
struct degenerate_parameters : model_error {
  using model_error::model_error;
};
struct inconsistent_family : model_error {
  using model_error::model_error;
};

enum class ModelKind {
  Rank1,
  StandardRankN,
  TwoP2,
  TwoP1xP2,
  Octahedron,
  TwoPyramids,
  PrincipalRank3,
};

std::string kind_name(ModelKind k);
ModelKind kind_from_name(const std::string& name);
int torus_rank(ModelKind k, int n_standard = 1);

/// Integer vector of length k; combination coefficients of the shifts b_i.
using VecZ = std::vector<int>;

/// One projective factor of a component's fiber. vertex[i] is the lattice
/// point of the dicing cell carried by coordinate i; it fixes both the theta
/// shift (vertex . b) and the lattice action e(n^t (vertex . b)) on that
/// coordinate.
struct FiberFactor {
  int size = 0;
  std::vector<VecZ> vertex;
};

/// Irreducible component of the normalization. The theta form is multilinear
/// in the factors: T = sum over monomials M of coeff[M] * prod_f fiber[f][M_f]
/// * theta(z + V_M . b) with V_M = sum_f vertex[f][M_f].
struct ModelComponent {
  std::string label;
  std::vector<FiberFactor> factors;
  std::vector<cplx> coeff;  // flat tensor, row-major over factors
  // x_a x_b = x_c x_d constraints on a single-factor fiber (F(2,2), F_4 cone).
  std::vector<std::array<int, 4>> quadrics;

  int monomial_count() const;
  std::vector<int> unflatten(int m) const;
  int flatten(const std::vector<int>& idx) const;
  VecZ monomial_vertex(const std::vector<int>& idx) const;
};

struct GluingAssign {
  int src_coord = -1;  // -1 means the destination coordinate is zero
  cplx scale{1.0, 0.0};
};

struct GluingMap {
  std::string name;
  int src = 0, dst = 0;
  std::vector<std::pair<int, int>> zero_pattern;        // (factor, coord) on src
  std::vector<std::vector<GluingAssign>> assign;        // [dst factor][dst coord]
  VecZ shift;                                           // z' = z + shift . b
};

struct InvolutionMap {
  int dst = 0;
  // [factor][dst coord] = (src coord, scale)
  std::vector<std::vector<std::pair<int, cplx>>> map;
};

/// Point on (the normalization of) the semi-abelic variety: component label,
/// base coordinate on the universal cover C^{g-k}, homogeneous fiber tuple(s).
struct ComponentPoint {
  int component = 0;
  Eigen::VectorXcd z;
  std::vector<Eigen::VectorXcd> fiber;
};

struct FixedPoint {
  ComponentPoint point;
  Characteristic base_char;
  std::vector<int> signs;  // the free +-1 choices of this point
  int multiplicity = 1;    // number of smooth two-torsion limits
  bool odd_flag = false;   // generically lies on the theta divisor
  std::string stratum;     // "interior", "edge(a,b)", "vertex", "face-square", ...
};

class DegenerationModel {
 public:
  ModelKind kind = ModelKind::Rank1;
  int g = 0;       // total genus
  int k = 0;       // torus rank
  int n_standard = 1;
  SiegelMatrix base_tau;                  // genus g-k
  std::vector<Eigen::VectorXcd> shifts;   // the b_i
  std::map<std::string, cplx> params;

  std::vector<ModelComponent> components;
  std::vector<GluingMap> gluings;
  std::vector<InvolutionMap> invol;

  int base_genus() const { return g - k; }
  Eigen::VectorXcd shift_vec(const VecZ& v) const;
  Eigen::VectorXcd total_shift() const;  // B = b_1 + ... + b_k
  int component_index(const std::string& label) const;

  // --- factories (printed model data) ---
  static DegenerationModel rank1(int g, SiegelMatrix base, Eigen::VectorXcd b);
  static DegenerationModel standard_rank_n(int g, int n, SiegelMatrix base,
                                           std::vector<Eigen::VectorXcd> b,
                                           const std::map<std::pair<int, int>, cplx>& t);
  // lambda/c default to the symmetric values the gluings force; non-default
  // values exist to let verify_model demonstrate that forcing.
  static DegenerationModel two_p2(int g, SiegelMatrix base, Eigen::VectorXcd b1,
                                  Eigen::VectorXcd b2, cplx lambda0 = 1.0,
                                  cplx lambda1 = 1.0, cplx lambda2 = 1.0,
                                  cplx c = 1.0);
  static DegenerationModel two_p1xp2(int g, SiegelMatrix base,
                                     std::vector<Eigen::VectorXcd> b, cplx t13,
                                     cplx t23);
  static DegenerationModel octahedron(int g, SiegelMatrix base,
                                      std::vector<Eigen::VectorXcd> b,
                                      cplx lambda2, cplx lambda4);
  static DegenerationModel two_pyramids(int g, SiegelMatrix base,
                                        std::vector<Eigen::VectorXcd> b, cplx c);
  static DegenerationModel principal_rank3(int g, SiegelMatrix base,
                                           std::vector<Eigen::VectorXcd> b,
                                           std::array<int, 3> permutation = {0, 1, 2});

  /// Random generic model of the given kind (rejection-sampled shifts).
  static DegenerationModel random(ModelKind kind, int g, std::uint64_t seed,
                                  int n_standard = 2);
};

// --- point utilities ---

void validate_point(const DegenerationModel& model, const ComponentPoint& p);

/// Normalize each fiber factor so its max-modulus coordinate is 1.
ComponentPoint normalized(const ComponentPoint& p);

/// The semi-abelic theta form of p's component evaluated at p, with the
/// certified error of the underlying series propagated through the
/// coefficients. Fiber coordinates are used as given.
ThetaValue eval_theta_component(const DegenerationModel& model,
                                const ComponentPoint& p, double tol = kDefaultTol);

/// Magnitude scale sum |coeff * monomial * theta| of the evaluation, for
/// forming relative residuals.
double eval_scale(const DegenerationModel& model, const ComponentPoint& p,
                  double tol = kDefaultTol);

/// All images of p under gluing maps whose locus contains p.
std::vector<ComponentPoint> glue(const DegenerationModel& model,
                                 const ComponentPoint& p);

/// Image of p under one specific gluing map (no locus check).
ComponentPoint apply_gluing(const DegenerationModel& model, const ComponentPoint& p,
                            const GluingMap& gl);

ComponentPoint involution(const DegenerationModel& model, const ComponentPoint& p);

/// Deck transformation (n, m): z += tau n + m on the base, coordinate of
/// vertex W multiplied by e(n^t (W . b)).
ComponentPoint lattice_translate(const DegenerationModel& model,
                                 const ComponentPoint& p, const VecZ& n,
                                 const VecZ& m);

/// Projective equality of fiber tuples (cross-product test).
bool fiber_equal(const ComponentPoint& a, const ComponentPoint& b, double tol = 1e-9);

/// Equality on the bundle: searches deck transformations with coefficients in
/// {-2..2}^{2(g-k)}.
bool equal_mod_lattice(const DegenerationModel& model, const ComponentPoint& a,
                       const ComponentPoint& b, double tol = 1e-9);

/// Glue-orbit of p (BFS through gluing maps, bounded size).
std::vector<ComponentPoint> glue_orbit(const DegenerationModel& model,
                                       const ComponentPoint& p, int max_points = 64);

/// p and q identified on the semi-abelic variety (glue orbit + lattice).
bool equal_mod_lattice_and_glue(const DegenerationModel& model,
                                const ComponentPoint& a, const ComponentPoint& b,
                                double tol = 1e-9);

// --- fixed points, gradients ---

/// Complete fixed-point list of the involution, with multiplicities summing
/// to 2^{2g}. Throws degenerate_parameters if two theta translates of the
/// model differ by a two-torsion point (non-generic shifts).
std::vector<FixedPoint> fixed_points(const DegenerationModel& model);

struct GradientResult {
  std::vector<std::string> chart;      // direction names, fiber then base
  std::vector<ThetaValue> gradient;    // analytic derivative along the chart
  std::vector<cplx> closed_form;       // theta_m-basis closed form, if printed
  bool has_closed_form = false;
};

GradientResult gradient_at(const DegenerationModel& model, const FixedPoint& fp,
                           double tol = kDefaultTol);

/// Central finite differences of eval_theta_component along the same chart.
std::vector<cplx> gradient_finite_difference(const DegenerationModel& model,
                                             const FixedPoint& fp, double step = 1e-5);

/// |sin| of the angle between complex vectors (direction-only comparison).
double direction_mismatch(const std::vector<cplx>& a, const std::vector<cplx>& b);

// --- verification ---

struct CheckResult {
  std::string check;
  bool pass = false;
  double worst_residual = 0.0;
};

struct VerificationReport {
  std::vector<CheckResult> checks;
  bool all_pass() const;
};

struct VerifyOptions {
  int samples = 8;
  double tol = kDefaultTol;
  std::uint64_t seed = 1;
  /// If >= 0, multiplies one scale of gluing map [break_gluing] by 1.01
  /// before running checks (fault injection for exit-code tests).
  int break_gluing = -1;
};

VerificationReport verify_model(const DegenerationModel& model,
                                const VerifyOptions& opts);

}  // namespace semiabelic::models
