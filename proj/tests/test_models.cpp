#include <doctest.h>

#include "semiabelic/models.hpp"

using namespace semiabelic;
using namespace semiabelic::models;

namespace {

DegenerationModel mk(ModelKind kind, int g, std::uint64_t seed = 42, int n = 2) {
  return DegenerationModel::random(kind, g, seed, n);
}

long total_multiplicity(const std::vector<FixedPoint>& fps) {
  long t = 0;
  for (const auto& fp : fps) t += fp.multiplicity;
  return t;
}

}  // namespace

TEST_CASE("rank1: census 2*2^{2g-2} smooth + 2^{2g-2} doubled points") {
  for (int g : {2, 3}) {
    auto m = mk(ModelKind::Rank1, g);
    auto fps = fixed_points(m);
    long smooth = 0, singular = 0;
    for (const auto& fp : fps) {
      if (fp.multiplicity == 1)
        ++smooth;
      else {
        CHECK(fp.multiplicity == 2);
        ++singular;
      }
    }
    CHECK(smooth == 2L << (2 * g - 2));
    CHECK(singular == 1L << (2 * g - 2));
    CHECK(total_multiplicity(fps) == 1L << (2 * g));
  }
}

TEST_CASE("rank1, g=2: 12 records, odd points vanish on T, even ones do not") {
  auto m = mk(ModelKind::Rank1, 2);
  auto fps = fixed_points(m);
  CHECK(fps.size() == 12);
  for (const auto& fp : fps) {
    double scale = std::max(1.0, eval_scale(m, fp.point));
    double val = std::abs(eval_theta_component(m, fp.point).value);
    if (fp.odd_flag)
      CHECK(val <= 1e-9 * scale);
    else
      CHECK(val >= 1e-4);
  }
}

TEST_CASE("rank1 gluing: (z,0) ~ (z-b, infinity)") {
  auto m = mk(ModelKind::Rank1, 2);
  ComponentPoint p;
  p.component = 0;
  p.z = Eigen::VectorXcd::Constant(1, cplx(0.17, 0.06));
  p.fiber = {Eigen::VectorXcd(2)};
  p.fiber[0] << 1.0, 0.0;
  auto images = glue(m, p);
  REQUIRE(images.size() == 1);
  CHECK((images[0].z - (p.z - m.shifts[0])).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(std::abs(images[0].fiber[0][0]) == 0.0);  // infinity section
}

TEST_CASE("rank1 involution is (z,x) -> (-b-z, 1/x)") {
  auto m = mk(ModelKind::Rank1, 2);
  ComponentPoint p;
  p.component = 0;
  p.z = Eigen::VectorXcd::Constant(1, cplx(0.1, 0.2));
  p.fiber = {Eigen::VectorXcd(2)};
  p.fiber[0] << 1.0, cplx(0.3, -0.4);
  auto q = involution(m, p);
  CHECK((q.z + m.shifts[0] + p.z).cwiseAbs().maxCoeff() < 1e-14);
  cplx x = p.fiber[0][1] / p.fiber[0][0];
  cplx qx = q.fiber[0][1] / q.fiber[0][0];
  CHECK(std::abs(qx - 1.0 / x) < 1e-14);
  auto back = involution(m, q);
  CHECK(equal_mod_lattice(m, p, back));
}

TEST_CASE("every model kind passes its full verification suite") {
  struct Case {
    ModelKind kind;
    int g;
    int n;
  };
  const Case cases[] = {
      {ModelKind::Rank1, 2, 1},          {ModelKind::Rank1, 3, 1},
      {ModelKind::StandardRankN, 3, 2},  {ModelKind::StandardRankN, 4, 3},
      {ModelKind::TwoP2, 2, 2},          {ModelKind::TwoP2, 3, 2},
      {ModelKind::TwoP1xP2, 3, 3},       {ModelKind::TwoP1xP2, 4, 3},
      {ModelKind::Octahedron, 3, 3},     {ModelKind::Octahedron, 4, 3},
      {ModelKind::TwoPyramids, 3, 3},    {ModelKind::TwoPyramids, 4, 3},
      {ModelKind::PrincipalRank3, 3, 3}, {ModelKind::PrincipalRank3, 4, 3},
  };
  for (const auto& c : cases) {
    CAPTURE(kind_name(c.kind));
    CAPTURE(c.g);
    auto m = mk(c.kind, c.g, 71, c.n);
    VerifyOptions opts;
    opts.samples = 4;
    opts.seed = 7;
    auto report = verify_model(m, opts);
    for (const auto& chk : report.checks) {
      CAPTURE(chk.check);
      CAPTURE(chk.worst_residual);
      CHECK(chk.pass);
    }
  }
}

TEST_CASE("fixed-point census by kind: sum of multiplicities is 2^{2g}") {
  CHECK(total_multiplicity(fixed_points(mk(ModelKind::StandardRankN, 3, 3, 2))) ==
        1L << 6);
  CHECK(total_multiplicity(fixed_points(mk(ModelKind::StandardRankN, 4, 3, 3))) ==
        1L << 8);
  CHECK(total_multiplicity(fixed_points(mk(ModelKind::TwoP2, 2))) == 16);
  CHECK(total_multiplicity(fixed_points(mk(ModelKind::TwoP1xP2, 3))) == 64);
  CHECK(total_multiplicity(fixed_points(mk(ModelKind::Octahedron, 3))) == 64);
  CHECK(total_multiplicity(fixed_points(mk(ModelKind::Octahedron, 4))) == 256);
  CHECK(total_multiplicity(fixed_points(mk(ModelKind::TwoPyramids, 3))) == 64);
  CHECK(total_multiplicity(fixed_points(mk(ModelKind::PrincipalRank3, 4))) == 256);
}

TEST_CASE("two-p2, g=2: 3 edge classes x 2 signs (mult 2) + vertex (mult 4)") {
  auto m = mk(ModelKind::TwoP2, 2);
  auto fps = fixed_points(m);
  int edge = 0, vertex = 0;
  for (const auto& fp : fps) {
    if (fp.stratum == "vertex") {
      ++vertex;
      CHECK(fp.multiplicity == 4);
    } else {
      ++edge;
      CHECK(fp.multiplicity == 2);
    }
  }
  CHECK(edge == 6);
  CHECK(vertex == 1);
}

TEST_CASE("octahedron census per base class: 8 + 6*2*4 + 8 = 64") {
  for (int g : {3, 4}) {
    auto m = mk(ModelKind::Octahedron, g);
    auto fps = fixed_points(m);
    long interior = 0, edge = 0, vertex = 0;
    for (const auto& fp : fps) {
      if (fp.stratum == "interior") {
        CHECK(fp.multiplicity == 1);
        ++interior;
      } else if (fp.stratum == "vertex") {
        CHECK(fp.multiplicity == 8);
        ++vertex;
      } else {
        CHECK(fp.multiplicity == 4);
        ++edge;
      }
    }
    long classes = 1L << (2 * (g - 3));
    CHECK(interior == 8 * classes);
    CHECK(edge == 12 * classes);
    CHECK(vertex == classes);
  }
}

TEST_CASE("octahedron parameter relations as derived from the gluings") {
  auto m = mk(ModelKind::Octahedron, 3);
  cplx l2 = m.params.at("lambda2"), l4 = m.params.at("lambda4");
  CHECK(std::abs(m.params.at("mu1") - l4 / l2) == 0.0);
  CHECK(std::abs(m.params.at("mu2") - l4) == 0.0);
  CHECK(std::abs(m.params.at("mu3") - l4 * l4 / l2) == 0.0);
  CHECK(std::abs(m.params.at("t02") - l4 * l4) == 0.0);
  CHECK(std::abs(m.params.at("t12") - l4 * l4) == 0.0);
  CHECK(std::abs(m.params.at("t23") - 1.0 / (l4 * l4)) == 0.0);
  CHECK(std::abs(m.params.at("t13") - l2 * l2 / (l4 * l4)) == 0.0);
  // t31 of the b1-face gluing must equal t13 for T_F to glue onto T_u
  CHECK(std::abs(m.params.at("t31") - m.params.at("t13")) == 0.0);
}

TEST_CASE("octahedron face gluing count: 8 face maps out of F") {
  auto m = mk(ModelKind::Octahedron, 3);
  int f_to_tet = 0;
  for (const auto& gl : m.gluings)
    if (gl.src == 2 && gl.dst != 2) ++f_to_tet;
  CHECK(f_to_tet == 8);  // 4 printed + 4 involution conjugates
}

TEST_CASE("octahedron: perturbed gluing scale breaks the b1-face check") {
  auto m = mk(ModelKind::Octahedron, 3, 99);
  VerifyOptions opts;
  opts.samples = 3;
  opts.seed = 5;
  int idx = -1;
  for (size_t i = 0; i < m.gluings.size(); ++i)
    if (m.gluings[i].name == "face-035") idx = static_cast<int>(i);
  REQUIRE(idx >= 0);
  opts.break_gluing = idx;
  auto report = verify_model(m, opts);
  bool glue_failed = false;
  for (const auto& chk : report.checks)
    if (chk.check == "gluing:face-035" && !chk.pass) glue_failed = true;
  CHECK(glue_failed);
  CHECK_FALSE(report.all_pass());
}

TEST_CASE("two-pyramids: the five printed gluings are present") {
  auto m = mk(ModelKind::TwoPyramids, 3, 7);
  for (const auto& want :
       {"x-top", "x-b2", "x-b1", "x-diagonal", "base-square"}) {
    bool found = false;
    for (const auto& gl : m.gluings)
      if (gl.name == want) found = true;
    CAPTURE(want);
    CHECK(found);
  }
}

TEST_CASE("principal rank 3: shift table matches the printed v^1..v^6") {
  auto m = mk(ModelKind::PrincipalRank3, 3);
  auto vertex_of = [&](int comp, int n) {
    return m.components[comp].factors[0].vertex[n];
  };
  using V = std::vector<int>;
  // v^1 = (0, b1, b2, b3)
  CHECK(vertex_of(0, 0) == V{0, 0, 0});
  CHECK(vertex_of(0, 1) == V{1, 0, 0});
  CHECK(vertex_of(0, 2) == V{0, 1, 0});
  CHECK(vertex_of(0, 3) == V{0, 0, 1});
  // v^2 = (b1+b2, b1, b2, b3)
  CHECK(vertex_of(1, 0) == V{1, 1, 0});
  // v^6 = (b1+b2+b3, b2+b3, b1+b3, b1+b2)
  CHECK(vertex_of(5, 0) == V{1, 1, 1});
  CHECK(vertex_of(5, 1) == V{0, 1, 1});
  CHECK(vertex_of(5, 2) == V{1, 0, 1});
  CHECK(vertex_of(5, 3) == V{1, 1, 0});
  // 6 simplices with 4 faces each, every face class glued from both sides
  CHECK(m.gluings.size() == 24);
}

TEST_CASE("gradient at fixed points: finite differences and closed form") {
  for (ModelKind kind : {ModelKind::Rank1, ModelKind::TwoP2, ModelKind::Octahedron}) {
    CAPTURE(kind_name(kind));
    int g = kind == ModelKind::Rank1 ? 2 : (kind == ModelKind::TwoP2 ? 3 : 4);
    auto m = mk(kind, g, 1234);
    auto fps = fixed_points(m);
    int tested = 0;
    for (const auto& fp : fps) {
      if (!fp.odd_flag || tested >= 4) continue;
      auto gr = gradient_at(m, fp);
      REQUIRE(gr.has_closed_form);
      std::vector<cplx> an;
      for (const auto& v : gr.gradient) an.push_back(v.value);
      auto fd = gradient_finite_difference(m, fp);
      CHECK(direction_mismatch(an, fd) <= 1e-6);
      CHECK(direction_mismatch(an, gr.closed_form) <= 1e-6);
      ++tested;
    }
    CHECK(tested > 0);
  }
}

TEST_CASE("gradient_at rejects even fixed points") {
  auto m = mk(ModelKind::Rank1, 2);
  for (const auto& fp : fixed_points(m)) {
    if (fp.odd_flag) continue;
    CHECK_THROWS_AS(gradient_at(m, fp), not_on_divisor);
    break;
  }
}

TEST_CASE("degenerate shifts are rejected") {
  Rng rng(3);
  SiegelMatrix base = random_siegel(1, rng);
  // b2 = b1 + (tau e)/2 makes two translates differ by a two-torsion point
  Eigen::VectorXcd b1 = random_shift(1, rng);
  Eigen::VectorXcd b2 = b1 + 0.5 * base.entries().col(0);
  auto m = DegenerationModel::two_p2(3, base, b1, b2);
  CHECK_THROWS_AS(fixed_points(m), degenerate_parameters);
}

TEST_CASE("glue requires the point to lie on a gluing locus") {
  auto m = mk(ModelKind::TwoP2, 2);
  ComponentPoint p;
  p.component = 0;
  p.z = Eigen::VectorXcd(0);
  p.fiber = {Eigen::VectorXcd(3)};
  p.fiber[0] << 1.0, 2.0, 3.0;
  CHECK_THROWS_AS(glue(m, p), not_on_gluing_locus);
}

TEST_CASE("eval rejects wrong components and invalid fibers") {
  auto m = mk(ModelKind::Octahedron, 3);
  ComponentPoint p;
  p.component = 2;
  p.z = Eigen::VectorXcd(0);
  p.fiber = {Eigen::VectorXcd(6)};
  p.fiber[0] << 1.0, 1.0, 1.0, 1.0, 1.0, 2.0;  // violates y0y1 = y4y5
  CHECK_THROWS_AS(eval_theta_component(m, p), wrong_component);
  p.component = 9;
  CHECK_THROWS_AS(eval_theta_component(m, p), wrong_component);
}

TEST_CASE("verification reports are deterministic for a fixed seed") {
  auto m = mk(ModelKind::TwoP2, 3, 21);
  VerifyOptions opts;
  opts.samples = 3;
  opts.seed = 17;
  auto a = verify_model(m, opts);
  auto b = verify_model(m, opts);
  REQUIRE(a.checks.size() == b.checks.size());
  for (size_t i = 0; i < a.checks.size(); ++i) {
    CHECK(a.checks[i].check == b.checks[i].check);
    CHECK(a.checks[i].pass == b.checks[i].pass);
    CHECK(a.checks[i].worst_residual == b.checks[i].worst_residual);
  }
}

TEST_CASE("rank1 theta form on the zero section is the base theta") {
  auto m = mk(ModelKind::Rank1, 2);
  ComponentPoint p;
  p.component = 0;
  p.z = Eigen::VectorXcd::Constant(1, cplx(0.21, 0.12));
  p.fiber = {Eigen::VectorXcd(2)};
  p.fiber[0] << 1.0, 0.0;  // x = 0 kills the shifted term
  auto tv = eval_theta_component(m, p, 1e-12);
  auto base = theta(m.base_tau, p.z, 1e-12);
  CHECK(std::abs(tv.value - base.value) < 1e-12);
}

TEST_CASE("octahedron face-024 gluing maps (p:0:q:0:r:0) to (0:p:q:r) on u") {
  auto m = mk(ModelKind::Octahedron, 4, 5);
  ComponentPoint p;
  p.component = 2;
  p.z = Eigen::VectorXcd::Constant(1, cplx(0.05, 0.02));
  p.fiber = {Eigen::VectorXcd(6)};
  p.fiber[0] << cplx(0.4, 0.1), 0.0, cplx(-0.3, 0.2), 0.0, cplx(0.7, -0.5), 0.0;
  bool found = false;
  for (const auto& q : glue(m, p)) {
    if (q.component != 0) continue;
    found = true;
    CHECK((q.z - p.z).cwiseAbs().maxCoeff() < 1e-14);  // no base shift
    CHECK(std::abs(q.fiber[0][0]) == 0.0);
    // projective image (0 : p : q : r) from (p:0:q:0:r:0)
    cplx a = p.fiber[0][0], b = p.fiber[0][2], c = p.fiber[0][4];
    CHECK(std::abs(q.fiber[0][1] * b - q.fiber[0][2] * a) < 1e-14);
    CHECK(std::abs(q.fiber[0][2] * c - q.fiber[0][3] * b) < 1e-14);
  }
  CHECK(found);
}
