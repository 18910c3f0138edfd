#include "semiabelic/json_io.hpp"

namespace semiabelic::io {

json matrix_to_json(const Eigen::MatrixXcd& m) {
  json re = json::array(), im = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json rrow = json::array(), irow = json::array();
    for (int j = 0; j < m.cols(); ++j) {
      rrow.push_back(m(i, j).real());
      irow.push_back(m(i, j).imag());
    }
    re.push_back(rrow);
    im.push_back(irow);
  }
  return json{{"re", re}, {"im", im}};
}

Eigen::MatrixXcd matrix_from_json(const json& j) {
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  int rows = static_cast<int>(re.size());
  int cols = rows ? static_cast<int>(re[0].size()) : 0;
  Eigen::MatrixXcd m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      m(r, c) = cplx(re[r][c].get<double>(), im[r][c].get<double>());
  return m;
}

json vector_to_json(const Eigen::VectorXcd& v) {
  json re = json::array(), im = json::array();
  for (int i = 0; i < v.size(); ++i) {
    re.push_back(v[i].real());
    im.push_back(v[i].imag());
  }
  return json{{"re", re}, {"im", im}};
}

Eigen::VectorXcd vector_from_json(const json& j) {
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  Eigen::VectorXcd v(re.size());
  for (size_t i = 0; i < re.size(); ++i)
    v[i] = cplx(re[i].get<double>(), im[i].get<double>());
  return v;
}

json characteristic_to_json(const Characteristic& ch) {
  return json{{"eps", ch.eps}, {"delta", ch.delta}};
}

Characteristic characteristic_from_json(const json& j) {
  return Characteristic(j.at("eps").get<std::vector<int>>(),
                        j.at("delta").get<std::vector<int>>());
}

json model_to_json(const models::DegenerationModel& m, std::uint64_t seed) {
  json shifts = json::array();
  for (const auto& b : m.shifts) shifts.push_back(vector_to_json(b));
  json params;
  for (const auto& [name, v] : m.params)
    params[name] = json{{"re", v.real()}, {"im", v.imag()}};
  return json{{"kind", models::kind_name(m.kind)},
              {"g", m.g},
              {"n", m.n_standard},
              {"base_tau", matrix_to_json(m.base_tau.entries())},
              {"shifts", shifts},
              {"params", params},
              {"seed", seed}};
}

models::DegenerationModel model_from_json(const json& j) {
  using namespace models;
  ModelKind kind = kind_from_name(j.at("kind").get<std::string>());
  int g = j.at("g").get<int>();
  SiegelMatrix base(matrix_from_json(j.at("base_tau")));
  std::vector<Eigen::VectorXcd> shifts;
  for (const auto& s : j.at("shifts")) shifts.push_back(vector_from_json(s));
  auto param = [&](const char* name) {
    const auto& p = j.at("params").at(name);
    return cplx(p.at("re").get<double>(), p.at("im").get<double>());
  };
  switch (kind) {
    case ModelKind::Rank1:
      return DegenerationModel::rank1(g, base, shifts.at(0));
    case ModelKind::StandardRankN: {
      int n = j.at("n").get<int>();
      std::map<std::pair<int, int>, cplx> t;
      for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
          t[{a, b}] = param(("t" + std::to_string(a + 1) + std::to_string(b + 1)).c_str());
      return DegenerationModel::standard_rank_n(g, n, base, shifts, t);
    }
    case ModelKind::TwoP2:
      return DegenerationModel::two_p2(g, base, shifts.at(0), shifts.at(1));
    case ModelKind::TwoP1xP2:
      return DegenerationModel::two_p1xp2(g, base, shifts, param("t13"), param("t23"));
    case ModelKind::Octahedron:
      return DegenerationModel::octahedron(g, base, shifts, param("lambda2"),
                                           param("lambda4"));
    case ModelKind::TwoPyramids:
      return DegenerationModel::two_pyramids(g, base, shifts, param("c"));
    case ModelKind::PrincipalRank3:
      return DegenerationModel::principal_rank3(g, base, shifts);
  }
  throw std::invalid_argument("unknown model kind");
}

json report_to_json(const models::VerificationReport& r) {
  json out = json::array();
  for (const auto& c : r.checks)
    out.push_back(json{{"check", c.check},
                       {"status", c.pass ? "pass" : "fail"},
                       {"worst_residual", c.worst_residual}});
  return out;
}

std::string dump_deterministic(const json& j) { return j.dump(2); }

}  // namespace semiabelic::io
