// Command-line front end: theta evaluation, semi-abelic model verification,
// cone dicing, the stratum table, and degeneration limit checks. All sampling
// is driven by an explicit seed so reports are byte-reproducible.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "semiabelic/dicing.hpp"
#include "semiabelic/json_io.hpp"
#include "semiabelic/limits.hpp"
#include "semiabelic/models.hpp"

using namespace semiabelic;
using json = nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumericDomain = 3;

cplx parse_complex(const std::string& s) {
  // accepts "a", "bi", "a+bi", "a-bi"
  std::string t;
  for (char c : s)
    if (!isspace(static_cast<unsigned char>(c))) t += c;
  if (t.empty()) throw std::invalid_argument("empty complex literal");
  if (t.back() == 'i' || t.back() == 'j') {
    t.pop_back();
    size_t split = t.find_last_of("+-");
    if (split == std::string::npos || split == 0) {
      double im = (t.empty() || t == "+") ? 1.0 : (t == "-" ? -1.0 : std::stod(t));
      return cplx(0.0, im);
    }
    double re = std::stod(t.substr(0, split));
    std::string ims = t.substr(split);
    double im = (ims == "+") ? 1.0 : (ims == "-") ? -1.0 : std::stod(ims);
    return cplx(re, im);
  }
  return cplx(std::stod(t), 0.0);
}

Eigen::VectorXcd parse_vector(const std::string& s) {
  std::vector<cplx> vals;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) vals.push_back(parse_complex(item));
  Eigen::VectorXcd v(vals.size());
  for (size_t i = 0; i < vals.size(); ++i) v[i] = vals[i];
  return v;
}

std::vector<int> parse_bits(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
  return out;
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  json j;
  in >> j;
  return j;
}

std::string fmt(double x) {
  char buf[40];
  snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string fmt(cplx z) {
  return fmt(z.real()) + (z.imag() < 0 ? " - " : " + ") + fmt(std::abs(z.imag())) +
         "i";
}

models::DegenerationModel model_from_flags(const std::string& kind_name, int g,
                                           std::uint64_t seed, int n,
                                           const std::string& model_file) {
  if (!model_file.empty()) return io::model_from_json(load_json(model_file));
  auto kind = models::kind_from_name(kind_name);
  return models::DegenerationModel::random(kind, g, seed, n);
}

int cmd_theta(const std::string& tau_file, const std::string& tau_inline,
              const std::string& z_str, const std::string& char_str, bool grad,
              double tol) {
  Eigen::MatrixXcd tau_entries;
  if (!tau_file.empty())
    tau_entries = io::matrix_from_json(load_json(tau_file));
  else if (!tau_inline.empty())
    tau_entries = io::matrix_from_json(json::parse(tau_inline));
  else
    throw std::invalid_argument("theta requires --tau-file or --tau");
  SiegelMatrix tau(tau_entries);
  Eigen::VectorXcd z = Eigen::VectorXcd::Zero(tau.genus());
  if (!z_str.empty()) {
    Eigen::VectorXcd parsed = parse_vector(z_str);
    if (parsed.size() == 1 && tau.genus() > 1)
      z.setConstant(parsed[0]);
    else if (parsed.size() == tau.genus())
      z = parsed;
    else
      throw std::invalid_argument("--z has the wrong dimension");
  }
  if (char_str.empty()) {
    auto tv = theta(tau, z, tol);
    std::cout << "theta = " << fmt(tv.value) << "   (abs error bound "
              << fmt(tv.abs_error_bound) << ")\n";
    if (grad) {
      auto gv = grad_theta(tau, z, tol);
      for (size_t i = 0; i < gv.size(); ++i)
        std::cout << "d/dz_" << i + 1 << " = " << fmt(gv[i].value)
                  << "   (abs error bound " << fmt(gv[i].abs_error_bound) << ")\n";
    }
  } else {
    std::vector<int> bits = parse_bits(char_str);
    if ((int)bits.size() != 2 * tau.genus())
      throw std::invalid_argument("--char needs 2g bits eps,delta");
    Characteristic ch(std::vector<int>(bits.begin(), bits.begin() + tau.genus()),
                      std::vector<int>(bits.begin() + tau.genus(), bits.end()));
    auto tv = theta_char(tau, z, ch, tol);
    std::cout << "theta[" << char_str << "] = " << fmt(tv.value)
              << "   (abs error bound " << fmt(tv.abs_error_bound) << ")\n";
    if (grad) {
      auto gv = grad_theta(tau, z, ch, tol);
      for (size_t i = 0; i < gv.size(); ++i)
        std::cout << "d/dz_" << i + 1 << " = " << fmt(gv[i].value)
                  << "   (abs error bound " << fmt(gv[i].abs_error_bound) << ")\n";
    }
  }
  return kExitOk;
}

int cmd_model_verify(const models::DegenerationModel& model, int samples,
                     double tol, std::uint64_t seed, bool break_gluing) {
  models::VerifyOptions opts;
  opts.samples = samples;
  opts.tol = tol;
  opts.seed = seed;
  if (break_gluing) opts.break_gluing = 1 % (int)model.gluings.size();
  auto report = verify_model(model, opts);
  std::cout << io::dump_deterministic(io::report_to_json(report)) << "\n";
  return report.all_pass() ? kExitOk : kExitVerifyFailed;
}

int cmd_model_fixed_points(const models::DegenerationModel& model,
                           std::uint64_t seed) {
  auto fps = fixed_points(model);
  json out = json::array();
  long total = 0;
  for (const auto& fp : fps) {
    total += fp.multiplicity;
    json rec;
    rec["component"] = model.components[fp.point.component].label;
    rec["stratum"] = fp.stratum;
    rec["multiplicity"] = fp.multiplicity;
    rec["odd"] = fp.odd_flag;
    rec["base_char"] = io::characteristic_to_json(fp.base_char);
    rec["signs"] = fp.signs;
    rec["z"] = io::vector_to_json(fp.point.z);
    json fibers = json::array();
    for (const auto& f : fp.point.fiber) fibers.push_back(io::vector_to_json(f));
    rec["fiber"] = fibers;
    out.push_back(rec);
  }
  json top;
  top["model"] = io::model_to_json(model, seed);
  top["fixed_points"] = out;
  top["records"] = out.size();
  top["total_multiplicity"] = total;
  std::cout << io::dump_deterministic(top) << "\n";
  return kExitOk;
}

int cmd_model_gradient(const models::DegenerationModel& model, double tol) {
  json out = json::array();
  for (const auto& fp : fixed_points(model)) {
    if (!fp.odd_flag) continue;
    json rec;
    rec["component"] = model.components[fp.point.component].label;
    rec["stratum"] = fp.stratum;
    try {
      auto gr = gradient_at(model, fp, tol);
      json grad = json::array();
      for (size_t i = 0; i < gr.gradient.size(); ++i)
        grad.push_back(json{{"dir", gr.chart[i]},
                            {"re", gr.gradient[i].value.real()},
                            {"im", gr.gradient[i].value.imag()},
                            {"abs_error_bound", gr.gradient[i].abs_error_bound}});
      rec["gradient"] = grad;
      if (gr.has_closed_form) {
        std::vector<cplx> an;
        for (const auto& v : gr.gradient) an.push_back(v.value);
        rec["closed_form_direction_mismatch"] =
            models::direction_mismatch(an, gr.closed_form);
      }
    } catch (const models::singular_point_of_component&) {
      rec["skipped"] = "singular point of component";
    }
    out.push_back(rec);
  }
  std::cout << io::dump_deterministic(out) << "\n";
  return kExitOk;
}

int cmd_dice(const std::string& forms_str, const std::string& format) {
  auto forms = dicing::parse_forms(forms_str);
  int k = 0;
  for (const auto& f : forms) k = std::max(k, f.k);
  auto d = dicing::delaunay_dicing(forms, k);
  if (format == "json") {
    json cells = json::array(), types = json::array();
    for (const auto& c : d.cells) {
      json verts = json::array();
      for (const auto& v : c.vertices) verts.push_back(v);
      cells.push_back(json{{"vertices", verts}});
      auto t = dicing::classify_cell(c);
      types.push_back(json{{"label", t.label},
                           {"polytope", t.polytope_name},
                           {"normalized_volume", dicing::normalized_volume(c)},
                           {"f_vector", t.fvec}});
    }
    std::cout << io::dump_deterministic(json{{"k", d.k}, {"cells", cells},
                                             {"types", types}})
              << "\n";
  } else {
    std::cout << "cell,label,polytope,normalized_volume\n";
    for (size_t i = 0; i < d.cells.size(); ++i) {
      auto t = dicing::classify_cell(d.cells[i]);
      std::cout << i << "," << t.label << "," << t.polytope_name << ","
                << dicing::normalized_volume(d.cells[i]) << "\n";
    }
  }
  return kExitOk;
}

int cmd_table() {
  auto rows = dicing::stratum_table();
  std::cout << "satake,forms,codim,polytopes,toric\n";
  for (const auto& r : rows)
    std::cout << r.satake << ",\"" << r.forms << "\"," << r.codim << ",\""
              << r.polytope_summary << "\",\"" << r.toric_summary << "\"\n";
  return kExitOk;
}

int cmd_limit(const std::string& kind, int g, const std::string& t_spec,
              int samples, double tol, std::uint64_t seed) {
  int n = 1;
  if (kind == "rank1")
    n = 1;
  else if (kind == "standard2")
    n = 2;
  else if (kind == "standard3")
    n = 3;
  else
    throw std::invalid_argument("limit --kind must be rank1|standard2|standard3");
  auto fam = limits::random_family(g, n, seed);
  auto model = limits::limit_model(fam);
  std::vector<double> grid;
  double lo = 1, hi = 5, step = 1;
  if (!t_spec.empty()) {
    if (sscanf(t_spec.c_str(), "%lf:%lf:%lf", &lo, &hi, &step) != 3 || step <= 0)
      throw std::invalid_argument("--t expects lo:hi:step");
  }
  for (double t = lo; t <= hi + 1e-12; t += step) grid.push_back(t);
  auto rows = limits::limit_residual(fam, model, grid, samples, tol, seed + 1);
  std::cout << "t,residual\n";
  for (const auto& r : rows)
    std::cout << fmt(r.t) << "," << fmt(r.max_residual) << "\n";
  std::cout << "# fitted decay exponent: "
            << fmt(limits::fitted_decay_exponent(rows)) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"semi-abelic theta toolkit"};
  app.require_subcommand(1);

  double tol = kDefaultTol;
  std::uint64_t seed = 1;
  int g = 2, samples = 8, n = 2;
  std::string format = "json";
  app.add_option("--tol", tol, "certified tolerance")->capture_default_str();

  auto* theta_cmd = app.add_subcommand("theta", "evaluate theta / gradients");
  std::string tau_file, tau_inline, z_str, char_str;
  bool want_grad = false;
  theta_cmd->add_option("--g", g, "genus (informational)");
  theta_cmd->add_option("--tau-file", tau_file, "JSON file {re:[[..]],im:[[..]]}");
  theta_cmd->add_option("--tau", tau_inline, "inline JSON matrix");
  theta_cmd->add_option("--z", z_str, "comma-separated complex entries");
  theta_cmd->add_option("--char", char_str, "2g bits eps,delta");
  theta_cmd->add_flag("--grad", want_grad, "print the z-gradient too");

  auto* model_cmd = app.add_subcommand("model", "semi-abelic model operations");
  std::string kind = "rank1", model_file;
  bool break_gluing = false;
  model_cmd->require_subcommand(1);
  model_cmd->add_option("--kind", kind,
                        "rank1|standard|two-p2|two-p1xp2|octahedron|two-pyramids|"
                        "principal-rank3");
  model_cmd->add_option("--g", g, "total genus");
  model_cmd->add_option("--n", n, "torus rank for standard models");
  model_cmd->add_option("--seed", seed, "PRNG seed");
  model_cmd->add_option("--samples", samples, "samples per check");
  model_cmd->add_option("--model-file", model_file, "load model JSON instead");
  model_cmd->add_flag("--break-gluing", break_gluing,
                      "perturb one gluing scale by 1% (fault injection)");
  auto* verify_cmd = model_cmd->add_subcommand("verify", "run all checks");
  auto* fp_cmd = model_cmd->add_subcommand("fixed-points", "list fixed points");
  auto* grad_cmd = model_cmd->add_subcommand("gradient", "gradients at odd points");

  auto* dice_cmd = app.add_subcommand("dice", "Delaunay dicing of a cone");
  std::string forms_str;
  dice_cmd->add_option("--forms", forms_str, "e.g. \"x1^2,x2^2,(x1-x2)^2\"")
      ->required();
  dice_cmd->add_option("--format", format, "json|csv")->capture_default_str();

  app.add_subcommand("table", "reproduce the stratum table as CSV");

  auto* limit_cmd = app.add_subcommand("limit", "degeneration limit residuals");
  std::string limit_kind = "rank1", t_spec = "1:5:1";
  limit_cmd->add_option("--kind", limit_kind, "rank1|standard2|standard3");
  limit_cmd->add_option("--g", g, "total genus");
  limit_cmd->add_option("--t", t_spec, "grid lo:hi:step")->capture_default_str();
  limit_cmd->add_option("--seed", seed, "PRNG seed");
  limit_cmd->add_option("--samples", samples, "sample points");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (theta_cmd->parsed())
      return cmd_theta(tau_file, tau_inline, z_str, char_str, want_grad, tol);
    if (model_cmd->parsed()) {
      auto model = model_from_flags(kind, g, seed, n, model_file);
      if (verify_cmd->parsed())
        return cmd_model_verify(model, samples, tol, seed, break_gluing);
      if (fp_cmd->parsed()) return cmd_model_fixed_points(model, seed);
      if (grad_cmd->parsed()) return cmd_model_gradient(model, tol);
    }
    if (dice_cmd->parsed()) return cmd_dice(forms_str, format);
    if (app.get_subcommand("table")->parsed()) return cmd_table();
    if (limit_cmd->parsed())
      return cmd_limit(limit_kind, g, t_spec, samples, tol, seed);
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const dicing::parse_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumericDomain;
  }
  return kExitUsage;
}
