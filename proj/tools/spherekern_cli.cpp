// Command-line front end: kernel spec files in, certificates, Gram
// matrices, interpolation models, and probe reports out.
//
// Exit codes: 0 certified strictly positive definite (or success for the
// non-certifying commands), 1 positive definite only, 2 indeterminate,
// 3 refuted / singular, 4 input error.

#include <CLI11.hpp>
#include <json.hpp>

#include <complex>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "spherekern/certify.hpp"
#include "spherekern/interp.hpp"
#include "spherekern/io.hpp"

namespace sk = spherekern;
using nlohmann::json;

namespace {

constexpr int kExitSpd = 0;
constexpr int kExitPd = 1;
constexpr int kExitIndeterminate = 2;
constexpr int kExitRefuted = 3;
constexpr int kExitInputError = 4;

void emit(const json& doc, const std::string& out_path) {
  std::string text = sk::dump_json(doc);
  if (out_path.empty())
    std::cout << text;
  else
    sk::atomic_write(out_path, text);
}

int run_check(const std::string& spec_path, double tol, double sigma, int progression_cap,
              const std::string& json_out) {
  sk::CoefficientScheme scheme = sk::load_spec(spec_path);
  sk::CertifyOptions opt;
  opt.tol = tol;
  opt.sigma = sigma;
  opt.progression_cap = progression_cap;
  sk::Certificate cert = sk::certify(scheme, opt);

  json report;
  report["certificate"] = sk::certificate_to_json(cert);
  if (cert.verdict == sk::Verdict::NotSpd &&
      cert.witness_plan.kind != sk::WitnessKind::None) {
    sk::Witness w = sk::realize_witness(scheme, cert.witness_plan);
    double scale = 0.0;
    for (Eigen::Index i = 0; i < w.coeffs.size(); ++i) scale += std::abs(w.coeffs(i));
    double bound = 1e-9 * scale * scale * std::max(1.0, sk::summability_bound(scheme));
    report["witness"] = sk::witness_to_json(w);
    report["witness_verified"] = std::abs(w.residual) <= bound;
  }
  emit(report, json_out);

  switch (cert.verdict) {
    case sk::Verdict::SpdCertified: return kExitSpd;
    case sk::Verdict::PdCertified: return kExitPd;
    case sk::Verdict::Indeterminate: return kExitIndeterminate;
    case sk::Verdict::NotSpd: return kExitRefuted;
  }
  return kExitIndeterminate;
}

int run_gram(const std::string& spec_path, const std::string& points_path,
             const std::string& out_path) {
  sk::CoefficientScheme scheme = sk::load_spec(spec_path);
  sk::PointsData data = sk::load_points(points_path, scheme.dim());
  for (const auto& w : data.warnings) std::cerr << "warning: " << w << "\n";
  sk::GramSystem gs = sk::assemble_gram(scheme, data.points);
  if (out_path.empty()) {
    std::cout << sk::gram_to_csv(gs.gram);
    std::cout << sk::dump_json(sk::gram_sidecar_json(gs));
  } else {
    sk::atomic_write(out_path, sk::gram_to_csv(gs.gram));
    sk::atomic_write(out_path + ".json", sk::dump_json(sk::gram_sidecar_json(gs)));
  }
  return kExitSpd;
}

int run_interp(const std::string& spec_path, const std::string& data_path,
               const std::string& model_path) {
  sk::CoefficientScheme scheme = sk::load_spec(spec_path);
  sk::PointsData data = sk::load_points(data_path, scheme.dim());
  if (!data.has_values)
    throw sk::SpecError("interp: data file must carry value_re,value_im columns");
  for (const auto& w : data.warnings) std::cerr << "warning: " << w << "\n";
  sk::GramSystem gs = sk::assemble_gram(scheme, data.points);

  Eigen::VectorXcd values(static_cast<Eigen::Index>(data.values.size()));
  for (size_t i = 0; i < data.values.size(); ++i)
    values(static_cast<Eigen::Index>(i)) = data.values[i];

  try {
    double residual = 0.0;
    Eigen::VectorXcd coeffs = sk::solve_interpolation(gs, values, &residual);
    json model;
    model["spec"] = sk::scheme_to_json(scheme);
    json points = json::array();
    for (const auto& p : data.points) points.push_back(p.polar());
    model["points_polar"] = std::move(points);
    json re = json::array(), im = json::array();
    for (Eigen::Index i = 0; i < coeffs.size(); ++i) {
      re.push_back(coeffs(i).real());
      im.push_back(coeffs(i).imag());
    }
    model["coeffs_re"] = std::move(re);
    model["coeffs_im"] = std::move(im);
    model["residual"] = residual;
    emit(model, model_path);
    return kExitSpd;
  } catch (const sk::SingularGramError& e) {
    sk::Witness w;
    w.points = data.points;
    w.coeffs = e.null_vector;
    w.residual = sk::quadratic_form(scheme, w.points, w.coeffs);
    w.description = "singular Gram matrix, lambda_min = " + std::to_string(e.lambda_min);
    json doc;
    doc["error"] = "singular_gram";
    doc["lambda_min"] = e.lambda_min;
    doc["witness"] = sk::witness_to_json(w);
    emit(doc, model_path);
    std::cerr << e.what() << "\n";
    return kExitRefuted;
  }
}

int run_eval(const std::string& model_path, const std::string& points_path,
             const std::string& out_path) {
  std::ifstream in(model_path);
  if (!in) throw sk::SpecError("cannot open model file: " + model_path);
  json model;
  try {
    in >> model;
  } catch (const json::parse_error& e) {
    throw sk::SpecError(std::string("model parse error: ") + e.what());
  }
  if (!model.contains("spec")) throw sk::SpecError("model: missing \"spec\"");
  sk::CoefficientScheme scheme = sk::parse_spec(model.at("spec"));

  std::vector<sk::SpherePoint> sites;
  for (const auto& angles : model.at("points_polar"))
    sites.push_back(sk::SpherePoint::from_polar(scheme.dim(),
                                                angles.get<std::vector<double>>()));
  const auto& re = model.at("coeffs_re");
  const auto& im = model.at("coeffs_im");
  if (re.size() != sites.size() || im.size() != sites.size())
    throw sk::SpecError("model: coefficient/point count mismatch");
  Eigen::VectorXcd coeffs(static_cast<Eigen::Index>(sites.size()));
  for (size_t i = 0; i < sites.size(); ++i)
    coeffs(static_cast<Eigen::Index>(i)) =
        sk::Complex(re[i].get<double>(), im[i].get<double>());

  sk::PointsData data = sk::load_points(points_path, scheme.dim());
  std::ostringstream os;
  os << "s_re,s_im\n";
  char buf[64];
  for (const auto& zeta : data.points) {
    sk::Complex v = sk::eval_interpolant(scheme, sites, coeffs, zeta);
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", v.real(), v.imag());
    os << buf;
  }
  if (out_path.empty())
    std::cout << os.str();
  else
    sk::atomic_write(out_path, os.str());
  return kExitSpd;
}

int run_probe(const std::string& spec_path, int sets, int points, std::uint64_t seed,
              bool antipodal, const std::string& json_out) {
  sk::CoefficientScheme scheme = sk::load_spec(spec_path);
  sk::ProbeReport report = sk::probe_spd(scheme, sets, points, seed, antipodal);
  json doc;
  doc["sets_run"] = report.sets_run;
  doc["points_per_set"] = points;
  doc["seed"] = seed;
  doc["antipodal"] = antipodal;
  doc["min_normalized_lambda"] = report.min_normalized_lambda;
  if (report.witness) {
    doc["witness"] = sk::witness_to_json(*report.witness);
    doc["witness_set"] = report.witness_set;
  }
  emit(doc, json_out);
  return report.witness ? kExitRefuted : kExitSpd;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structured spherical kernel construction, certification, and "
               "interpolation"};
  app.require_subcommand(1);

  std::string spec_path, points_path, data_path, model_path, out_path, json_out;
  double tol = 1e-10, sigma = 0.5;
  int progression_cap = 10, sets = 20, points = 10;
  std::uint64_t seed = 1;
  bool antipodal = false;

  auto* check = app.add_subcommand("check", "Certify (strict) positive definiteness");
  check->add_option("spec", spec_path, "kernel spec JSON")->required();
  check->add_option("--tol", tol, "eigenvalue tolerance");
  check->add_option("--sigma", sigma, "dominance parameter in (0,1)");
  check->add_option("--progression-cap", progression_cap, "circle progression scan bound");
  check->add_option("--json-out", json_out, "write the report here instead of stdout");

  auto* gram = app.add_subcommand("gram", "Assemble the Gram matrix of a point set");
  gram->add_option("spec", spec_path, "kernel spec JSON")->required();
  gram->add_option("points", points_path, "points CSV")->required();
  gram->add_option("--out", out_path, "CSV output path (sidecar JSON gets .json)");

  auto* interp = app.add_subcommand("interp", "Solve the interpolation system");
  interp->add_option("spec", spec_path, "kernel spec JSON")->required();
  interp->add_option("data", data_path, "points CSV with value columns")->required();
  interp->add_option("--out-model", model_path, "model JSON output path");

  auto* eval = app.add_subcommand("eval", "Evaluate a stored interpolant");
  eval->add_option("model", model_path, "model JSON from interp")->required();
  eval->add_option("points", points_path, "points CSV")->required();
  eval->add_option("--out", out_path, "CSV output path");

  auto* probe = app.add_subcommand("probe", "Random Gram spectral probing");
  probe->add_option("spec", spec_path, "kernel spec JSON")->required();
  probe->add_option("--sets", sets, "number of point sets");
  probe->add_option("--points", points, "points per set");
  probe->add_option("--seed", seed, "RNG seed");
  probe->add_flag("--antipodal", antipodal, "append the antipode of every point");
  probe->add_option("--json-out", json_out, "write the report here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitInputError;
  }

  try {
    if (check->parsed())
      return run_check(spec_path, tol, sigma, progression_cap, json_out);
    if (gram->parsed()) return run_gram(spec_path, points_path, out_path);
    if (interp->parsed()) return run_interp(spec_path, data_path, model_path);
    if (eval->parsed()) return run_eval(model_path, points_path, out_path);
    if (probe->parsed())
      return run_probe(spec_path, sets, points, seed, antipodal, json_out);
  } catch (const sk::SpecError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}
