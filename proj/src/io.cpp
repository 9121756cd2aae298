#include "spherekern/io.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace spherekern {

namespace {

using nlohmann::json;

const json& field(const json& obj, const char* name, const std::string& where) {
  auto it = obj.find(name);
  if (it == obj.end()) throw SpecError(where + ": missing field \"" + name + "\"");
  return *it;
}

int get_int(const json& obj, const char* name, const std::string& where) {
  const json& v = field(obj, name, where);
  if (!v.is_number_integer())
    throw SpecError(where + ": field \"" + name + "\" must be an integer");
  return v.get<int>();
}

double get_double(const json& obj, const char* name, const std::string& where) {
  const json& v = field(obj, name, where);
  if (!v.is_number())
    throw SpecError(where + ": field \"" + name + "\" must be a number");
  return v.get<double>();
}

std::string get_string(const json& obj, const char* name, const std::string& where) {
  const json& v = field(obj, name, where);
  if (!v.is_string())
    throw SpecError(where + ": field \"" + name + "\" must be a string");
  return v.get<std::string>();
}

double opt_double(const json& obj, const char* name, double fallback,
                  const std::string& where) {
  auto it = obj.find(name);
  if (it == obj.end()) return fallback;
  if (!it->is_number())
    throw SpecError(where + ": field \"" + name + "\" must be a number");
  return it->get<double>();
}

std::vector<int> get_int_array(const json& obj, const char* name,
                               const std::string& where) {
  const json& v = field(obj, name, where);
  if (!v.is_array())
    throw SpecError(where + ": field \"" + name + "\" must be an array of integers");
  std::vector<int> out;
  for (const auto& e : v) {
    if (!e.is_number_integer())
      throw SpecError(where + ": field \"" + name + "\" must be an array of integers");
    out.push_back(e.get<int>());
  }
  return out;
}

TailDescriptor parse_tail(const json& doc) {
  auto it = doc.find("tail");
  if (it == doc.end()) return TailDescriptor::none();
  const json& t = *it;
  if (!t.is_object()) throw SpecError("spec tail: must be an object");
  std::string kind = get_string(t, "kind", "spec tail");
  if (kind == "none") return TailDescriptor::none();
  if (kind != "power") throw SpecError("spec tail: unknown kind \"" + kind + "\"");
  double s = get_double(t, "s", "spec tail");
  double amplitude = get_double(t, "amplitude", "spec tail");
  std::string parity_str = "all";
  if (t.contains("parity")) parity_str = get_string(t, "parity", "spec tail");
  ParityMask parity;
  if (parity_str == "even")
    parity = ParityMask::Even;
  else if (parity_str == "odd")
    parity = ParityMask::Odd;
  else if (parity_str == "all")
    parity = ParityMask::All;
  else
    throw SpecError("spec tail: parity must be \"even\", \"odd\", or \"all\"");

  bool all_support = true;
  std::vector<int> support;
  if (t.contains("l1_support")) {
    const json& ls = t.at("l1_support");
    if (ls.is_string()) {
      if (ls.get<std::string>() != "all")
        throw SpecError("spec tail: l1_support must be \"all\" or an integer array");
    } else {
      all_support = false;
      support = get_int_array(t, "l1_support", "spec tail");
    }
  }
  try {
    return all_support ? TailDescriptor::power(s, amplitude, parity)
                       : TailDescriptor::power_l1(s, amplitude, parity, std::move(support));
  } catch (const std::domain_error& e) {
    throw SpecError(std::string("spec tail: ") + e.what());
  }
}

Complex entry_value(const json& e, const std::string& where) {
  double re = get_double(e, "re", where);
  double im = opt_double(e, "im", 0.0, where);
  return {re, im};
}

std::string entry_where(size_t i) {
  return "spec coefficients[" + std::to_string(i) + "]";
}

}  // namespace

CoefficientScheme parse_spec(const json& doc) {
  if (!doc.is_object()) throw SpecError("spec: top level must be an object");
  int d = get_int(doc, "ambient_dim", "spec");
  int L = get_int(doc, "truncation_degree", "spec");
  const json& scheme_obj = field(doc, "scheme", "spec");
  if (!scheme_obj.is_object()) throw SpecError("spec: \"scheme\" must be an object");
  std::string type = get_string(scheme_obj, "type", "spec scheme");
  const json& coeffs = field(scheme_obj, "coefficients", "spec scheme");
  if (!coeffs.is_array())
    throw SpecError("spec scheme: \"coefficients\" must be an array");
  TailDescriptor tail = parse_tail(doc);

  try {
    if (type == "general") {
      std::map<GeneralKey, Complex> entries;
      for (size_t i = 0; i < coeffs.size(); ++i) {
        const std::string where = entry_where(i);
        const json& e = coeffs[i];
        GeneralKey key{get_int(e, "j", where), get_int(e, "k", where),
                       get_int(e, "jp", where), get_int(e, "kp", where)};
        Complex v = entry_value(e, where);
        auto [it, inserted] = entries.emplace(key, v);
        if (!inserted && it->second != v)
          throw SpecError(where + ": duplicate entry with a different value");
      }
      // Hermitian closure: mirror one-sided entries, reject contradictions
      for (auto snapshot = entries; const auto& [key, v] : snapshot) {
        GeneralKey mirror{key.jp, key.kp, key.j, key.k};
        auto it = entries.find(mirror);
        if (it == entries.end())
          entries.emplace(mirror, std::conj(v));
        else if (it->second != std::conj(v))
          throw SpecError("spec coefficients: entry (" + std::to_string(key.j) + "," +
                          std::to_string(key.k) + "," + std::to_string(key.jp) + "," +
                          std::to_string(key.kp) + ") contradicts its Hermitian mirror");
      }
      return CoefficientScheme::general(d, L, std::move(entries), std::move(tail));
    }

    if (type == "convolutional") {
      std::map<std::tuple<int, int, int>, Complex> entries;
      for (size_t i = 0; i < coeffs.size(); ++i) {
        const std::string where = entry_where(i);
        const json& e = coeffs[i];
        std::tuple<int, int, int> key{get_int(e, "j", where), get_int(e, "k", where),
                                      get_int(e, "kp", where)};
        Complex v = entry_value(e, where);
        auto [it, inserted] = entries.emplace(key, v);
        if (!inserted && it->second != v)
          throw SpecError(where + ": duplicate entry with a different value");
      }
      for (auto snapshot = entries; const auto& [key, v] : snapshot) {
        auto [j, k, kp] = key;
        std::tuple<int, int, int> mirror{j, kp, k};
        auto it = entries.find(mirror);
        if (it == entries.end())
          entries.emplace(mirror, std::conj(v));
        else if (it->second != std::conj(v))
          throw SpecError("spec coefficients: entry (j=" + std::to_string(j) + ",k=" +
                          std::to_string(k) + ",kp=" + std::to_string(kp) +
                          ") contradicts its Hermitian mirror");
      }
      std::map<int, Eigen::MatrixXcd> blocks;
      for (const auto& [key, v] : entries) {
        auto [j, k, kp] = key;
        if (j < 0 || j > L) throw SpecError("spec coefficients: degree outside truncation");
        auto n = dim_harmonic_space(j, d);
        if (k < 1 || k > n || kp < 1 || kp > n)
          throw SpecError("spec coefficients: basis index outside 1..N at degree " +
                          std::to_string(j));
        auto it = blocks.find(j);
        if (it == blocks.end())
          it = blocks.emplace(j, Eigen::MatrixXcd::Zero(n, n)).first;
        it->second(k - 1, kp - 1) = v;
      }
      return CoefficientScheme::convolutional(d, L, std::move(blocks), std::move(tail));
    }

    if (type == "convolutional_diagonal") {
      std::map<std::pair<int, int>, double> diag;
      for (size_t i = 0; i < coeffs.size(); ++i) {
        const std::string where = entry_where(i);
        const json& e = coeffs[i];
        std::pair<int, int> key{get_int(e, "j", where), get_int(e, "k", where)};
        double v = get_double(e, "value", where);
        auto [it, inserted] = diag.emplace(key, v);
        if (!inserted && it->second != v)
          throw SpecError(where + ": duplicate entry with a different value");
      }
      return CoefficientScheme::convolutional_diagonal(d, L, std::move(diag),
                                                       std::move(tail));
    }

    if (type == "axial") {
      std::map<int, AxialBlock> blocks;
      for (size_t i = 0; i < coeffs.size(); ++i) {
        const std::string where = entry_where(i);
        const json& e = coeffs[i];
        int l1 = get_int(e, "l1", where);
        TailIndex row = get_int_array(e, "row", where);
        TailIndex col = get_int_array(e, "col", where);
        Complex v = entry_value(e, where);
        auto& block = blocks[l1];
        auto [it, inserted] = block.emplace(std::make_pair(row, col), v);
        if (!inserted && it->second != v)
          throw SpecError(where + ": duplicate entry with a different value");
      }
      for (auto& [l1, block] : blocks) {
        for (auto snapshot = block; const auto& [key, v] : snapshot) {
          auto mirror = std::make_pair(key.second, key.first);
          auto it = block.find(mirror);
          if (it == block.end())
            block.emplace(mirror, std::conj(v));
          else if (it->second != std::conj(v))
            throw SpecError("spec coefficients: axial entry at l1=" + std::to_string(l1) +
                            " contradicts its Hermitian mirror");
        }
      }
      return CoefficientScheme::axial(d, L, std::move(blocks), std::move(tail));
    }

    if (type == "isotropic") {
      std::map<int, double> iso;
      for (size_t i = 0; i < coeffs.size(); ++i) {
        const std::string where = entry_where(i);
        const json& e = coeffs[i];
        int j = get_int(e, "j", where);
        double v = get_double(e, "value", where);
        auto [it, inserted] = iso.emplace(j, v);
        if (!inserted && it->second != v)
          throw SpecError(where + ": duplicate entry with a different value");
      }
      return CoefficientScheme::isotropic(d, L, std::move(iso), std::move(tail));
    }
  } catch (const std::domain_error& e) {
    throw SpecError(std::string("spec: ") + e.what());
  }
  throw SpecError("spec scheme: unknown type \"" + type + "\"");
}

CoefficientScheme load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecError("cannot open spec file: " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw SpecError("spec parse error in " + path + ": " + e.what());
  }
  return parse_spec(doc);
}

nlohmann::json scheme_to_json(const CoefficientScheme& scheme) {
  json doc;
  doc["ambient_dim"] = scheme.dim();
  doc["truncation_degree"] = scheme.truncation();
  json entries = json::array();
  json s;
  switch (scheme.type()) {
    case SchemeType::General:
      s["type"] = "general";
      for (const auto& [key, v] : scheme.general_entries())
        entries.push_back({{"j", key.j}, {"k", key.k}, {"jp", key.jp},
                           {"kp", key.kp}, {"re", v.real()}, {"im", v.imag()}});
      break;
    case SchemeType::Convolutional:
      s["type"] = "convolutional";
      for (const auto& [j, D] : scheme.conv_blocks())
        for (Eigen::Index k = 0; k < D.rows(); ++k)
          for (Eigen::Index kp = 0; kp < D.cols(); ++kp)
            if (D(k, kp) != Complex(0.0, 0.0))
              entries.push_back({{"j", j}, {"k", static_cast<int>(k) + 1},
                                 {"kp", static_cast<int>(kp) + 1},
                                 {"re", D(k, kp).real()}, {"im", D(k, kp).imag()}});
      break;
    case SchemeType::ConvolutionalDiagonal:
      s["type"] = "convolutional_diagonal";
      for (const auto& [jk, v] : scheme.diag_entries())
        entries.push_back({{"j", jk.first}, {"k", jk.second}, {"value", v}});
      break;
    case SchemeType::Axial:
      s["type"] = "axial";
      for (const auto& [l1, block] : scheme.axial_blocks())
        for (const auto& [key, v] : block)
          entries.push_back({{"l1", l1}, {"row", key.first}, {"col", key.second},
                             {"re", v.real()}, {"im", v.imag()}});
      break;
    case SchemeType::Isotropic:
      s["type"] = "isotropic";
      for (const auto& [j, v] : scheme.iso_coeffs())
        entries.push_back({{"j", j}, {"value", v}});
      break;
  }
  s["coefficients"] = std::move(entries);
  doc["scheme"] = std::move(s);
  const auto& tail = scheme.tail();
  if (tail.present) {
    json t;
    t["kind"] = "power";
    t["s"] = tail.s;
    t["amplitude"] = tail.amplitude;
    t["parity"] = tail.parity == ParityMask::Even  ? "even"
                  : tail.parity == ParityMask::Odd ? "odd"
                                                   : "all";
    if (tail.all_l1)
      t["l1_support"] = "all";
    else
      t["l1_support"] = tail.l1_support;
    doc["tail"] = std::move(t);
  }
  return doc;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r' && c != ' ' && c != '\t') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& token, size_t row, size_t col) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size())
    throw SpecError("points row " + std::to_string(row) + ", column " +
                    std::to_string(col + 1) + ": cannot parse number \"" + token + "\"");
  return value;
}

}  // namespace

PointsData load_points(const std::string& path, int expected_dim) {
  std::ifstream in(path);
  if (!in) throw SpecError("cannot open points file: " + path);
  std::string line;
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    bool blank = true;
    for (char c : line)
      if (!std::isspace(static_cast<unsigned char>(c))) { blank = false; break; }
    if (!blank) rows.push_back(split_csv_line(line));
  }
  if (rows.size() < 2) throw SpecError("points file needs a header and at least one row");

  const auto& header = rows[0];
  const int d = expected_dim;
  bool polar;
  size_t coord_cols;
  if (!header.empty() && header[0].rfind("theta", 0) == 0) {
    polar = true;
    coord_cols = static_cast<size_t>(d - 1);
    for (size_t c = 0; c < coord_cols; ++c) {
      if (c >= header.size() || header[c] != "theta" + std::to_string(c + 1))
        throw SpecError("points header: expected theta1..theta" + std::to_string(d - 1));
    }
  } else if (!header.empty() && header[0].rfind("x", 0) == 0) {
    polar = false;
    coord_cols = static_cast<size_t>(d);
    for (size_t c = 0; c < coord_cols; ++c) {
      if (c >= header.size() || header[c] != "x" + std::to_string(c + 1))
        throw SpecError("points header: expected x1..x" + std::to_string(d));
    }
  } else {
    throw SpecError("points header: must start with theta1 or x1");
  }
  bool has_values = header.size() == coord_cols + 2;
  if (has_values &&
      (header[coord_cols] != "value_re" || header[coord_cols + 1] != "value_im"))
    throw SpecError("points header: trailing columns must be value_re,value_im");
  if (!has_values && header.size() != coord_cols)
    throw SpecError("points header: unexpected column count");

  PointsData data;
  data.has_values = has_values;
  for (size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != header.size())
      throw SpecError("points row " + std::to_string(r) + ": expected " +
                      std::to_string(header.size()) + " columns, got " +
                      std::to_string(row.size()));
    std::vector<double> coords(coord_cols);
    for (size_t c = 0; c < coord_cols; ++c) coords[c] = parse_double(row[c], r, c);
    try {
      if (polar) {
        data.points.push_back(SpherePoint::from_polar(d, coords));
      } else {
        double deviation = 0.0;
        data.points.push_back(SpherePoint::from_cartesian(coords, &deviation));
        if (deviation > 1e-6)
          data.warnings.push_back("row " + std::to_string(r) + ": normalized (|x| off by " +
                                  std::to_string(deviation) + ")");
      }
    } catch (const std::exception& e) {
      throw SpecError("points row " + std::to_string(r) + ": " + e.what());
    }
    if (has_values)
      data.values.emplace_back(parse_double(row[coord_cols], r, coord_cols),
                               parse_double(row[coord_cols + 1], r, coord_cols + 1));
  }
  return data;
}

nlohmann::json certificate_to_json(const Certificate& cert) {
  json doc;
  doc["verdict"] = to_string(cert.verdict);
  json conditions = json::array();
  for (const auto& c : cert.conditions)
    conditions.push_back(
        {{"name", c.name}, {"status", to_string(c.status)}, {"evidence", c.evidence}});
  doc["conditions"] = std::move(conditions);
  doc["parameters"] = {{"tol", cert.params.tol},
                       {"sigma", cert.params.sigma},
                       {"progression_cap", cert.params.progression_cap},
                       {"scaled_eps", cert.params.scaled_eps}};
  json plan;
  const char* kind = "none";
  switch (cert.witness_plan.kind) {
    case WitnessKind::None: kind = "none"; break;
    case WitnessKind::SinglePoint: kind = "single_point"; break;
    case WitnessKind::AntipodalPair: kind = "antipodal_pair"; break;
    case WitnessKind::ParityKill: kind = "parity_kill"; break;
    case WitnessKind::LongitudeMoments: kind = "longitude_moments"; break;
    case WitnessKind::PolePoint: kind = "pole_point"; break;
  }
  plan["kind"] = kind;
  plan["description"] = cert.witness_plan.description;
  if (!cert.witness_plan.kill_degrees.empty())
    plan["kill_degrees"] = cert.witness_plan.kill_degrees;
  if (!cert.witness_plan.l1_values.empty())
    plan["l1_values"] = cert.witness_plan.l1_values;
  doc["witness_plan"] = std::move(plan);
  return doc;
}

nlohmann::json witness_to_json(const Witness& witness) {
  json doc;
  json points = json::array();
  for (const auto& p : witness.points) points.push_back(p.polar());
  doc["points_polar"] = std::move(points);
  json re = json::array(), im = json::array();
  for (Eigen::Index i = 0; i < witness.coeffs.size(); ++i) {
    re.push_back(witness.coeffs(i).real());
    im.push_back(witness.coeffs(i).imag());
  }
  doc["coeffs_re"] = std::move(re);
  doc["coeffs_im"] = std::move(im);
  doc["residual"] = witness.residual;
  doc["description"] = witness.description;
  return doc;
}

nlohmann::json gram_sidecar_json(const GramSystem& gs) {
  json doc;
  doc["size"] = gs.gram.rows();
  doc["lambda_min"] = gs.lambda_min;
  doc["lambda_max"] = gs.lambda_max;
  doc["trace"] = gs.gram.real().trace();
  doc["asymmetry"] = gs.asymmetry;
  return doc;
}

std::string gram_to_csv(const Eigen::MatrixXcd& gram) {
  std::ostringstream os;
  for (Eigen::Index j = 0; j < gram.cols(); ++j)
    os << (j ? "," : "") << "re_" << j + 1 << ",im_" << j + 1;
  os << "\n";
  char buf[64];
  for (Eigen::Index i = 0; i < gram.rows(); ++i) {
    for (Eigen::Index j = 0; j < gram.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g", gram(i, j).real(), gram(i, j).imag());
      os << (j ? "," : "") << buf;
    }
    os << "\n";
  }
  return os.str();
}

std::string dump_json(const nlohmann::json& doc) { return doc.dump(2) + "\n"; }

void atomic_write(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + tmp.string());
    out << content;
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  fs::rename(tmp, target);
}

}  // namespace spherekern
