#include "spherekern/certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

namespace spherekern {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::SpdCertified: return "SPD_CERTIFIED";
    case Verdict::PdCertified: return "PD_CERTIFIED";
    case Verdict::Indeterminate: return "INDETERMINATE";
    case Verdict::NotSpd: return "NOT_SPD";
  }
  return "INDETERMINATE";
}

std::string to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    case CheckStatus::NotApplicable: return "not_applicable";
  }
  return "not_applicable";
}

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

std::string join_ints(const std::vector<int>& v) {
  std::ostringstream os;
  os << "{";
  for (size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  os << "}";
  return os.str();
}

double one_norm(const Eigen::MatrixXcd& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().colwise().sum().maxCoeff();
}

double lambda_min_of(const Eigen::MatrixXcd& m) {
  if (m.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

bool block_hermitian(const AxialBlock& block) {
  for (const auto& [key, v] : block) {
    auto it = block.find({key.second, key.first});
    Complex m = it == block.end() ? Complex(0.0, 0.0) : it->second;
    if (v != std::conj(m)) return false;
  }
  return true;
}

bool tail_strict(const TailDescriptor& t) {
  return t.present && t.all_l1 && t.parity == ParityMask::All;
}

}  // namespace

BlockMatrix build_block_matrix(const CoefficientScheme& scheme, int l1, int k, bool scaled) {
  if (scheme.type() != SchemeType::Axial)
    throw std::invalid_argument("build_block_matrix: scheme must have axial form");
  AlphaOrdering ord(scheme.dim(), l1, scheme.truncation());
  if (k < 0 || k > ord.size())
    throw std::out_of_range("build_block_matrix: k exceeds the truncated index count");
  const AxialBlock& stored = scheme.axial_block(l1);
  BlockMatrix out;
  out.l1 = l1;
  out.scaled = scaled;
  out.entries = Eigen::MatrixXcd::Zero(k, k);
  for (int a = 1; a <= k; ++a) {
    for (int b = 1; b <= k; ++b) {
      auto it = stored.find({ord.tail(a), ord.tail(b)});
      if (it == stored.end()) continue;
      Complex v = it->second;
      if (scaled)
        v *= std::sqrt(static_cast<double>(ord.n_alpha(a)) *
                       static_cast<double>(ord.n_alpha(b)));
      out.entries(a - 1, b - 1) = v;
    }
  }
  return out;
}

AxialPdResult check_axial_pd(const CoefficientScheme& scheme, double tol) {
  if (scheme.type() != SchemeType::Axial)
    throw std::invalid_argument("check_axial_pd: scheme must have axial form");
  AxialPdResult res;
  res.worst_lambda = std::numeric_limits<double>::infinity();
  for (const auto& [l1, block] : scheme.axial_blocks()) {
    if (!block_hermitian(block))
      throw std::invalid_argument("check_axial_pd: non-Hermitian block at l1=" +
                                  std::to_string(l1));
    AlphaOrdering ord(scheme.dim(), l1, scheme.truncation());
    BlockMatrix bm = build_block_matrix(scheme, l1, ord.size(), false);
    double lm = lambda_min_of(bm.entries);
    res.lambda_min[l1] = lm;
    double eff = tol * std::max(1.0, one_norm(bm.entries));
    if (lm < res.worst_lambda) {
      res.worst_lambda = lm;
      res.worst_l1 = l1;
    }
    if (lm < -eff) res.pass = false;
  }
  if (res.lambda_min.empty()) res.worst_lambda = 0.0;
  return res;
}

ScaledEigenResult check_scaled_eigen_spd(const CoefficientScheme& scheme,
                                         const ScaledEigenOptions& options) {
  if (scheme.type() != SchemeType::Axial)
    throw std::invalid_argument("check_scaled_eigen_spd: scheme must have axial form");
  if (options.eps <= 0.0)
    throw std::domain_error("check_scaled_eigen_spd: eps must be positive");
  ScaledEigenResult res;
  res.extends_to_tail = tail_strict(scheme.tail());
  for (const auto& [l1, block] : scheme.axial_blocks()) {
    AlphaOrdering ord(scheme.dim(), l1, scheme.truncation());
    const int K = ord.size();
    BlockMatrix bm = build_block_matrix(scheme, l1, K, true);
    ScaledEigenPerL1 r;

    std::vector<double> scale(static_cast<size_t>(K));
    auto given = options.scalings.find(l1);
    bool ok = true;
    if (given != options.scalings.end()) {
      if (static_cast<int>(given->second.size()) != K)
        throw std::domain_error("check_scaled_eigen_spd: scaling length mismatch");
      for (int a = 0; a < K; ++a) {
        if (given->second[static_cast<size_t>(a)] <= 0.0)
          throw std::domain_error("check_scaled_eigen_spd: scaling must be positive");
        scale[static_cast<size_t>(a)] = given->second[static_cast<size_t>(a)];
      }
    } else {
      // diagonal equilibration d_alpha = 1 / |a~_{alpha,alpha}|
      for (int a = 0; a < K; ++a) {
        double dd = std::abs(bm.entries(a, a));
        if (dd == 0.0) {
          ok = false;
          r.note = "zero diagonal at alpha=" + std::to_string(a + 1);
          break;
        }
        scale[static_cast<size_t>(a)] = 1.0 / dd;
      }
    }
    if (!ok) {
      r.pass = false;
      res.per_l1[l1] = r;
      res.pass = false;
      continue;
    }

    r.min_lambda = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= K; ++k) {
      Eigen::MatrixXcd m(k, k);
      for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b)
          m(a, b) = std::sqrt(scale[static_cast<size_t>(a)]) * bm.entries(a, b) *
                    std::sqrt(scale[static_cast<size_t>(b)]);
      double lm = lambda_min_of(m);
      if (lm < r.min_lambda) {
        r.min_lambda = lm;
        r.minimizing_k = k;
      }
    }
    if (K == 0) r.min_lambda = 0.0;
    r.pass = K == 0 || r.min_lambda > options.eps;
    if (!r.pass) res.pass = false;
    res.per_l1[l1] = r;
  }
  return res;
}

DominanceResult check_diag_dominance_spd(const CoefficientScheme& scheme, double sigma) {
  if (scheme.type() != SchemeType::Axial)
    throw std::invalid_argument("check_diag_dominance_spd: scheme must have axial form");
  if (sigma <= 0.0 || sigma >= 1.0)
    throw std::domain_error("check_diag_dominance_spd: sigma must lie in (0,1)");
  DominanceResult res;
  res.tail_extends = tail_strict(scheme.tail());
  for (const auto& [l1, block] : scheme.axial_blocks()) {
    AlphaOrdering ord(scheme.dim(), l1, scheme.truncation());
    BlockMatrix bm = build_block_matrix(scheme, l1, ord.size(), true);
    double worst = 0.0;
    int worst_row = 0;
    for (int a = 0; a < bm.entries.rows(); ++a) {
      double diag = std::abs(bm.entries(a, a));
      double off = 0.0;
      for (int b = 0; b < bm.entries.cols(); ++b)
        if (b != a) off += std::abs(bm.entries(a, b));
      double ratio = diag > 0.0 ? off / diag : std::numeric_limits<double>::infinity();
      if (ratio > worst) {
        worst = ratio;
        worst_row = a + 1;
      }
    }
    res.worst_ratio[l1] = worst;
    if (worst >= sigma) {
      res.pass = false;
      res.worst_l1 = l1;
      res.worst_row = worst_row;
    }
  }
  return res;
}

NecessityResult check_axial_necessary(const CoefficientScheme& scheme) {
  if (scheme.type() != SchemeType::Axial)
    throw std::invalid_argument("check_axial_necessary: scheme must have axial form");
  NecessityResult res;
  const auto& tail = scheme.tail();
  const bool tail_at_0 = tail.present && tail.supports_l1(0);
  if (scheme.axial_block_zero(0) && !tail_at_0) {
    res.status = NecessityStatus::C0Zero;
    return res;
  }
  if (tail.present && tail.all_l1) return res;  // infinitely many l1
  std::set<int> support;
  for (const auto& [l1, block] : scheme.axial_blocks())
    if (!scheme.axial_block_zero(l1)) support.insert(l1);
  if (tail.present)
    for (int l1 : tail.l1_support) support.insert(l1);
  res.status = NecessityStatus::FiniteSupport;
  res.support.assign(support.begin(), support.end());
  return res;
}

namespace {

struct DegreeBlockInfo {
  double lambda_min = 0.0;
  double tol_eff = 0.0;
  bool nonzero = false;
  bool strictly_pd = false;
};

// Per-degree block summary for the convolutional criteria (works for the
// block, diagonal, and isotropic forms).
std::map<int, DegreeBlockInfo> degree_blocks(const CoefficientScheme& scheme, double tol) {
  std::map<int, DegreeBlockInfo> out;
  const int d = scheme.dim();
  switch (scheme.type()) {
    case SchemeType::Convolutional:
      for (const auto& [j, D] : scheme.conv_blocks()) {
        DegreeBlockInfo info;
        info.lambda_min = lambda_min_of(D);
        info.nonzero = D.cwiseAbs().maxCoeff() > 0.0;
        info.tol_eff = tol * std::max(1.0, one_norm(D));
        // strict PD additionally needs a full-rank block
        info.strictly_pd = info.lambda_min > info.tol_eff;
        out[j] = info;
      }
      break;
    case SchemeType::ConvolutionalDiagonal: {
      std::map<int, std::pair<double, std::int64_t>> mins;  // (min entry, count)
      for (const auto& [jk, v] : scheme.diag_entries()) {
        auto& slot = mins.try_emplace(jk.first, std::numeric_limits<double>::infinity(), 0)
                         .first->second;
        slot.first = std::min(slot.first, v);
        ++slot.second;
        auto& info = out[jk.first];
        if (v != 0.0) info.nonzero = true;
      }
      for (auto& [j, info] : out) {
        auto& slot = mins[j];
        // absent diagonal entries are zero
        double lm = slot.second < dim_harmonic_space(j, d) ? std::min(slot.first, 0.0)
                                                           : slot.first;
        info.lambda_min = lm;
        info.tol_eff = tol;
        info.strictly_pd = lm > tol;
      }
      break;
    }
    case SchemeType::Isotropic:
      for (const auto& [j, c] : scheme.iso_coeffs()) {
        DegreeBlockInfo info;
        info.lambda_min = c;
        info.nonzero = c != 0.0;
        info.tol_eff = tol;
        info.strictly_pd = c > tol;
        out[j] = info;
      }
      break;
    default:
      throw std::invalid_argument("degree_blocks: scheme must have convolutional form");
  }
  return out;
}

WitnessPlan parity_witness_plan(const std::vector<int>& even_support,
                                const std::vector<int>& odd_support, bool even_infinite,
                                bool odd_infinite) {
  WitnessPlan plan;
  if (!even_infinite && !odd_infinite) {
    std::vector<int> all = even_support;
    all.insert(all.end(), odd_support.begin(), odd_support.end());
    std::sort(all.begin(), all.end());
    if (all.empty()) {
      plan.kind = WitnessKind::SinglePoint;
      plan.description = "zero kernel: any single point annihilates the quadratic form";
    } else {
      plan.kind = WitnessKind::ParityKill;
      plan.extend = false;
      plan.kill_degrees = all;
      plan.description = "finite degree support " + join_ints(all) +
                         ": null vector of the harmonic evaluation system";
    }
  } else if (even_infinite) {
    // kill the infinite even part by antipodal antisymmetrization, the
    // finite odd part by a hemisphere null solve
    if (odd_support.empty()) {
      plan.kind = WitnessKind::AntipodalPair;
      plan.symmetric_extension = false;
      plan.description = "even-degree-only kernel: antipodal pair with lambda = (1,-1)";
    } else {
      plan.kind = WitnessKind::ParityKill;
      plan.extend = true;
      plan.symmetric_extension = false;
      plan.kill_degrees = odd_support;
      plan.description = "finitely many odd degrees " + join_ints(odd_support) +
                         ": hemisphere null solve plus antisymmetric antipodal extension";
    }
  } else {
    if (even_support.empty()) {
      plan.kind = WitnessKind::AntipodalPair;
      plan.symmetric_extension = true;
      plan.description = "odd-degree-only kernel: antipodal pair with lambda = (1,1)";
    } else {
      plan.kind = WitnessKind::ParityKill;
      plan.extend = true;
      plan.symmetric_extension = true;
      plan.kill_degrees = even_support;
      plan.description = "finitely many even degrees " + join_ints(even_support) +
                         ": hemisphere null solve plus symmetric antipodal extension";
    }
  }
  return plan;
}

}  // namespace

ConvolutionalResult check_convolutional(const CoefficientScheme& scheme, double tol) {
  if (scheme.dim() == 2)
    throw std::invalid_argument("check_convolutional: use check_circle for d = 2");
  ConvolutionalResult res;
  auto blocks = degree_blocks(scheme, tol);

  res.bad_lambda = std::numeric_limits<double>::infinity();
  for (const auto& [j, info] : blocks) {
    if (info.lambda_min < res.bad_lambda) {
      res.bad_lambda = info.lambda_min;
      res.bad_degree = j;
    }
    if (info.lambda_min < -info.tol_eff) res.pd_pass = false;
    if (info.nonzero) {
      if (j % 2 == 0)
        res.even_support.push_back(j);
      else
        res.odd_support.push_back(j);
    }
  }
  if (blocks.empty()) res.bad_lambda = 0.0;

  const auto& tail = scheme.tail();
  const bool tail_nonempty = tail.present && (tail.all_l1 || !tail.l1_support.empty());
  res.even_infinite = tail_nonempty && tail.parity != ParityMask::Odd;
  res.odd_infinite = tail_nonempty && tail.parity != ParityMask::Even;

  if (!res.pd_pass) {
    res.verdict = Verdict::NotSpd;
    res.plan.kind = WitnessKind::None;
    res.plan.description = "block at degree " + std::to_string(res.bad_degree) +
                           " has negative eigenvalue " + fmt(res.bad_lambda) +
                           " (violates the nonnegativity criterion for positive "
                           "definiteness)";
    return res;
  }
  if (res.even_infinite && res.odd_infinite) {
    res.verdict = tail_strict(tail) ? Verdict::SpdCertified : Verdict::PdCertified;
    return res;
  }
  res.verdict = Verdict::NotSpd;
  res.plan = parity_witness_plan(res.even_support, res.odd_support, res.even_infinite,
                                 res.odd_infinite);
  return res;
}

namespace {

// 2x2 (or 1x1 for j=0) circle blocks in the basis order (-j, +j).
std::map<int, Eigen::MatrixXcd> circle_blocks(const CoefficientScheme& scheme) {
  std::map<int, Eigen::MatrixXcd> out;
  auto ensure = [&](int j) -> Eigen::MatrixXcd& {
    auto it = out.find(j);
    if (it == out.end()) {
      int n = j == 0 ? 1 : 2;
      it = out.emplace(j, Eigen::MatrixXcd::Zero(n, n)).first;
    }
    return it->second;
  };
  switch (scheme.type()) {
    case SchemeType::Isotropic:
      for (const auto& [j, c] : scheme.iso_coeffs())
        ensure(j) = c * Eigen::MatrixXcd::Identity(j == 0 ? 1 : 2, j == 0 ? 1 : 2);
      break;
    case SchemeType::ConvolutionalDiagonal:
      for (const auto& [jk, v] : scheme.diag_entries())
        ensure(jk.first)(jk.second - 1, jk.second - 1) = v;
      break;
    case SchemeType::Convolutional:
      for (const auto& [j, D] : scheme.conv_blocks()) ensure(j) = D;
      break;
    case SchemeType::Axial:
      for (const auto& [l1, block] : scheme.axial_blocks()) {
        auto it = block.find({{}, {}});
        if (it == block.end()) continue;
        int j = std::abs(l1);
        int pos = l1 < 0 ? 0 : (j == 0 ? 0 : 1);
        ensure(j)(pos, pos) = it->second;
      }
      break;
    case SchemeType::General:
      for (const auto& [key, a] : scheme.general_entries()) {
        if (key.j != key.jp)
          throw std::invalid_argument(
              "check_circle: general scheme with cross-degree entries");
        ensure(key.j)(key.k - 1, key.kp - 1) = a;
      }
      break;
  }
  return out;
}

}  // namespace

CircleResult check_circle(const CoefficientScheme& scheme, double tol, int progression_cap) {
  if (scheme.dim() != 2)
    throw std::invalid_argument("check_circle: scheme must live on the circle (d = 2)");
  CircleResult res;
  auto blocks = circle_blocks(scheme);

  std::set<int> f_set;         // strictly PD degrees
  std::set<int> l1_support;    // longitude modes with nonzero coefficients
  std::vector<int> even_nz, odd_nz;
  res.bad_lambda = std::numeric_limits<double>::infinity();
  for (const auto& [j, D] : blocks) {
    if ((D - D.adjoint()).cwiseAbs().maxCoeff() != 0.0)
      throw std::invalid_argument("check_circle: non-Hermitian block at degree " +
                                  std::to_string(j));
    double lm = lambda_min_of(D);
    if (lm < res.bad_lambda) {
      res.bad_lambda = lm;
      res.bad_degree = j;
    }
    double eff = tol * std::max(1.0, one_norm(D));
    if (lm < -eff) res.pd_pass = false;
    if (lm > eff) f_set.insert(j);
    bool nonzero = D.cwiseAbs().maxCoeff() > 0.0;
    if (nonzero) {
      (j % 2 == 0 ? even_nz : odd_nz).push_back(j);
      for (Eigen::Index r = 0; r < D.rows(); ++r)
        for (Eigen::Index c = 0; c < D.cols(); ++c)
          if (D(r, c) != Complex(0.0, 0.0)) {
            l1_support.insert(r == 0 && j > 0 ? -j : j);
            l1_support.insert(c == 0 && j > 0 ? -j : j);
          }
    }
  }
  if (blocks.empty()) res.bad_lambda = 0.0;

  const auto& tail = scheme.tail();
  const bool tail_nonempty = tail.present && (tail.all_l1 || !tail.l1_support.empty());
  const bool even_inf = tail_nonempty && tail.all_l1 && tail.parity != ParityMask::Odd;
  const bool odd_inf = tail_nonempty && tail.all_l1 && tail.parity != ParityMask::Even;
  if (tail.present && !tail.all_l1)
    for (int v : tail.l1_support) l1_support.insert(v);

  // progression scan over the strictly PD set within the truncation
  for (int b = 1; b <= progression_cap; ++b) {
    for (int a = 0; a < b; ++a) {
      bool hit = false;
      for (int j = a; j <= scheme.truncation(); j += b)
        if (f_set.count(j)) { hit = true; break; }
      if (!hit)
        res.progression_report.push_back("progression a=" + std::to_string(a) +
                                         ", b=" + std::to_string(b) +
                                         " not met within truncation");
    }
  }

  if (!res.pd_pass) {
    res.verdict = Verdict::NotSpd;
    res.plan.kind = WitnessKind::None;
    res.plan.description = "block at degree " + std::to_string(res.bad_degree) +
                           " has negative eigenvalue " + fmt(res.bad_lambda);
    return res;
  }
  if (tail_strict(tail)) {
    // strictly positive diagonal blocks at every degree beyond the
    // truncation: the strict set is cofinite and meets every progression
    res.verdict = Verdict::SpdCertified;
    return res;
  }
  if (even_inf || odd_inf) {
    res.verdict = Verdict::NotSpd;
    res.plan = parity_witness_plan(even_nz, odd_nz, even_inf, odd_inf);
    return res;
  }
  // finite longitude support: misses the progression with common
  // difference max degree + 1 entirely
  res.verdict = Verdict::NotSpd;
  std::vector<int> support(l1_support.begin(), l1_support.end());
  if (support.empty()) {
    res.plan.kind = WitnessKind::SinglePoint;
    res.plan.description = "zero kernel: any single point annihilates the quadratic form";
  } else {
    int maxdeg = 0;
    for (int v : support) maxdeg = std::max(maxdeg, std::abs(v));
    res.plan.kind = WitnessKind::LongitudeMoments;
    res.plan.l1_values = support;
    res.plan.description =
        "finite mode support " + join_ints(support) + ": misses the progression b=" +
        std::to_string(maxdeg + 1) + "; equispaced-longitude moment witness";
  }
  return res;
}

namespace {

CoefficientScheme general_to_convolutional(const CoefficientScheme& scheme) {
  const int d = scheme.dim();
  std::map<int, Eigen::MatrixXcd> blocks;
  for (const auto& [key, a] : scheme.general_entries()) {
    if (a == Complex(0.0, 0.0)) continue;
    auto it = blocks.find(key.j);
    if (it == blocks.end()) {
      auto n = dim_harmonic_space(key.j, d);
      it = blocks.emplace(key.j, Eigen::MatrixXcd::Zero(n, n)).first;
    }
    it->second(key.k - 1, key.kp - 1) = a;
  }
  return CoefficientScheme::convolutional(d, scheme.truncation(), std::move(blocks),
                                          scheme.tail());
}

CoefficientScheme general_to_axial(const CoefficientScheme& scheme) {
  const int d = scheme.dim();
  std::map<int, AxialBlock> blocks;
  for (const auto& [key, a] : scheme.general_entries()) {
    if (a == Complex(0.0, 0.0)) continue;
    const auto row = degree_basis(d, key.j)[static_cast<size_t>(key.k) - 1];
    const auto col = degree_basis(d, key.jp)[static_cast<size_t>(key.kp) - 1];
    blocks[row.l1][{row.tail, col.tail}] = a;
  }
  return CoefficientScheme::axial(d, scheme.truncation(), std::move(blocks), scheme.tail());
}

void push_structure_conditions(Certificate& cert, const StructureReport& s) {
  auto push = [&](const char* name, const PropertyCheck& c) {
    cert.conditions.push_back(
        {name, c.holds ? CheckStatus::Pass : CheckStatus::Fail, c.witness});
  };
  push("hermitian", s.hermitian);
  push("parity_invariant", s.parity_invariant);
  push("convolutional", s.convolutional);
  push("axially_symmetric", s.axially_symmetric);
  push("longitudinal_reversible", s.longitudinal_reversible);
  push("longitudinal_independent", s.longitudinal_independent);
  push("real_valued", s.real_valued);
}

void apply_convolutional_path(Certificate& cert, const CoefficientScheme& scheme,
                              const CertifyOptions& opt) {
  ConvolutionalResult conv = check_convolutional(scheme, opt.tol);
  cert.conditions.push_back(
      {"blocks_psd", conv.pd_pass ? CheckStatus::Pass : CheckStatus::Fail,
       conv.bad_degree >= 0 ? "min eigenvalue " + fmt(conv.bad_lambda) + " at degree " +
                                  std::to_string(conv.bad_degree)
                            : "no stored blocks"});
  cert.conditions.push_back(
      {"even_odd_support",
       conv.even_infinite && conv.odd_infinite ? CheckStatus::Pass : CheckStatus::Fail,
       "even stored " + join_ints(conv.even_support) + (conv.even_infinite ? " +tail" : "") +
           ", odd stored " + join_ints(conv.odd_support) +
           (conv.odd_infinite ? " +tail" : "")});
  cert.conditions.push_back(
      {"tail_strictness",
       tail_strict(scheme.tail()) ? CheckStatus::Pass : CheckStatus::Fail,
       tail_strict(scheme.tail())
           ? "all-parity full-support positive diagonal tail"
           : "no tail covering both parity classes on all indices"});
  cert.verdict = conv.verdict;
  cert.witness_plan = conv.plan;
}

void apply_axial_path(Certificate& cert, const CoefficientScheme& scheme,
                      const CertifyOptions& opt) {
  NecessityResult necess = check_axial_necessary(scheme);
  cert.conditions.push_back({"c0_nonzero",
                             necess.status == NecessityStatus::C0Zero ? CheckStatus::Fail
                                                                      : CheckStatus::Pass,
                             necess.status == NecessityStatus::C0Zero
                                 ? "c_0 identically zero (stored and tail)"
                                 : ""});
  cert.conditions.push_back(
      {"infinitely_many_l1",
       necess.status == NecessityStatus::FiniteSupport ? CheckStatus::Fail
                                                       : CheckStatus::Pass,
       necess.status == NecessityStatus::FiniteSupport
           ? "nonzero modes limited to " + join_ints(necess.support)
           : ""});

  AxialPdResult pd = check_axial_pd(scheme, opt.tol);
  cert.conditions.push_back(
      {"axial_blocks_psd", pd.pass ? CheckStatus::Pass : CheckStatus::Fail,
       pd.lambda_min.empty() ? "no stored blocks"
                             : "min eigenvalue " + fmt(pd.worst_lambda) + " at l1=" +
                                   std::to_string(pd.worst_l1)});

  DominanceResult dom = check_diag_dominance_spd(scheme, opt.sigma);
  {
    double worst = 0.0;
    for (const auto& [l1, r] : dom.worst_ratio) worst = std::max(worst, r);
    cert.conditions.push_back(
        {"uniform_dominance", dom.pass ? CheckStatus::Pass : CheckStatus::Fail,
         dom.pass ? "worst row ratio " + fmt(worst) + " < sigma " + fmt(opt.sigma)
                  : "row " + std::to_string(dom.worst_row) + " of l1=" +
                        std::to_string(dom.worst_l1) + " has ratio " +
                        fmt(dom.worst_ratio.at(dom.worst_l1))});
  }

  ScaledEigenOptions seopt;
  seopt.eps = opt.scaled_eps;
  ScaledEigenResult se = check_scaled_eigen_spd(scheme, seopt);
  {
    double worst = std::numeric_limits<double>::infinity();
    int wl1 = 0;
    for (const auto& [l1, r] : se.per_l1)
      if (r.min_lambda < worst) { worst = r.min_lambda; wl1 = l1; }
    cert.conditions.push_back(
        {"scaled_eigenvalue", se.pass ? CheckStatus::Pass : CheckStatus::Fail,
         se.per_l1.empty() ? "no stored blocks"
                           : "min scaled eigenvalue " + fmt(worst) + " at l1=" +
                                 std::to_string(wl1) + " vs eps " + fmt(seopt.eps)});
  }

  bool strict_tail = tail_strict(scheme.tail());
  cert.conditions.push_back(
      {"tail_strictness", strict_tail ? CheckStatus::Pass : CheckStatus::Fail,
       strict_tail ? "all-parity full-support positive diagonal tail"
                   : "no tail covering all indices beyond the truncation"});

  if (necess.status == NecessityStatus::C0Zero) {
    cert.verdict = Verdict::NotSpd;
    cert.witness_plan.kind = WitnessKind::PolePoint;
    cert.witness_plan.description =
        "c_0 identically zero: the theta2 = 0 point has K(p,p) = 0";
    return;
  }
  if (necess.status == NecessityStatus::FiniteSupport) {
    cert.verdict = Verdict::NotSpd;
    if (necess.support.empty()) {
      cert.witness_plan.kind = WitnessKind::SinglePoint;
      cert.witness_plan.description =
          "zero kernel: any single point annihilates the quadratic form";
    } else {
      cert.witness_plan.kind = WitnessKind::LongitudeMoments;
      cert.witness_plan.l1_values = necess.support;
      cert.witness_plan.description = "finite longitude support " +
                                      join_ints(necess.support) +
                                      ": equispaced-longitude moment witness";
    }
    return;
  }
  if (!pd.pass) {
    // the block-PSD test is sufficient for positive definiteness, not
    // necessary, so a failure proves nothing either way
    cert.verdict = Verdict::Indeterminate;
    return;
  }
  if (strict_tail && (dom.pass || se.pass))
    cert.verdict = Verdict::SpdCertified;
  else
    cert.verdict = Verdict::PdCertified;
}

}  // namespace

Certificate certify(const CoefficientScheme& scheme, const CertifyOptions& options) {
  Certificate cert;
  cert.params = options;
  StructureReport structure = check_structure(scheme);
  push_structure_conditions(cert, structure);

  if (!structure.hermitian.holds) {
    cert.verdict = Verdict::Indeterminate;
    cert.conditions.push_back({"applicable_criterion", CheckStatus::NotApplicable,
                               "non-Hermitian scheme: no criterion applies"});
    return cert;
  }

  if (scheme.dim() == 2) {
    if (scheme.type() == SchemeType::General && !structure.convolutional.holds) {
      cert.verdict = Verdict::Indeterminate;
      cert.conditions.push_back({"applicable_criterion", CheckStatus::NotApplicable,
                                 "circle criteria need block-diagonal coefficients"});
      return cert;
    }
    CircleResult circ = check_circle(scheme, options.tol, options.progression_cap);
    cert.conditions.push_back(
        {"circle_blocks_psd", circ.pd_pass ? CheckStatus::Pass : CheckStatus::Fail,
         circ.bad_degree >= 0 ? "min eigenvalue " + fmt(circ.bad_lambda) + " at degree " +
                                    std::to_string(circ.bad_degree)
                              : "no stored blocks"});
    std::string prog;
    for (const auto& line : circ.progression_report) {
      if (!prog.empty()) prog += "; ";
      prog += line;
    }
    cert.conditions.push_back(
        {"progression_coverage",
         circ.verdict == Verdict::SpdCertified ? CheckStatus::Pass : CheckStatus::Fail,
         circ.verdict == Verdict::SpdCertified
             ? "cofinite strictly positive set meets every progression"
             : (prog.empty() ? "all scanned progressions met within truncation" : prog)});
    cert.verdict = circ.verdict;
    cert.witness_plan = circ.plan;
    return cert;
  }

  switch (scheme.type()) {
    case SchemeType::Convolutional:
    case SchemeType::ConvolutionalDiagonal:
    case SchemeType::Isotropic:
      apply_convolutional_path(cert, scheme, options);
      break;
    case SchemeType::Axial:
      apply_axial_path(cert, scheme, options);
      break;
    case SchemeType::General:
      if (structure.convolutional.holds) {
        apply_convolutional_path(cert, general_to_convolutional(scheme), options);
      } else if (structure.axially_symmetric.holds) {
        apply_axial_path(cert, general_to_axial(scheme), options);
      } else {
        cert.verdict = Verdict::Indeterminate;
        cert.conditions.push_back({"applicable_criterion", CheckStatus::NotApplicable,
                                   "general scheme is neither convolutional nor axially "
                                   "symmetric: no criterion applies"});
      }
      break;
  }
  return cert;
}

}  // namespace spherekern
