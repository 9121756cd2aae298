#include "spherekern/scheme.hpp"

#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace spherekern {

namespace {

std::string idx_str(const HarmonicIndex& idx) {
  std::ostringstream os;
  os << "(" << idx.l1;
  for (int v : idx.tail) os << "," << v;
  os << ")";
  return os.str();
}

std::string tail_str(const TailIndex& t) {
  std::ostringstream os;
  os << "(";
  for (size_t i = 0; i < t.size(); ++i) os << (i ? "," : "") << t[i];
  os << ")";
  return os.str();
}

// Cached degree bases; concurrent reads after one-time fill.
class BasisCache {
public:
  const std::vector<HarmonicIndex>& get(int d, int j) {
    std::lock_guard lock(mutex_);
    auto key = std::make_pair(d, j);
    auto it = cache_.find(key);
    if (it == cache_.end()) it = cache_.emplace(key, degree_basis(d, j)).first;
    return it->second;
  }

private:
  std::mutex mutex_;
  std::map<std::pair<int, int>, std::vector<HarmonicIndex>> cache_;
};

BasisCache& bases() {
  static BasisCache c;
  return c;
}

Eigen::VectorXcd eval_degree(int d, int j, const SpherePoint& p) {
  const auto& basis = bases().get(d, j);
  Eigen::VectorXcd y(basis.size());
  for (size_t k = 0; k < basis.size(); ++k) y(static_cast<Eigen::Index>(k)) = sph_harm(basis[k], p);
  return y;
}

void validate_tail(const TailDescriptor& t) {
  if (!t.present) return;
  if (t.s <= 1.0) throw std::domain_error("TailDescriptor: decay exponent must satisfy s > 1");
  if (t.amplitude <= 0.0) throw std::domain_error("TailDescriptor: amplitude must be positive");
}

bool valid_chain(int abs_l1, const TailIndex& tail, int d, int L) {
  if (static_cast<int>(tail.size()) != d - 2) return false;
  int prev = abs_l1;
  for (int v : tail) {
    if (v < prev) return false;
    prev = v;
  }
  return tail.empty() ? abs_l1 <= L : tail.back() <= L;
}

}  // namespace

TailDescriptor TailDescriptor::power(double s, double amplitude, ParityMask parity) {
  TailDescriptor t;
  t.present = true;
  t.s = s;
  t.amplitude = amplitude;
  t.parity = parity;
  t.all_l1 = true;
  validate_tail(t);
  return t;
}

TailDescriptor TailDescriptor::power_l1(double s, double amplitude, ParityMask parity,
                                        std::vector<int> l1_support) {
  TailDescriptor t = power(s, amplitude, parity);
  t.all_l1 = false;
  std::sort(l1_support.begin(), l1_support.end());
  l1_support.erase(std::unique(l1_support.begin(), l1_support.end()), l1_support.end());
  t.l1_support = std::move(l1_support);
  return t;
}

bool TailDescriptor::matches_parity(int j) const {
  switch (parity) {
    case ParityMask::Even: return j % 2 == 0;
    case ParityMask::Odd: return j % 2 == 1;
    case ParityMask::All: return true;
  }
  return true;
}

bool TailDescriptor::supports_l1(int l1) const {
  if (all_l1) return true;
  return std::binary_search(l1_support.begin(), l1_support.end(), l1);
}

CoefficientScheme CoefficientScheme::general(int d, int L, std::map<GeneralKey, Complex> entries,
                                             TailDescriptor tail) {
  if (d < 2) throw std::domain_error("CoefficientScheme: d must be >= 2");
  if (L < 0) throw std::domain_error("CoefficientScheme: truncation degree must be >= 0");
  validate_tail(tail);
  for (const auto& [key, v] : entries) {
    if (key.j < 0 || key.j > L || key.jp < 0 || key.jp > L)
      throw std::domain_error("CoefficientScheme: degree outside truncation");
    if (key.k < 1 || key.k > dim_harmonic_space(key.j, d) || key.kp < 1 ||
        key.kp > dim_harmonic_space(key.jp, d))
      throw std::domain_error("CoefficientScheme: basis index k outside 1..N_{j,d}");
  }
  CoefficientScheme s;
  s.type_ = SchemeType::General;
  s.d_ = d;
  s.L_ = L;
  s.tail_ = std::move(tail);
  s.general_ = std::move(entries);
  return s;
}

CoefficientScheme CoefficientScheme::convolutional(int d, int L,
                                                   std::map<int, Eigen::MatrixXcd> blocks,
                                                   TailDescriptor tail) {
  if (d < 2) throw std::domain_error("CoefficientScheme: d must be >= 2");
  if (L < 0) throw std::domain_error("CoefficientScheme: truncation degree must be >= 0");
  validate_tail(tail);
  for (const auto& [j, D] : blocks) {
    if (j < 0 || j > L) throw std::domain_error("CoefficientScheme: block degree outside truncation");
    auto n = dim_harmonic_space(j, d);
    if (D.rows() != n || D.cols() != n)
      throw std::domain_error("CoefficientScheme: block size must be N_{j,d} x N_{j,d}");
  }
  CoefficientScheme s;
  s.type_ = SchemeType::Convolutional;
  s.d_ = d;
  s.L_ = L;
  s.tail_ = std::move(tail);
  s.conv_ = std::move(blocks);
  return s;
}

CoefficientScheme CoefficientScheme::convolutional_diagonal(
    int d, int L, std::map<std::pair<int, int>, double> diag, TailDescriptor tail) {
  if (d < 2) throw std::domain_error("CoefficientScheme: d must be >= 2");
  if (L < 0) throw std::domain_error("CoefficientScheme: truncation degree must be >= 0");
  validate_tail(tail);
  for (const auto& [jk, v] : diag) {
    if (jk.first < 0 || jk.first > L)
      throw std::domain_error("CoefficientScheme: degree outside truncation");
    if (jk.second < 1 || jk.second > dim_harmonic_space(jk.first, d))
      throw std::domain_error("CoefficientScheme: basis index k outside 1..N_{j,d}");
  }
  CoefficientScheme s;
  s.type_ = SchemeType::ConvolutionalDiagonal;
  s.d_ = d;
  s.L_ = L;
  s.tail_ = std::move(tail);
  s.diag_ = std::move(diag);
  return s;
}

CoefficientScheme CoefficientScheme::axial(int d, int L, std::map<int, AxialBlock> blocks,
                                           TailDescriptor tail) {
  if (d < 2) throw std::domain_error("CoefficientScheme: d must be >= 2");
  if (L < 0) throw std::domain_error("CoefficientScheme: truncation degree must be >= 0");
  validate_tail(tail);
  for (const auto& [l1, block] : blocks) {
    if (std::abs(l1) > L)
      throw std::domain_error("CoefficientScheme: |l1| outside truncation");
    for (const auto& [key, v] : block) {
      if (!valid_chain(std::abs(l1), key.first, d, L) || !valid_chain(std::abs(l1), key.second, d, L))
        throw std::domain_error("CoefficientScheme: axial index tail outside Lambda_{|l1|} or truncation");
    }
  }
  CoefficientScheme s;
  s.type_ = SchemeType::Axial;
  s.d_ = d;
  s.L_ = L;
  s.tail_ = std::move(tail);
  s.axial_ = std::move(blocks);
  return s;
}

CoefficientScheme CoefficientScheme::isotropic(int d, int L, std::map<int, double> coeffs,
                                               TailDescriptor tail) {
  if (d < 2) throw std::domain_error("CoefficientScheme: d must be >= 2");
  if (L < 0) throw std::domain_error("CoefficientScheme: truncation degree must be >= 0");
  validate_tail(tail);
  for (const auto& [j, c] : coeffs) {
    if (j < 0 || j > L) throw std::domain_error("CoefficientScheme: degree outside truncation");
  }
  CoefficientScheme s;
  s.type_ = SchemeType::Isotropic;
  s.d_ = d;
  s.L_ = L;
  s.tail_ = std::move(tail);
  s.iso_ = std::move(coeffs);
  return s;
}

const AxialBlock& CoefficientScheme::axial_block(int l1) const {
  static const AxialBlock empty;
  auto it = axial_.find(l1);
  return it == axial_.end() ? empty : it->second;
}

bool CoefficientScheme::axial_block_zero(int l1) const {
  for (const auto& [key, v] : axial_block(l1)) {
    if (v != Complex(0.0, 0.0)) return false;
  }
  return true;
}

bool CoefficientScheme::empty() const {
  if (tail_.present) return false;
  switch (type_) {
    case SchemeType::General: return general_.empty();
    case SchemeType::Convolutional: return conv_.empty();
    case SchemeType::ConvolutionalDiagonal: return diag_.empty();
    case SchemeType::Axial: return axial_.empty();
    case SchemeType::Isotropic: return iso_.empty();
  }
  return true;
}

namespace {

// Tail contribution to K(xi,zeta) beyond the truncation degree, summed
// degree by degree until the integral-comparison remainder bound drops
// below 1e-12.
Complex eval_tail(const CoefficientScheme& scheme, const SpherePoint& xi,
                  const SpherePoint& zeta) {
  const auto& tail = scheme.tail();
  if (!tail.present) return {0.0, 0.0};
  const int d = scheme.dim();
  const double sigma = surface_area(d);
  const double sd1 = tail.s * (d - 1);
  const double t = xi.dot(zeta);

  Complex sum(0.0, 0.0);
  // incremental Legendre recurrence so the whole tail loop stays linear
  double leg_prev = 1.0, leg_curr = t;
  int leg_deg = 1;
  auto legendre_at = [&](int j) {
    if (j == 0) return 1.0;
    while (leg_deg < j) {
      double next = ((2.0 * leg_deg + d - 2.0) * t * leg_curr - leg_deg * leg_prev) /
                    (leg_deg + d - 2.0);
      leg_prev = leg_curr;
      leg_curr = next;
      ++leg_deg;
    }
    return leg_curr;
  };
  const int jmax = scheme.truncation() + 2000000;
  for (int j = scheme.truncation() + 1; j <= jmax; ++j) {
    const double decay = tail.amplitude * std::pow(1.0 + j, -sd1);
    if (tail.matches_parity(j)) {
      if (tail.all_l1) {
        sum += decay * static_cast<double>(dim_harmonic_space(j, d)) / sigma *
               legendre_at(j);
      } else {
        // explicit sum over the supported indices of degree j
        const double dtheta = xi.angle(1) - zeta.angle(1);
        std::vector<double> tp(xi.polar().begin() + 1, xi.polar().end());
        std::vector<double> up(zeta.polar().begin() + 1, zeta.polar().end());
        for (int l1 : tail.l1_support) {
          if (std::abs(l1) > j) continue;
          Complex phase(std::cos(l1 * dtheta), std::sin(l1 * dtheta));
          if (d == 2) {
            if (std::abs(l1) == j) sum += decay * phase / (2.0 * std::numbers::pi);
            continue;
          }
          for (const auto& chain : enumerate_lambda(d, l1, j)) {
            if (chain.back() != j) continue;
            sum += decay * phase * axial_factor(std::abs(l1), chain, tp) *
                   axial_factor(std::abs(l1), chain, up);
          }
        }
      }
    }
    // Remainder bound: N_{j,d} * (#indices factor) <= 2 (1+j)^{q} with
    // q = d-2 (full support) or 2d-5 (finite l1 support; chain count is
    // O(j^{d-3}) per supported l1).
    double q = tail.all_l1 ? static_cast<double>(d - 2)
                           : static_cast<double>(2 * d - 5) *
                                 (tail.l1_support.empty() ? 0.0 : 1.0);
    if (!tail.all_l1 && tail.l1_support.empty()) break;
    double mult = tail.all_l1 ? 2.0 : 2.0 * static_cast<double>(tail.l1_support.size());
    double expnt = q - sd1;
    if (expnt >= -1.0)
      throw std::domain_error("eval_kernel: declared tail does not converge");
    double remainder = mult * tail.amplitude / sigma * std::pow(1.0 + j, expnt + 1.0) /
                       (-expnt - 1.0);
    if (remainder < 1e-12) break;
  }
  return sum;
}

Complex eval_axial_stored(const CoefficientScheme& scheme, const SpherePoint& xi,
                          const SpherePoint& zeta) {
  const double dtheta = xi.angle(1) - zeta.angle(1);
  std::vector<double> tp(xi.polar().begin() + 1, xi.polar().end());
  std::vector<double> up(zeta.polar().begin() + 1, zeta.polar().end());
  Complex sum(0.0, 0.0);
  for (const auto& [l1, block] : scheme.axial_blocks()) {
    Complex phase(std::cos(l1 * dtheta), std::sin(l1 * dtheta));
    Complex inner(0.0, 0.0);
    for (const auto& [key, c] : block) {
      inner += c * axial_factor(std::abs(l1), key.first, tp) *
               axial_factor(std::abs(l1), key.second, up);
    }
    sum += phase * inner;
  }
  return sum;
}

}  // namespace

Complex eval_kernel(const CoefficientScheme& scheme, const SpherePoint& xi,
                    const SpherePoint& zeta) {
  const int d = scheme.dim();
  if (xi.dim() != d || zeta.dim() != d)
    throw std::invalid_argument("eval_kernel: point dimension does not match scheme");

  Complex sum(0.0, 0.0);
  switch (scheme.type()) {
    case SchemeType::General: {
      std::map<int, Eigen::VectorXcd> yx, yz;
      for (const auto& [key, a] : scheme.general_entries()) {
        if (a == Complex(0.0, 0.0)) continue;
        auto ix = yx.find(key.j);
        if (ix == yx.end()) ix = yx.emplace(key.j, eval_degree(d, key.j, xi)).first;
        auto iz = yz.find(key.jp);
        if (iz == yz.end()) iz = yz.emplace(key.jp, eval_degree(d, key.jp, zeta)).first;
        sum += a * ix->second(key.k - 1) * std::conj(iz->second(key.kp - 1));
      }
      break;
    }
    case SchemeType::Convolutional: {
      for (const auto& [j, D] : scheme.conv_blocks()) {
        Eigen::VectorXcd yxj = eval_degree(d, j, xi);
        Eigen::VectorXcd yzj = eval_degree(d, j, zeta);
        sum += (yxj.transpose() * D * yzj.conjugate())(0);
      }
      break;
    }
    case SchemeType::ConvolutionalDiagonal: {
      std::map<int, std::pair<Eigen::VectorXcd, Eigen::VectorXcd>> cache;
      for (const auto& [jk, v] : scheme.diag_entries()) {
        auto it = cache.find(jk.first);
        if (it == cache.end())
          it = cache.emplace(jk.first, std::make_pair(eval_degree(d, jk.first, xi),
                                                      eval_degree(d, jk.first, zeta)))
                   .first;
        sum += v * it->second.first(jk.second - 1) * std::conj(it->second.second(jk.second - 1));
      }
      break;
    }
    case SchemeType::Axial:
      sum = eval_axial_stored(scheme, xi, zeta);
      break;
    case SchemeType::Isotropic: {
      const double sigma = surface_area(d);
      const double t = xi.dot(zeta);
      for (const auto& [j, c] : scheme.iso_coeffs()) {
        sum += c * static_cast<double>(dim_harmonic_space(j, d)) / sigma *
               legendre_poly(j, d, t);
      }
      break;
    }
  }
  return sum + eval_tail(scheme, xi, zeta);
}

namespace {

struct InducedAxial {
  // c_{l1}(l, l') maps reconstructed from any scheme that passed the
  // axial-symmetry predicate.
  std::map<int, AxialBlock> blocks;
};

void check_axial_derived(const std::map<int, AxialBlock>& blocks, StructureReport& report) {
  auto lookup = [&](int l1, const TailIndex& a, const TailIndex& b) -> Complex {
    auto it = blocks.find(l1);
    if (it == blocks.end()) return {0.0, 0.0};
    auto jt = it->second.find({a, b});
    return jt == it->second.end() ? Complex(0.0, 0.0) : jt->second;
  };
  for (const auto& [l1, block] : blocks) {
    for (const auto& [key, c] : block) {
      const Complex mirror = lookup(-l1, key.first, key.second);
      std::string where = "l1=" + std::to_string(l1) + ", l=" + tail_str(key.first) +
                          ", l'=" + tail_str(key.second);
      if (report.longitudinal_reversible.holds && c != mirror)
        report.longitudinal_reversible = {false, where};
      if (report.longitudinal_independent.holds && l1 != 0 && c != Complex(0.0, 0.0))
        report.longitudinal_independent = {false, where};
      if (report.real_valued.holds && c != std::conj(mirror))
        report.real_valued = {false, where};
    }
  }
}

}  // namespace

StructureReport check_structure(const CoefficientScheme& scheme) {
  StructureReport report;
  const int d = scheme.dim();

  switch (scheme.type()) {
    case SchemeType::General: {
      const auto& entries = scheme.general_entries();
      auto lookup = [&](const GeneralKey& key) -> Complex {
        auto it = entries.find(key);
        return it == entries.end() ? Complex(0.0, 0.0) : it->second;
      };
      std::map<int, AxialBlock> induced;
      for (const auto& [key, a] : entries) {
        std::string where = "(j,k,j',k')=(" + std::to_string(key.j) + "," +
                            std::to_string(key.k) + "," + std::to_string(key.jp) + "," +
                            std::to_string(key.kp) + ")";
        if (report.hermitian.holds &&
            a != std::conj(lookup({key.jp, key.kp, key.j, key.k})))
          report.hermitian = {false, where};
        if (a == Complex(0.0, 0.0)) continue;
        if (report.parity_invariant.holds && (key.j + key.jp) % 2 != 0)
          report.parity_invariant = {false, where};
        if (report.convolutional.holds && key.j != key.jp)
          report.convolutional = {false, where};
        const HarmonicIndex row = bases().get(d, key.j)[static_cast<size_t>(key.k) - 1];
        const HarmonicIndex col = bases().get(d, key.jp)[static_cast<size_t>(key.kp) - 1];
        if (row.l1 != col.l1) {
          if (report.axially_symmetric.holds) report.axially_symmetric = {false, where};
        } else {
          TailIndex rt = row.tail, ct = col.tail;
          if (d == 2) { rt = {std::abs(row.l1)}; ct = {std::abs(col.l1)}; }
          induced[row.l1][{rt, ct}] = a;
        }
        // general real-valuedness: a_{m(idx),m(idx')} = conj(a) * sign
        if (report.real_valued.holds) {
          HarmonicIndex mrow = row, mcol = col;
          mrow.l1 = -mrow.l1;
          mcol.l1 = -mcol.l1;
          double sign = ((std::abs(row.l1) + std::abs(col.l1)) % 2 == 0) ? 1.0 : -1.0;
          if (d == 2) sign = 1.0;
          Complex mirrored = lookup({key.j, basis_index(d, mrow), key.jp, basis_index(d, mcol)});
          if (mirrored != sign * std::conj(a)) report.real_valued = {false, where};
        }
      }
      if (report.axially_symmetric.holds) {
        StructureReport axial_part;
        check_axial_derived(induced, axial_part);
        report.longitudinal_reversible = axial_part.longitudinal_reversible;
        report.longitudinal_independent = axial_part.longitudinal_independent;
      } else {
        report.longitudinal_reversible = {false, "kernel is not axially symmetric"};
        report.longitudinal_independent = {false, "kernel is not axially symmetric"};
      }
      break;
    }
    case SchemeType::Convolutional: {
      std::map<int, AxialBlock> induced;
      for (const auto& [j, D] : scheme.conv_blocks()) {
        const auto& basis = bases().get(d, j);
        for (Eigen::Index k = 0; k < D.rows(); ++k) {
          for (Eigen::Index kp = 0; kp < D.cols(); ++kp) {
            std::string where = "(j,k,k')=(" + std::to_string(j) + "," +
                                std::to_string(k + 1) + "," + std::to_string(kp + 1) + ")";
            if (report.hermitian.holds && D(k, kp) != std::conj(D(kp, k)))
              report.hermitian = {false, where};
            if (D(k, kp) == Complex(0.0, 0.0)) continue;
            const auto& row = basis[static_cast<size_t>(k)];
            const auto& col = basis[static_cast<size_t>(kp)];
            if (row.l1 != col.l1) {
              if (report.axially_symmetric.holds) report.axially_symmetric = {false, where};
            } else {
              TailIndex rt = row.tail, ct = col.tail;
              if (d == 2) { rt = {std::abs(row.l1)}; ct = {std::abs(col.l1)}; }
              induced[row.l1][{rt, ct}] = D(k, kp);
            }
          }
        }
      }
      if (report.axially_symmetric.holds) {
        check_axial_derived(induced, report);
      } else {
        report.longitudinal_reversible = {false, "kernel is not axially symmetric"};
        report.longitudinal_independent = {false, "kernel is not axially symmetric"};
        report.real_valued = {false, "real-valuedness evaluated only via the axial criterion"};
      }
      break;
    }
    case SchemeType::ConvolutionalDiagonal: {
      std::map<int, AxialBlock> induced;
      for (const auto& [jk, v] : scheme.diag_entries()) {
        if (v == 0.0) continue;
        const auto& idx = bases().get(d, jk.first)[static_cast<size_t>(jk.second) - 1];
        TailIndex t = idx.tail;
        if (d == 2) t = {std::abs(idx.l1)};
        induced[idx.l1][{t, t}] = v;
      }
      check_axial_derived(induced, report);
      break;
    }
    case SchemeType::Axial: {
      std::map<int, AxialBlock> nonzero;
      for (const auto& [l1, block] : scheme.axial_blocks()) {
        for (const auto& [key, c] : block) {
          std::string where = "l1=" + std::to_string(l1) + ", l=" + tail_str(key.first) +
                              ", l'=" + tail_str(key.second);
          auto mirror = block.find({key.second, key.first});
          Complex mc = mirror == block.end() ? Complex(0.0, 0.0) : mirror->second;
          if (report.hermitian.holds && c != std::conj(mc)) report.hermitian = {false, where};
          if (c == Complex(0.0, 0.0)) continue;
          nonzero[l1][key] = c;
          int fin = key.first.empty() ? std::abs(l1) : key.first.back();
          int finp = key.second.empty() ? std::abs(l1) : key.second.back();
          if (report.parity_invariant.holds && (fin + finp) % 2 != 0)
            report.parity_invariant = {false, where};
          if (report.convolutional.holds && d > 2 && fin != finp)
            report.convolutional = {false, where};
        }
      }
      check_axial_derived(nonzero, report);
      break;
    }
    case SchemeType::Isotropic:
      break;  // all predicates hold structurally
  }
  return report;
}

double summability_bound(const CoefficientScheme& scheme) {
  const int d = scheme.dim();
  const double sigma = surface_area(d);
  double sum = 0.0;

  switch (scheme.type()) {
    case SchemeType::General:
      for (const auto& [key, a] : scheme.general_entries())
        sum += std::abs(a) *
               std::sqrt(static_cast<double>(dim_harmonic_space(key.j, d)) *
                         static_cast<double>(dim_harmonic_space(key.jp, d))) /
               sigma;
      break;
    case SchemeType::Convolutional:
      for (const auto& [j, D] : scheme.conv_blocks())
        sum += D.cwiseAbs().sum() * static_cast<double>(dim_harmonic_space(j, d)) / sigma;
      break;
    case SchemeType::ConvolutionalDiagonal:
      for (const auto& [jk, v] : scheme.diag_entries())
        sum += std::abs(v) * static_cast<double>(dim_harmonic_space(jk.first, d)) / sigma;
      break;
    case SchemeType::Axial:
      for (const auto& [l1, block] : scheme.axial_blocks()) {
        for (const auto& [key, c] : block) {
          int fin = key.first.empty() ? std::abs(l1) : key.first.back();
          int finp = key.second.empty() ? std::abs(l1) : key.second.back();
          sum += std::abs(c) *
                 std::sqrt(static_cast<double>(dim_harmonic_space(fin, d)) *
                           static_cast<double>(dim_harmonic_space(finp, d))) /
                 sigma;
        }
      }
      break;
    case SchemeType::Isotropic:
      for (const auto& [j, c] : scheme.iso_coeffs()) {
        double n = static_cast<double>(dim_harmonic_space(j, d));
        sum += std::abs(c) * n * n / sigma;
      }
      break;
  }

  const auto& tail = scheme.tail();
  if (tail.present) {
    const double sd1 = tail.s * (d - 1);
    const double q = tail.all_l1 ? static_cast<double>(d - 2)
                                 : static_cast<double>(2 * d - 5);
    if (q - sd1 >= -1.0)
      throw std::domain_error("summability_bound: declared tail diverges");
    for (int j = scheme.truncation() + 1;; ++j) {
      if (tail.matches_parity(j)) {
        double count;
        if (tail.all_l1) {
          count = static_cast<double>(dim_harmonic_space(j, d));
        } else {
          std::int64_t cnt = 0;
          for (int l1 : tail.l1_support) cnt += count_tails(d, l1, j);
          count = static_cast<double>(cnt) * static_cast<double>(dim_harmonic_space(j, d));
          if (cnt == 0) count = 0.0;
        }
        sum += tail.amplitude * std::pow(1.0 + j, -sd1) * count / sigma;
      }
      double mult = tail.all_l1 ? 2.0
                                : 2.0 * std::max<double>(1.0, static_cast<double>(tail.l1_support.size()));
      double remainder =
          mult * tail.amplitude / sigma * std::pow(1.0 + j, q - sd1 + 1.0) / (sd1 - q - 1.0);
      if (remainder < 1e-14 * std::max(sum, 1.0) || j > scheme.truncation() + 500000) break;
    }
  }
  return sum;
}

Complex recover_coefficient(const KernelFn& kernel, int d, int j, int k, int jp, int kp,
                            int truncation_degree, const QuadratureRule& quad) {
  if (quad.exactness < j + jp + truncation_degree)
    throw std::invalid_argument(
        "recover_coefficient: quadrature exactness below j + j' + truncation degree");
  const HarmonicIndex row = bases().get(d, j)[static_cast<size_t>(k) - 1];
  const HarmonicIndex col = bases().get(d, jp)[static_cast<size_t>(kp) - 1];
  Complex sum(0.0, 0.0);
  for (size_t a = 0; a < quad.nodes.size(); ++a) {
    Complex ya = std::conj(sph_harm(row, quad.nodes[a]));
    Complex partial(0.0, 0.0);
    for (size_t b = 0; b < quad.nodes.size(); ++b) {
      partial += quad.weights[b] * kernel(quad.nodes[a], quad.nodes[b]) *
                 sph_harm(col, quad.nodes[b]);
    }
    sum += quad.weights[a] * ya * partial;
  }
  return sum;
}

std::map<GeneralKey, Complex> recover_all(const KernelFn& kernel, int d, int max_degree,
                                          int truncation_degree, const QuadratureRule& quad) {
  if (quad.exactness < 2 * max_degree + truncation_degree)
    throw std::invalid_argument(
        "recover_all: quadrature exactness below 2*max_degree + truncation degree");
  const auto n = static_cast<Eigen::Index>(quad.nodes.size());
  Eigen::MatrixXcd kgrid(n, n);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b)
      kgrid(a, b) = kernel(quad.nodes[static_cast<size_t>(a)], quad.nodes[static_cast<size_t>(b)]);

  // Y: nodes x (all indices of degree <= max_degree), weighted columns
  std::vector<std::pair<int, int>> labels;
  std::vector<HarmonicIndex> indices;
  for (int j = 0; j <= max_degree; ++j) {
    const auto& basis = bases().get(d, j);
    for (size_t k = 0; k < basis.size(); ++k) {
      labels.emplace_back(j, static_cast<int>(k) + 1);
      indices.push_back(basis[k]);
    }
  }
  Eigen::MatrixXcd yw(n, static_cast<Eigen::Index>(indices.size()));
  for (Eigen::Index a = 0; a < n; ++a)
    for (size_t c = 0; c < indices.size(); ++c)
      yw(a, static_cast<Eigen::Index>(c)) =
          quad.weights[static_cast<size_t>(a)] * sph_harm(indices[c], quad.nodes[static_cast<size_t>(a)]);

  Eigen::MatrixXcd coeffs = yw.adjoint() * kgrid * yw;
  std::map<GeneralKey, Complex> out;
  for (size_t r = 0; r < labels.size(); ++r)
    for (size_t c = 0; c < labels.size(); ++c)
      out[{labels[r].first, labels[r].second, labels[c].first, labels[c].second}] =
          coeffs(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  return out;
}

std::map<HarmonicIndex, Complex> apply_convolution_multiplier(
    const CoefficientScheme& scheme, const std::map<HarmonicIndex, Complex>& f_coeffs) {
  if (scheme.type() != SchemeType::ConvolutionalDiagonal &&
      scheme.type() != SchemeType::Isotropic)
    throw std::invalid_argument(
        "apply_convolution_multiplier: scheme must be in diagonalized convolutional form");
  std::map<HarmonicIndex, Complex> out;
  for (const auto& [idx, f] : f_coeffs) {
    if (!idx.valid() || idx.dim() != scheme.dim())
      throw std::domain_error("apply_convolution_multiplier: invalid coefficient index");
    const int j = idx.degree();
    double mult = 0.0;
    if (j <= scheme.truncation()) {
      if (scheme.type() == SchemeType::Isotropic) {
        auto it = scheme.iso_coeffs().find(j);
        mult = it == scheme.iso_coeffs().end() ? 0.0 : it->second;
      } else {
        auto it = scheme.diag_entries().find({j, basis_index(scheme.dim(), idx)});
        mult = it == scheme.diag_entries().end() ? 0.0 : it->second;
      }
    } else if (scheme.tail().present && scheme.tail().matches_parity(j) &&
               scheme.tail().supports_l1(idx.l1)) {
      mult = scheme.tail().amplitude * std::pow(1.0 + j, -scheme.tail().s * (scheme.dim() - 1));
    }
    out[idx] = mult * f;
  }
  return out;
}

std::map<int, DiagonalizedBlock> diagonalize_convolutional(const CoefficientScheme& scheme) {
  if (scheme.type() != SchemeType::Convolutional)
    throw std::invalid_argument("diagonalize_convolutional: scheme must have block form");
  std::map<int, DiagonalizedBlock> out;
  for (const auto& [j, D] : scheme.conv_blocks()) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(D);
    const auto n = D.rows();
    DiagonalizedBlock blk;
    blk.eigenvalues.resize(n);
    blk.eigenvectors.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      // descending eigenvalues
      blk.eigenvalues(i) = es.eigenvalues()(n - 1 - i);
      Eigen::VectorXcd v = es.eigenvectors().col(n - 1 - i);
      for (Eigen::Index r = 0; r < n; ++r) {
        if (std::abs(v(r)) > 1e-14) {
          v *= std::conj(v(r)) / std::abs(v(r));
          break;
        }
      }
      blk.eigenvectors.col(i) = v;
    }
    out[j] = std::move(blk);
  }
  return out;
}

}  // namespace spherekern
