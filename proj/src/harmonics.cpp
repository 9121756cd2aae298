#include "spherekern/harmonics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <shared_mutex>
#include <stdexcept>
#include <tuple>

#include "spherekern/quadrature.hpp"

namespace spherekern {

namespace {

// Exact binomial coefficient with overflow detection.
std::int64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 r = 1;
  for (int i = 1; i <= k; ++i) {
    r = r * static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i);
    if (r > static_cast<unsigned __int128>(INT64_MAX))
      throw std::overflow_error("dim_harmonic_space: integer overflow");
  }
  return static_cast<std::int64_t>(r);
}

}  // namespace

std::int64_t dim_harmonic_space(int j, int d) {
  if (d < 2) throw std::domain_error("dim_harmonic_space: d must be >= 2");
  if (j < 0) throw std::domain_error("dim_harmonic_space: degree must be >= 0");
  if (j == 0) return 1;
  if (d == 2) return 2;
  // N_{j,d} = C(j+d-1, j) - C(j+d-3, j-2), the standard harmonic-space
  // dimension; equals (2j+d-2)(j+d-3)!/(j!(d-2)!).
  return binomial(j + d - 1, j) - binomial(j + d - 3, j - 2);
}

double surface_area(int d) {
  if (d < 2) throw std::domain_error("surface_area: d must be >= 2");
  return 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);
}

double gegenbauer(int n, double lambda, double x) {
  if (n < 0) throw std::domain_error("gegenbauer: degree must be >= 0");
  if (n == 0) return 1.0;
  double cm1 = 1.0;
  double c = 2.0 * lambda * x;
  for (int k = 2; k <= n; ++k) {
    double next = (2.0 * x * (k + lambda - 1.0) * c - (k + 2.0 * lambda - 2.0) * cm1) / k;
    cm1 = c;
    c = next;
  }
  return c;
}

double legendre_poly(int j, int d, double t) {
  if (d < 2) throw std::domain_error("legendre_poly: d must be >= 2");
  if (j < 0) throw std::domain_error("legendre_poly: degree must be >= 0");
  if (std::abs(t) > 1.0 + 1e-12) throw std::domain_error("legendre_poly: |t| > 1");
  t = std::clamp(t, -1.0, 1.0);
  if (j == 0) return 1.0;
  // (j+d-2) P_{j+1} = (2j+d-2) t P_j - j P_{j-1}, P_0 = 1, P_1 = t;
  // keeps P_j^d(1) = 1 for every d >= 2.
  double pm1 = 1.0;
  double p = t;
  for (int k = 1; k < j; ++k) {
    double next = ((2.0 * k + d - 2.0) * t * p - k * pm1) / (k + d - 2.0);
    pm1 = p;
    p = next;
  }
  return p;
}

bool HarmonicIndex::valid() const {
  if (tail.empty()) return true;  // d = 2
  int prev = std::abs(l1);
  for (int v : tail) {
    if (v < prev) return false;
    prev = v;
  }
  return true;
}

std::vector<std::vector<int>> enumerate_lambda(int d, int l1, int L) {
  if (d < 2) throw std::domain_error("enumerate_lambda: d must be >= 2");
  std::vector<std::vector<int>> out;
  if (d == 2) {
    out.push_back({});
    return out;
  }
  const int m = std::abs(l1);
  if (L < m) return out;
  // Nondecreasing in the final degree, lexicographic on the inner chain.
  std::vector<int> chain(static_cast<size_t>(d - 2));
  for (int fin = m; fin <= L; ++fin) {
    chain.back() = fin;
    // enumerate inner chains m <= l2 <= ... <= l_{d-2} <= fin
    // lexicographically
    std::vector<int> inner(static_cast<size_t>(d - 3), m);
    while (true) {
      bool ok = true;
      int prev = m;
      for (int v : inner) {
        if (v < prev) { ok = false; break; }
        prev = v;
      }
      if (ok && (inner.empty() || inner.back() <= fin)) {
        std::copy(inner.begin(), inner.end(), chain.begin());
        out.push_back(chain);
      }
      if (inner.empty()) break;
      size_t c = inner.size();
      while (c > 0) {
        --c;
        if (++inner[c] <= fin) {
          for (size_t i = c + 1; i < inner.size(); ++i) inner[i] = m;
          break;
        }
        if (c == 0) { inner.clear(); break; }
      }
      if (inner.empty()) break;
    }
  }
  return out;
}

std::int64_t count_tails(int d, int l1, int j) {
  const int m = std::abs(l1);
  if (d == 2) return j == m ? 1 : 0;
  if (j < m) return 0;
  // nondecreasing chains of length d-3 with values in [m, j]
  return binomial((j - m) + (d - 3), d - 3);
}

AlphaOrdering::AlphaOrdering(int d, int l1, int L) : d_(d), l1_(l1), cap_(L) {
  tails_ = enumerate_lambda(d, l1, L);
}

const std::vector<int>& AlphaOrdering::tail(int alpha) const {
  if (alpha < 1 || alpha > size()) throw std::out_of_range("AlphaOrdering: alpha out of range");
  return tails_[static_cast<size_t>(alpha) - 1];
}

int AlphaOrdering::final_degree(int alpha) const {
  const auto& t = tail(alpha);
  return t.empty() ? std::abs(l1_) : t.back();
}

std::int64_t AlphaOrdering::n_alpha(int alpha) const {
  return dim_harmonic_space(final_degree(alpha), d_);
}

std::vector<HarmonicIndex> degree_basis(int d, int j) {
  if (d < 2) throw std::domain_error("degree_basis: d must be >= 2");
  if (j < 0) throw std::domain_error("degree_basis: degree must be >= 0");
  std::vector<HarmonicIndex> out;
  if (d == 2) {
    if (j == 0) {
      out.push_back({0, {}});
    } else {
      out.push_back({-j, {}});
      out.push_back({j, {}});
    }
    return out;
  }
  for (int l1 = -j; l1 <= j; ++l1) {
    for (const auto& tail : enumerate_lambda(d, l1, j)) {
      if (tail.back() != j) continue;
      out.push_back({l1, tail});
    }
  }
  return out;
}

int basis_index(int d, const HarmonicIndex& idx) {
  if (!idx.valid()) throw std::domain_error("basis_index: invalid harmonic index");
  auto basis = degree_basis(d, idx.degree());
  for (size_t i = 0; i < basis.size(); ++i) {
    if (basis[i] == idx) return static_cast<int>(i) + 1;
  }
  throw std::domain_error("basis_index: index not in basis (dimension mismatch?)");
}

namespace {

// Normalization constants for the colatitude factors, pinned by unit L^2
// norm under the (sin theta_j)^{j-1} measure.  Keyed by (coordinate j,
// order m, degree L); safe for concurrent reads with one-time init.
class FactorNormCache {
public:
  double get(int coord, int m, int L) {
    const auto key = std::make_tuple(coord, m, L);
    {
      std::shared_lock lock(mutex_);
      auto it = cache_.find(key);
      if (it != cache_.end()) return it->second;
    }
    const int n = L - m;
    const double lambda = m + 0.5 * (coord - 1);
    double norm2;
    if (n <= 64) {
      auto rule = gauss_gegenbauer(n + 2, lambda);
      norm2 = 0.0;
      for (size_t i = 0; i < rule.nodes.size(); ++i) {
        double c = gegenbauer(n, lambda, rule.nodes[i]);
        norm2 += rule.weights[i] * c * c;
      }
    } else {
      // closed-form Gegenbauer norm via lgamma for large degrees, where
      // building a Gauss rule of size n would be wasteful:
      // h = pi 2^{1-2l} Gamma(n+2l) / ((n+l) Gamma(l)^2 n!)
      norm2 = std::exp(std::log(std::numbers::pi) + (1.0 - 2.0 * lambda) * std::log(2.0) +
                       std::lgamma(n + 2.0 * lambda) - std::log(n + lambda) -
                       2.0 * std::lgamma(lambda) - std::lgamma(n + 1.0));
    }
    double value = 1.0 / std::sqrt(norm2);
    std::unique_lock lock(mutex_);
    return cache_.emplace(key, value).first->second;
  }

private:
  std::shared_mutex mutex_;
  std::map<std::tuple<int, int, int>, double> cache_;
};

FactorNormCache& factor_norms() {
  static FactorNormCache cache;
  return cache;
}

// Normalized colatitude factor: const * (sin theta)^m * C^{(m+(j-1)/2)}_{L-m}(cos theta).
double colat_factor(int coord, int m, int L, double theta) {
  if (L < m) throw std::domain_error("colat_factor: degree below order");
  const double lambda = m + 0.5 * (coord - 1);
  double s = std::sin(theta);
  double f = gegenbauer(L - m, lambda, std::cos(theta));
  return factor_norms().get(coord, m, L) * std::pow(s, m) * f;
}

constexpr double inv_sqrt_2pi = 0.3989422804014326779;

}  // namespace

double axial_factor(int abs_l1, const std::vector<int>& tail,
                    const std::vector<double>& theta_prime) {
  if (abs_l1 < 0) abs_l1 = -abs_l1;
  if (tail.size() != theta_prime.size())
    throw std::invalid_argument("axial_factor: tail/angle length mismatch");
  double g = inv_sqrt_2pi;
  int prev = abs_l1;
  for (size_t c = 0; c < tail.size(); ++c) {
    const int coord = static_cast<int>(c) + 2;
    if (tail[c] < prev) throw std::domain_error("axial_factor: index chain not nondecreasing");
    g *= colat_factor(coord, prev, tail[c], theta_prime[c]);
    prev = tail[c];
  }
  return g;
}

std::complex<double> sph_harm(const HarmonicIndex& idx, const SpherePoint& p) {
  if (idx.dim() != p.dim()) throw std::invalid_argument("sph_harm: dimension mismatch");
  if (!idx.valid()) throw std::domain_error("sph_harm: invalid harmonic index");
  const double theta1 = p.angle(1);
  const std::complex<double> phase(std::cos(idx.l1 * theta1), std::sin(idx.l1 * theta1));
  if (p.dim() == 2) return phase * inv_sqrt_2pi;

  std::vector<double> theta_prime(p.polar().begin() + 1, p.polar().end());
  double g = axial_factor(std::abs(idx.l1), idx.tail, theta_prime);
  double sign = (idx.l1 < 0 && (idx.l1 & 1)) ? -1.0 : 1.0;
  return sign * phase * g;
}

namespace {

// Associated Legendre P_j^m(x), m >= 0, without the Condon-Shortley
// phase: P_m^m = (2m-1)!! (1-x^2)^{m/2}.
double assoc_legendre(int j, int m, double x) {
  double pmm = 1.0;
  if (m > 0) {
    double somx2 = std::sqrt(std::max(0.0, (1.0 - x) * (1.0 + x)));
    double fact = 1.0;
    for (int i = 1; i <= m; ++i) {
      pmm *= fact * somx2;
      fact += 2.0;
    }
  }
  if (j == m) return pmm;
  double pmmp1 = x * (2.0 * m + 1.0) * pmm;
  if (j == m + 1) return pmmp1;
  double pll = 0.0;
  for (int ll = m + 2; ll <= j; ++ll) {
    pll = (x * (2.0 * ll - 1.0) * pmmp1 - (ll + m - 1.0) * pmm) / (ll - m);
    pmm = pmmp1;
    pmmp1 = pll;
  }
  return pll;
}

}  // namespace

std::complex<double> sph_harm_2sphere(int j, int k, double theta, double phi) {
  if (j < 0) throw std::domain_error("sph_harm_2sphere: degree must be >= 0");
  if (std::abs(k) > j) throw std::domain_error("sph_harm_2sphere: |k| > j");
  const int m = std::abs(k);
  // ratio (j-m)!/(j+m)!
  double ratio = 1.0;
  for (int i = j - m + 1; i <= j + m; ++i) ratio /= i;
  double norm = inv_sqrt_2pi * std::sqrt((2.0 * j + 1.0) / 2.0 * ratio);
  double p = assoc_legendre(j, m, std::cos(theta));
  std::complex<double> phase(std::cos(k * phi), std::sin(k * phi));
  return norm * p * phase;
}

}  // namespace spherekern
