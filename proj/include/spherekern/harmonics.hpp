#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "spherekern/geometry.hpp"

namespace spherekern {

/// Dimension N_{j,d} of the space of spherical harmonics of degree j on
/// S^{d-1}, computed in exact integer arithmetic.
std::int64_t dim_harmonic_space(int j, int d);

/// Surface area sigma_{d-1} of S^{d-1}: 2 pi^{d/2} / Gamma(d/2).
double surface_area(int d);

/// Gegenbauer (ultraspherical) polynomial C_n^{(lambda)}(x), lambda > 0,
/// by the three-term recurrence.
double gegenbauer(int n, double lambda, double x);

/// d-dimensional Legendre polynomial of degree j, normalized so that
/// P_j^d(1) = 1.  For d = 2 this is the Chebyshev polynomial T_j, for
/// d = 3 the classical Legendre polynomial.
double legendre_poly(int j, int d, double t);

/// Multi-index (l1, l2, ..., l_{d-1}) labeling one hyperspherical
/// harmonic in the fixed product basis.  l1 may be negative; the tail
/// l2..l_{d-1} must satisfy |l1| <= l2 <= ... <= l_{d-1}.
struct HarmonicIndex {
  int l1 = 0;
  std::vector<int> tail;  // l2..l_{d-1}; empty for d = 2

  int dim() const { return static_cast<int>(tail.size()) + 2; }
  int degree() const { return tail.empty() ? std::abs(l1) : tail.back(); }
  bool valid() const;

  friend bool operator==(const HarmonicIndex&, const HarmonicIndex&) = default;
  friend auto operator<=>(const HarmonicIndex&, const HarmonicIndex&) = default;
};

/// All tails (l2..l_{d-1}) with |l1| <= l2 <= ... <= l_{d-1} <= L, ordered
/// nondecreasingly in the final degree, ties broken lexicographically on
/// the inner entries.  Empty when L < |l1| (d >= 3) resp. a single empty
/// tail for d = 2.
std::vector<std::vector<int>> enumerate_lambda(int d, int l1, int L);

/// Number of tails in Lambda_{|l1|} with final degree exactly j.
std::int64_t count_tails(int d, int l1, int j);

/// Linearization alpha = 1..k of the truncated index set Lambda_{|l1|}
/// with final degree <= L, nondecreasing in the final degree.
class AlphaOrdering {
public:
  AlphaOrdering(int d, int l1, int L);

  int dim() const { return d_; }
  int l1() const { return l1_; }
  int degree_cap() const { return cap_; }
  int size() const { return static_cast<int>(tails_.size()); }

  /// Tail for 1-based alpha.
  const std::vector<int>& tail(int alpha) const;
  /// Final degree l_{d-1,alpha} for 1-based alpha.
  int final_degree(int alpha) const;
  /// N_alpha = N_{l_{d-1,alpha}, d}.
  std::int64_t n_alpha(int alpha) const;

private:
  int d_, l1_, cap_;
  std::vector<std::vector<int>> tails_;
};

/// The fixed basis of degree j: all harmonic indices with final degree j,
/// ordered lexicographically on (l1, l2, ..., l_{d-2}) with l1 running
/// from -j to j.  Size is N_{j,d}.  The 1-based position in this list is
/// the index k used by the (j,k) coefficient labels.
std::vector<HarmonicIndex> degree_basis(int d, int j);

/// 1-based k of `idx` inside degree_basis(d, idx.degree()).
int basis_index(int d, const HarmonicIndex& idx);

/// Real colatitude product g_l(theta'), including the 1/sqrt(2 pi)
/// longitude normalization; depends on l1 only through |l1|.
/// theta_prime holds theta2..theta_{d-1}.
double axial_factor(int abs_l1, const std::vector<int>& tail,
                    const std::vector<double>& theta_prime);

/// Spherical harmonic of the fixed product basis at p.  For l1 < 0 the
/// sign convention Y = (-1)^{l1} e^{i l1 theta1} g_l(theta') is applied;
/// for d = 2 the basis is e^{i l1 theta1} / sqrt(2 pi).
std::complex<double> sph_harm(const HarmonicIndex& idx, const SpherePoint& p);

/// Classical 2-sphere harmonic from the explicit associated-Legendre
/// formula, |k| <= j.  Agrees with sph_harm for d = 3 up to a per-index
/// unimodular constant (the associated-Legendre functions here carry no
/// Condon-Shortley phase).
std::complex<double> sph_harm_2sphere(int j, int k, double theta, double phi);

}  // namespace spherekern
