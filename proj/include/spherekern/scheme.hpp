#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "spherekern/geometry.hpp"
#include "spherekern/harmonics.hpp"
#include "spherekern/quadrature.hpp"

namespace spherekern {

using Complex = std::complex<double>;

enum class SchemeType { General, Convolutional, ConvolutionalDiagonal, Axial, Isotropic };
enum class ParityMask { Even, Odd, All };

/// Analytic continuation of a truncated scheme beyond the truncation
/// degree: diagonal coefficients d_{j,k} = amplitude * (1+j)^{-s(d-1)}
/// on the degrees matching `parity` and the harmonic indices whose l1
/// lies in the declared support.
struct TailDescriptor {
  bool present = false;
  double s = 0.0;          // decay exponent, must satisfy s > 1
  double amplitude = 0.0;  // > 0
  ParityMask parity = ParityMask::All;
  bool all_l1 = true;
  std::vector<int> l1_support;  // used when !all_l1, sorted unique

  static TailDescriptor none() { return {}; }
  static TailDescriptor power(double s, double amplitude,
                              ParityMask parity = ParityMask::All);
  static TailDescriptor power_l1(double s, double amplitude, ParityMask parity,
                                 std::vector<int> l1_support);

  bool matches_parity(int j) const;
  bool supports_l1(int l1) const;
};

/// Key of one GENERAL coefficient a_{j,j',k,k'} in the fixed basis
/// ordering of degree_basis().
struct GeneralKey {
  int j = 0, k = 1, jp = 0, kp = 1;
  friend auto operator<=>(const GeneralKey&, const GeneralKey&) = default;
};

using TailIndex = std::vector<int>;  // l2..l_{d-1}
using AxialBlock = std::map<std::pair<TailIndex, TailIndex>, Complex>;

struct PropertyCheck {
  bool holds = true;
  std::string witness;  // a violating index tuple, when !holds
};

/// Outcome of the structural predicates of the coefficient lemmas.
struct StructureReport {
  PropertyCheck hermitian;
  PropertyCheck parity_invariant;
  PropertyCheck convolutional;
  PropertyCheck axially_symmetric;
  PropertyCheck longitudinal_reversible;
  PropertyCheck longitudinal_independent;
  PropertyCheck real_valued;
};

/// A kernel's expansion coefficients in one of the structured forms,
/// truncated at degree L, plus an optional analytic tail.  Immutable
/// after construction; all stored indices are validated against their
/// admissible ranges.
class CoefficientScheme {
public:
  static CoefficientScheme general(int d, int L, std::map<GeneralKey, Complex> entries,
                                   TailDescriptor tail = {});
  static CoefficientScheme convolutional(int d, int L, std::map<int, Eigen::MatrixXcd> blocks,
                                         TailDescriptor tail = {});
  static CoefficientScheme convolutional_diagonal(int d, int L,
                                                  std::map<std::pair<int, int>, double> diag,
                                                  TailDescriptor tail = {});
  static CoefficientScheme axial(int d, int L, std::map<int, AxialBlock> blocks,
                                 TailDescriptor tail = {});
  static CoefficientScheme isotropic(int d, int L, std::map<int, double> coeffs,
                                     TailDescriptor tail = {});

  SchemeType type() const { return type_; }
  int dim() const { return d_; }
  int truncation() const { return L_; }
  const TailDescriptor& tail() const { return tail_; }

  const std::map<GeneralKey, Complex>& general_entries() const { return general_; }
  const std::map<int, Eigen::MatrixXcd>& conv_blocks() const { return conv_; }
  const std::map<std::pair<int, int>, double>& diag_entries() const { return diag_; }
  const std::map<int, AxialBlock>& axial_blocks() const { return axial_; }
  const std::map<int, double>& iso_coeffs() const { return iso_; }

  /// Stored axial map for one l1 (empty block if not stored).
  const AxialBlock& axial_block(int l1) const;
  /// c_{l1} identically zero on the stored entries?
  bool axial_block_zero(int l1) const;

  bool empty() const;

private:
  CoefficientScheme() = default;

  SchemeType type_ = SchemeType::General;
  int d_ = 2;
  int L_ = 0;
  TailDescriptor tail_;
  std::map<GeneralKey, Complex> general_;
  std::map<int, Eigen::MatrixXcd> conv_;
  std::map<std::pair<int, int>, double> diag_;
  std::map<int, AxialBlock> axial_;
  std::map<int, double> iso_;
};

/// Truncated series value K(xi, zeta), including the declared tail (its
/// remainder is summed until the bound drops below 1e-12).
Complex eval_kernel(const CoefficientScheme& scheme, const SpherePoint& xi,
                    const SpherePoint& zeta);

/// Evaluates the structural predicates exactly on the stored entries.
StructureReport check_structure(const CoefficientScheme& scheme);

/// The absolute-summability sum sum |a| sqrt(N_j N_j')/sigma over stored
/// entries plus a tail bound; an upper bound for |K| everywhere.  Throws
/// if the declared tail diverges.
double summability_bound(const CoefficientScheme& scheme);

using KernelFn = std::function<Complex(const SpherePoint&, const SpherePoint&)>;

/// Coefficient recovery by double quadrature.  Convention: the recovered
/// value is integral of K(xi,zeta) * conj(Y_j^k(xi)) * Y_{j'}^{k'}(zeta),
/// which round-trips the expansion coefficients of eval_kernel exactly
/// (the kernel expands in Y(xi) conj(Y'(zeta))).  Requires quadrature
/// exactness >= j + j' + truncation_degree.
Complex recover_coefficient(const KernelFn& kernel, int d, int j, int k, int jp, int kp,
                            int truncation_degree, const QuadratureRule& quad);

/// Batch recovery of all coefficients with degrees <= max_degree;
/// evaluates the kernel once per node pair.
std::map<GeneralKey, Complex> recover_all(const KernelFn& kernel, int d, int max_degree,
                                          int truncation_degree, const QuadratureRule& quad);

/// Coefficient map of Tf for the convolution operator of a diagonalized
/// convolutional scheme: entrywise d_{j,k} * fhat_{j,k}.  Refuses
/// non-diagonal schemes.
std::map<HarmonicIndex, Complex> apply_convolution_multiplier(
    const CoefficientScheme& scheme, const std::map<HarmonicIndex, Complex>& f_coeffs);

/// Deterministic Hermitian eigendecomposition of each convolutional
/// block: eigenvalues sorted descending, each eigenvector's first
/// nonzero component made positive real.
struct DiagonalizedBlock {
  Eigen::VectorXd eigenvalues;   // descending
  Eigen::MatrixXcd eigenvectors; // columns, matching order
};
std::map<int, DiagonalizedBlock> diagonalize_convolutional(const CoefficientScheme& scheme);

}  // namespace spherekern
