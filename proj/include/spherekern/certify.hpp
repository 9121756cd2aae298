#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "spherekern/scheme.hpp"

namespace spherekern {

enum class Verdict { SpdCertified, PdCertified, Indeterminate, NotSpd };
enum class CheckStatus { Pass, Fail, NotApplicable };

std::string to_string(Verdict v);
std::string to_string(CheckStatus s);

struct ConditionResult {
  std::string name;
  CheckStatus status = CheckStatus::NotApplicable;
  std::string evidence;
};

/// Recipe for a constructive refutation; realized by the interpolation
/// engine into an explicit point set and coefficient vector.
enum class WitnessKind {
  None,
  SinglePoint,       // zero kernel: any point, lambda = (1)
  AntipodalPair,     // {p, -p}; lambda = (1, 1) if symmetric else (1, -1)
  ParityKill,        // null-solve killing the degrees in kill_degrees,
                     // optionally followed by an antipodal extension
  LongitudeMoments,  // equispaced longitudes annihilating the modes in
                     // l1_values
  PolePoint          // theta2 = 0 point where c_0 == 0 forces K(p,p) = 0
};

struct WitnessPlan {
  WitnessKind kind = WitnessKind::None;
  bool symmetric_extension = false;
  bool extend = false;
  std::vector<int> kill_degrees;
  std::vector<int> l1_values;
  std::string description;
};

struct CertifyOptions {
  double tol = 1e-10;        // eigenvalue tolerance, relative to 1-norm
  double sigma = 0.5;        // uniform dominance parameter, in (0,1)
  int progression_cap = 10;  // circle progression scan bound
  double scaled_eps = 1e-8;  // scaled-eigenvalue lower bound
};

struct Certificate {
  Verdict verdict = Verdict::Indeterminate;
  std::vector<ConditionResult> conditions;
  WitnessPlan witness_plan;
  CertifyOptions params;
};

/// Truncated coefficient block A_{l1}^k over the AlphaOrdering, optionally
/// with the sqrt(N_alpha N_alpha') scaling applied.
struct BlockMatrix {
  int l1 = 0;
  bool scaled = false;
  Eigen::MatrixXcd entries;
};

/// k leading indices of Lambda_{|l1|} truncated at the scheme's degree
/// cap; an l1 outside the stored support yields the zero matrix.
BlockMatrix build_block_matrix(const CoefficientScheme& scheme, int l1, int k, bool scaled);

/// Positive semidefiniteness of every stored block (largest k suffices
/// for all leading principal submatrices).  Requires a Hermitian scheme.
struct AxialPdResult {
  bool pass = true;
  std::map<int, double> lambda_min;  // per stored l1
  int worst_l1 = 0;
  double worst_lambda = 0.0;
};
AxialPdResult check_axial_pd(const CoefficientScheme& scheme, double tol);

/// Scaled-eigenvalue strict-PD check: min over k of
/// lambda_min(sqrt(D_k) A~ sqrt(D_k)) > eps per l1.  Without an explicit
/// scaling, diagonal equilibration d_alpha = 1/|a~_{alpha,alpha}| is
/// used.  The bound extends past the truncation only when the tail is a
/// full-support all-parity diagonal.
struct ScaledEigenOptions {
  std::map<int, std::vector<double>> scalings;  // per l1, indexed by alpha-1
  double eps = 1e-8;
};
struct ScaledEigenPerL1 {
  bool pass = false;
  int minimizing_k = 0;
  double min_lambda = 0.0;
  std::string note;
};
struct ScaledEigenResult {
  bool pass = true;  // over the stored blocks
  bool extends_to_tail = false;
  std::map<int, ScaledEigenPerL1> per_l1;
};
ScaledEigenResult check_scaled_eigen_spd(const CoefficientScheme& scheme,
                                         const ScaledEigenOptions& options = {});

/// Uniform strict diagonal dominance on the sqrt(N)-scaled blocks:
/// sum_{alpha' != alpha} |a~| < sigma * |a~_{alpha,alpha}| for every row.
struct DominanceResult {
  bool pass = true;
  std::map<int, double> worst_ratio;  // per l1, max row ratio (inf = zero diag)
  int worst_l1 = 0;
  int worst_row = 0;
  bool tail_extends = false;  // diagonal tail keeps dominance for rows > L
};
DominanceResult check_diag_dominance_spd(const CoefficientScheme& scheme, double sigma);

/// Necessary conditions for strict PD of axial kernels: c_0 not
/// identically zero, and nonzero c_{l1} for infinitely many l1.
enum class NecessityStatus { Pass, C0Zero, FiniteSupport };
struct NecessityResult {
  NecessityStatus status = NecessityStatus::Pass;
  std::vector<int> support;  // stored + declared nonzero l1 values (finite case)
};
NecessityResult check_axial_necessary(const CoefficientScheme& scheme);

/// Convolutional criteria for d >= 3: PD iff every block is PSD; strict
/// PD requires (and, with a strict tail, is implied by) strictly positive
/// blocks at infinitely many even and infinitely many odd degrees.
struct ConvolutionalResult {
  bool pd_pass = true;
  int bad_degree = -1;
  double bad_lambda = 0.0;
  std::vector<int> even_support, odd_support;  // stored degrees with nonzero blocks
  bool even_infinite = false, odd_infinite = false;
  Verdict verdict = Verdict::Indeterminate;
  WitnessPlan plan;
};
ConvolutionalResult check_convolutional(const CoefficientScheme& scheme, double tol);

/// Circle criteria (d = 2): per-degree 2x2 blocks; strict PD governed by
/// arithmetic-progression coverage of the strictly positive block set.
struct CircleResult {
  bool pd_pass = true;
  int bad_degree = -1;
  double bad_lambda = 0.0;
  Verdict verdict = Verdict::Indeterminate;
  WitnessPlan plan;
  std::vector<std::string> progression_report;
};
CircleResult check_circle(const CoefficientScheme& scheme, double tol, int progression_cap);

/// Full certificate: structure report, positive-definiteness evidence,
/// strictness conditions, and a witness plan when refuted.
Certificate certify(const CoefficientScheme& scheme, const CertifyOptions& options = {});

}  // namespace spherekern
