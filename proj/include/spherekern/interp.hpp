#pragma once

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "spherekern/certify.hpp"
#include "spherekern/scheme.hpp"

namespace spherekern {

/// Point set, Hermitian-symmetrized Gram matrix, and its spectral data.
struct GramSystem {
  std::vector<SpherePoint> points;
  Eigen::MatrixXcd gram;
  double asymmetry = 0.0;   // max |K - K^H| before symmetrization
  double lambda_min = 0.0;
  double lambda_max = 0.0;
};

/// Pairwise kernel evaluation; rejects duplicate points (geodesic
/// distance <= 1e-9) naming the offending pair.
GramSystem assemble_gram(const CoefficientScheme& scheme,
                         const std::vector<SpherePoint>& points);

/// Thrown when the Gram matrix is numerically singular; carries the
/// offending eigenpair as a refutation candidate.
class SingularGramError : public std::runtime_error {
public:
  SingularGramError(double lm, Eigen::VectorXcd nv)
      : std::runtime_error("solve_interpolation: numerically singular Gram matrix "
                           "(lambda_min = " + std::to_string(lm) + ")"),
        lambda_min(lm), null_vector(std::move(nv)) {}
  double lambda_min;
  Eigen::VectorXcd null_vector;
};

/// Hermitian solve K_Xi c = values; the max-norm residual is written to
/// *residual when given.
Eigen::VectorXcd solve_interpolation(const GramSystem& gs, const Eigen::VectorXcd& values,
                                     double* residual = nullptr);

/// s_f(zeta) = sum_xi c_xi K(zeta, xi).
Complex eval_interpolant(const CoefficientScheme& scheme,
                         const std::vector<SpherePoint>& points,
                         const Eigen::VectorXcd& coeffs, const SpherePoint& zeta);

/// Finite point set plus coefficient vector annihilating (or exposing)
/// the kernel's quadratic form.  coeffs has max-norm 1 with the first
/// maximal entry real positive; residual is computed, never assumed.
struct Witness {
  std::vector<SpherePoint> points;
  Eigen::VectorXcd coeffs;
  double residual = 0.0;
  std::string description;
};

/// Re(lambda^* K_Xi lambda) for the given points and coefficients.
double quadratic_form(const CoefficientScheme& scheme,
                      const std::vector<SpherePoint>& points,
                      const Eigen::VectorXcd& coeffs);

/// Empirical falsifier: random distinct point sets, deterministic from
/// the seed; the antipodal flag appends the antipode of every point.
struct ProbeReport {
  int sets_run = 0;
  double min_normalized_lambda = 0.0;  // min over sets of lambda_min/trace
  std::optional<Witness> witness;
  int witness_set = -1;
};
ProbeReport probe_spd(const CoefficientScheme& scheme, int n_sets, int n_points,
                      std::uint64_t seed, bool antipodal = false);

/// Antipodal/parity witness for convolutional kernels missing (or
/// carrying only finitely many degrees of) one parity class.
/// hemisphere_points <= 0 selects M+1 automatically.
Witness witness_even_odd(const CoefficientScheme& scheme, int hemisphere_points = 0);

/// Equispaced-longitude moment witness for finite longitude support.
Witness witness_finite_longitude_support(const CoefficientScheme& scheme);

/// Degenerate pole-type point (theta2 = 0) for c_0 == 0 axial schemes.
Witness witness_c0_zero(const CoefficientScheme& scheme);

/// Turns a certifier's witness plan into an explicit witness.
Witness realize_witness(const CoefficientScheme& scheme, const WitnessPlan& plan);

}  // namespace spherekern
