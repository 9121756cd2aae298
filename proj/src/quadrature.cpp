#include "spherekern/quadrature.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace spherekern {

GaussRule1D gauss_gegenbauer(int n, double lambda) {
  if (n < 1) throw std::domain_error("gauss_gegenbauer: need at least one node");
  if (lambda <= 0.0) throw std::domain_error("gauss_gegenbauer: lambda must be positive");

  const double a = lambda - 0.5;  // Jacobi exponent, weight (1-t^2)^a
  const double mu0 =
      std::sqrt(std::numbers::pi) * std::tgamma(a + 1.0) / std::tgamma(a + 1.5);

  // Monic symmetric-Jacobi recurrence: alpha_k = 0,
  // beta_k = k (k + 2a) / ((2k + 2a + 1)(2k + 2a - 1)).
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    double kk = static_cast<double>(k);
    double beta = kk * (kk + 2.0 * a) /
                  ((2.0 * kk + 2.0 * a + 1.0) * (2.0 * kk + 2.0 * a - 1.0));
    double b = std::sqrt(beta);
    jacobi(k, k - 1) = b;
    jacobi(k - 1, k) = b;
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
  GaussRule1D rule;
  rule.nodes.resize(static_cast<size_t>(n));
  rule.weights.resize(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    rule.nodes[static_cast<size_t>(i)] = es.eigenvalues()(i);
    double v0 = es.eigenvectors()(0, i);
    rule.weights[static_cast<size_t>(i)] = mu0 * v0 * v0;
  }
  return rule;
}

QuadratureRule build_quadrature(int d, int exactness_degree) {
  if (d < 2) throw std::domain_error("build_quadrature: d must be >= 2");
  if (exactness_degree < 0) throw std::domain_error("build_quadrature: exactness must be >= 0");

  const int D = exactness_degree;
  QuadratureRule rule;
  rule.d = d;
  rule.exactness = D;

  // Longitude: n1 >= D+1 uniform nodes integrate trig polynomials of
  // degree <= D exactly.
  const int n1 = std::max(D + 1, 1);
  const double wtheta1 = 2.0 * std::numbers::pi / n1;

  // Colatitudes: for theta_j the measure factor is (sin theta_j)^{j-1},
  // i.e. weight (1-t^2)^{(j-2)/2} in t = cos theta_j, which is the
  // Gegenbauer weight with lambda = (j-1)/2.
  std::vector<GaussRule1D> colat;
  const int ncol = D / 2 + 1;
  for (int j = 2; j <= d - 1; ++j) {
    colat.push_back(gauss_gegenbauer(ncol, 0.5 * (j - 1)));
  }

  std::vector<size_t> counter(colat.size(), 0);
  std::vector<double> angles(static_cast<size_t>(d - 1), 0.0);
  while (true) {
    double wcol = 1.0;
    for (size_t c = 0; c < colat.size(); ++c) {
      angles[c + 1] = std::acos(colat[c].nodes[counter[c]]);
      wcol *= colat[c].weights[counter[c]];
    }
    for (int i1 = 0; i1 < n1; ++i1) {
      angles[0] = 2.0 * std::numbers::pi * i1 / n1;
      rule.nodes.push_back(SpherePoint::from_polar(d, angles));
      rule.weights.push_back(wtheta1 * wcol);
    }
    // odometer over the colatitude rules
    size_t c = 0;
    for (; c < colat.size(); ++c) {
      if (++counter[c] < colat[c].nodes.size()) break;
      counter[c] = 0;
    }
    if (c == colat.size()) break;
  }
  return rule;
}

}  // namespace spherekern
