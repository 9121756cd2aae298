#pragma once

#include <vector>

#include "spherekern/geometry.hpp"

namespace spherekern {

/// Nodes and weights of an n-point Gauss rule for the weight
/// (1-t^2)^{lambda-1/2} on [-1,1] (Gauss-Gegenbauer), lambda > 0,
/// computed by Golub-Welsch.  lambda = 1/2 gives Gauss-Legendre.
struct GaussRule1D {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussRule1D gauss_gegenbauer(int n, double lambda);

/// Product quadrature on S^{d-1}: uniform trapezoid in theta1,
/// Gauss-Gegenbauer in cos(theta_j) with the (sin theta_j)^{j-1} measure
/// factor absorbed into the weights.  Integrates all polynomials on the
/// sphere of total degree <= exactness exactly.
struct QuadratureRule {
  int d = 0;
  int exactness = 0;
  std::vector<SpherePoint> nodes;
  std::vector<double> weights;  // positive, summing to sigma_{d-1}
};

QuadratureRule build_quadrature(int d, int exactness_degree);

}  // namespace spherekern
