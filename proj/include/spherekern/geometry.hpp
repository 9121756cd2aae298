#pragma once

#include <vector>

namespace spherekern {

/// A point on the unit sphere S^{d-1} in R^d, kept in both polar and
/// Cartesian form.
///
/// Polar convention: theta1 in [0, 2*pi) is the periodic longitude
/// (the distinguished rotation axis), theta2..theta_{d-1} in [0, pi]
/// are colatitude-type angles.  The Cartesian map is
///   x1  = cos(theta1) * prod_{j=2}^{d-1} sin(theta_j)
///   x2  = sin(theta1) * prod_{j=2}^{d-1} sin(theta_j)
///   x_m = cos(theta_{m-1}) * prod_{j=m}^{d-1} sin(theta_j),  3 <= m <= d.
/// In particular x_d = cos(theta_{d-1}) and theta2 = 0 gives a pole-type
/// point in the (x1,x2,x3)-block.
class SpherePoint {
public:
  static SpherePoint from_polar(int dim, const std::vector<double>& angles);

  /// Builds from a Cartesian vector, normalizing it.  Throws if the norm
  /// is zero; `deviation` (if given) receives |norm - 1| before
  /// normalization.
  static SpherePoint from_cartesian(const std::vector<double>& x,
                                    double* deviation = nullptr);

  int dim() const { return dim_; }
  const std::vector<double>& polar() const { return polar_; }
  const std::vector<double>& cartesian() const { return cartesian_; }

  /// theta_j for j = 1..d-1.
  double angle(int j) const { return polar_[static_cast<size_t>(j) - 1]; }

  double dot(const SpherePoint& other) const;
  double geodesic_distance(const SpherePoint& other) const;
  SpherePoint antipode() const;

private:
  SpherePoint() = default;

  int dim_ = 0;
  std::vector<double> polar_;     // theta1..theta_{d-1}
  std::vector<double> cartesian_; // x1..xd, unit norm
};

}  // namespace spherekern
