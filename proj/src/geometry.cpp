#include "spherekern/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace spherekern {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

double wrap_longitude(double t) {
  double w = std::fmod(t, two_pi);
  if (w < 0.0) w += two_pi;
  if (w >= two_pi) w = 0.0;
  return w;
}

}  // namespace

SpherePoint SpherePoint::from_polar(int dim, const std::vector<double>& angles) {
  if (dim < 2) throw std::domain_error("SpherePoint: ambient dimension must be >= 2");
  if (angles.size() != static_cast<size_t>(dim - 1))
    throw std::invalid_argument("SpherePoint: expected d-1 polar angles");

  SpherePoint p;
  p.dim_ = dim;
  p.polar_ = angles;
  p.polar_[0] = wrap_longitude(p.polar_[0]);
  for (int j = 2; j <= dim - 1; ++j) {
    double t = p.polar_[static_cast<size_t>(j) - 1];
    if (t < -1e-12 || t > std::numbers::pi + 1e-12)
      throw std::domain_error("SpherePoint: colatitude angle outside [0, pi]");
    p.polar_[static_cast<size_t>(j) - 1] = std::clamp(t, 0.0, std::numbers::pi);
  }

  p.cartesian_.assign(static_cast<size_t>(dim), 0.0);
  // Build from the outermost angle inwards: running product of sines.
  double sinprod = 1.0;
  for (int m = dim; m >= 3; --m) {
    double t = p.polar_[static_cast<size_t>(m) - 2];  // theta_{m-1}
    p.cartesian_[static_cast<size_t>(m) - 1] = std::cos(t) * sinprod;
    sinprod *= std::sin(t);
  }
  p.cartesian_[0] = std::cos(p.polar_[0]) * sinprod;
  p.cartesian_[1] = std::sin(p.polar_[0]) * sinprod;
  return p;
}

SpherePoint SpherePoint::from_cartesian(const std::vector<double>& x, double* deviation) {
  int dim = static_cast<int>(x.size());
  if (dim < 2) throw std::domain_error("SpherePoint: ambient dimension must be >= 2");

  double norm2 = 0.0;
  for (double v : x) norm2 += v * v;
  double norm = std::sqrt(norm2);
  if (norm < 1e-14) throw std::invalid_argument("SpherePoint: zero vector has no direction");
  if (deviation) *deviation = std::abs(norm - 1.0);

  SpherePoint p;
  p.dim_ = dim;
  p.cartesian_.resize(x.size());
  for (size_t i = 0; i < x.size(); ++i) p.cartesian_[i] = x[i] / norm;

  // Peel angles from the outermost coordinate.  Once the residual radius
  // vanishes the remaining angles are undetermined; they are set to 0 for
  // a deterministic canonical form.
  p.polar_.assign(static_cast<size_t>(dim - 1), 0.0);
  double r = 1.0;  // norm of (x1..x_m) block still to decompose
  bool degenerate = false;
  for (int m = dim; m >= 3; --m) {
    double xm = p.cartesian_[static_cast<size_t>(m) - 1];
    double rest2 = 0.0;
    for (int i = 0; i < m - 1; ++i) rest2 += p.cartesian_[static_cast<size_t>(i)] * p.cartesian_[static_cast<size_t>(i)];
    double rest = std::sqrt(rest2);
    if (degenerate || r < 1e-300) {
      p.polar_[static_cast<size_t>(m) - 2] = 0.0;
      degenerate = true;
      continue;
    }
    p.polar_[static_cast<size_t>(m) - 2] = std::atan2(rest, xm);
    r = rest;
    if (rest < 1e-300) degenerate = true;
  }
  if (!degenerate) {
    p.polar_[0] = wrap_longitude(std::atan2(p.cartesian_[1], p.cartesian_[0]));
  }
  return p;
}

double SpherePoint::dot(const SpherePoint& other) const {
  if (other.dim_ != dim_) throw std::invalid_argument("SpherePoint::dot: dimension mismatch");
  double s = 0.0;
  for (size_t i = 0; i < cartesian_.size(); ++i) s += cartesian_[i] * other.cartesian_[i];
  return std::clamp(s, -1.0, 1.0);
}

double SpherePoint::geodesic_distance(const SpherePoint& other) const {
  return std::acos(dot(other));
}

SpherePoint SpherePoint::antipode() const {
  std::vector<double> x(cartesian_);
  for (double& v : x) v = -v;
  return from_cartesian(x);
}

}  // namespace spherekern
