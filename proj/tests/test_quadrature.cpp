#include <doctest.h>

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>

#include "spherekern/harmonics.hpp"
#include "spherekern/quadrature.hpp"

using namespace spherekern;
using std::numbers::pi;
using Cx = std::complex<double>;

namespace {

Cx integrate(const QuadratureRule& quad,
             const std::function<Cx(const SpherePoint&)>& f) {
  Cx sum(0.0, 0.0);
  for (size_t i = 0; i < quad.nodes.size(); ++i) sum += quad.weights[i] * f(quad.nodes[i]);
  return sum;
}

}  // namespace

TEST_CASE("gauss rule: lambda = 1/2 reproduces Gauss-Legendre moments") {
  auto rule = gauss_gegenbauer(6, 0.5);
  REQUIRE(rule.nodes.size() == 6);
  double m0 = 0.0, m2 = 0.0, m4 = 0.0;
  for (size_t i = 0; i < rule.nodes.size(); ++i) {
    double t = rule.nodes[i], w = rule.weights[i];
    m0 += w;
    m2 += w * t * t;
    m4 += w * t * t * t * t;
  }
  CHECK(m0 == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(m2 == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(m4 == doctest::Approx(2.0 / 5.0).epsilon(1e-12));
}

TEST_CASE("gauss rule: gegenbauer weight moments") {
  // weight (1-t^2)^{lambda-1/2}; for lambda = 1 the total mass is pi/2
  // and the second moment is pi/8.
  auto rule = gauss_gegenbauer(8, 1.0);
  double m0 = 0.0, m1 = 0.0, m2 = 0.0;
  for (size_t i = 0; i < rule.nodes.size(); ++i) {
    double t = rule.nodes[i], w = rule.weights[i];
    m0 += w;
    m1 += w * t;
    m2 += w * t * t;
  }
  CHECK(m0 == doctest::Approx(pi / 2.0).epsilon(1e-12));
  CHECK(std::abs(m1) < 1e-13);
  CHECK(m2 == doctest::Approx(pi / 8.0).epsilon(1e-12));
  for (double w : rule.weights) CHECK(w > 0.0);
}

TEST_CASE("sphere rule integrates the constant to the surface area") {
  for (int d = 2; d <= 5; ++d) {
    auto quad = build_quadrature(d, 6);
    double total = 0.0;
    for (double w : quad.weights) total += w;
    CHECK(total == doctest::Approx(surface_area(d)).epsilon(1e-10));
    for (double w : quad.weights) CHECK(w > 0.0);
  }
}

TEST_CASE("orthonormality oracle on the 2-sphere") {
  auto quad = build_quadrature(3, 8);
  HarmonicIndex y11{1, {1}};
  Cx n = integrate(quad, [&](const SpherePoint& p) {
    Cx y = sph_harm(y11, p);
    return y * std::conj(y);
  });
  CHECK(std::abs(n - Cx(1.0, 0.0)) < 1e-9);

  HarmonicIndex y01{0, {1}}, y02{0, {2}};
  Cx z = integrate(quad, [&](const SpherePoint& p) {
    return sph_harm(y01, p) * std::conj(sph_harm(y02, p));
  });
  CHECK(std::abs(z) < 1e-9);
}

TEST_CASE("full orthonormality gram up to degree 3") {
  for (int d = 2; d <= 4; ++d) {
    auto quad = build_quadrature(d, 8);
    std::vector<HarmonicIndex> all;
    for (int j = 0; j <= 3; ++j)
      for (const auto& idx : degree_basis(d, j)) all.push_back(idx);
    std::vector<std::vector<Cx>> vals(all.size(),
                                      std::vector<Cx>(quad.nodes.size()));
    for (size_t a = 0; a < all.size(); ++a)
      for (size_t i = 0; i < quad.nodes.size(); ++i)
        vals[a][i] = sph_harm(all[a], quad.nodes[i]);
    for (size_t a = 0; a < all.size(); ++a) {
      for (size_t b = 0; b <= a; ++b) {
        Cx g(0.0, 0.0);
        for (size_t i = 0; i < quad.nodes.size(); ++i)
          g += quad.weights[i] * vals[a][i] * std::conj(vals[b][i]);
        Cx expect = (a == b) ? Cx(1.0, 0.0) : Cx(0.0, 0.0);
        CHECK(std::abs(g - expect) < 1e-8);
      }
    }
  }
}
