#include "spherekern/interp.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

namespace spherekern {

namespace {

// Deterministic uniform/Gaussian source; the raw engine output is mapped
// to doubles by hand so results do not depend on library distribution
// internals.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double gaussian() {
    double u1 = uniform(), u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

private:
  std::mt19937_64 engine_;
};

SpherePoint random_point(Rng& rng, int d) {
  std::vector<double> x(static_cast<size_t>(d));
  while (true) {
    double norm2 = 0.0;
    for (auto& v : x) {
      v = rng.gaussian();
      norm2 += v * v;
    }
    if (norm2 > 1e-12) return SpherePoint::from_cartesian(x);
  }
}

bool too_close(const std::vector<SpherePoint>& points, const SpherePoint& p, double eps) {
  for (const auto& q : points)
    if (p.geodesic_distance(q) < eps) return true;
  return false;
}

std::vector<SpherePoint> random_point_set(Rng& rng, int d, int n) {
  std::vector<SpherePoint> points;
  points.reserve(static_cast<size_t>(n));
  while (static_cast<int>(points.size()) < n) {
    SpherePoint p = random_point(rng, d);
    if (!too_close(points, p, 1e-6)) points.push_back(std::move(p));
  }
  return points;
}

SpherePoint generic_point(int d) {
  std::vector<double> angles(static_cast<size_t>(d - 1));
  angles[0] = 0.3;
  for (int j = 2; j < d; ++j) angles[static_cast<size_t>(j) - 1] = 1.0 + 0.1 * j;
  return SpherePoint::from_polar(d, angles);
}

// max-norm 1 with the first maximal entry real positive
void normalize_witness(Eigen::VectorXcd& v) {
  double maxabs = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) maxabs = std::max(maxabs, std::abs(v(i)));
  if (maxabs == 0.0) return;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) >= maxabs * (1.0 - 1e-12)) {
      v /= v(i) / std::abs(v(i)) * maxabs;
      return;
    }
  }
}

Eigen::VectorXcd null_vector_of(const Eigen::MatrixXcd& a, Eigen::Index cols) {
  if (a.rows() == 0) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(cols);
    v(0) = 1.0;
    return v;
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a, Eigen::ComputeFullV);
  return svd.matrixV().col(cols - 1);
}

}  // namespace

GramSystem assemble_gram(const CoefficientScheme& scheme,
                         const std::vector<SpherePoint>& points) {
  if (points.empty()) throw std::invalid_argument("assemble_gram: empty point set");
  for (const auto& p : points)
    if (p.dim() != scheme.dim())
      throw std::invalid_argument("assemble_gram: point dimension mismatch");
  for (size_t i = 0; i < points.size(); ++i)
    for (size_t j = i + 1; j < points.size(); ++j)
      if (points[i].geodesic_distance(points[j]) <= 1e-9) {
        std::ostringstream os;
        os << "assemble_gram: duplicate points at rows " << i << " and " << j;
        throw std::invalid_argument(os.str());
      }

  const auto n = static_cast<Eigen::Index>(points.size());
  GramSystem gs;
  gs.points = points;
  gs.gram.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      gs.gram(i, j) = eval_kernel(scheme, points[static_cast<size_t>(i)],
                                  points[static_cast<size_t>(j)]);
  gs.asymmetry = (gs.gram - gs.gram.adjoint()).cwiseAbs().maxCoeff();
  gs.gram = 0.5 * (gs.gram + gs.gram.adjoint().eval());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gs.gram, Eigen::EigenvaluesOnly);
  gs.lambda_min = es.eigenvalues()(0);
  gs.lambda_max = es.eigenvalues()(n - 1);
  return gs;
}

Eigen::VectorXcd solve_interpolation(const GramSystem& gs, const Eigen::VectorXcd& values,
                                     double* residual) {
  if (values.size() != gs.gram.rows())
    throw std::invalid_argument("solve_interpolation: value count mismatch");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gs.gram);
  const double threshold = 1e-12 * std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  if (es.eigenvalues()(0) <= threshold)
    throw SingularGramError(es.eigenvalues()(0), es.eigenvectors().col(0));
  Eigen::VectorXcd c = es.eigenvectors() *
                       (es.eigenvalues().cwiseInverse().asDiagonal() *
                        (es.eigenvectors().adjoint() * values));
  if (residual) *residual = (gs.gram * c - values).cwiseAbs().maxCoeff();
  return c;
}

Complex eval_interpolant(const CoefficientScheme& scheme,
                         const std::vector<SpherePoint>& points,
                         const Eigen::VectorXcd& coeffs, const SpherePoint& zeta) {
  if (static_cast<size_t>(coeffs.size()) != points.size())
    throw std::invalid_argument("eval_interpolant: coefficient count mismatch");
  Complex s(0.0, 0.0);
  for (size_t i = 0; i < points.size(); ++i)
    s += coeffs(static_cast<Eigen::Index>(i)) * eval_kernel(scheme, zeta, points[i]);
  return s;
}

double quadratic_form(const CoefficientScheme& scheme,
                      const std::vector<SpherePoint>& points,
                      const Eigen::VectorXcd& coeffs) {
  if (static_cast<size_t>(coeffs.size()) != points.size())
    throw std::invalid_argument("quadratic_form: coefficient count mismatch");
  Complex s(0.0, 0.0);
  for (size_t i = 0; i < points.size(); ++i)
    for (size_t j = 0; j < points.size(); ++j)
      s += coeffs(static_cast<Eigen::Index>(i)) *
           std::conj(coeffs(static_cast<Eigen::Index>(j))) *
           eval_kernel(scheme, points[i], points[j]);
  return s.real();
}

ProbeReport probe_spd(const CoefficientScheme& scheme, int n_sets, int n_points,
                      std::uint64_t seed, bool antipodal) {
  if (n_points < 1 && n_sets > 0)
    throw std::invalid_argument("probe_spd: need at least one point per set");
  Rng rng(seed);
  ProbeReport report;
  report.min_normalized_lambda = std::numeric_limits<double>::infinity();
  for (int s = 0; s < n_sets; ++s) {
    std::vector<SpherePoint> points = random_point_set(rng, scheme.dim(), n_points);
    if (antipodal) {
      std::vector<SpherePoint> augmented = points;
      for (const auto& p : points) {
        SpherePoint q = p.antipode();
        if (!too_close(augmented, q, 1e-6)) augmented.push_back(std::move(q));
      }
      points = std::move(augmented);
    }
    GramSystem gs = assemble_gram(scheme, points);
    double trace = gs.gram.real().trace();
    double normalized = trace > 0.0 ? gs.lambda_min / trace : gs.lambda_min;
    if (normalized < report.min_normalized_lambda)
      report.min_normalized_lambda = normalized;
    if (normalized <= 1e-12 && !report.witness) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gs.gram);
      Witness w;
      w.points = points;
      w.coeffs = es.eigenvectors().col(0);
      normalize_witness(w.coeffs);
      w.residual = quadratic_form(scheme, w.points, w.coeffs);
      std::ostringstream os;
      os << "probe set " << s << ": normalized lambda_min " << normalized;
      w.description = os.str();
      report.witness = std::move(w);
      report.witness_set = s;
    }
    ++report.sets_run;
  }
  if (report.sets_run == 0) report.min_normalized_lambda = 0.0;
  return report;
}

namespace {

Witness finish(const CoefficientScheme& scheme, std::vector<SpherePoint> points,
               Eigen::VectorXcd coeffs, std::string description) {
  Witness w;
  w.points = std::move(points);
  w.coeffs = std::move(coeffs);
  normalize_witness(w.coeffs);
  w.residual = quadratic_form(scheme, w.points, w.coeffs);
  w.description = std::move(description);
  return w;
}

// Null solve annihilating all harmonics of the given degrees on m
// points, optionally followed by an antipodal extension that kills the
// complementary parity class.
Witness parity_kill_witness(const CoefficientScheme& scheme,
                            const std::vector<int>& degrees, bool extend, bool symmetric,
                            int m, const std::string& description) {
  const int d = scheme.dim();
  Eigen::Index rows = 0;
  for (int j : degrees) rows += dim_harmonic_space(j, d);
  if (m <= static_cast<int>(rows)) m = static_cast<int>(rows) + 1;

  // deterministic points; strictly inside one hemisphere when an
  // antipodal extension follows
  Rng rng(0x5eedULL);
  std::vector<SpherePoint> points;
  while (static_cast<int>(points.size()) < m) {
    SpherePoint p = random_point(rng, d);
    if (extend) {
      const auto& x = p.cartesian();
      double last = x[static_cast<size_t>(d) - 1];
      if (std::abs(last) < 0.05) continue;
      if (last > 0.0) {
        std::vector<double> flipped(x);
        for (auto& v : flipped) v = -v;
        p = SpherePoint::from_cartesian(flipped);
      }
    }
    if (!too_close(points, p, 1e-6)) points.push_back(std::move(p));
  }

  Eigen::MatrixXcd system(rows, m);
  Eigen::Index r = 0;
  for (int j : degrees) {
    for (const auto& idx : degree_basis(d, j)) {
      for (int i = 0; i < m; ++i)
        system(r, i) = sph_harm(idx, points[static_cast<size_t>(i)]);
      ++r;
    }
  }
  Eigen::VectorXcd lambda = null_vector_of(system, m);

  if (!extend) return finish(scheme, std::move(points), std::move(lambda), description);

  std::vector<SpherePoint> full = points;
  for (const auto& p : points) full.push_back(p.antipode());
  Eigen::VectorXcd lam2(2 * m);
  lam2.head(m) = lambda;
  lam2.tail(m) = symmetric ? lambda : Eigen::VectorXcd(-lambda);
  return finish(scheme, std::move(full), std::move(lam2), description);
}

}  // namespace

Witness realize_witness(const CoefficientScheme& scheme, const WitnessPlan& plan) {
  const int d = scheme.dim();
  switch (plan.kind) {
    case WitnessKind::None:
      throw std::invalid_argument("realize_witness: no witness planned");
    case WitnessKind::SinglePoint: {
      Eigen::VectorXcd lambda(1);
      lambda(0) = 1.0;
      return finish(scheme, {generic_point(d)}, std::move(lambda), plan.description);
    }
    case WitnessKind::AntipodalPair: {
      SpherePoint p = generic_point(d);
      Eigen::VectorXcd lambda(2);
      lambda(0) = 1.0;
      lambda(1) = plan.symmetric_extension ? 1.0 : -1.0;
      return finish(scheme, {p, p.antipode()}, std::move(lambda), plan.description);
    }
    case WitnessKind::PolePoint: {
      if (d < 3)
        throw std::invalid_argument("realize_witness: pole witness needs d >= 3");
      std::vector<double> angles(static_cast<size_t>(d - 1), 0.0);
      for (int j = 3; j < d; ++j) angles[static_cast<size_t>(j) - 1] = 1.0;
      Eigen::VectorXcd lambda(1);
      lambda(0) = 1.0;
      return finish(scheme, {SpherePoint::from_polar(d, angles)}, std::move(lambda),
                    plan.description);
    }
    case WitnessKind::LongitudeMoments: {
      const auto& J = plan.l1_values;
      const int n = static_cast<int>(J.size()) + 1;
      std::vector<SpherePoint> points;
      for (int k = 0; k < n; ++k) {
        std::vector<double> angles(static_cast<size_t>(d - 1),
                                   0.5 * std::numbers::pi);
        angles[0] = 2.0 * std::numbers::pi * k / n;
        points.push_back(SpherePoint::from_polar(d, angles));
      }
      Eigen::MatrixXcd moments(static_cast<Eigen::Index>(J.size()), n);
      for (size_t r = 0; r < J.size(); ++r)
        for (int k = 0; k < n; ++k) {
          double phase = J[r] * points[static_cast<size_t>(k)].angle(1);
          moments(static_cast<Eigen::Index>(r), k) = Complex(std::cos(phase),
                                                             std::sin(phase));
        }
      return finish(scheme, std::move(points), null_vector_of(moments, n),
                    plan.description);
    }
    case WitnessKind::ParityKill:
      return parity_kill_witness(scheme, plan.kill_degrees, plan.extend,
                                 plan.symmetric_extension, 0, plan.description);
  }
  throw std::invalid_argument("realize_witness: unknown plan");
}

Witness witness_even_odd(const CoefficientScheme& scheme, int hemisphere_points) {
  if (scheme.type() != SchemeType::Convolutional &&
      scheme.type() != SchemeType::ConvolutionalDiagonal &&
      scheme.type() != SchemeType::Isotropic)
    throw std::invalid_argument("witness_even_odd: scheme must have convolutional form");
  ConvolutionalResult conv = check_convolutional(scheme, 1e-10);
  if (conv.even_infinite && conv.odd_infinite)
    throw std::invalid_argument(
        "witness_even_odd: both parity classes carry infinitely many degrees; no "
        "parity witness exists");
  const WitnessPlan& plan = conv.plan;
  if (plan.kind == WitnessKind::ParityKill)
    return parity_kill_witness(scheme, plan.kill_degrees, plan.extend,
                               plan.symmetric_extension, hemisphere_points,
                               plan.description);
  return realize_witness(scheme, plan);
}

Witness witness_finite_longitude_support(const CoefficientScheme& scheme) {
  NecessityResult necess = check_axial_necessary(scheme);
  if (necess.status == NecessityStatus::Pass)
    throw std::invalid_argument(
        "witness_finite_longitude_support: the declared tail covers infinitely many "
        "longitude modes");
  WitnessPlan plan;
  if (necess.status == NecessityStatus::C0Zero || necess.support.empty()) {
    // fall back to the strongest available degenerate witness
    if (necess.status == NecessityStatus::C0Zero && scheme.dim() >= 3)
      return witness_c0_zero(scheme);
    plan.kind = WitnessKind::SinglePoint;
    plan.description = "zero kernel: single-point witness";
    return realize_witness(scheme, plan);
  }
  plan.kind = WitnessKind::LongitudeMoments;
  plan.l1_values = necess.support;
  std::ostringstream os;
  os << "finite longitude support of " << necess.support.size()
     << " modes: equispaced-longitude moment witness";
  plan.description = os.str();
  return realize_witness(scheme, plan);
}

Witness witness_c0_zero(const CoefficientScheme& scheme) {
  if (scheme.type() != SchemeType::Axial)
    throw std::invalid_argument("witness_c0_zero: scheme must have axial form");
  if (scheme.dim() < 3)
    throw std::invalid_argument("witness_c0_zero: needs d >= 3");
  const auto& tail = scheme.tail();
  if (!scheme.axial_block_zero(0) || (tail.present && tail.supports_l1(0)))
    throw std::invalid_argument("witness_c0_zero: c_0 is not identically zero");
  WitnessPlan plan;
  plan.kind = WitnessKind::PolePoint;
  plan.description = "c_0 identically zero: degenerate pole-type point";
  return realize_witness(scheme, plan);
}

}  // namespace spherekern
