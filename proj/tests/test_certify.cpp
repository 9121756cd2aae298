#include <doctest.h>

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

#include "spherekern/certify.hpp"
#include "test_util.hpp"

using namespace spherekern;

namespace {

AxialBlock hermitian_entry(const TailIndex& a, const TailIndex& b, Complex v) {
  AxialBlock block;
  block[{a, b}] = v;
  if (a != b) block[{b, a}] = std::conj(v);
  return block;
}

void merge(AxialBlock& into, const AxialBlock& from) {
  for (const auto& [k, v] : from) into[k] = v;
}

}  // namespace

TEST_CASE("block matrix construction") {
  // c_1(j,j') = delta: identity block over Lambda_1 truncated at L = 3.
  AxialBlock c1;
  for (int l = 1; l <= 3; ++l) c1[{TailIndex{l}, TailIndex{l}}] = Complex(1.0, 0.0);
  auto scheme = CoefficientScheme::axial(3, 3, {{1, c1}});
  auto bm = build_block_matrix(scheme, 1, 3, false);
  CHECK((bm.entries - Eigen::MatrixXcd::Identity(3, 3)).norm() < 1e-15);

  // Scaled diagonal picks up N_alpha: degrees 1,2,3 on S^2 have N = 3,5,7.
  auto scaled = build_block_matrix(scheme, 1, 3, true);
  CHECK(scaled.entries(0, 0) == Complex(3.0, 0.0));
  CHECK(scaled.entries(1, 1) == Complex(5.0, 0.0));
  CHECK(scaled.entries(2, 2) == Complex(7.0, 0.0));

  // Unstored l1 gives the zero matrix; Hermitian storage stays Hermitian.
  auto zero = build_block_matrix(scheme, 2, 2, false);
  CHECK(zero.entries.cwiseAbs().maxCoeff() == 0.0);

  AxialBlock cx = hermitian_entry(TailIndex{0}, TailIndex{1}, Complex(0.5, 0.25));
  merge(cx, hermitian_entry(TailIndex{0}, TailIndex{0}, Complex(1.0, 0.0)));
  auto sx = CoefficientScheme::axial(3, 1, {{0, cx}});
  auto bx = build_block_matrix(sx, 0, 2, false);
  CHECK((bx.entries - bx.entries.adjoint()).norm() < 1e-15);

  CHECK_THROWS_AS(build_block_matrix(sx, 0, 5, false), std::out_of_range);
  CHECK_THROWS_AS(
      build_block_matrix(CoefficientScheme::isotropic(3, 0, {{0, 1.0}}), 0, 1, false),
      std::invalid_argument);
}

TEST_CASE("axial PSD check") {
  // Diagonal nonnegative blocks pass.
  AxialBlock diag;
  for (int l = 0; l <= 2; ++l) diag[{TailIndex{l}, TailIndex{l}}] = Complex(1.0 / (1 + l), 0.0);
  auto good = CoefficientScheme::axial(3, 2, {{0, diag}});
  auto r1 = check_axial_pd(good, 1e-10);
  CHECK(r1.pass);
  CHECK(r1.lambda_min.at(0) > 0.0);

  // c_0 = [[1,2],[2,1]] fails with lambda_min = -1.
  AxialBlock c0 = hermitian_entry(TailIndex{0}, TailIndex{1}, Complex(2.0, 0.0));
  merge(c0, hermitian_entry(TailIndex{0}, TailIndex{0}, Complex(1.0, 0.0)));
  merge(c0, hermitian_entry(TailIndex{1}, TailIndex{1}, Complex(1.0, 0.0)));
  auto bad = CoefficientScheme::axial(3, 1, {{0, c0}});
  auto r2 = check_axial_pd(bad, 1e-10);
  CHECK(!r2.pass);
  CHECK(r2.worst_l1 == 0);
  CHECK(r2.worst_lambda == doctest::Approx(-1.0).epsilon(1e-12));

  // Empty scheme passes vacuously.
  CHECK(check_axial_pd(CoefficientScheme::axial(3, 2, {}), 1e-10).pass);

  // Non-Hermitian blocks are refused.
  AxialBlock nh;
  nh[{TailIndex{0}, TailIndex{1}}] = Complex(1.0, 0.0);
  auto bad_h = CoefficientScheme::axial(3, 1, {{0, nh}});
  CHECK_THROWS_AS(check_axial_pd(bad_h, 1e-10), std::invalid_argument);
}

TEST_CASE("axial PSD check agrees with a brute-force eigensolve") {
  testutil::Rng rng(51);
  for (int trial = 0; trial < 20; ++trial) {
    const int L = 3;
    AxialBlock c0;
    for (int l = 0; l <= L; ++l)
      for (int lp = l; lp <= L; ++lp) {
        Complex v(rng.gaussian(), l == lp ? 0.0 : rng.gaussian());
        merge(c0, hermitian_entry(TailIndex{l}, TailIndex{lp}, v));
      }
    auto scheme = CoefficientScheme::axial(3, L, {{0, c0}});
    // Independent assembly straight from the stored map.
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(L + 1, L + 1);
    for (const auto& [key, v] : c0) m(key.first[0], key.second[0]) = v;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
    double brute = es.eigenvalues()(0);
    auto res = check_axial_pd(scheme, 1e-10);
    CHECK(res.lambda_min.at(0) == doctest::Approx(brute).epsilon(1e-10));
    CHECK(res.pass == (brute >= -1e-10 * std::max(1.0, m.cwiseAbs().colwise().sum().maxCoeff())));
  }
}

TEST_CASE("scaled eigenvalue check") {
  const int L = 3;
  // Diagonal c with c(j,j) = (1+j)^{-4}: equilibration gives lambda = 1.
  AxialBlock diag;
  for (int l = 0; l <= L; ++l)
    diag[{TailIndex{l}, TailIndex{l}}] = Complex(std::pow(1.0 + l, -4.0), 0.0);
  auto scheme = CoefficientScheme::axial(3, L, {{0, diag}});
  auto r1 = check_scaled_eigen_spd(scheme);
  CHECK(r1.pass);
  CHECK(r1.per_l1.at(0).min_lambda == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(!r1.extends_to_tail);  // no tail declared

  // Explicit scaling d_alpha = (1+j)^4 / N_j also lands exactly at 1.
  ScaledEigenOptions opt;
  std::vector<double> scaling;
  for (int l = 0; l <= L; ++l)
    scaling.push_back(std::pow(1.0 + l, 4.0) /
                      static_cast<double>(dim_harmonic_space(l, 3)));
  opt.scalings[0] = scaling;
  auto r2 = check_scaled_eigen_spd(scheme, opt);
  CHECK(r2.pass);
  CHECK(r2.per_l1.at(0).min_lambda == doctest::Approx(1.0).epsilon(1e-12));

  // Nonpositive scalings are rejected.
  ScaledEigenOptions badopt;
  badopt.scalings[0] = {1.0, -1.0, 1.0, 1.0};
  CHECK_THROWS_AS(check_scaled_eigen_spd(scheme, badopt), std::domain_error);

  // Strict tail marks the bound as extending past the truncation.
  auto tailed = CoefficientScheme::axial(3, L, {{0, diag}}, TailDescriptor::power(3.0, 1.0));
  CHECK(check_scaled_eigen_spd(tailed).extends_to_tail);
}

TEST_CASE("scaled eigenvalue check reports the minimizing truncation") {
  // Tridiagonal A~ with unit diagonal and off-diagonal 1/2 after the
  // sqrt(N) scaling: lambda_min(k) = 1 + cos(pi k / (k+1)), minimized at
  // the largest k.
  const int L = 3;
  AxialBlock c;
  for (int l = 0; l <= L; ++l) {
    double nl = static_cast<double>(dim_harmonic_space(l, 3));
    c[{TailIndex{l}, TailIndex{l}}] = Complex(1.0 / nl, 0.0);
    if (l < L) {
      double nlp = static_cast<double>(dim_harmonic_space(l + 1, 3));
      Complex off(0.5 / std::sqrt(nl * nlp), 0.0);
      merge(c, hermitian_entry(TailIndex{l}, TailIndex{l + 1}, off));
    }
  }
  auto scheme = CoefficientScheme::axial(3, L, {{0, c}});
  ScaledEigenOptions opt;
  opt.scalings[0] = {1.0, 1.0, 1.0, 1.0};
  auto res = check_scaled_eigen_spd(scheme, opt);
  CHECK(res.per_l1.at(0).minimizing_k == 4);
  CHECK(res.per_l1.at(0).min_lambda ==
        doctest::Approx(1.0 + std::cos(4.0 * std::acos(-1.0) / 5.0)).epsilon(1e-10));
  CHECK(res.per_l1.at(0).pass);   // still above eps = 1e-8 at this truncation
  CHECK(!res.extends_to_tail);    // nothing supports the infinite family
}

TEST_CASE("uniform diagonal dominance") {
  // Scaled 2x2 block with both row ratios exactly 0.9:
  // a~11 = 1, a~22 = 1, a~12 = 0.9 via c01 = 0.9/sqrt(3).
  AxialBlock c0 = hermitian_entry(TailIndex{0}, TailIndex{0}, Complex(1.0, 0.0));
  merge(c0, hermitian_entry(TailIndex{1}, TailIndex{1}, Complex(1.0 / 3.0, 0.0)));
  merge(c0, hermitian_entry(TailIndex{0}, TailIndex{1}, Complex(0.9 / std::sqrt(3.0), 0.0)));
  auto scheme = CoefficientScheme::axial(3, 1, {{0, c0}});

  auto fail = check_diag_dominance_spd(scheme, 0.8);
  CHECK(!fail.pass);
  CHECK(fail.worst_l1 == 0);
  CHECK(fail.worst_ratio.at(0) == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(fail.worst_row >= 1);

  auto pass = check_diag_dominance_spd(scheme, 0.95);
  CHECK(pass.pass);

  // Diagonal blocks pass for any sigma.
  AxialBlock diag;
  for (int l = 0; l <= 2; ++l) diag[{TailIndex{l}, TailIndex{l}}] = Complex(0.5, 0.0);
  auto dscheme = CoefficientScheme::axial(3, 2, {{0, diag}});
  CHECK(check_diag_dominance_spd(dscheme, 0.01).pass);

  CHECK_THROWS_AS(check_diag_dominance_spd(scheme, 1.5), std::domain_error);
  CHECK_THROWS_AS(check_diag_dominance_spd(scheme, 0.0), std::domain_error);
}

TEST_CASE("dominance implies the Gershgorin eigenvalue bound") {
  testutil::Rng rng(52);
  for (int trial = 0; trial < 10; ++trial) {
    const int L = 3;
    AxialBlock c;
    for (int l = 0; l <= L; ++l) {
      double nl = static_cast<double>(dim_harmonic_space(l, 3));
      c[{TailIndex{l}, TailIndex{l}}] = Complex((1.0 + rng.uniform()) / nl, 0.0);
      for (int lp = l + 1; lp <= L; ++lp) {
        double nlp = static_cast<double>(dim_harmonic_space(lp, 3));
        Complex off(0.1 * rng.gaussian() / std::sqrt(nl * nlp),
                    0.1 * rng.gaussian() / std::sqrt(nl * nlp));
        merge(c, hermitian_entry(TailIndex{l}, TailIndex{lp}, off));
      }
    }
    auto scheme = CoefficientScheme::axial(3, L, {{0, c}});
    double sigma = 0.9;
    auto dom = check_diag_dominance_spd(scheme, sigma);
    if (!dom.pass) continue;
    auto bm = build_block_matrix(scheme, 0, L + 1, true);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(bm.entries, Eigen::EigenvaluesOnly);
    double min_diag = std::numeric_limits<double>::infinity();
    for (int a = 0; a <= L; ++a) min_diag = std::min(min_diag, std::abs(bm.entries(a, a)));
    CHECK(es.eigenvalues()(0) >= (1.0 - sigma) * min_diag - 1e-10);
  }
}

TEST_CASE("axial necessity conditions") {
  // c_0 identically zero.
  AxialBlock zero;
  zero[{TailIndex{0}, TailIndex{0}}] = Complex(0.0, 0.0);
  AxialBlock c1 = hermitian_entry(TailIndex{1}, TailIndex{1}, Complex(1.0, 0.0));
  auto s1 = CoefficientScheme::axial(3, 1, {{0, zero}, {1, c1}, {-1, c1}});
  CHECK(check_axial_necessary(s1).status == NecessityStatus::C0Zero);

  // Finite support {-1, 0, 1} without a tail.
  AxialBlock c0 = hermitian_entry(TailIndex{0}, TailIndex{0}, Complex(1.0, 0.0));
  auto s2 = CoefficientScheme::axial(3, 1, {{0, c0}, {1, c1}, {-1, c1}});
  auto r2 = check_axial_necessary(s2);
  CHECK(r2.status == NecessityStatus::FiniteSupport);
  CHECK(r2.support == std::vector<int>{-1, 0, 1});

  // Full-support tail passes.
  auto s3 = CoefficientScheme::axial(3, 1, {{0, c0}}, TailDescriptor::power(3.0, 1.0));
  CHECK(check_axial_necessary(s3).status == NecessityStatus::Pass);

  // Tail restricted to finitely many longitudes still counts as finite.
  auto s4 = CoefficientScheme::axial(
      3, 1, {{0, c0}}, TailDescriptor::power_l1(3.0, 1.0, ParityMask::All, {-2, 0, 2}));
  auto r4 = check_axial_necessary(s4);
  CHECK(r4.status == NecessityStatus::FiniteSupport);
  CHECK(r4.support == std::vector<int>{-2, 0, 2});
}

TEST_CASE("convolutional criteria") {
  const int d = 3, L = 4;
  // Full positive diagonal with an all-parity tail: SPD.
  std::map<std::pair<int, int>, double> diag;
  for (int j = 0; j <= L; ++j)
    for (int k = 1; k <= dim_harmonic_space(j, d); ++k)
      diag[{j, k}] = std::pow(1.0 + j, -4.0);
  auto spd = CoefficientScheme::convolutional_diagonal(d, L, diag,
                                                       TailDescriptor::power(3.0, 1.0));
  auto r1 = check_convolutional(spd, 1e-10);
  CHECK(r1.pd_pass);
  CHECK(r1.verdict == Verdict::SpdCertified);

  // Even blocks only with an even tail: refuted by the antipodal pair.
  std::map<std::pair<int, int>, double> even;
  for (int j = 0; j <= L; j += 2)
    for (int k = 1; k <= dim_harmonic_space(j, d); ++k) even[{j, k}] = 1.0;
  auto even_only = CoefficientScheme::convolutional_diagonal(
      d, L, even, TailDescriptor::power(3.0, 1.0, ParityMask::Even));
  auto r2 = check_convolutional(even_only, 1e-10);
  CHECK(r2.pd_pass);
  CHECK(r2.verdict == Verdict::NotSpd);
  CHECK(r2.plan.kind == WitnessKind::AntipodalPair);
  CHECK(!r2.plan.symmetric_extension);  // lambda = (1, -1)

  // Odd-only: antipodal pair with the symmetric sign.
  std::map<std::pair<int, int>, double> odd;
  for (int j = 1; j <= L; j += 2)
    for (int k = 1; k <= dim_harmonic_space(j, d); ++k) odd[{j, k}] = 1.0;
  auto odd_only = CoefficientScheme::convolutional_diagonal(
      d, L, odd, TailDescriptor::power(3.0, 1.0, ParityMask::Odd));
  auto r3 = check_convolutional(odd_only, 1e-10);
  CHECK(r3.verdict == Verdict::NotSpd);
  CHECK(r3.plan.kind == WitnessKind::AntipodalPair);
  CHECK(r3.plan.symmetric_extension);

  // A PSD-but-singular block keeps PD while leaving the degree out of the
  // strict set; the tail still carries SPD.
  std::map<int, Eigen::MatrixXcd> blocks;
  for (int j = 0; j <= L; ++j) {
    auto n = dim_harmonic_space(j, d);
    blocks[j] = Eigen::MatrixXcd::Identity(n, n);
  }
  blocks[3](0, 0) = Complex(1.0, 0.0);
  for (Eigen::Index r = 1; r < blocks[3].rows(); ++r) blocks[3](r, r) = Complex(0.0, 0.0);
  auto psd = CoefficientScheme::convolutional(d, L, blocks, TailDescriptor::power(3.0, 1.0));
  auto r4 = check_convolutional(psd, 1e-10);
  CHECK(r4.pd_pass);
  CHECK(r4.verdict == Verdict::SpdCertified);

  // A negative entry refutes positive definiteness outright.
  auto negative = CoefficientScheme::convolutional_diagonal(
      d, 1, {{{0, 1}, 1.0}, {{1, 1}, -0.5}, {{1, 2}, 1.0}, {{1, 3}, 1.0}},
      TailDescriptor::power(3.0, 1.0));
  auto r5 = check_convolutional(negative, 1e-10);
  CHECK(!r5.pd_pass);
  CHECK(r5.verdict == Verdict::NotSpd);
  CHECK(r5.bad_degree == 1);
  CHECK(r5.bad_lambda == doctest::Approx(-0.5).epsilon(1e-12));

  // Finite support without any tail: a parity-kill plan over all stored
  // degrees.
  auto finite = CoefficientScheme::convolutional_diagonal(d, 1,
                                                          {{{0, 1}, 1.0}, {{1, 1}, 1.0}});
  auto r6 = check_convolutional(finite, 1e-10);
  CHECK(r6.verdict == Verdict::NotSpd);
  CHECK(r6.plan.kind == WitnessKind::ParityKill);

  // The circle is out of scope here.
  CHECK_THROWS_AS(
      check_convolutional(CoefficientScheme::isotropic(2, 0, {{0, 1.0}}), 1e-10),
      std::invalid_argument);
}

TEST_CASE("circle criteria") {
  // Everything positive with a full tail: SPD.
  std::map<int, double> all;
  for (int j = 0; j <= 6; ++j) all[j] = std::pow(1.0 + j, -6.0);
  auto spd = CoefficientScheme::isotropic(2, 6, all, TailDescriptor::power(6.0, 1.0));
  auto r1 = check_circle(spd, 1e-10, 10);
  CHECK(r1.verdict == Verdict::SpdCertified);

  // Even-only with an even tail: antipodal refutation.
  std::map<int, double> even;
  for (int j = 0; j <= 6; j += 2) even[j] = 1.0;
  auto even_only = CoefficientScheme::isotropic(
      2, 6, even, TailDescriptor::power(6.0, 1.0, ParityMask::Even));
  auto r2 = check_circle(even_only, 1e-10, 10);
  CHECK(r2.verdict == Verdict::NotSpd);
  CHECK(r2.plan.kind == WitnessKind::AntipodalPair);
  CHECK(!r2.plan.symmetric_extension);

  // Finite support without a tail always misses a progression.
  auto finite = CoefficientScheme::isotropic(2, 3, {{0, 1.0}, {1, 1.0}, {2, 1.0}, {3, 1.0}});
  auto r3 = check_circle(finite, 1e-10, 10);
  CHECK(r3.verdict == Verdict::NotSpd);
  CHECK(r3.plan.kind == WitnessKind::LongitudeMoments);
  CHECK(!r3.plan.l1_values.empty());
  CHECK(!r3.progression_report.empty());

  // A negative coefficient fails the PSD stage.
  auto neg = CoefficientScheme::isotropic(2, 2, {{0, 1.0}, {1, -1.0}},
                                          TailDescriptor::power(6.0, 1.0));
  auto r4 = check_circle(neg, 1e-10, 10);
  CHECK(!r4.pd_pass);
  CHECK(r4.verdict == Verdict::NotSpd);
  CHECK(r4.bad_degree == 1);

  CHECK_THROWS_AS(check_circle(CoefficientScheme::isotropic(3, 0, {{0, 1.0}}), 1e-10, 10),
                  std::invalid_argument);
}

TEST_CASE("certificates carry conditions and verdicts end to end") {
  // Isotropic SPD scheme on S^2.
  std::map<int, double> iso;
  for (int j = 0; j <= 4; ++j) iso[j] = std::pow(1.0 + j, -4.0);
  auto spd = CoefficientScheme::isotropic(3, 4, iso, TailDescriptor::power(3.0, 1.0));
  auto cert = certify(spd);
  CHECK(cert.verdict == Verdict::SpdCertified);
  bool saw_tail = false, saw_psd = false;
  for (const auto& c : cert.conditions) {
    if (c.name == "tail_strictness") {
      saw_tail = true;
      CHECK(c.status == CheckStatus::Pass);
    }
    if (c.name == "blocks_psd") {
      saw_psd = true;
      CHECK(c.status == CheckStatus::Pass);
    }
  }
  CHECK(saw_tail);
  CHECK(saw_psd);

  // Same scheme without the tail can only be PD, never SPD.
  auto no_tail = CoefficientScheme::isotropic(3, 4, iso);
  CHECK(certify(no_tail).verdict == Verdict::NotSpd);  // finite support refutes

  // Axial PD-only: PSD blocks, strict tail, but no dominance and a
  // singular scaled matrix.
  AxialBlock c0;
  for (int l = 0; l <= 4; ++l) c0[{TailIndex{l}, TailIndex{l}}] = Complex(1.0, 0.0);
  // entry c(0,2) = 1 makes the unscaled (0,2) submatrix [[1,1],[1,1]]
  // (PSD, singular); scaled it is [[1,sqrt(5)],[sqrt(5),5]], rank one, so
  // neither dominance nor the scaled-eigen bound can hold
  merge(c0, hermitian_entry(TailIndex{0}, TailIndex{2}, Complex(1.0, 0.0)));
  auto pd_only = CoefficientScheme::axial(3, 4, {{0, c0}}, TailDescriptor::power(3.0, 1.0));
  auto cert2 = certify(pd_only);
  CHECK(cert2.verdict == Verdict::PdCertified);

  // Axial with an indefinite block and a full tail: indeterminate, the
  // block test being sufficient only.
  AxialBlock ind = hermitian_entry(TailIndex{0}, TailIndex{1}, Complex(2.0, 0.0));
  merge(ind, hermitian_entry(TailIndex{0}, TailIndex{0}, Complex(1.0, 0.0)));
  merge(ind, hermitian_entry(TailIndex{1}, TailIndex{1}, Complex(1.0, 0.0)));
  auto indet = CoefficientScheme::axial(3, 1, {{0, ind}}, TailDescriptor::power(3.0, 1.0));
  CHECK(certify(indet).verdict == Verdict::Indeterminate);

  // Axial dominance-passing SPD.
  AxialBlock dom;
  for (int l = 0; l <= 4; ++l)
    dom[{TailIndex{l}, TailIndex{l}}] = Complex(std::pow(1.0 + l, -4.0), 0.0);
  auto spd_axial =
      CoefficientScheme::axial(3, 4, {{0, dom}}, TailDescriptor::power(3.0, 1.0));
  CHECK(certify(spd_axial).verdict == Verdict::SpdCertified);

  // Non-Hermitian scheme: indeterminate with the applicability note.
  auto nonh = CoefficientScheme::general(3, 1, {{GeneralKey{1, 1, 1, 1}, Complex(0.0, 1.0)}});
  auto cert3 = certify(nonh);
  CHECK(cert3.verdict == Verdict::Indeterminate);

  // General scheme that is convolutional in disguise routes through the
  // convolutional path.
  auto gen = CoefficientScheme::general(3, 1, {{GeneralKey{1, 1, 1, 1}, Complex(1.0, 0.0)}});
  auto cert4 = certify(gen);
  CHECK(cert4.verdict == Verdict::NotSpd);
  CHECK(cert4.witness_plan.kind == WitnessKind::ParityKill);
}
