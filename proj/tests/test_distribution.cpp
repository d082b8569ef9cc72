#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "khl/distribution.hpp"
#include "khl/errors.hpp"
#include "khl/explore.hpp"
#include "oracles.hpp"

using namespace khl;

namespace {

const double kSqrtHalf = std::sqrt(0.5);

std::vector<double> random_coeffs(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(0.01, 1.0);
  std::vector<double> c(static_cast<size_t>(n));
  for (double& x : c) x = u(rng);
  return c;
}

}  // namespace

TEST_SUITE_BEGIN("distribution");

TEST_CASE("single coefficient gives the two-point law") {
  const auto d = build_distribution(CoefficientVector::from_coefficients({1.0}));
  REQUIRE(d.size() == 1);
  CHECK(d.atoms()[0].value == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(d.atoms()[0].weight == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("two equal coefficients collapse the middle atom") {
  const auto d = build_distribution(CoefficientVector::from_coefficients({kSqrtHalf, kSqrtHalf}));
  REQUIRE(d.size() == 2);
  CHECK(d.atoms()[0].value == 0.0);
  CHECK(d.atoms()[0].weight == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(d.atoms()[1].value == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  CHECK(d.atoms()[1].weight == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("three-term vector against enumeration") {
  const std::vector<double> a{std::sqrt(0.5), std::sqrt(0.3), std::sqrt(0.2)};
  const auto d = build_distribution(CoefficientVector::from_coefficients(a));
  CHECK(d.size() == 4);  // four positive atoms, no mass at zero
  CHECK(d.zero_weight() == 0.0);
  CHECK(d.total_mass() == doctest::Approx(1.0).epsilon(1e-13));
  for (double p : {3.0, 4.0, 5.5}) {
    CHECK(absolute_moment(d, p) == doctest::Approx(oracle::moment(a, p)).epsilon(1e-12));
  }
}

TEST_CASE("absolute moment examples") {
  const auto one = build_distribution(CoefficientVector::from_coefficients({1.0}));
  CHECK(absolute_moment(one, 7.3) == doctest::Approx(1.0).epsilon(1e-14));

  const auto two = build_distribution(CoefficientVector::diagonal(2));
  CHECK(absolute_moment(two, 4.0) == doctest::Approx(2.0).epsilon(1e-12));

  const auto four = build_distribution(CoefficientVector::diagonal(4));
  CHECK(absolute_moment(four, 3.0) == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(oracle::moment({0.5, 0.5, 0.5, 0.5}, 3.0) == doctest::Approx(1.5).epsilon(1e-13));
}

TEST_CASE("p = 0 counts the complement of the zero atom") {
  const auto two = build_distribution(CoefficientVector::diagonal(2));
  CHECK(absolute_moment(two, 0.0) == doctest::Approx(0.5).epsilon(1e-14));
  const auto one = build_distribution(CoefficientVector::from_coefficients({1.0}));
  CHECK(absolute_moment(one, 0.0) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("moment query validation") {
  CHECK_THROWS_AS(MomentQuery(-1.0), DomainError);
  CHECK_THROWS_AS(MomentQuery(65.0), DomainError);
  CHECK_NOTHROW(MomentQuery(65.0, MomentMode::kLogSpace));
  const auto one = build_distribution(CoefficientVector::from_coefficients({1.0}));
  CHECK(absolute_moment(one, MomentQuery(70.0, MomentMode::kLogSpace)) ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("log-space mode matches the standard path") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = CoefficientVector::from_coefficients(random_coeffs(rng, 8));
    const auto d = build_distribution(a);
    for (double p : {3.0, 4.5, 8.0}) {
      const double std_path = absolute_moment(d, MomentQuery(p));
      const double log_path = absolute_moment(d, MomentQuery(p, MomentMode::kLogSpace));
      CHECK(log_path == doctest::Approx(std_path).epsilon(1e-12));
    }
  }
}

TEST_CASE("dimension cap") {
  CHECK_THROWS_AS(build_distribution(CoefficientVector::diagonal(31)), DimensionTooLarge);
  CHECK_NOTHROW(build_distribution(CoefficientVector::diagonal(30)));
}

TEST_CASE("coefficient validation") {
  CHECK_THROWS_AS(CoefficientVector::from_coefficients({}), InvalidCoefficients);
  CHECK_THROWS_AS(CoefficientVector::from_coefficients({0.0, 0.0}), InvalidCoefficients);
  CHECK_THROWS_AS(CoefficientVector::from_squares({-0.5, 1.5}), InvalidCoefficients);
  // Signs are irrelevant for the law of S.
  const auto a = CoefficientVector::from_coefficients({-3.0, 4.0});
  CHECK(a[0] == doctest::Approx(0.8).epsilon(1e-14));
  CHECK(a[1] == doctest::Approx(0.6).epsilon(1e-14));
}

TEST_CASE("mass conservation and permutation invariance") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> c = random_coeffs(rng, 1 + static_cast<int>(rng() % 12));
    const auto d1 = build_distribution(CoefficientVector::from_coefficients(c));
    CHECK(std::fabs(d1.total_mass() - 1.0) <= 1e-12);
    std::shuffle(c.begin(), c.end(), rng);
    const auto d2 = build_distribution(CoefficientVector::from_coefficients(c));
    REQUIRE(d1.size() == d2.size());
    for (int i = 0; i < d1.size(); ++i) {
      CHECK(d1.atoms()[static_cast<size_t>(i)].value ==
            doctest::Approx(d2.atoms()[static_cast<size_t>(i)].value).epsilon(1e-12));
      CHECK(d1.atoms()[static_cast<size_t>(i)].weight ==
            doctest::Approx(d2.atoms()[static_cast<size_t>(i)].weight).epsilon(1e-12));
    }
  }
}

TEST_CASE("second and fourth moment identities") {
  for (long idx = 0; idx < 100; ++idx) {
    const auto a = sample_mixed(1 + static_cast<int>(idx % 12), 99, idx);
    const auto d = build_distribution(a);
    CHECK(absolute_moment(d, 2.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(absolute_moment(d, 4.0) ==
          doctest::Approx(3.0 - 2.0 * a.sum_fourth()).epsilon(1e-10));
  }
}

TEST_CASE("lyapunov monotonicity of the moment root") {
  for (long idx = 0; idx < 20; ++idx) {
    const auto d = build_distribution(sample_mixed(1 + static_cast<int>(idx % 9), 5, idx));
    double prev = 0.0;
    for (double p : {0.5, 1.0, 2.0, 3.0, 4.0, 6.0, 9.0}) {
      const double root = std::pow(absolute_moment(d, p), 1.0 / p);
      CHECK(root >= prev - 1e-12);
      prev = root;
    }
  }
}

TEST_CASE("diagonal moment formula") {
  CHECK(diagonal_moment(1, 3.7) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(diagonal_moment(2, 3.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-13));
  CHECK(diagonal_moment(4, 4.0) == doctest::Approx(2.5).epsilon(1e-13));
  for (int n = 1; n <= 20; ++n) {
    const auto d = build_distribution(CoefficientVector::diagonal(n));
    for (double p : {3.0, 4.0, 5.5, 8.0}) {
      CHECK(diagonal_moment(n, p) == doctest::Approx(absolute_moment(d, p)).epsilon(1e-12));
    }
  }
}

TEST_CASE("diagonal moment crossover to log-space is seamless") {
  // The exact-binomial path ends at n = 50; compare a neighborhood computed
  // both ways through the Gaussian limit ordering instead of bit equality.
  const double below = diagonal_moment(50, 5.0);
  const double above = diagonal_moment(51, 5.0);
  const double above2 = diagonal_moment(52, 5.0);
  CHECK(above > below);      // increasing toward E|G|^p
  CHECK(above2 > above);
  CHECK(above - below < 0.01);
}

TEST_CASE("gaussian absolute moments") {
  CHECK(gaussian_abs_moment(2.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(gaussian_abs_moment(4.0) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(gaussian_abs_moment(3.0) ==
        doctest::Approx(2.0 * std::sqrt(2.0 / M_PI)).epsilon(1e-13));
  CHECK(gaussian_abs_moment(3.0) ==
        doctest::Approx(oracle::shifted_moment(0.0, 1.0, 3.0)).epsilon(1e-11));
  CHECK(gaussian_abs_moment(6.0) == doctest::Approx(15.0).epsilon(1e-13));
}

TEST_CASE("mixed moment reduces to the pure cases") {
  const auto zero = SymmetricAtomicDistribution::point_mass_zero();
  CHECK(mixed_abs_moment(zero, 1.0, 4.0) == doctest::Approx(3.0).epsilon(1e-10));

  const auto one = build_distribution(CoefficientVector::from_coefficients({1.0}));
  CHECK(mixed_abs_moment(one, 1.0, 2.0) == doctest::Approx(2.0).epsilon(1e-10));

  // b = 0 must be the exact same code path as absolute_moment.
  const auto d = build_distribution(CoefficientVector::diagonal(3));
  CHECK(mixed_abs_moment(d, 0.0, 3.3) == absolute_moment(d, 3.3));
}

TEST_CASE("mixed moment quartic example") {
  const auto half = distribution_of_signs({kSqrtHalf});
  CHECK(mixed_abs_moment(half, kSqrtHalf, 4.0) == doctest::Approx(2.5).epsilon(1e-10));
}

TEST_CASE("mixed moment closed forms at p = 2 and 4") {
  for (long idx = 0; idx < 12; ++idx) {
    const auto a = sample_mixed(1 + static_cast<int>(idx % 6), 17, idx);
    const auto d = build_distribution(a);
    for (double b : {0.05, 0.4, 1.0}) {
      const double m2 = mixed_abs_moment(d, b, 2.0);
      CHECK(m2 == doctest::Approx(1.0 + b * b).epsilon(1e-9));
      const double s4 = absolute_moment(d, 4.0);
      const double m4 = mixed_abs_moment(d, b, 4.0);
      CHECK(m4 == doctest::Approx(s4 + 6.0 * b * b + 3.0 * b * b * b * b).epsilon(1e-9));
    }
  }
}

TEST_CASE("mixed moment against quadrature oracle at kinked exponents") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 8; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 4);
    const std::vector<double> c = random_coeffs(rng, n);
    double norm = 0.0;
    for (double x : c) norm += x * x;
    std::vector<double> scaled = c;
    for (double& x : scaled) x /= std::sqrt(norm);
    const auto d = build_distribution(CoefficientVector::from_coefficients(scaled));
    for (double p : {3.0, 3.5, 5.5}) {
      for (double b : {0.1, 0.7}) {
        CHECK(mixed_abs_moment(d, b, p) ==
              doctest::Approx(oracle::mixed_moment(scaled, b, p)).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("interval probability") {
  const auto two = build_distribution(CoefficientVector::diagonal(2));
  CHECK(interval_probability(two, 10.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(interval_probability(two, 0.0) == doctest::Approx(0.5).epsilon(1e-14));

  // Enumeration gives 0.375 at level 1/2 and 0.875 at level 1 for the
  // four-term half-coefficient vector.
  const std::vector<double> halves{0.5, 0.5, 0.5, 0.5};
  const auto four = build_distribution(CoefficientVector::from_coefficients(halves));
  CHECK(oracle::interval_probability(halves, 0.5) == doctest::Approx(0.375));
  CHECK(interval_probability(four, 0.5) == doctest::Approx(0.375).epsilon(1e-13));
  CHECK(interval_probability(four, 1.0) == doctest::Approx(0.875).epsilon(1e-13));

  const auto nine = build_distribution(CoefficientVector::diagonal(9));
  CHECK(interval_probability(nine, 1.0 / 3.0) ==
        doctest::Approx(0.4921875).epsilon(1e-13));
}

TEST_CASE("gaussian interval probability mixes the CDF per atom") {
  const auto d = build_distribution(CoefficientVector::diagonal(2));
  CHECK(gaussian_interval_probability(d, 0.0, 0.5) == interval_probability(d, 0.5));
  // Pure Gaussian: P(|G| <= 1).
  const auto zero = SymmetricAtomicDistribution::point_mass_zero();
  CHECK(gaussian_interval_probability(zero, 1.0, 1.0) ==
        doctest::Approx(std::erf(1.0 / std::sqrt(2.0))).epsilon(1e-13));
}

TEST_CASE("add_rademacher is one convolution step") {
  const auto base = distribution_of_signs({0.6, 0.3});
  const auto stepped = add_rademacher(base, std::sqrt(1.0 - 0.45));
  const auto direct = distribution_of_signs({0.6, 0.3, std::sqrt(1.0 - 0.45)});
  REQUIRE(stepped.size() == direct.size());
  for (int i = 0; i < stepped.size(); ++i) {
    CHECK(stepped.atoms()[static_cast<size_t>(i)].value ==
          doctest::Approx(direct.atoms()[static_cast<size_t>(i)].value).epsilon(1e-12));
    CHECK(stepped.atoms()[static_cast<size_t>(i)].weight ==
          doctest::Approx(direct.atoms()[static_cast<size_t>(i)].weight).epsilon(1e-12));
  }
  CHECK(add_rademacher(base, 0.0).size() == base.size());
}

TEST_SUITE_END();
