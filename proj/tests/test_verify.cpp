#include <cmath>
#include <random>

#include "doctest.h"
#include "khl/constants.hpp"
#include "khl/distribution.hpp"
#include "khl/errors.hpp"
#include "khl/explore.hpp"
#include "khl/sweep.hpp"
#include "khl/verify.hpp"
#include "oracles.hpp"

using namespace khl;

TEST_SUITE_BEGIN("verify");

TEST_CASE("gaussian stability is sharp at one coefficient, p = 4") {
  const auto r = verify_gauss_stability(CoefficientVector::diagonal(1), 4.0);
  CHECK(r.passed);
  CHECK(std::fabs(r.margin) <= 1e-10);
  CHECK(r.lhs == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(r.rhs == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.detail.at("quartered") == 0.0);  // nothing to prove at n = 1
}

TEST_CASE("gaussian stability examples") {
  const auto diag4 = verify_gauss_stability(CoefficientVector::diagonal(4), 3.0);
  CHECK(diag4.passed);
  CHECK(diag4.lhs == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(diag4.rhs ==
        doctest::Approx(gaussian_abs_moment(3.0) - gauss_constant(3.0) * 0.25).epsilon(1e-12));

  const auto spike = verify_gauss_stability(
      CoefficientVector::from_coefficients({1.0, 0.0, 0.0, 0.0, 0.0}), 5.0);
  CHECK(spike.passed);
  CHECK(spike.lhs == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(spike.margin > 0.0);
  CHECK(spike.detail.at("quartered") == 1.0);  // a_1^2 = 1 > 1/2 with n >= 2
}

TEST_CASE("quartering triggers strictly above one half") {
  const auto at_half = verify_gauss_stability(CoefficientVector::diagonal(2), 4.0);
  CHECK(at_half.detail.at("quartered") == 0.0);
  const auto above = verify_gauss_stability(
      CoefficientVector::from_squares({0.51, 0.49}), 4.0);
  CHECK(above.detail.at("quartered") == 1.0);
  CHECK(above.passed);
}

TEST_CASE("diagonal stability examples") {
  const auto diag = verify_diag_stability(CoefficientVector::diagonal(5), 4.5);
  CHECK(diag.passed);
  CHECK(std::fabs(diag.margin) <= 1e-10);  // extremizer: zero deficit, zero gap

  // E|S_2|^4 = 3 - 2*(1/2) = 2 by the quartic identity, so the certified
  // right side is 2 - 0.32 * 2 * (1/4)^2.
  const auto two = verify_diag_stability(CoefficientVector::from_squares({0.75, 0.25}), 4.0);
  CHECK(two.passed);
  CHECK(two.lhs == doctest::Approx(1.75).epsilon(1e-12));
  CHECK(two.rhs == doctest::Approx(2.0 - 0.32 * 2.0 * 0.0625).epsilon(1e-12));

  const auto three =
      verify_diag_stability(CoefficientVector::from_squares({0.5, 0.3, 0.2}), 3.5);
  CHECK(three.passed);
  CHECK_THROWS_AS(verify_diag_stability(CoefficientVector::diagonal(3), 3.0), DomainError);
}

TEST_CASE("diagonal stability large-coefficient branch") {
  const auto big = verify_diag_stability(CoefficientVector::from_squares({0.95, 0.03, 0.02}),
                                         5.0);
  CHECK(big.passed);
  CHECK(big.detail.at("capped_branch") == 1.0);
  CHECK(big.detail.at("cap_steps") >= 1.0);
  // The capped comparison vector must itself satisfy the plain branch.
  CHECK(big.detail.at("capped_moment") <= diagonal_moment(3, 5.0));
}

TEST_CASE("critical stability examples") {
  const auto diag = verify_crit_stability(CoefficientVector::diagonal(6));
  CHECK(diag.passed);
  CHECK(diag.deficit_term == 0.0);
  CHECK(std::fabs(diag.margin) <= 1e-10);

  const auto two = verify_crit_stability(CoefficientVector::from_squares({0.75, 0.25}));
  CHECK(two.passed);
  // Single nonzero term: sqrt((1/2)(0.75+0.25-0.5)) * 0.25 * 0.25, scaled by
  // C_3/(a_1^2 + 1/2).
  const double expected =
      crit_constant() / (0.75 + 0.5) * std::sqrt(0.5 * 0.5) * 0.25 * 0.25;
  CHECK(two.deficit_term == doctest::Approx(expected).epsilon(1e-12));

  const auto spike =
      verify_crit_stability(CoefficientVector::from_coefficients({1.0, 0.0, 0.0, 0.0}));
  CHECK(spike.passed);
  CHECK(spike.lhs == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(spike.margin > 0.0);
}

TEST_CASE("schur monotonicity") {
  const auto diag = SquaresVector::diagonal(4);
  const auto other = SquaresVector::from_values({0.4, 0.3, 0.2, 0.1});
  const auto r = verify_schur_monotonicity(diag, other, 3.0);
  CHECK(r.passed);  // the diagonal sum has the largest moment

  const auto pair = verify_schur_monotonicity(SquaresVector::diagonal(2),
                                              SquaresVector::from_values({1.0, 0.0}), 4.0);
  CHECK(pair.passed);
  CHECK(pair.lhs == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(pair.rhs == doctest::Approx(2.0).epsilon(1e-12));

  const auto same = verify_schur_monotonicity(diag, diag, 5.0);
  CHECK(same.passed);
  CHECK(std::fabs(same.margin) <= 1e-12);

  // Comparable the other way: verified after swapping.
  const auto swapped = verify_schur_monotonicity(other, diag, 3.0);
  CHECK(swapped.passed);
  CHECK(swapped.detail.at("swapped") == 1.0);

  CHECK_THROWS_AS(verify_schur_monotonicity(SquaresVector::from_values({0.6, 0.25, 0.15}),
                                            SquaresVector::from_values({0.5, 0.45, 0.05}),
                                            3.0),
                  NotComparable);
}

TEST_CASE("exchange split bookkeeping") {
  const auto a = CoefficientVector::from_squares({0.5, 0.3, 0.2});
  const auto split = ExchangeSplit::at(a, 1);
  CHECK(split.gaussian_mass == doctest::Approx(std::sqrt(0.5)).epsilon(1e-13));
  CHECK_THROWS_AS(ExchangeSplit::at(a, 3), IndexOutOfRange);
  // The hypothesis is inclusive at 1/2, so index 0 of this vector is fine;
  // a strictly larger top square is rejected.
  CHECK_NOTHROW(verify_exchange_step(ExchangeSplit::at(a, 0), 4.0));
  const auto spiky = CoefficientVector::from_squares({0.6, 0.4});
  CHECK_THROWS_AS(verify_exchange_step(ExchangeSplit::at(spiky, 0), 4.0),
                  HypothesisViolated);
}

TEST_CASE("exchange bound is sharp at the half-half split, p = 4") {
  const auto a = CoefficientVector::diagonal(2);
  const auto r = verify_exchange_step(ExchangeSplit::at(a, 1), 4.0);
  CHECK(r.passed);
  CHECK(std::fabs(r.margin) <= 1e-9);
  CHECK(r.lhs == doctest::Approx(0.5).epsilon(1e-9));   // 3 - 2.5
  CHECK(r.rhs == doctest::Approx(0.5).epsilon(1e-12));  // 2 * (1/2)^2
}

TEST_CASE("exchange examples") {
  // Zero coefficient: both sides vanish identically.
  const auto a = CoefficientVector::from_coefficients({1.0, 0.0});
  const auto r0 = verify_exchange_step(ExchangeSplit::at(a, 1), 3.0);
  CHECK(r0.passed);
  CHECK(r0.lhs == 0.0);
  CHECK(r0.rhs == 0.0);

  const auto b = CoefficientVector::from_squares({0.5, 0.3, 0.2});
  const auto r1 = verify_exchange_step(ExchangeSplit::at(b, 1), 3.0);
  CHECK(r1.passed);
  CHECK(r1.margin > 0.0);
}

TEST_CASE("single move bound") {
  const auto diag = verify_t_step(CoefficientVector::diagonal(4), 4.0);
  CHECK(diag.passed);
  CHECK(std::fabs(diag.lhs) <= 1e-12);
  CHECK(diag.rhs == 0.0);

  // p = 4: the move's exact gain is 4 (x - 1/n)(1/n - z) by the quartic
  // identity; the certified bound sits far below it.
  const auto a = CoefficientVector::from_squares({0.5, 0.3, 0.2});
  const auto r4 = verify_t_step(a, 4.0);
  CHECK(r4.passed);
  const double gaps = (0.5 - 1.0 / 3.0) * (1.0 / 3.0 - 0.2);
  CHECK(r4.lhs == doctest::Approx(4.0 * gaps).epsilon(1e-10));
  CHECK(r4.rhs == doctest::Approx(2.0 * 0.32 * gaps).epsilon(1e-12));

  const auto r3 = verify_t_step(a, 3.0);
  CHECK(r3.passed);
  const double expected_bound =
      crit_constant() * std::sqrt((1.0 / 3.0) * (0.7 - 1.0 / 3.0)) / 0.7 * gaps;
  CHECK(r3.rhs == doctest::Approx(expected_bound).epsilon(1e-12));
  CHECK(r3.detail.at("mu") == doctest::Approx((1.0 / 3.0) / 0.7).epsilon(1e-12));
  CHECK(r3.detail.at("mu0") == doctest::Approx(0.2 / 0.7).epsilon(1e-12));

  CHECK_THROWS_AS(verify_t_step(CoefficientVector::diagonal(2), 4.0), HypothesisViolated);
  CHECK_THROWS_AS(verify_t_step(CoefficientVector::from_squares({0.8, 0.1, 0.1}), 5.0),
                  HypothesisViolated);
}

TEST_CASE("composition telescopes the quartic drop") {
  const auto trivial = verify_procedure_composition(CoefficientVector::diagonal(5), 4.0);
  CHECK(trivial.passed);
  CHECK(trivial.detail.at("steps") == 0.0);
  CHECK(trivial.lhs == 0.0);

  std::vector<TTransformStep> steps;
  const auto a = CoefficientVector::from_squares({0.5, 0.3, 0.2});
  const auto r = verify_procedure_composition(a, 4.0, {}, &steps);
  CHECK(r.passed);
  CHECK(r.detail.at("telescoped_quartic_drop") ==
        doctest::Approx(0.38 - 1.0 / 3.0).epsilon(1e-10));
  CHECK(r.lhs <= r.rhs + 1e-9);
  REQUIRE(steps.size() == 2);
  for (const auto& s : steps) CHECK(s.deficit_bound >= 0.0);

  const auto r35 = verify_procedure_composition(
      CoefficientVector::from_squares({0.7, 0.2, 0.1}), 3.5);
  CHECK(r35.passed);
}

TEST_CASE("doubling claim and the gaussian limit bound") {
  const auto small = verify_doubling(1, 4.0);
  CHECK(small.passed);
  CHECK(small.lhs == doctest::Approx(2.0).epsilon(1e-12));  // E|S_2|^4 = 3 - 2*(1/2)

  const auto mid = verify_doubling(64, 3.0);
  CHECK(mid.passed);
  CHECK(mid.margin > 0.0);

  const auto big = verify_doubling(1024, 6.0);
  CHECK(big.passed);
  // E|G|^6 - E|S_n|^6 <= 2*6*15/n.
  CHECK(big.detail.at("gauss_moment") - big.detail.at("moment_n") <=
        doubling_rate_constant(6.0) / 1024.0);
}

TEST_CASE("binomial moment bound") {
  const auto one = verify_binomial_moment(1, 4.0);
  CHECK(one.passed);
  CHECK(one.lhs == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(one.rhs == doctest::Approx(0.25 * std::exp(4.0)).epsilon(1e-12));

  const auto two = verify_binomial_moment(2, 4.0);
  CHECK(two.passed);
  CHECK(two.lhs == doctest::Approx(1.5).epsilon(1e-13));

  CHECK(verify_binomial_moment(100, 3.0).passed);
  CHECK(verify_binomial_moment(4096, 6.0).passed);
}

TEST_CASE("concentration bounds") {
  const auto one = verify_concentration(CoefficientVector::diagonal(1), 0.0);
  CHECK(one.passed);
  CHECK(one.lhs == doctest::Approx(1.0).epsilon(1e-13));

  const auto nine = verify_concentration(CoefficientVector::diagonal(9), 0.0);
  CHECK(nine.passed);
  CHECK(nine.detail.at("prob_at_level") == doctest::Approx(0.4921875).epsilon(1e-12));
  CHECK(nine.detail.at("bound_at_level") == doctest::Approx(0.0625).epsilon(1e-12));

  const auto sixteen = verify_concentration(CoefficientVector::diagonal(16), 0.0);
  CHECK(sixteen.passed);
  CHECK(sixteen.detail.at("prob_within_two") >= 1.0 - 2.0 / M_E);

  const auto mixture = verify_concentration(CoefficientVector::diagonal(4), 0.7);
  CHECK(mixture.passed);
  CHECK(mixture.detail.at("gaussian_mass") == 0.7);

  CHECK_THROWS_AS(verify_concentration(CoefficientVector::diagonal(2), 1.5),
                  HypothesisViolated);
  CHECK_THROWS_AS(
      verify_concentration(CoefficientVector::diagonal(2), 0.0, {}, std::optional<double>(1.2)),
      HypothesisViolated);
}

TEST_CASE("concentration against enumeration") {
  for (long idx = 0; idx < 30; ++idx) {
    const auto a = sample_mixed(1 + static_cast<int>(idx % 9), 31, idx);
    const auto r = verify_concentration(a, 0.0);
    const double direct =
        oracle::interval_probability(a.coeffs(), r.detail.at("probe_level"));
    CHECK(r.detail.at("prob_at_level") == doctest::Approx(direct).epsilon(1e-11));
  }
}

TEST_CASE("two-coefficient closed form") {
  // p = 4 is polynomial: the gap is exactly 8 x^2, so the certified constant
  // is 0.9 * 8 up to the cancellation noise of the smallest grid points.
  CHECK(n2_deficit_constant(4.0) == doctest::Approx(7.2).epsilon(1e-6));

  const auto at_zero = verify_n2_closed_form(0.0, 4.0);
  CHECK(at_zero.passed);
  CHECK(at_zero.lhs == doctest::Approx(4.0).epsilon(1e-13));

  const auto at_end = verify_n2_closed_form(0.5, 4.0);
  CHECK(at_end.passed);
  CHECK(at_end.lhs == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(at_end.rhs == doctest::Approx(4.0 - 7.2 * 0.25).epsilon(1e-6));

  const auto taylor = verify_n2_closed_form(1e-3, 4.0);
  CHECK(taylor.passed);
  CHECK(taylor.detail.at("taylor_ratio") == doctest::Approx(8.0).epsilon(1e-4));

  CHECK(verify_n2_closed_form(0.25, 3.5).passed);
  CHECK(verify_n2_closed_form(0.25, 8.0).passed);
  CHECK_THROWS_AS(verify_n2_closed_form(0.6, 4.0), DomainError);
  CHECK_THROWS_AS(verify_n2_closed_form(0.1, 3.0), DomainError);
}

TEST_CASE("product identity behind the telescoping") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const double x = u(rng), y = u(rng), z = u(rng);
    const double lhs = 2.0 * (x - y) * (y - z);
    const double rhs = x * x + z * z - y * y - (x - y + z) * (x - y + z);
    const double scale = std::max({1.0, std::fabs(lhs), std::fabs(rhs)});
    CHECK(std::fabs(lhs - rhs) <= 1e-12 * scale);
  }
}

TEST_CASE("quartic deficit is monotone along the majorization order") {
  std::mt19937_64 rng(78);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 8);
    const auto upper = SquaresVector::from_coefficients(sample_mixed(n, 41, trial));
    const auto lower =
        t_transform(upper, 0, n - 1, std::uniform_real_distribution<double>(0.0, 1.0)(rng));
    double s_lower = 0.0, s_upper = 0.0;
    for (double v : lower.values()) s_lower += v * v;
    for (double v : upper.values()) s_upper += v * v;
    CHECK(s_lower <= s_upper + 1e-14);
  }
}

TEST_CASE("mini sweeps stay green") {
  for (double p : {3.0, 3.5, 4.0, 5.0, 8.0}) {
    for (const auto& row : run_sweep(VerifyClaim::kGauss, 150, 2024, 1, 12, p)) {
      CHECK(row.report.passed);
    }
    if (p > 3.0) {
      for (const auto& row : run_sweep(VerifyClaim::kDiag, 150, 2024, 1, 12, p)) {
        CHECK(row.report.passed);
      }
      for (const auto& row : run_sweep(VerifyClaim::kCompose, 60, 2024, 3, 10, p)) {
        CHECK(row.report.passed);
      }
    }
    for (const auto& row : run_sweep(VerifyClaim::kTStep, 60, 2024, 3, 10, p)) {
      CHECK(row.report.passed);
    }
    for (const auto& row : run_sweep(VerifyClaim::kExchange, 40, 2024, 2, 8, p)) {
      CHECK(row.report.passed);
    }
  }
  for (const auto& row : run_sweep(VerifyClaim::kCrit, 200, 2024, 2, 12, 3.0)) {
    CHECK(row.report.passed);
  }
  for (const auto& row : run_sweep(VerifyClaim::kSchur, 100, 2024, 2, 10, 3.0)) {
    CHECK(row.report.passed);
  }
  for (const auto& row : run_sweep(VerifyClaim::kConc, 60, 2024, 1, 16, 3.0)) {
    CHECK(row.report.passed);
  }
  for (const auto& row : run_sweep(VerifyClaim::kN2, 50, 2024, 2, 2, 4.5)) {
    CHECK(row.report.passed);
  }
  for (const auto& row : run_sweep(VerifyClaim::kDoubling, 13, 2024, 1, 1, 3.0)) {
    CHECK(row.report.passed);
  }
  for (const auto& row : run_sweep(VerifyClaim::kBinom, 13, 2024, 1, 1, 4.0)) {
    CHECK(row.report.passed);
  }
}

TEST_SUITE_END();
