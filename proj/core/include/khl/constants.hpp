#pragma once

#include <map>
#include <string>

#include "khl/psi.hpp"

namespace khl {

/// Every explicit constant for a given exponent, with the intermediate
/// quantities that produced it. diag_C is absent (NaN) at p = 3 and crit_C is
/// present only at p = 3.
struct ConstantBundle {
  double p;
  double gauss_C;
  double diag_C;
  double crit_C;
  double doubling_C;
  PsiRegime branch;
  std::map<std::string, double> components;
};

/// Deficit constant of the Gaussian comparison, by exponent regime:
/// 2^{(4-p)/2} 3p(p-1)(p-2)(p-3)/128 for p >= 6 (times the Khintchine factor
/// for 4 < p < 6), exactly 2 at p = 4, and integral formulas on [3, 4).
double gauss_constant(double p);

/// int_1^inf t (t+1)^{-3/2} (2+sqrt(t))^{p-4} e^{-(t+1)/2} dt, 3 < p < 4.
/// Truncated at t = 80 where the tail is below e^{-40}.
double integral_34(double p);

/// int_1^inf t (t+1)^{-3/2} (t-1) t^{-3/2} e^{-(t+1)/2} dt, the p = 3 variant.
double integral_p3();

/// Optimal Khintchine constant between the second and (p-4)-th moment,
/// min{2^{(p-6)/2}, 2^{(p-4)/2} Gamma((p-3)/2)/sqrt(pi)}, for 4 < p < 6.
double haagerup_tilde(double p);

/// Lower bound on E|S|^{p-4} for the middle sum given the combined squared
/// mass a2 of the two moved coordinates (a2 <= 0.9): (1-a2)^{(p-4)/2}, times
/// haagerup_tilde for 4 < p < 6. Returns 1 for p <= 4 where no floor enters.
double diag_moment_floor(double p, double a2);

/// Deficit constant of the diagonal comparison for p > 3, including the
/// conservative division by 25 from advancing past the large-coefficient
/// branch: 2 c_p floor / 25 for p > 4, 8/25 at p = 4, and
/// 2 c_p (1-2/e)(2+sqrt 2)^{p-4}/25 on (3,4).
double diag_constant(double p, double moment_floor);

/// Deficit constant of the p = 3 diagonal comparison: 2^{-6} exactly.
double crit_constant();

/// Rate constant of the doubling argument: 2 p E|G|^p, for p >= 3.
double doubling_rate_constant(double p);

ConstantBundle constant_bundle(double p);

}  // namespace khl
