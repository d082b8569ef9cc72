#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "khl/coefficients.hpp"
#include "khl/schur.hpp"

namespace khl {

/// One machine-checked inequality instance. `margin` is the room the
/// inequality has (rhs - lhs for upper bounds, measured slack for lower
/// bounds) and pass/fail tolerates -tol after scaling by
/// max(1, |lhs|, |rhs|).
struct DeficitReport {
  std::string claim_id;
  double lhs = 0.0;
  double rhs = 0.0;
  double deficit_term = 0.0;
  double margin = 0.0;
  double constant_used = 0.0;
  bool passed = false;
  std::map<std::string, double> detail;
};

/// One coordinate of the Gaussian-exchange walk: coordinates before `index`
/// have already been exchanged (their mass is Gaussian), `index` is the one
/// being exchanged now, the rest stay signs.
struct ExchangeSplit {
  CoefficientVector a;
  int index;
  double gaussian_mass;

  static ExchangeSplit at(const CoefficientVector& a, int index);
};

struct VerifyOptions {
  double tol = 1e-10;
  double quad_rel_tol = 1e-10;
};

/// E|S|^p <= E|G|^p - C_p sum a_i^4, with C_p quartered on the branch
/// a_1^2 > 1/2 (n >= 2; a single coefficient needs no deficit argument).
DeficitReport verify_gauss_stability(const CoefficientVector& a, double p,
                                     const VerifyOptions& opts = {});

/// E|S|^p <= E|S_n|^p - C_p sum (a_i^2 - 1/n)^2 for p > 3.
DeficitReport verify_diag_stability(const CoefficientVector& a, double p,
                                    const VerifyOptions& opts = {});

/// The p = 3 diagonal comparison with its square-root-weighted deficit.
DeficitReport verify_crit_stability(const CoefficientVector& a,
                                    const VerifyOptions& opts = {});

/// Moment monotonicity along the majorization order: x precedes y implies
/// the y-sum has the smaller p-th moment. Throws NotComparable when neither
/// direction holds; a pair comparable the other way is verified swapped.
DeficitReport verify_schur_monotonicity(const SquaresVector& x, const SquaresVector& y,
                                        double p, const VerifyOptions& opts = {});

/// Single Gaussian exchange: E|S + aG|^p - E|S + a eps|^p >= C_p a^4,
/// hypothesis a^2 <= 1/2.
DeficitReport verify_exchange_step(const ExchangeSplit& split, double p,
                                   const VerifyOptions& opts = {});

/// Single diagonalization move on (largest, smallest), compared against the
/// product lower bound (p > 3) or its square-root-weighted p = 3 variant.
DeficitReport verify_t_step(const CoefficientVector& a, double p,
                            const VerifyOptions& opts = {});

/// Runs the full diagonalization, accumulates per-step bounds, and checks
/// both the telescoping of the quartic sum and that the accumulated bound
/// stays below the exact moment gap. Fills deficit_bound per step when
/// `steps_out` is given.
DeficitReport verify_procedure_composition(const CoefficientVector& a, double p,
                                           const VerifyOptions& opts = {},
                                           std::vector<TTransformStep>* steps_out = nullptr);

/// E|S_{2n}|^p <= e^{p^2/(4n)} E|S_n|^p and E|G|^p <= e^{2p/n} E|S_n|^p.
DeficitReport verify_doubling(long n, double p, const VerifyOptions& opts = {});

/// E X^{p/2} <= (n/2)^{p/2} e^{p^2/(4n)} for X binomial(n, 1/2), exactly.
DeficitReport verify_binomial_moment(long n, double p, const VerifyOptions& opts = {});

/// Concentration of S' = sqrt(1-b^2) S + b G: P(|S'| <= 2) >= 1 - 2/e and
/// P(|S'| <= level) >= (3/16) level at level = max(largest coefficient,
/// probe), with level <= 1. The sign part is scaled by sqrt(1-b^2) so the
/// combined variance stays 1. The floor at the largest coefficient is
/// essential: below it no bound of this kind can hold (an odd diagonal sum
/// has zero mass inside (-1/sqrt(n), 1/sqrt(n))).
DeficitReport verify_concentration(const CoefficientVector& a, double gaussian_mass,
                                   const VerifyOptions& opts = {},
                                   std::optional<double> probe = std::nullopt);

/// Two-coefficient closed form: |sqrt(1/2+x)+sqrt(1/2-x)|^p +
/// |sqrt(1/2+x)-sqrt(1/2-x)|^p <= 2^{p/2} - C x^2 with C certified by a
/// grid sweep, plus the small-x Taylor coefficient check.
DeficitReport verify_n2_closed_form(double x, double p, const VerifyOptions& opts = {});

/// The grid-certified constant used by verify_n2_closed_form (cached per p).
double n2_deficit_constant(double p);

}  // namespace khl
