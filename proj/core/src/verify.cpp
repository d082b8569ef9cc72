#include "khl/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>

#include "khl/constants.hpp"
#include "khl/detail/accumulate.hpp"
#include "khl/distribution.hpp"
#include "khl/errors.hpp"
#include "khl/psi.hpp"

namespace khl {

namespace {

double scale_of(double a, double b) {
  return std::max({1.0, std::fabs(a), std::fabs(b)});
}

// Upper-bound claim lhs <= rhs.
DeficitReport report_leq(std::string claim, double lhs, double rhs, double tol) {
  DeficitReport r;
  r.claim_id = std::move(claim);
  r.lhs = lhs;
  r.rhs = rhs;
  r.margin = rhs - lhs;
  r.passed = r.margin >= -tol * scale_of(lhs, rhs);
  return r;
}

// Lower-bound claim lhs >= rhs; margin is the slack.
DeficitReport report_geq(std::string claim, double lhs, double rhs, double tol) {
  DeficitReport r;
  r.claim_id = std::move(claim);
  r.lhs = lhs;
  r.rhs = rhs;
  r.margin = lhs - rhs;
  r.passed = r.margin >= -tol * scale_of(lhs, rhs);
  return r;
}

double positive_part(double x) { return std::max(x, 0.0); }

// Floor on E|S|^{p-4} along the whole diagonalization of `a`: the largest
// coefficient never grows and the smallest stays below 1/n, so the combined
// mass of any moved pair is at most a_1^2 + 1/n (capped at 0.9, the
// hypothesis boundary).
double procedure_moment_floor(const CoefficientVector& a, double p) {
  if (p <= 4.0) return 1.0;
  const double a2 = std::min(a.largest() * a.largest() + 1.0 / a.size(), 0.9);
  return diag_moment_floor(p, a2);
}

void require_tstep_hypothesis(const CoefficientVector& a, double p) {
  const int n = a.size();
  if (n < 3) throw HypothesisViolated("single-move bound needs n >= 3");
  if (p > 4.0) {
    const double limit = 0.9 - 1.0 / n;
    if (a.largest() * a.largest() > limit + 1e-12) {
      throw HypothesisViolated("p > 4 single-move bound needs a_1^2 <= 0.9 - 1/n");
    }
  }
}

}  // namespace

ExchangeSplit ExchangeSplit::at(const CoefficientVector& a, int index) {
  if (index < 0 || index >= a.size()) {
    throw IndexOutOfRange("exchange index out of range");
  }
  detail::KahanSum prefix;
  for (int j = 0; j < index; ++j) prefix.add(a[j] * a[j]);
  return ExchangeSplit{a, index, std::sqrt(positive_part(prefix.value()))};
}

DeficitReport verify_gauss_stability(const CoefficientVector& a, double p,
                                     const VerifyOptions& opts) {
  if (p < 3.0) throw DomainError("gaussian stability needs p >= 3");
  const double lhs = absolute_moment(build_distribution(a), p);
  const double a1_sq = a.largest() * a.largest();
  const bool quartered = a.size() >= 2 && a1_sq > 0.5 + 1e-12;
  const double constant = gauss_constant(p) / (quartered ? 4.0 : 1.0);
  const double sum4 = a.sum_fourth();
  const double deficit = constant * sum4;
  const double rhs = gaussian_abs_moment(p) - deficit;

  DeficitReport r = report_leq("thm_gauss", lhs, rhs, opts.tol);
  r.deficit_term = deficit;
  r.constant_used = constant;
  r.detail["n"] = a.size();
  r.detail["p"] = p;
  r.detail["sum_a4"] = sum4;
  r.detail["gauss_moment"] = gaussian_abs_moment(p);
  r.detail["quartered"] = quartered ? 1.0 : 0.0;
  return r;
}

DeficitReport verify_diag_stability(const CoefficientVector& a, double p,
                                    const VerifyOptions& opts) {
  if (!(p > 3.0)) throw DomainError("diagonal stability needs p > 3");
  const int n = a.size();
  const double lhs = absolute_moment(build_distribution(a), p);
  const double diag = diagonal_moment(n, p);
  const double a1_sq = a.largest() * a.largest();
  const double branch_limit = 0.9 - 1.0 / n;
  const bool capped_branch = n >= 3 && a1_sq > branch_limit;

  // The moment floor is evaluated at the largest combined pair mass seen
  // along the diagonalization; on the large-coefficient branch the walk
  // starts from the capped vector, whose top entry is the branch limit.
  const double pair_mass = std::min((capped_branch ? branch_limit : a1_sq) + 1.0 / n, 0.9);
  const double floor = p > 4.0 ? diag_moment_floor(p, pair_mass) : 1.0;
  const double constant = diag_constant(p, floor);
  const double deficit = constant * a.diagonal_deficit();
  const double rhs = diag - deficit;

  DeficitReport r = report_leq("thm_diag", lhs, rhs, opts.tol);
  r.deficit_term = deficit;
  r.constant_used = constant;
  r.detail["n"] = n;
  r.detail["p"] = p;
  r.detail["diag_moment"] = diag;
  r.detail["deficit_sum"] = a.diagonal_deficit();
  r.detail["moment_floor"] = floor;
  r.detail["capped_branch"] = capped_branch ? 1.0 : 0.0;
  if (capped_branch) {
    // Record the capped comparison route as well: cap, then compare.
    const auto steps = cap_largest(SquaresVector::from_coefficients(a), branch_limit);
    const CoefficientVector capped = steps.empty()
                                         ? a
                                         : steps.back().after.to_coefficients();
    r.detail["capped_moment"] = absolute_moment(build_distribution(capped), p);
    r.detail["capped_deficit_sum"] = capped.diagonal_deficit();
    r.detail["cap_steps"] = static_cast<double>(steps.size());
  }
  return r;
}

DeficitReport verify_crit_stability(const CoefficientVector& a, const VerifyOptions& opts) {
  const int n = a.size();
  const double lhs = absolute_moment(build_distribution(a), 3.0);
  const double diag = diagonal_moment(n, 3.0);
  const double inv_n = 1.0 / n;
  const auto& c = a.coeffs();
  const double an_sq = c.back() * c.back();
  const double a1_sq = c.front() * c.front();

  detail::KahanSum deficit_sum;
  for (int i = 0; i < n; ++i) {
    const double up = positive_part(c[static_cast<size_t>(i)] * c[static_cast<size_t>(i)] -
                                    inv_n);
    const double down = positive_part(inv_n - c[static_cast<size_t>(n - 1 - i)] *
                                                  c[static_cast<size_t>(n - 1 - i)]);
    if (up <= 0.0 || down <= 0.0) continue;
    const double radicand = inv_n * (c[static_cast<size_t>(i)] * c[static_cast<size_t>(i)] +
                                     an_sq - inv_n);
    deficit_sum.add(std::sqrt(positive_part(radicand)) * up * down);
  }
  const double constant = crit_constant();
  const double deficit = constant / (a1_sq + inv_n) * deficit_sum.value();
  const double rhs = diag - deficit;

  DeficitReport r = report_leq("thm_crit", lhs, rhs, opts.tol);
  r.deficit_term = deficit;
  r.constant_used = constant;
  r.detail["n"] = n;
  r.detail["p"] = 3.0;
  r.detail["diag_moment"] = diag;
  return r;
}

DeficitReport verify_schur_monotonicity(const SquaresVector& x, const SquaresVector& y,
                                        double p, const VerifyOptions& opts) {
  if (p < 3.0) throw DomainError("schur monotonicity needs p >= 3");
  if (std::max(x.size(), y.size()) > 20) {
    throw DimensionTooLarge("schur monotonicity supports n <= 20");
  }
  const SquaresVector* lo = &x;  // majorized vector: larger moment
  const SquaresVector* hi = &y;
  bool swapped = false;
  if (!majorizes(*lo, *hi)) {
    if (!majorizes(*hi, *lo)) {
      throw NotComparable("vectors are not comparable in the Schur order");
    }
    std::swap(lo, hi);
    swapped = true;
  }
  const double moment_hi = absolute_moment(build_distribution(hi->to_coefficients()), p);
  const double moment_lo = absolute_moment(build_distribution(lo->to_coefficients()), p);

  DeficitReport r = report_leq("prop_schur", moment_hi, moment_lo, opts.tol);
  r.detail["p"] = p;
  r.detail["swapped"] = swapped ? 1.0 : 0.0;
  return r;
}

DeficitReport verify_exchange_step(const ExchangeSplit& split, double p,
                                   const VerifyOptions& opts) {
  if (p < 3.0) throw DomainError("exchange bound needs p >= 3");
  const int i = split.index;
  if (i < 0 || i >= split.a.size()) throw IndexOutOfRange("exchange index out of range");
  const double ai = split.a[i];
  if (ai * ai > 0.5 + 1e-12) {
    throw HypothesisViolated("exchange bound needs a_i^2 <= 1/2");
  }
  const double b = split.gaussian_mass;

  std::vector<double> rest(split.a.coeffs().begin() + i + 1, split.a.coeffs().end());
  if (static_cast<int>(rest.size()) > 20) {
    throw DimensionTooLarge("exchange bound supports at most 20 remaining signs");
  }
  const SymmetricAtomicDistribution sign_part = distribution_of_signs(rest);

  const MixedMomentOptions mopts{opts.quad_rel_tol};
  const double with_gaussian =
      mixed_abs_moment(sign_part, std::sqrt(b * b + ai * ai), p, mopts);
  const double with_sign =
      mixed_abs_moment(add_rademacher(sign_part, ai), b, p, mopts);
  const double difference = with_gaussian - with_sign;
  const double bound = gauss_constant(p) * ai * ai * ai * ai;

  DeficitReport r = report_geq("lem_exchange", difference, bound, opts.tol);
  r.deficit_term = bound;
  r.constant_used = gauss_constant(p);
  r.detail["p"] = p;
  r.detail["index"] = i;
  r.detail["a_i"] = ai;
  r.detail["gaussian_mass"] = b;
  r.detail["moment_with_gaussian"] = with_gaussian;
  r.detail["moment_with_sign"] = with_sign;
  return r;
}

DeficitReport verify_t_step(const CoefficientVector& a, double p, const VerifyOptions& opts) {
  if (p < 3.0) throw DomainError("single-move bound needs p >= 3");
  require_tstep_hypothesis(a, p);
  const int n = a.size();
  const double y = 1.0 / n;
  const auto squares = a.squares();
  const double x = squares.front();
  const double z = squares.back();
  const double a2 = x + z;

  std::vector<double> moved = squares;
  moved.front() = x + z - y;
  moved.back() = y;
  const CoefficientVector after = CoefficientVector::from_squares(moved);

  const double before_m = absolute_moment(build_distribution(a), p);
  const double after_m = absolute_moment(build_distribution(after), p);
  const double difference = after_m - before_m;

  const double gaps = positive_part(x - y) * positive_part(y - z);
  double bound, constant;
  if (p == 3.0) {
    constant = crit_constant();
    bound = constant * std::sqrt(positive_part(y * (a2 - y))) / a2 * gaps;
  } else {
    constant = diag_constant(p, p > 4.0 ? diag_moment_floor(p, std::min(a2, 0.9)) : 1.0);
    bound = 2.0 * constant * gaps;
  }

  DeficitReport r = report_geq("lem_tstep", difference, bound, opts.tol);
  r.deficit_term = bound;
  r.constant_used = constant;
  r.detail["n"] = n;
  r.detail["p"] = p;
  r.detail["a2"] = a2;
  r.detail["mu"] = y / a2;
  r.detail["mu0"] = z / a2;
  r.detail["x_largest_sq"] = x;
  r.detail["z_smallest_sq"] = z;
  return r;
}

DeficitReport verify_procedure_composition(const CoefficientVector& a, double p,
                                           const VerifyOptions& /*opts*/,
                                           std::vector<TTransformStep>* steps_out) {
  if (!(p > 3.0)) throw DomainError("composition needs p > 3");
  const int n = a.size();
  if (n >= 3) require_tstep_hypothesis(a, p);
  const double y = 1.0 / n;

  auto steps = diagonalize(SquaresVector::from_coefficients(a));
  const double constant = diag_constant(p, procedure_moment_floor(a, p));

  detail::KahanSum accumulated;
  detail::KahanSum telescoped;  // per-step drop of sum a_i^4, via 2(x-y)(y-z)
  for (TTransformStep& step : steps) {
    const double x = step.before.values().front();
    const double z = step.before.values().back();
    const double drop = 2.0 * (x - y) * (y - z);
    telescoped.add(drop);
    step.deficit_bound = constant * positive_part(drop);
    accumulated.add(step.deficit_bound);
  }

  const double exact_gap =
      diagonal_moment(n, p) - absolute_moment(build_distribution(a), p);
  const double telescope_target = a.sum_fourth() - y;

  DeficitReport r;
  r.claim_id = "compose";
  r.lhs = accumulated.value();
  r.rhs = exact_gap;
  r.margin = exact_gap - accumulated.value();
  r.deficit_term = accumulated.value();
  r.constant_used = constant;
  const bool bound_ok = r.margin >= -1e-9 * scale_of(r.lhs, r.rhs);
  const bool telescope_ok = std::fabs(telescoped.value() - telescope_target) <= 1e-10;
  r.passed = bound_ok && telescope_ok;
  r.detail["n"] = n;
  r.detail["p"] = p;
  r.detail["steps"] = static_cast<double>(steps.size());
  r.detail["telescoped_quartic_drop"] = telescoped.value();
  r.detail["quartic_drop_target"] = telescope_target;
  r.detail["telescope_ok"] = telescope_ok ? 1.0 : 0.0;
  if (steps_out != nullptr) *steps_out = std::move(steps);
  return r;
}

DeficitReport verify_doubling(long n, double p, const VerifyOptions& opts) {
  if (n < 1) throw DomainError("doubling needs n >= 1");
  if (p < 3.0) throw DomainError("doubling needs p >= 3");
  const double dn = static_cast<double>(n);
  const double m_n = diagonal_moment(n, p);
  const double m_2n = diagonal_moment(2 * n, p);
  const double gauss = gaussian_abs_moment(p);

  const double rhs_claim = std::exp(p * p / (4.0 * dn)) * m_n;
  const double rhs_limit = std::exp(2.0 * p / dn) * m_n;

  const double margin1 = (rhs_claim - m_2n) / scale_of(m_2n, rhs_claim);
  const double margin2 = (rhs_limit - gauss) / scale_of(gauss, rhs_limit);

  DeficitReport r;
  r.claim_id = "prop_doubling";
  r.lhs = m_2n;
  r.rhs = rhs_claim;
  r.margin = std::min(rhs_claim - m_2n, rhs_limit - gauss);
  r.passed = margin1 >= -opts.tol && margin2 >= -opts.tol;
  r.detail["n"] = dn;
  r.detail["p"] = p;
  r.detail["moment_n"] = m_n;
  r.detail["moment_2n"] = m_2n;
  r.detail["gauss_moment"] = gauss;
  r.detail["gauss_bound"] = rhs_limit;
  return r;
}

DeficitReport verify_binomial_moment(long n, double p, const VerifyOptions& opts) {
  if (n < 1) throw DomainError("binomial moment needs n >= 1");
  if (p < 3.0) throw DomainError("binomial moment needs p >= 3");

  const double half_p = 0.5 * p;
  double moment;
  if (n <= 50) {
    unsigned long long binom = 1;
    detail::KahanSum s;
    for (long k = 0; k <= n; ++k) {
      if (k > 0) {
        s.add(static_cast<double>(binom) * std::pow(static_cast<double>(k), half_p));
      }
      if (k < n) binom = binom * static_cast<unsigned long long>(n - k) /
                         static_cast<unsigned long long>(k + 1);
    }
    moment = s.value() * std::exp2(-static_cast<double>(n));
  } else {
    const double log2n = static_cast<double>(n) * M_LN2;
    double max_log = -std::numeric_limits<double>::infinity();
    auto log_term = [&](long k) {
      return std::lgamma(static_cast<double>(n + 1)) - std::lgamma(static_cast<double>(k + 1)) -
             std::lgamma(static_cast<double>(n - k + 1)) - log2n +
             half_p * std::log(static_cast<double>(k));
    };
    for (long k = 1; k <= n; ++k) max_log = std::max(max_log, log_term(k));
    detail::KahanSum s;
    for (long k = 1; k <= n; ++k) s.add(std::exp(log_term(k) - max_log));
    moment = std::exp(max_log + std::log(s.value()));
  }
  const double bound = std::pow(0.5 * static_cast<double>(n), half_p) *
                       std::exp(p * p / (4.0 * static_cast<double>(n)));

  DeficitReport r = report_leq("binom_moment", moment, bound, opts.tol);
  r.detail["n"] = static_cast<double>(n);
  r.detail["p"] = p;
  return r;
}

DeficitReport verify_concentration(const CoefficientVector& a, double gaussian_mass,
                                   const VerifyOptions& opts, std::optional<double> probe) {
  if (!std::isfinite(gaussian_mass) || gaussian_mass < 0.0 ||
      gaussian_mass > 1.0 + 1e-12) {
    throw HypothesisViolated("gaussian mass must lie in [0, 1]");
  }
  const double b = std::min(gaussian_mass, 1.0);
  const double scale = std::sqrt(positive_part(1.0 - b * b));
  std::vector<double> scaled = a.coeffs();
  for (double& c : scaled) c *= scale;
  const SymmetricAtomicDistribution d = distribution_of_signs(scaled);

  const double level = std::max(scaled.empty() ? 0.0 : scaled.front(),
                                probe.value_or(0.0));
  if (level > 1.0 + 1e-12) {
    throw HypothesisViolated("probe level must be at most 1");
  }

  const double p_two = gaussian_interval_probability(d, b, 2.0);
  const double bound_two = 1.0 - 2.0 / M_E;
  const double p_level = gaussian_interval_probability(d, b, level);
  const double bound_level = 3.0 / 16.0 * level;

  DeficitReport r;
  r.claim_id = "concentration";
  r.lhs = p_level;
  r.rhs = bound_level;
  r.constant_used = 3.0 / 16.0;
  r.margin = std::min(p_level - bound_level, p_two - bound_two);
  r.passed = p_level - bound_level >= -opts.tol && p_two - bound_two >= -opts.tol;
  r.detail["n"] = a.size();
  r.detail["gaussian_mass"] = b;
  r.detail["probe_level"] = level;
  r.detail["prob_within_two"] = p_two;
  r.detail["bound_within_two"] = bound_two;
  r.detail["prob_at_level"] = p_level;
  r.detail["bound_at_level"] = bound_level;
  return r;
}

namespace {

double n2_lhs(double x, double p) {
  const double plus = std::sqrt(0.5 + x);
  const double minus = std::sqrt(0.5 - x);
  const double sum = plus + minus;
  const double diff = sum > 0.0 ? 2.0 * x / sum : 0.0;  // rationalized plus - minus
  return std::pow(sum, p) + std::pow(diff, p);
}

}  // namespace

double n2_deficit_constant(double p) {
  if (!(p > 3.0)) throw DomainError("two-coefficient bound needs p > 3");
  static std::mutex mutex;
  static std::map<double, double> cache;
  {
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(p);
    if (it != cache.end()) return it->second;
  }
  const double top = std::exp2(0.5 * p);
  double worst = std::numeric_limits<double>::infinity();
  constexpr int kGrid = 10000;
  for (int k = 1; k <= kGrid; ++k) {
    const double x = 0.5 * static_cast<double>(k) / kGrid;
    worst = std::min(worst, (top - n2_lhs(x, p)) / (x * x));
  }
  const double certified = 0.9 * worst;
  std::lock_guard<std::mutex> lock(mutex);
  static_cast<void>(cache.emplace(p, certified));
  return certified;
}

DeficitReport verify_n2_closed_form(double x, double p, const VerifyOptions& opts) {
  if (!(p > 3.0)) throw DomainError("two-coefficient bound needs p > 3");
  if (!(x >= 0.0 && x <= 0.5)) throw DomainError("x must lie in [0, 1/2]");
  const double constant = n2_deficit_constant(p);
  const double top = std::exp2(0.5 * p);
  const double lhs = n2_lhs(x, p);
  const double rhs = top - constant * x * x;

  DeficitReport r = report_leq("n2_closed_form", lhs, rhs, opts.tol);
  r.deficit_term = constant * x * x;
  r.constant_used = constant;

  // Leading Taylor coefficient of the gap: 2^{p/2-1} p.
  const double probe = 1e-3;
  const double ratio = (top - n2_lhs(probe, p)) / (probe * probe);
  const double expected = std::exp2(0.5 * p - 1.0) * p;
  const bool taylor_ok = std::fabs(ratio - expected) <= 0.05 * expected;
  r.passed = r.passed && taylor_ok;
  r.detail["p"] = p;
  r.detail["x"] = x;
  r.detail["taylor_ratio"] = ratio;
  r.detail["taylor_expected"] = expected;
  r.detail["taylor_ok"] = taylor_ok ? 1.0 : 0.0;
  return r;
}

}  // namespace khl
