#include "khl/constants.hpp"

#include <cmath>
#include <mutex>

#include "khl/distribution.hpp"
#include "khl/errors.hpp"
#include "khl/quadrature.hpp"

namespace khl {

namespace {

// Upper truncation of the [1, inf) integrals; the dropped tail is bounded by
// int_T^inf e^{-(t+1)/2} dt = 2 e^{-40.5} << 1e-12.
constexpr double kTruncation = 80.0;

double coefficient_34(double p) { return p * (p - 1.0) * (p - 2.0) * (p - 3.0) / 6.0; }

double tail_weight(double t) {
  return t / ((t + 1.0) * std::sqrt(t + 1.0)) * std::exp(-0.5 * (t + 1.0));
}

std::mutex g_cache_mutex;

double integral_34_cached(double p) {
  static std::map<double, double> cache;
  {
    std::lock_guard<std::mutex> lock(g_cache_mutex);
    auto it = cache.find(p);
    if (it != cache.end()) return it->second;
  }
  const double value = quad::integrate_adaptive(
      [p](double t) { return tail_weight(t) * std::pow(2.0 + std::sqrt(t), p - 4.0); },
      1.0, kTruncation, 1e-11, "integral_34");
  std::lock_guard<std::mutex> lock(g_cache_mutex);
  static_cast<void>(cache.emplace(p, value));
  return value;
}

}  // namespace

double integral_34(double p) {
  if (!(p > 3.0 && p < 4.0)) throw DomainError("integral_34 needs 3 < p < 4");
  return integral_34_cached(p);
}

double integral_p3() {
  static std::once_flag once;
  static double value = 0.0;
  std::call_once(once, [] {
    value = quad::integrate_adaptive(
        [](double t) { return tail_weight(t) * (t - 1.0) / (t * std::sqrt(t)); }, 1.0,
        kTruncation, 1e-11, "integral_p3");
  });
  return value;
}

double haagerup_tilde(double p) {
  if (!(p > 4.0 && p < 6.0)) throw DomainError("haagerup_tilde needs 4 < p < 6");
  const double first = std::exp2(0.5 * (p - 6.0));
  const double second =
      std::exp2(0.5 * (p - 4.0)) * std::tgamma(0.5 * (p - 3.0)) / std::sqrt(M_PI);
  return std::min(first, second);
}

double gauss_constant(double p) {
  if (!std::isfinite(p) || p < 3.0) throw DomainError("gauss_constant needs p >= 3");
  if (p == 3.0) {
    return 9.0 / (32.0 * std::sqrt(2.0 * M_PI)) * integral_p3();
  }
  if (p < 4.0) {
    return coefficient_34(p) * (1.0 - 2.0 / M_E) / std::sqrt(2.0 * M_PI) * integral_34(p);
  }
  if (p == 4.0) return 2.0;
  const double core = std::exp2(0.5 * (4.0 - p)) * 3.0 * p * (p - 1.0) * (p - 2.0) *
                      (p - 3.0) / 128.0;
  return p < 6.0 ? core * haagerup_tilde(p) : core;
}

double diag_moment_floor(double p, double a2) {
  if (!std::isfinite(p) || p <= 3.0) throw DomainError("moment floor needs p > 3");
  if (!(a2 >= 0.0 && a2 <= 0.9 + 1e-12)) {
    throw DomainError("moment floor needs combined mass a2 <= 0.9");
  }
  if (p <= 4.0) return 1.0;
  const double base = std::pow(1.0 - std::min(a2, 0.9), 0.5 * (p - 4.0));
  return p < 6.0 ? base * haagerup_tilde(p) : base;
}

double diag_constant(double p, double moment_floor) {
  if (!std::isfinite(p) || p <= 3.0) throw DomainError("diag_constant needs p > 3");
  if (p == 4.0) return 8.0 / 25.0;
  if (p > 4.0) {
    const double c = 3.0 * p * (p - 1.0) * (p - 2.0) * (p - 3.0) / 64.0;
    return 2.0 * c * moment_floor / 25.0;
  }
  return 2.0 * coefficient_34(p) * (1.0 - 2.0 / M_E) *
         std::pow(2.0 + std::sqrt(2.0), p - 4.0) / 25.0;
}

double crit_constant() { return 0.015625; }

double doubling_rate_constant(double p) {
  if (!std::isfinite(p) || p < 3.0) throw DomainError("doubling constant needs p >= 3");
  return 2.0 * p * gaussian_abs_moment(p);
}

ConstantBundle constant_bundle(double p) {
  ConstantBundle b;
  b.p = p;
  b.branch = psi_regime(p);
  b.gauss_C = gauss_constant(p);
  b.doubling_C = doubling_rate_constant(p);
  b.components["gauss_moment"] = gaussian_abs_moment(p);

  const double nan = std::nan("");
  if (p > 3.0) {
    const double floor = diag_moment_floor(p, 0.9);
    b.diag_C = diag_constant(p, floor);
    b.components["moment_floor_at_0.9"] = floor;
  } else {
    b.diag_C = nan;
  }
  b.crit_C = p == 3.0 ? crit_constant() : nan;

  switch (b.branch) {
    case PsiRegime::kP3:
      b.components["integral_p3"] = integral_p3();
      break;
    case PsiRegime::kP3to4:
      b.components["c_p"] = coefficient_34(p);
      b.components["integral_34"] = integral_34(p);
      break;
    case PsiRegime::kP4:
      break;
    case PsiRegime::kPgt4:
      b.components["c_p"] = 3.0 * p * (p - 1.0) * (p - 2.0) * (p - 3.0) / 128.0;
      if (p < 6.0) b.components["haagerup_tilde"] = haagerup_tilde(p);
      break;
  }
  return b;
}

}  // namespace khl
