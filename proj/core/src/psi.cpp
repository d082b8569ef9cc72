#include "khl/psi.hpp"

#include <cmath>

#include "khl/errors.hpp"
#include "khl/quadrature.hpp"

namespace khl {

namespace {

void require_p(double p) {
  if (!std::isfinite(p) || p < 3.0) throw DomainError("kernel requires p >= 3");
}

// int_0^L z^{p-4} g(z) dz with the power singularity absorbed by z = w^beta,
// beta = 3/(p-3): the transformed integrand is beta w^2 g(w^beta), which is
// twice continuously differentiable at 0 for every p in (3, 5). From p = 5 on
// the direct integrand is already C^1 and integrated as is.
double power_weighted_from_zero(double L, double p, double s_shift, double t) {
  if (L <= 0.0) return 0.0;
  auto g = [&](double z) {
    const double d = z - s_shift;
    return t - d * d;
  };
  if (p < 5.0) {
    const double beta = 3.0 / (p - 3.0);
    const double w_hi = std::pow(L, 1.0 / beta);
    return quad::integrate_adaptive(
        [&](double w) { return w * w * g(std::pow(w, beta)); }, 0.0, w_hi, 1e-11,
        "psi_second_integral (regularized)") * beta;
  }
  return quad::integrate_adaptive(
      [&](double z) { return std::pow(z, p - 4.0) * g(z); }, 0.0, L, 1e-11,
      "psi_second_integral");
}

}  // namespace

PsiRegime psi_regime(double p) {
  require_p(p);
  if (p == 3.0) return PsiRegime::kP3;
  if (p < 4.0) return PsiRegime::kP3to4;
  if (p == 4.0) return PsiRegime::kP4;
  return PsiRegime::kPgt4;
}

const char* psi_regime_name(PsiRegime r) {
  switch (r) {
    case PsiRegime::kP3: return "P3";
    case PsiRegime::kP3to4: return "P3TO4";
    case PsiRegime::kP4: return "P4";
    case PsiRegime::kPgt4: return "PGT4";
  }
  return "?";
}

double psi(double s, double t, double p) {
  require_p(p);
  if (!(t >= 0.0)) throw DomainError("psi requires t >= 0");
  const double u = std::sqrt(t);
  return std::pow(std::fabs(s + u), p) + std::pow(std::fabs(s - u), p);
}

double psi_second(double s, double t, double p) {
  require_p(p);
  if (!(t > 0.0)) throw DomainError("psi_second requires t > 0");
  s = std::fabs(s);
  if (p == 3.0) {
    const double num = t - s * s;
    return num <= 0.0 ? 0.0 : 1.5 * num / (t * std::sqrt(t));
  }
  if (p == 4.0) return 4.0;  // the two-term form collapses to a constant
  const double u = std::sqrt(t);
  const double ap = std::fabs(s + u);
  const double am = std::fabs(s - u);
  const double term1 = p * (p - 1.0) * (std::pow(ap, p - 2.0) + std::pow(am, p - 2.0)) /
                       (4.0 * t);
  const double term2 = p * (std::pow(ap, p - 2.0) * (s + u) - std::pow(am, p - 2.0) * (s - u)) /
                       (4.0 * t * u);
  return std::max(term1 - term2, 0.0);  // convex in t, rounding may dip below 0
}

double psi_second_integral(double s, double t, double p) {
  if (!std::isfinite(p) || p <= 3.0) {
    throw DomainError("integral representation needs p > 3");
  }
  if (!(t > 0.0)) throw DomainError("psi_second_integral requires t > 0");
  s = std::fabs(s);
  const double u = std::sqrt(t);
  const double lo = s - u;
  const double hi = s + u;

  // (1/2) int_{s-sqrt(t)}^{s+sqrt(t)} |z|^{p-4} (t - (z-s)^2) dz. Away from
  // z = 0 the direct integrand is tame; when the window touches or contains
  // the origin, assemble it from regularized pieces anchored at 0.
  double integral;
  if (lo >= 0.05 * u) {
    integral = quad::integrate_adaptive(
        [&](double z) {
          const double d = z - s;
          return std::pow(z, p - 4.0) * (t - d * d);
        },
        lo, hi, 1e-11, "psi_second_integral");
  } else if (lo >= 0.0) {
    integral = power_weighted_from_zero(hi, p, s, t) - power_weighted_from_zero(lo, p, s, t);
  } else {
    integral = power_weighted_from_zero(hi, p, s, t) + power_weighted_from_zero(-lo, p, -s, t);
  }
  const double factor = p * (p - 1.0) * (p - 2.0) * (p - 3.0) / (4.0 * t * u);
  return factor * 0.5 * integral;
}

double psi_second_lower_bound(double s, double t, double p) {
  if (!(t > 0.0)) throw DomainError("psi_second_lower_bound requires t > 0");
  s = std::fabs(s);
  switch (psi_regime(p)) {
    case PsiRegime::kP3: {
      const double num = t - s * s;
      return num <= 0.0 ? 0.0 : 1.5 * num / (t * std::sqrt(t));
    }
    case PsiRegime::kP3to4:
      return p * (p - 1.0) * (p - 2.0) * (p - 3.0) / 6.0 *
             std::pow(s + std::sqrt(t), p - 4.0);
    case PsiRegime::kP4:
      return 4.0;
    case PsiRegime::kPgt4: {
      const double from_zero = 0.5 * p * (p - 2.0) * std::pow(t, 0.5 * p - 2.0);
      const double from_s =
          3.0 * p * (p - 1.0) * (p - 2.0) * (p - 3.0) / 64.0 *
          (s == 0.0 ? 0.0 : std::pow(s, p - 4.0));
      return std::max(from_zero, from_s);
    }
  }
  return 0.0;
}

double psi_pair(double s, double x, double t, double p) {
  require_p(p);
  if (!(x > 0.0)) throw DomainError("psi_pair requires x > 0");
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("psi_pair requires t in [0, 1]");
  const double x2 = x * x;
  return 0.5 * (psi(s, x2 * (1.0 + t), p) + psi(s, x2 * (1.0 - t), p));
}

}  // namespace khl
