#pragma once

namespace khl {

/// Exponent regime of the kernel; the formulas bifurcate at p = 3 and p = 4,
/// and the comparisons are exact.
enum class PsiRegime { kP3, kP3to4, kP4, kPgt4 };

PsiRegime psi_regime(double p);
const char* psi_regime_name(PsiRegime r);

/// psi_s(t) = |s + sqrt(t)|^p + |s - sqrt(t)|^p, for t >= 0, p >= 3.
double psi(double s, double t, double p);

/// Second derivative of psi_s in t, t > 0. Closed form: the positive-part
/// expression at p = 3, the two-term formula for p > 3.
double psi_second(double s, double t, double p);

/// Same quantity through its integral representation (p > 3 only); exists for
/// cross-validation of the closed form.
double psi_second_integral(double s, double t, double p);

/// Regime-dependent lower bound on psi_second: exact value at p = 3, the
/// (|s| + sqrt(t))^{p-4} bound for 3 < p < 4, the constant 4 at p = 4, and
/// for p > 4 the larger of the t-independent |s|^{p-4} bound and psi_0''.
double psi_second_lower_bound(double s, double t, double p);

/// (psi_s(x^2 (1+t)) + psi_s(x^2 (1-t))) / 2 for t in [0,1], x > 0.
double psi_pair(double s, double x, double t, double p);

}  // namespace khl
