#pragma once

#include <functional>

namespace khl::quad {

/// E|v + b*G|^p for a standard Gaussian G, v real, b > 0, p >= 0.
///
/// Computed as E(v+bG)_+^p + E(bG-v)_+^p. Each half-line piece is integrated
/// in log space (no overflow for p up to 64 or b far from 1) with the
/// algebraic endpoint handled by a double-exponential rule; when the Gaussian
/// bump is far from the kink the piece is split so every sub-integral is
/// resolved. Throws QuadratureNotConverged if the error estimate exceeds
/// rel_tol relative to the result.
double shifted_abs_moment(double v, double b, double p, double rel_tol = 1e-10);

/// Adaptive Gauss-Kronrod on a finite interval; throws QuadratureNotConverged
/// when the error estimate is above rel_tol relative to max(1, |result|).
/// `what` names the integral in the error message.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double rel_tol, const char* what);

}  // namespace khl::quad
