#include "khl/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "khl/detail/accumulate.hpp"
#include "khl/errors.hpp"
#include "khl/quadrature.hpp"

namespace khl {

namespace {

constexpr int kMaxTerms = 30;
constexpr double kMassTol = 1e-12;

double merge_tol(double v) { return 1e-12 * std::max(1.0, v); }

// Sorts candidate atoms, folds values within tolerance of 0 into the zero
// atom (a one-sided tiny value stands for a +/- pair, so its weight doubles),
// and merges adjacent values to their weighted mean.
std::vector<Atom> merge_atoms(std::vector<Atom> raw) {
  std::sort(raw.begin(), raw.end(),
            [](const Atom& a, const Atom& b) { return a.value < b.value; });
  double zero_weight = 0.0;
  std::vector<Atom> pos;
  pos.reserve(raw.size());
  for (const Atom& a : raw) {
    if (a.weight <= 0.0) continue;
    if (a.value == 0.0) {
      zero_weight += a.weight;
    } else if (a.value <= merge_tol(a.value)) {
      zero_weight += 2.0 * a.weight;
    } else if (!pos.empty() && a.value - pos.back().value <= merge_tol(a.value)) {
      Atom& last = pos.back();
      const double w = last.weight + a.weight;
      last.value = (last.value * last.weight + a.value * a.weight) / w;
      last.weight = w;
    } else {
      pos.push_back(a);
    }
  }
  std::vector<Atom> out;
  out.reserve(pos.size() + 1);
  if (zero_weight > 0.0) out.push_back({0.0, zero_weight});
  out.insert(out.end(), pos.begin(), pos.end());
  return out;
}

std::vector<Atom> convolve_sign(const std::vector<Atom>& atoms, double c) {
  std::vector<Atom> next;
  next.reserve(2 * atoms.size() + 1);
  for (const Atom& a : atoms) {
    if (a.value == 0.0) {
      next.push_back({c, 0.5 * a.weight});
      continue;
    }
    next.push_back({a.value + c, 0.5 * a.weight});
    const double d = a.value - c;
    if (std::fabs(d) <= merge_tol(std::max(a.value, c))) {
      next.push_back({0.0, a.weight});
    } else {
      next.push_back({std::fabs(d), 0.5 * a.weight});
    }
  }
  return merge_atoms(std::move(next));
}

void check_mass(const std::vector<Atom>& atoms) {
  detail::KahanSum m;
  for (const Atom& a : atoms) m.add(a.value == 0.0 ? a.weight : 2.0 * a.weight);
  if (std::fabs(m.value() - 1.0) > kMassTol) {
    throw Error("distribution mass " + std::to_string(m.value()) + " is not 1");
  }
}

double log_binomial(long n, long k) {
  return std::lgamma(static_cast<double>(n + 1)) - std::lgamma(static_cast<double>(k + 1)) -
         std::lgamma(static_cast<double>(n - k + 1));
}

}  // namespace

MomentQuery::MomentQuery(double p_, MomentMode mode_) : p(p_), mode(mode_) {
  if (!std::isfinite(p) || p < 0.0) {
    throw DomainError("moment exponent must be finite and nonnegative");
  }
  if (mode == MomentMode::kStandard && p > 64.0) {
    throw DomainError("p > 64 requires log-space mode");
  }
}

SymmetricAtomicDistribution SymmetricAtomicDistribution::point_mass_zero() {
  return SymmetricAtomicDistribution({Atom{0.0, 1.0}});
}

SymmetricAtomicDistribution SymmetricAtomicDistribution::from_atoms(std::vector<Atom> atoms) {
  atoms = merge_atoms(std::move(atoms));
  if (atoms.empty()) throw InvalidCoefficients("distribution needs at least one atom");
  check_mass(atoms);
  return SymmetricAtomicDistribution(std::move(atoms));
}

double SymmetricAtomicDistribution::zero_weight() const {
  return atoms_.front().value == 0.0 ? atoms_.front().weight : 0.0;
}

double SymmetricAtomicDistribution::total_mass() const {
  detail::KahanSum m;
  for (const Atom& a : atoms_) m.add(a.value == 0.0 ? a.weight : 2.0 * a.weight);
  return m.value();
}

SymmetricAtomicDistribution distribution_of_signs(const std::vector<double>& coeffs) {
  if (static_cast<int>(coeffs.size()) > kMaxTerms) {
    throw DimensionTooLarge("sign sums support at most 30 terms, got " +
                            std::to_string(coeffs.size()));
  }
  std::vector<Atom> atoms{Atom{0.0, 1.0}};
  for (double c : coeffs) {
    if (!std::isfinite(c) || c < 0.0) {
      throw InvalidCoefficients("sign-sum coefficients must be nonnegative");
    }
    if (c == 0.0) continue;
    atoms = convolve_sign(atoms, c);
  }
  check_mass(atoms);
  return SymmetricAtomicDistribution::from_atoms(std::move(atoms));
}

SymmetricAtomicDistribution build_distribution(const CoefficientVector& a) {
  return distribution_of_signs(a.coeffs());
}

SymmetricAtomicDistribution add_rademacher(const SymmetricAtomicDistribution& d, double coeff) {
  if (!std::isfinite(coeff) || coeff < 0.0) {
    throw InvalidCoefficients("sign-sum coefficients must be nonnegative");
  }
  if (coeff == 0.0) return d;
  return SymmetricAtomicDistribution::from_atoms(convolve_sign(d.atoms(), coeff));
}

double absolute_moment(const SymmetricAtomicDistribution& d, const MomentQuery& q) {
  if (q.p == 0.0) {
    return 1.0 - d.zero_weight();  // 0^0 counted as 0: P(S != 0)
  }
  if (q.mode == MomentMode::kStandard) {
    detail::KahanSum s;
    for (const Atom& a : d.atoms()) {
      if (a.value == 0.0) continue;
      s.add(2.0 * a.weight * std::pow(a.value, q.p));
    }
    return s.value();
  }
  double max_log = -std::numeric_limits<double>::infinity();
  for (const Atom& a : d.atoms()) {
    if (a.value <= 0.0) continue;
    max_log = std::max(max_log, std::log(a.weight) + q.p * std::log(a.value));
  }
  if (!std::isfinite(max_log)) return 0.0;
  detail::KahanSum s;
  for (const Atom& a : d.atoms()) {
    if (a.value <= 0.0) continue;
    s.add(std::exp(std::log(a.weight) + q.p * std::log(a.value) - max_log));
  }
  return std::exp(max_log + std::log(2.0 * s.value()));
}

double absolute_moment(const SymmetricAtomicDistribution& d, double p) {
  return absolute_moment(d, MomentQuery(p));
}

double diagonal_moment(long n, double p) {
  if (n < 1) throw DomainError("diagonal sum needs n >= 1");
  if (!std::isfinite(p) || p < 0.0) throw DomainError("exponent must be >= 0");

  if (n <= 50) {
    // Binomial row by the multiplicative recurrence; exact in 64 bits through
    // n = 50 including the intermediate product.
    unsigned long long binom = 1;
    detail::KahanSum s;
    for (long k = 0; k <= n; ++k) {
      const long diff = std::labs(n - 2 * k);
      if (diff != 0) {
        s.add(static_cast<double>(binom) * std::pow(static_cast<double>(diff), p));
      }
      if (k < n) binom = binom * static_cast<unsigned long long>(n - k) /
                         static_cast<unsigned long long>(k + 1);
    }
    return s.value() * std::exp2(-static_cast<double>(n)) *
           std::pow(static_cast<double>(n), -0.5 * p);
  }

  const double log2n = static_cast<double>(n) * M_LN2;
  double max_log = -std::numeric_limits<double>::infinity();
  for (long k = 0; k <= n; ++k) {
    const long diff = std::labs(n - 2 * k);
    if (diff == 0) continue;
    max_log = std::max(max_log, log_binomial(n, k) - log2n +
                                    p * std::log(static_cast<double>(diff)));
  }
  detail::KahanSum s;
  for (long k = 0; k <= n; ++k) {
    const long diff = std::labs(n - 2 * k);
    if (diff == 0) continue;
    s.add(std::exp(log_binomial(n, k) - log2n + p * std::log(static_cast<double>(diff)) -
                   max_log));
  }
  return std::exp(max_log + std::log(s.value()) - 0.5 * p * std::log(static_cast<double>(n)));
}

double gaussian_abs_moment(double p) {
  if (!std::isfinite(p) || p < 0.0) throw DomainError("exponent must be >= 0");
  return std::exp(0.5 * p * M_LN2 + std::lgamma(0.5 * (p + 1.0)) - 0.5 * std::log(M_PI));
}

double mixed_abs_moment(const SymmetricAtomicDistribution& d, double b, double p,
                        const MixedMomentOptions& opts) {
  if (!std::isfinite(b) || b < 0.0) throw DomainError("gaussian mass must be >= 0");
  if (b == 0.0) return absolute_moment(d, MomentQuery(p));
  if (!std::isfinite(p) || p < 0.0) throw DomainError("exponent must be >= 0");

  detail::KahanSum s;
  for (const Atom& a : d.atoms()) {
    const double m = quad::shifted_abs_moment(a.value, b, p, opts.rel_tol);
    s.add((a.value == 0.0 ? 1.0 : 2.0) * a.weight * m);
  }
  return s.value();
}

double interval_probability(const SymmetricAtomicDistribution& d, double level) {
  if (!(level >= 0.0)) throw DomainError("interval level must be >= 0");
  const double hi = level + 1e-12 * std::max(1.0, level);
  detail::KahanSum s;
  for (const Atom& a : d.atoms()) {
    if (a.value > hi) break;
    s.add(a.value == 0.0 ? a.weight : 2.0 * a.weight);
  }
  return std::min(s.value(), 1.0);
}

double gaussian_interval_probability(const SymmetricAtomicDistribution& d, double b,
                                     double level) {
  if (!(level >= 0.0)) throw DomainError("interval level must be >= 0");
  if (!std::isfinite(b) || b < 0.0) throw DomainError("gaussian mass must be >= 0");
  if (b == 0.0) return interval_probability(d, level);

  const double inv = 1.0 / (b * std::sqrt(2.0));
  auto ncdf_diff = [&](double center) {
    // P(-level <= center + bG <= level)
    return 0.5 * (std::erf((level - center) * inv) - std::erf((-level - center) * inv));
  };
  detail::KahanSum s;
  for (const Atom& a : d.atoms()) {
    if (a.value == 0.0) {
      s.add(a.weight * ncdf_diff(0.0));
    } else {
      s.add(a.weight * (ncdf_diff(a.value) + ncdf_diff(-a.value)));
    }
  }
  return std::min(s.value(), 1.0);
}

}  // namespace khl
