#include "khl/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "khl/detail/accumulate.hpp"
#include "khl/errors.hpp"

namespace khl {

namespace {

double sum_of_squares(const std::vector<double>& v) {
  detail::KahanSum s;
  for (double x : v) s.add(x * x);
  return s.value();
}

}  // namespace

CoefficientVector::CoefficientVector(std::vector<double> canonical)
    : coeffs_(std::move(canonical)) {
  if (coeffs_.empty()) {
    throw InvalidCoefficients("coefficient vector must have at least one entry");
  }
  for (double& c : coeffs_) {
    if (!std::isfinite(c)) {
      throw InvalidCoefficients("coefficient vector has a non-finite entry");
    }
    c = std::fabs(c);
  }
  std::sort(coeffs_.begin(), coeffs_.end(), std::greater<double>());

  const double ss = sum_of_squares(coeffs_);
  if (!(ss > 0.0) || !std::isfinite(ss)) {
    throw InvalidCoefficients("coefficient vector has zero norm");
  }
  const double inv = 1.0 / std::sqrt(ss);
  for (double& c : coeffs_) c *= inv;

  if (std::fabs(sum_of_squares(coeffs_) - 1.0) > 1e-12) {
    throw InvalidCoefficients("normalization failed: sum of squares = " +
                              std::to_string(sum_of_squares(coeffs_)));
  }
}

CoefficientVector CoefficientVector::from_coefficients(std::vector<double> raw) {
  return CoefficientVector(std::move(raw));
}

CoefficientVector CoefficientVector::from_squares(const std::vector<double>& squares) {
  std::vector<double> c;
  c.reserve(squares.size());
  for (double s : squares) {
    if (!std::isfinite(s) || s < -1e-15) {
      throw InvalidCoefficients("squares must be nonnegative and finite");
    }
    c.push_back(std::sqrt(std::max(s, 0.0)));
  }
  return CoefficientVector(std::move(c));
}

CoefficientVector CoefficientVector::diagonal(int n) {
  if (n < 1) throw InvalidCoefficients("diagonal vector needs n >= 1");
  return CoefficientVector(std::vector<double>(static_cast<size_t>(n),
                                               1.0 / std::sqrt(static_cast<double>(n))));
}

std::vector<double> CoefficientVector::squares() const {
  std::vector<double> s;
  s.reserve(coeffs_.size());
  for (double c : coeffs_) s.push_back(c * c);
  return s;
}

double CoefficientVector::sum_fourth() const {
  detail::KahanSum s;
  for (double c : coeffs_) s.add(c * c * c * c);
  return s.value();
}

double CoefficientVector::diagonal_deficit() const {
  const double inv_n = 1.0 / static_cast<double>(size());
  detail::KahanSum s;
  for (double c : coeffs_) {
    const double d = c * c - inv_n;
    s.add(d * d);
  }
  return s.value();
}

}  // namespace khl
