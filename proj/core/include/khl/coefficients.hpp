#pragma once

#include <vector>

namespace khl {

/// Unit-norm coefficient vector of a Rademacher sum, stored sorted in
/// descending order with nonnegative entries. The constructor canonicalizes
/// (absolute values, sort, renormalize to sum of squares 1) and then checks
/// the invariants.
class CoefficientVector {
 public:
  static CoefficientVector from_coefficients(std::vector<double> raw);
  static CoefficientVector from_squares(const std::vector<double>& squares);

  /// The n-term vector (1/sqrt(n), ..., 1/sqrt(n)).
  static CoefficientVector diagonal(int n);

  int size() const { return static_cast<int>(coeffs_.size()); }
  double operator[](int i) const { return coeffs_[static_cast<size_t>(i)]; }
  const std::vector<double>& coeffs() const { return coeffs_; }
  double largest() const { return coeffs_.front(); }

  std::vector<double> squares() const;
  /// sum_i a_i^4
  double sum_fourth() const;
  /// sum_i (a_i^2 - 1/n)^2
  double diagonal_deficit() const;

  bool operator==(const CoefficientVector&) const = default;

 private:
  explicit CoefficientVector(std::vector<double> canonical);

  std::vector<double> coeffs_;
};

}  // namespace khl
