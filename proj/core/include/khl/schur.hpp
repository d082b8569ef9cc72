#pragma once

#include <vector>

#include "khl/coefficients.hpp"

namespace khl {

/// Point of the probability simplex (squared coefficients), stored sorted in
/// descending order; the constructor renormalizes the sum to 1 and validates.
class SquaresVector {
 public:
  static SquaresVector from_values(std::vector<double> values);
  static SquaresVector diagonal(int n);
  static SquaresVector from_coefficients(const CoefficientVector& a);

  int size() const { return static_cast<int>(values_.size()); }
  double operator[](int i) const { return values_[static_cast<size_t>(i)]; }
  const std::vector<double>& values() const { return values_; }

  CoefficientVector to_coefficients() const;

  bool operator==(const SquaresVector&) const = default;

 private:
  explicit SquaresVector(std::vector<double> canonical);

  std::vector<double> values_;
};

/// One move that brings two coordinates closer while preserving their sum.
/// j and k index the sorted `before` vector; `after` is re-sorted.
struct TTransformStep {
  SquaresVector before;
  SquaresVector after;
  int j;
  int k;
  double lambda;
  double deficit_bound = 0.0;  // filled by the verifiers
};

/// True iff x is majorized by y (x precedes y in the Schur order): every
/// prefix sum of the decreasing rearrangement of x is at most the matching
/// prefix of y, within 1e-12. Shorter vectors are padded with zeros.
bool majorizes(const SquaresVector& x, const SquaresVector& y);

SquaresVector t_transform(const SquaresVector& x, int j, int k, double lambda);

/// Moves the current largest and smallest entries onto (sum - 1/n, 1/n) until
/// every entry equals 1/n; at least one coordinate is pinned per step, so at
/// most n-1 steps are emitted. Already-diagonal input yields no steps.
std::vector<TTransformStep> diagonalize(const SquaresVector& x);

/// Moves mass from the current largest entry into the smallest entries
/// (each raised at most to `cap`) until the largest entry is <= cap.
/// Throws CapInfeasible when cap < 1/n.
std::vector<TTransformStep> cap_largest(const SquaresVector& x, double cap);

}  // namespace khl
