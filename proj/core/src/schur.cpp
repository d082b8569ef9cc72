#include "khl/schur.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "khl/detail/accumulate.hpp"
#include "khl/errors.hpp"

namespace khl {

namespace {

constexpr double kPrefixTol = 1e-12;
constexpr double kPinTol = 1e-10;

std::vector<double> replace_pair_sorted(const std::vector<double>& v, int j, int k,
                                        double new_j, double new_k) {
  std::vector<double> out = v;
  out[static_cast<size_t>(j)] = new_j;
  out[static_cast<size_t>(k)] = new_k;
  std::sort(out.begin(), out.end(), std::greater<double>());
  return out;
}

}  // namespace

SquaresVector::SquaresVector(std::vector<double> canonical) : values_(std::move(canonical)) {
  if (values_.empty()) throw InvalidCoefficients("squares vector must be nonempty");
  detail::KahanSum sum;
  for (double& v : values_) {
    if (!std::isfinite(v) || v < -1e-15) {
      throw InvalidCoefficients("squares must be nonnegative and finite");
    }
    v = std::max(v, 0.0);
    sum.add(v);
  }
  const double s = sum.value();
  if (!(s > 0.0)) throw InvalidCoefficients("squares vector has zero sum");
  for (double& v : values_) v /= s;
  std::sort(values_.begin(), values_.end(), std::greater<double>());
}

SquaresVector SquaresVector::from_values(std::vector<double> values) {
  return SquaresVector(std::move(values));
}

SquaresVector SquaresVector::diagonal(int n) {
  if (n < 1) throw InvalidCoefficients("diagonal vector needs n >= 1");
  return SquaresVector(std::vector<double>(static_cast<size_t>(n),
                                           1.0 / static_cast<double>(n)));
}

SquaresVector SquaresVector::from_coefficients(const CoefficientVector& a) {
  return SquaresVector(a.squares());
}

CoefficientVector SquaresVector::to_coefficients() const {
  return CoefficientVector::from_squares(values_);
}

bool majorizes(const SquaresVector& x, const SquaresVector& y) {
  const size_t n = std::max(x.values().size(), y.values().size());
  double px = 0.0, py = 0.0;
  for (size_t i = 0; i < n; ++i) {
    px += i < x.values().size() ? x.values()[i] : 0.0;
    py += i < y.values().size() ? y.values()[i] : 0.0;
    if (px > py + kPrefixTol) return false;
  }
  return true;
}

SquaresVector t_transform(const SquaresVector& x, int j, int k, double lambda) {
  if (j < 0 || k < 0 || j >= x.size() || k >= x.size() || j == k) {
    throw IndexOutOfRange("t_transform indices must be distinct and in range");
  }
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw LambdaOutOfRange("lambda must lie in [0, 1]");
  }
  const double xj = x[j], xk = x[k];
  const double new_j = (1.0 - lambda) * xj + lambda * xk;
  const double new_k = lambda * xj + (1.0 - lambda) * xk;
  return SquaresVector::from_values(replace_pair_sorted(x.values(), j, k, new_j, new_k));
}

std::vector<TTransformStep> diagonalize(const SquaresVector& x) {
  const int n = x.size();
  const double target = 1.0 / static_cast<double>(n);
  std::vector<TTransformStep> steps;
  SquaresVector cur = x;
  while (true) {
    const std::vector<double>& v = cur.values();
    const double largest = v.front();
    const double smallest = v.back();
    if (largest <= target + kPinTol && smallest >= target - kPinTol) break;
    if (static_cast<int>(steps.size()) >= n) {
      throw Error("diagonalize did not terminate");  // unreachable
    }
    // Move the pair (largest, smallest) onto (largest + smallest - 1/n, 1/n).
    const double lambda = (target - smallest) / (largest - smallest);
    SquaresVector next = SquaresVector::from_values(
        replace_pair_sorted(v, 0, n - 1, largest + smallest - target, target));
    steps.push_back({cur, next, 0, n - 1, lambda, 0.0});
    cur = std::move(next);
  }
  return steps;
}

std::vector<TTransformStep> cap_largest(const SquaresVector& x, double cap) {
  if (!(cap > 0.0 && cap < 1.0)) throw DomainError("cap must lie in (0, 1)");
  const int n = x.size();
  if (n < 2) throw DomainError("cap_largest needs n >= 2");
  const double target = 1.0 / static_cast<double>(n);
  if (cap < target - 1e-12) {
    throw CapInfeasible("cap " + std::to_string(cap) + " below 1/n");
  }

  std::vector<TTransformStep> steps;
  SquaresVector cur = x;
  while (cur.values().front() > cap + 1e-12) {
    if (static_cast<int>(steps.size()) > 2 * n) {
      throw Error("cap_largest did not terminate");  // unreachable
    }
    const std::vector<double>& v = cur.values();
    const double largest = v.front();
    // Receiver: smallest entry still below the cap.
    int r = -1;
    for (int i = n - 1; i >= 1; --i) {
      if (v[static_cast<size_t>(i)] < cap - 1e-15) {
        r = i;
        break;
      }
    }
    if (r < 0) throw Error("cap_largest found no receiving entry");  // unreachable
    const double receiver = v[static_cast<size_t>(r)];
    const double move = std::min(largest - cap, cap - receiver);
    const double lambda = move / (largest - receiver);
    SquaresVector next = SquaresVector::from_values(
        replace_pair_sorted(v, 0, r, largest - move, receiver + move));
    steps.push_back({cur, next, 0, r, lambda, 0.0});
    cur = std::move(next);
  }
  return steps;
}

}  // namespace khl
