#pragma once

#include <cmath>

namespace khl::detail {

/// Neumaier-compensated summation. Plain left-to-right accumulation over a
/// few hundred thousand atoms can lose ~1e-10 relative accuracy, which is
/// above the 1e-12 mass and moment tolerances used throughout.
class KahanSum {
 public:
  void add(double x) {
    double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace khl::detail
