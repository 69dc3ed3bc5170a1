#pragma once

#include <cmath>
#include <span>

namespace randinf {

/// Neumaier's variant of Kahan summation. Order of add() calls is the
/// reduction order, so results are reproducible for a fixed traversal.
class CompensatedSum {
 public:
  CompensatedSum& add(double x) noexcept {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
    return *this;
  }

  CompensatedSum& operator+=(double x) noexcept { return add(x); }

  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double compensated_sum(std::span<const double> xs) noexcept {
  CompensatedSum s;
  for (double x : xs) s.add(x);
  return s.value();
}

}  // namespace randinf
