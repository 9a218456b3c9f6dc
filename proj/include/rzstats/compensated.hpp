#pragma once

#ifdef __FAST_MATH__
#error "compensated summation is meaningless under -ffast-math"
#endif

namespace rzstats {

// Neumaier's variant of Kahan summation. Result depends only on the order
// in which add() is called.
class CompensatedSum {
 public:
  constexpr CompensatedSum() = default;
  constexpr explicit CompensatedSum(double initial) : sum_(initial) {}

  constexpr void add(double value) noexcept {
    const double t = sum_ + value;
    if ((sum_ < 0 ? -sum_ : sum_) >= (value < 0 ? -value : value)) {
      carry_ += (sum_ - t) + value;
    } else {
      carry_ += (value - t) + sum_;
    }
    sum_ = t;
  }

  constexpr CompensatedSum& operator+=(double value) noexcept {
    add(value);
    return *this;
  }

  constexpr double total() const noexcept { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

}  // namespace rzstats
