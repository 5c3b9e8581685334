#pragma once

#include <cmath>

namespace tfdw {

/// Neumaier-compensated running sum; deterministic for a fixed input order.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  CompensatedSum& operator+=(double x) {
    add(x);
    return *this;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

template <typename Range>
double compensated_sum(const Range& values) {
  CompensatedSum acc;
  for (const double v : values) acc.add(v);
  return acc.value();
}

}  // namespace tfdw
