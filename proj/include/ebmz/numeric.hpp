#pragma once

#include <Eigen/Core>
#include <cmath>
#include <limits>

namespace ebmz {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kPosInf = std::numeric_limits<double>::infinity();

// Neumaier-compensated accumulator. Summation order is part of the contract:
// reductions over samples and trials always run in index order so that serial
// and multi-worker runs produce identical bits.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
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

// log(e^a + e^b) with the larger term factored out.
inline double log_sum_exp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  if (std::isnan(a) || std::isnan(b)) return std::numeric_limits<double>::quiet_NaN();
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

// log(sum_i e^{l_i}); -inf entries contribute nothing. A single-entry array
// returns its entry bit-exactly (exp(0) == 1, log(1) == 0).
inline double log_sum_exp(const Eigen::ArrayXd& logs) {
  const double hi = logs.maxCoeff();
  if (hi == kNegInf || std::isnan(hi)) return hi;
  CompensatedSum s;
  for (Eigen::Index i = 0; i < logs.size(); ++i) {
    if (logs[i] == kNegInf) continue;
    s.add(std::exp(logs[i] - hi));
  }
  return hi + std::log(s.value());
}

inline double log_mean_exp(const Eigen::ArrayXd& logs) {
  return log_sum_exp(logs) - std::log(static_cast<double>(logs.size()));
}

// log|e^a - e^b|; returns -inf when a == b.
inline double log_abs_diff_exp(double a, double b) {
  if (a == b) return kNegInf;
  const double hi = std::max(a, b);
  const double d = std::abs(a - b);
  return hi + std::log(-std::expm1(-d));
}

}  // namespace ebmz
