#ifndef QUASISTAT_LOG_DOMAIN_HPP
#define QUASISTAT_LOG_DOMAIN_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace quasistat {

inline constexpr double kLogZero = -std::numeric_limits<double>::infinity();

// log(e^a + e^b), safe against -inf arguments.
inline double log_add_exp(double a, double b) {
  if (a == kLogZero) return b;
  if (b == kLogZero) return a;
  const double hi = a > b ? a : b;
  const double lo = a > b ? b : a;
  return hi + std::log1p(std::exp(lo - hi));
}

// log(e^a - e^b) for a >= b; returns -inf when the difference cancels to zero.
inline double log_sub_exp(double a, double b) {
  if (b == kLogZero) return a;
  if (a <= b) return kLogZero;
  return a + std::log1p(-std::exp(b - a));
}

// Kahan-Neumaier compensated accumulator.
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

// Nonnegative real carried as its natural log; sign-free by construction.
// An explicit -inf encodes exact zero.
class LogWeightVector {
public:
  LogWeightVector() = default;
  LogWeightVector(std::vector<double> logs, std::int64_t first_index)
      : logs_(std::move(logs)), first_index_(first_index) {}

  static LogWeightVector from_values(const std::vector<double>& values,
                                     std::int64_t first_index);

  std::int64_t first_index() const { return first_index_; }
  std::size_t size() const { return logs_.size(); }
  bool empty() const { return logs_.empty(); }

  // log of the entry for state `index` (absolute indexing).
  double log_at(std::int64_t index) const {
    return logs_[static_cast<std::size_t>(index - first_index_)];
  }
  double at(std::int64_t index) const { return std::exp(log_at(index)); }

  const std::vector<double>& logs() const { return logs_; }
  std::vector<double>& logs() { return logs_; }

  // log of the sum of all entries (log-sum-exp).
  double log_sum() const;

  // entries exponentiated after subtracting `log_scale`.
  std::vector<double> values(double log_scale = 0.0) const;

private:
  std::vector<double> logs_;
  std::int64_t first_index_ = 1;
};

// log(sum exp(logs[i])) over an arbitrary range.
double log_sum_exp(const std::vector<double>& logs);

// Signed value in log representation: sign in {-1, 0, +1}, log of magnitude.
// Used where three-term recurrences outrun the double exponent range.
struct SignedLog {
  double log_abs = kLogZero;
  int sign = 0;

  static SignedLog from_value(double v) {
    if (v == 0.0) return {kLogZero, 0};
    return {std::log(std::abs(v)), v > 0.0 ? 1 : -1};
  }
  double value() const {
    if (sign == 0) return 0.0;
    return sign * std::exp(log_abs);
  }
};

// (scale) * x where scale is an ordinary signed double.
SignedLog signed_log_scale(const SignedLog& x, double scale);
// x + y in signed-log arithmetic.
SignedLog signed_log_add(const SignedLog& x, const SignedLog& y);

}  // namespace quasistat

#endif
