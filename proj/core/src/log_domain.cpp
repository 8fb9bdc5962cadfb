#include "quasistat/log_domain.hpp"

#include <algorithm>

namespace quasistat {

LogWeightVector LogWeightVector::from_values(const std::vector<double>& values,
                                             std::int64_t first_index) {
  std::vector<double> logs(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    logs[i] = values[i] == 0.0 ? kLogZero : std::log(values[i]);
  }
  return LogWeightVector(std::move(logs), first_index);
}

double log_sum_exp(const std::vector<double>& logs) {
  if (logs.empty()) return kLogZero;
  const double hi = *std::max_element(logs.begin(), logs.end());
  if (hi == kLogZero) return kLogZero;
  CompensatedSum acc;
  for (double l : logs) {
    if (l != kLogZero) acc.add(std::exp(l - hi));
  }
  return hi + std::log(acc.value());
}

double LogWeightVector::log_sum() const { return log_sum_exp(logs_); }

std::vector<double> LogWeightVector::values(double log_scale) const {
  std::vector<double> out(logs_.size());
  for (std::size_t i = 0; i < logs_.size(); ++i) {
    out[i] = logs_[i] == kLogZero ? 0.0 : std::exp(logs_[i] - log_scale);
  }
  return out;
}

SignedLog signed_log_scale(const SignedLog& x, double scale) {
  if (scale == 0.0 || x.sign == 0) return {kLogZero, 0};
  SignedLog out;
  out.log_abs = x.log_abs + std::log(std::abs(scale));
  out.sign = scale > 0.0 ? x.sign : -x.sign;
  return out;
}

SignedLog signed_log_add(const SignedLog& x, const SignedLog& y) {
  if (x.sign == 0) return y;
  if (y.sign == 0) return x;
  if (x.sign == y.sign) {
    return {log_add_exp(x.log_abs, y.log_abs), x.sign};
  }
  if (x.log_abs == y.log_abs) return {kLogZero, 0};
  const bool x_dominates = x.log_abs > y.log_abs;
  const SignedLog& big = x_dominates ? x : y;
  const SignedLog& small = x_dominates ? y : x;
  return {log_sub_exp(big.log_abs, small.log_abs), big.sign};
}

}  // namespace quasistat
