#include "quasistat/polynomials.hpp"

#include <algorithm>
#include <cmath>

#include "quasistat/errors.hpp"

namespace quasistat {

bool PolynomialTable::positive_through(std::int64_t up_to) const {
  up_to = std::min(up_to, last_index());
  for (std::int64_t i = first_index; i <= up_to; ++i) {
    if (at(i).sign <= 0) return false;
  }
  return true;
}

PolynomialTable eval_polynomials(const BirthDeathSpec& spec, double x, std::int64_t n) {
  if (n < 1) throw InvalidSpec("eval_polynomials requires n >= 1");
  if (spec.convention() != Convention::AbsorbedAtZero) {
    throw InvalidSpec("eval_polynomials expects the absorbed-at-zero convention");
  }
  PolynomialTable table;
  table.x = x;
  table.first_index = 1;
  table.values.reserve(static_cast<std::size_t>(n));

  SignedLog q_prev{kLogZero, 0};          // Q_0 = 0
  SignedLog q_cur = SignedLog::from_value(1.0);  // Q_1 = 1
  table.values.push_back(q_cur);
  for (std::int64_t i = 1; i < n; ++i) {
    const double b = spec.birth(i);
    const double d = spec.death(i);
    // b Q_{i+1} = (b + d - x) Q_i - d Q_{i-1}
    const SignedLog lhs = signed_log_add(signed_log_scale(q_cur, b + d - x),
                                         signed_log_scale(q_prev, -d));
    SignedLog next = signed_log_scale(lhs, 1.0 / b);
    q_prev = q_cur;
    q_cur = next;
    table.values.push_back(q_cur);
  }
  return table;
}

namespace {

// One backward Miller pass: trial values seeded at `start`, recursed down,
// normalized by the computed Q_1.
std::vector<double> miller_pass(const BirthDeathSpec& spec, double x, std::int64_t n,
                                std::int64_t start) {
  std::vector<double> q(static_cast<std::size_t>(start) + 2, 0.0);
  q[static_cast<std::size_t>(start) + 1] = 0.0;
  q[static_cast<std::size_t>(start)] = 1.0;
  for (std::int64_t i = start; i >= 2; --i) {
    const double b = spec.birth(i);
    const double d = spec.death(i);
    double down = ((b + d - x) * q[static_cast<std::size_t>(i)] -
                   b * q[static_cast<std::size_t>(i) + 1]) /
                  d;
    q[static_cast<std::size_t>(i) - 1] = down;
    if (std::abs(down) > 1e250) {
      const double scale = 1.0 / std::abs(down);
      for (std::int64_t j = i - 1; j <= start + 1; ++j) {
        q[static_cast<std::size_t>(j)] *= scale;
      }
    }
  }
  const double norm = q[1];
  if (norm == 0.0 || !std::isfinite(norm)) {
    throw SpectralFailure("backward recurrence lost the minimal solution");
  }
  std::vector<double> out(static_cast<std::size_t>(n));
  for (std::int64_t i = 1; i <= n; ++i) {
    out[static_cast<std::size_t>(i) - 1] = q[static_cast<std::size_t>(i)] / norm;
  }
  return out;
}

}  // namespace

std::vector<double> eval_polynomials_stable(const BirthDeathSpec& spec, double x, std::int64_t n,
                                            double tol) {
  if (n < 1) throw InvalidSpec("eval_polynomials_stable requires n >= 1");
  if (spec.convention() != Convention::AbsorbedAtZero) {
    throw InvalidSpec("eval_polynomials_stable expects the absorbed-at-zero convention");
  }
  std::int64_t start = n + 48;
  std::vector<double> prev = miller_pass(spec, x, n, start);
  for (int round = 0; round < 8; ++round) {
    start = n + ((start - n) * 2);
    std::vector<double> cur = miller_pass(spec, x, n, start);
    double worst = 0.0;
    for (std::size_t k = 0; k < cur.size(); ++k) {
      const double scale = std::max(std::abs(cur[k]), 1e-300);
      worst = std::max(worst, std::abs(cur[k] - prev[k]) / scale);
    }
    if (worst <= tol) return cur;
    prev = std::move(cur);
  }
  throw SpectralFailure("backward recurrence failed to stabilize; argument above the spectrum?");
}

double recurrence_residual(const BirthDeathSpec& spec, const PolynomialTable& table) {
  double worst = 0.0;
  const std::int64_t last = table.last_index();
  for (std::int64_t i = std::max<std::int64_t>(table.first_index, 1); i + 1 <= last; ++i) {
    if (i - 1 < table.first_index && i - 1 != 0) continue;
    const double b = spec.birth(i);
    const double d = spec.death(i);
    const SignedLog qm = (i - 1 == 0) ? SignedLog{kLogZero, 0} : table.at(i - 1);
    const SignedLog qi = table.at(i);
    const SignedLog qp = table.at(i + 1);
    // residual of b Q_{i+1} - (b + d) Q_i + d Q_{i-1} + x Q_i, scaled by the
    // largest of the four term magnitudes
    const SignedLog t1 = signed_log_scale(qp, b);
    const SignedLog t2 = signed_log_scale(qi, -(b + d));
    const SignedLog t3 = signed_log_scale(qm, d);
    const SignedLog t4 = signed_log_scale(qi, table.x);
    const SignedLog sum = signed_log_add(signed_log_add(t1, t2), signed_log_add(t3, t4));
    double log_scale = kLogZero;
    for (const SignedLog* t : {&t1, &t2, &t3, &t4}) {
      log_scale = std::max(log_scale, t->log_abs);
    }
    if (log_scale == kLogZero) continue;
    const double rel = sum.sign == 0 ? 0.0 : std::exp(sum.log_abs - log_scale);
    worst = std::max(worst, rel);
  }
  return worst;
}

}  // namespace quasistat
