#include "quasistat/series.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <vector>

#include "quasistat/errors.hpp"
#include "quasistat/log_domain.hpp"

namespace quasistat {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Solve the 3x3 Vandermonde-type system g_k = c1 + c2*z_k + c3*z_k^2.
void fit_quadratic(const double z[3], const double g[3], double c[3]) {
  // Lagrange through divided differences; z values are distinct by construction.
  const double d01 = (g[1] - g[0]) / (z[1] - z[0]);
  const double d12 = (g[2] - g[1]) / (z[2] - z[1]);
  const double d012 = (d12 - d01) / (z[2] - z[0]);
  // Newton form: g(z) = g0 + d01 (z - z0) + d012 (z - z0)(z - z1)
  c[2] = d012;
  c[1] = d01 - d012 * (z[0] + z[1]);
  c[0] = g[0] - d01 * z[0] + d012 * z[0] * z[1];
}

}  // namespace

double power_tail(double q, std::int64_t m) {
  // sum_{i > m} i^-q = zeta(q, m+1); Euler-Maclaurin about x = m+1.
  const double x = static_cast<double>(m) + 1.0;
  const double xq = std::pow(x, -q);
  double tail = xq * x / (q - 1.0) + 0.5 * xq;
  tail += q * xq / (12.0 * x);
  tail -= q * (q + 1.0) * (q + 2.0) * xq / (720.0 * x * x * x);
  tail += q * (q + 1.0) * (q + 2.0) * (q + 3.0) * (q + 4.0) * xq / (30240.0 * std::pow(x, 5));
  return tail;
}

SeriesResult sum_series(const std::function<double(std::int64_t)>& log_term,
                        std::int64_t first, const SeriesOptions& opts) {
  SeriesResult res;
  CompensatedSum acc;
  const int W = std::max(opts.window, 4);
  std::deque<double> log_ratios;  // trailing log(t_i / t_{i-1})

  double prev_log = kNaN;
  std::int64_t i = first;
  const std::int64_t budget_end = first + opts.max_terms;  // exclusive
  double last_log = kLogZero;

  auto make_divergent = [&](std::int64_t n) {
    res.partial_sum = acc.value();
    res.n_terms = n;
    res.verdict = SeriesVerdict::Divergent;
    return res;
  };

  for (; i < budget_end; ++i) {
    const double lt = log_term(i);
    if (lt > 1e15) throw NumericOverflow("series term exceeds log-domain range");
    last_log = lt;
    const double t = std::exp(lt);
    acc.add(t);
    if (std::isfinite(prev_log) && lt != kLogZero) {
      log_ratios.push_back(lt - prev_log);
      if (static_cast<int>(log_ratios.size()) > W) log_ratios.pop_front();
    }
    prev_log = lt;

    if (!std::isfinite(acc.value()) || acc.value() > opts.sum_cap) {
      return make_divergent(i - first + 1);
    }

    if (static_cast<int>(log_ratios.size()) == W || lt == kLogZero) {
      const double worst =
          log_ratios.empty() ? kLogZero : *std::max_element(log_ratios.begin(), log_ratios.end());
      if (worst < std::log1p(-opts.geometric_margin)) {
        const double r = std::exp(worst);
        const double tail = t * r / (1.0 - r);
        if (tail <= opts.tol * std::max(std::abs(acc.value()), 1e-300)) {
          res.partial_sum = acc.value();
          res.tail_estimate = tail;
          res.value = res.partial_sum + tail;
          res.n_terms = i - first + 1;
          res.verdict = SeriesVerdict::Convergent;
          return res;
        }
      }
      if (lt == kLogZero) {
        // Terms underflowed without a certified geometric window; treat the
        // remaining tail as below resolution.
        res.partial_sum = acc.value();
        res.tail_estimate = 0.0;
        res.value = res.partial_sum;
        res.n_terms = i - first + 1;
        res.verdict = SeriesVerdict::Convergent;
        return res;
      }
    }
  }

  // Budget exhausted. Trailing ratios decide between divergence, a
  // power-law tail, and an honest Undetermined.
  res.partial_sum = acc.value();
  res.n_terms = opts.max_terms;
  if (log_ratios.size() < 4) return res;

  const std::int64_t N = budget_end - 1;  // last evaluated index
  auto decay_exponent_at = [&](std::int64_t idx, double log_ratio) {
    return -static_cast<double>(idx) * log_ratio;
  };
  std::vector<double> ps;
  {
    std::int64_t idx = N;
    for (auto it = log_ratios.rbegin(); it != log_ratios.rend(); ++it, --idx) {
      ps.push_back(decay_exponent_at(idx, *it));
    }
  }
  std::vector<double> sorted_ps = ps;
  std::nth_element(sorted_ps.begin(), sorted_ps.begin() + sorted_ps.size() / 2, sorted_ps.end());
  const double p_mid = sorted_ps[sorted_ps.size() / 2];
  // For a power-law tail the exponent estimates settle to a constant;
  // under geometric decay they grow linearly with the index. ps[] runs
  // newest-first, so ps.front() is the estimate at index N.
  const double p_newest = ps.front();
  const double p_oldest = ps.back();
  const bool exponent_stable = std::abs(p_newest - p_oldest) <= 0.25 * std::max(1.0, std::abs(p_newest));
  const double worst_ratio =
      *std::max_element(log_ratios.begin(), log_ratios.end());

  if (exponent_stable && p_mid < 1.0 - opts.power_margin) {
    return make_divergent(res.n_terms);
  }

  const std::int64_t N2 = 2 * N;
  if (exponent_stable && p_mid > 1.0 + opts.power_margin) {
    // Power-law regime: extend the sweep to 2N, adding every term, and fit
    // the tail from anchors at N, 3N/2, 2N.
    double prev = last_log;
    const std::int64_t A1 = N, A2 = N + (N2 - N) / 2, A3 = N2;
    double anchor_log[3] = {last_log, kLogZero, kLogZero};
    double ratio_at_a3 = kNaN;
    const double ratio_at_a1 = log_ratios.back();
    for (std::int64_t j = N + 1; j <= N2; ++j) {
      const double lt = log_term(j);
      acc.add(std::exp(lt));
      if (j == A2) anchor_log[1] = lt;
      if (j == A3) {
        anchor_log[2] = lt;
        ratio_at_a3 = lt - prev;
      }
      prev = lt;
      if (acc.value() > opts.sum_cap) return make_divergent(j - first + 1);
    }
    res.partial_sum = acc.value();
    res.n_terms = N2 - first + 1;

    if (anchor_log[2] == kLogZero) {
      // Tail underflowed during the extension; nothing left to estimate.
      res.tail_estimate = 0.0;
      res.value = res.partial_sum;
      res.verdict = SeriesVerdict::Convergent;
      return res;
    }

    // Richardson-extrapolated exponent: p(i) = p + c/i + O(1/i^2).
    const double p1 = decay_exponent_at(A1, ratio_at_a1);
    const double p3 = decay_exponent_at(A3, ratio_at_a3);
    const double p = 2.0 * p3 - p1;
    if (!(p > 1.0 + opts.power_margin)) {
      res.verdict = SeriesVerdict::Undetermined;
      return res;
    }
    res.decay_exponent = p;

    // Fit t_i = i^-p (c1 + c2/i + c3/i^2) through the anchors.
    double z[3], g[3];
    const std::int64_t anchors[3] = {A1, A2, A3};
    for (int k = 0; k < 3; ++k) {
      const double ai = static_cast<double>(anchors[k]);
      z[k] = 1.0 / ai;
      g[k] = std::exp(anchor_log[k] + p * std::log(ai));
    }
    double c[3];
    fit_quadratic(z, g, c);
    const double tail =
        c[0] * power_tail(p, N2) + c[1] * power_tail(p + 1.0, N2) + c[2] * power_tail(p + 2.0, N2);
    res.tail_estimate = tail;
    res.value = res.partial_sum + tail;
    res.verdict = SeriesVerdict::Convergent;
    return res;
  }

  if (worst_ratio < 0.0) {
    // Decreasing terms but too slow for the in-budget geometric exit
    // (ratio between 1 - margin and 1). Grant a 2x grace extension with
    // the geometric bound checked against the trailing worst ratio.
    double rolling_worst = worst_ratio;
    double prev = last_log;
    for (std::int64_t j = N + 1; j <= N2; ++j) {
      const double lt = log_term(j);
      const double t = std::exp(lt);
      acc.add(t);
      if (lt != kLogZero) rolling_worst = std::max(rolling_worst * 0.9, lt - prev);
      prev = lt;
      res.n_terms = j - first + 1;
      if (rolling_worst < 0.0) {
        const double r = std::exp(rolling_worst);
        const double tail = t * r / (1.0 - r);
        if (tail <= opts.tol * std::max(std::abs(acc.value()), 1e-300) || lt == kLogZero) {
          res.partial_sum = acc.value();
          res.tail_estimate = tail;
          res.value = res.partial_sum + tail;
          res.verdict = SeriesVerdict::Convergent;
          return res;
        }
      }
      if (acc.value() > opts.sum_cap) return make_divergent(res.n_terms);
    }
    res.partial_sum = acc.value();
    return res;  // Undetermined
  }

  return res;  // Undetermined
}

}  // namespace quasistat
