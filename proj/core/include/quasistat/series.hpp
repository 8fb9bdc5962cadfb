#ifndef QUASISTAT_SERIES_HPP
#define QUASISTAT_SERIES_HPP

#include <cstdint>
#include <functional>
#include <limits>

namespace quasistat {

// Numerical convergence is undecidable; verdicts come from a conservative
// heuristic and Undetermined is the honest fallback. A Convergent verdict
// carries an accelerated value; a Divergent verdict is only issued on
// sound evidence for positive-term series (partial sum past the cap, or
// terms decaying slower than a summable power law).
enum class SeriesVerdict { Convergent, Divergent, Undetermined };

struct SeriesResult {
  double partial_sum = 0.0;  // compensated sum over the evaluated terms
  double value = std::numeric_limits<double>::quiet_NaN();  // partial + tail when Convergent
  double tail_estimate = 0.0;
  std::int64_t n_terms = 0;
  SeriesVerdict verdict = SeriesVerdict::Undetermined;
  // decay exponent p of t_i ~ c/i^p when the power-law analysis fired
  double decay_exponent = std::numeric_limits<double>::quiet_NaN();

  bool convergent() const { return verdict == SeriesVerdict::Convergent; }
};

struct SeriesOptions {
  double tol = 1e-10;            // target relative accuracy of the reported value
  std::int64_t max_terms = 10000;
  double sum_cap = 1e100;        // partial sums beyond this mean Divergent
  double geometric_margin = 0.05;  // trailing ratio < 1 - margin: geometric regime
  double power_margin = 0.10;      // |p - 1| <= margin: refuse to decide
  int window = 16;                 // trailing-ratio window length
};

// Sums a positive-term series with three decision signals:
//   (i)   trailing-window ratio test; ratios uniformly below 1 - margin end
//         the sweep early with a geometric tail bound,
//   (ii)  ratios tending to 1 from below trigger a power-law analysis:
//         the decay exponent p is estimated by Richardson extrapolation of
//         i*(1 - t_{i+1}/t_i) and, for p > 1 + margin, a three-coefficient
//         tail c1/i^p + c2/i^(p+1) + c3/i^(p+2) is fitted and summed in
//         closed form (Hurwitz-zeta tail via Euler-Maclaurin),
//   (iii) the partial sum passing `sum_cap`, or a trailing decay exponent
//         below 1 - margin, yields Divergent.
// Anything else is Undetermined.
//
// `log_term(i)` is called for strictly increasing consecutive i starting at
// `first`; stateful generators are fine. The sweep may extend to
// 2*max_terms when the power-law branch needs anchor points.
SeriesResult sum_series(const std::function<double(std::int64_t)>& log_term,
                        std::int64_t first, const SeriesOptions& opts = SeriesOptions{});

// Tail of the p-series: sum_{i > m} i^(-q), q > 1, via Euler-Maclaurin.
double power_tail(double q, std::int64_t m);

}  // namespace quasistat

#endif
