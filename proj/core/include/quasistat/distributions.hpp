#ifndef QUASISTAT_DISTRIBUTIONS_HPP
#define QUASISTAT_DISTRIBUTIONS_HPP

#include <cstdint>
#include <vector>

#include "quasistat/birth_death.hpp"
#include "quasistat/chain_model.hpp"
#include "quasistat/log_domain.hpp"

namespace quasistat {

// Probability weights over states first_index..first_index+size-1, kept in
// log domain with the full-series normalizer (reported entries may cover
// only a prefix of the mass; the remainder is bounded by
// truncation_error_bound).
struct DistributionVector {
  LogWeightVector weights;               // unnormalized log weights
  double log_normalizer = 0.0;           // log of the full-series sum
  double truncation_error_bound = 0.0;   // bound on the unreported tail mass
  double identity_residual = 0.0;        // closed-form cross-check residual, where one exists

  std::vector<double> probabilities() const { return weights.values(log_normalizer); }
  double probability(std::int64_t state) const;
  std::size_t size() const { return weights.size(); }
};

// Quasi-stationary distribution nu_i proportional to pi_i Q_i(lambda),
// normalized by the full series. Records the residual of the closed-form
// identity lambda * sum_i pi_i Q_i(lambda) = d_1 as a diagnostic (the
// normalized form is primary). n > 0 reports exactly n entries; n <= 0
// auto-truncates where the log weight drops 40 nats below its peak.
DistributionVector qsd(const BirthDeathSpec& spec, double lambda, std::int64_t n);

// Quasi-ergodic distribution m_i proportional to pi_i Q_i(lambda)^2.
DistributionVector qed(const BirthDeathSpec& spec, double lambda, std::int64_t n);

// The process conditioned to never be absorbed: a birth-death process on
// the positive integers with rates
//   bbar_i = b_i Q_{i+1}(lambda)/Q_i(lambda),
//   dbar_i = d_i Q_{i-1}(lambda)/Q_i(lambda)   (dbar_1 = 0: state 1 reflects),
// potential coefficients pibar_i = Q_i(lambda)^2 pi_i, and the transformed
// boundary series. Rate tables cover 1..depth; the tables are immutable,
// so the value is safe to share across threads.
struct HProcessSpec {
  double lambda = 0.0;
  std::vector<double> birth_rates;  // bbar_1..bbar_depth
  std::vector<double> death_rates;  // dbar_1..dbar_depth, dbar_1 = 0
  LogWeightVector pi_bar;           // pibar_1..pibar_depth
  BoundarySeries series;            // Abar, Bbar, Rbar, Sbar

  std::int64_t depth() const { return static_cast<std::int64_t>(birth_rates.size()); }
  double birth(std::int64_t i) const;
  double death(std::int64_t i) const;

  // The same chain re-indexed to start at 0 (state i maps to i-1), which
  // makes it a reflecting-at-zero spec restricted to the table range.
  BirthDeathSpec reflecting_shifted() const;

  // Normalized pibar: the unique stationary law, equal to the
  // quasi-ergodic distribution.
  DistributionVector stationary(std::int64_t n) const;
};

HProcessSpec h_process(const BirthDeathSpec& spec, double lambda, std::int64_t depth);

struct OrderingCheck {
  bool is_lr_ordered = false;
  std::vector<double> ratio;  // m_i / nu_i per state
};

// Likelihood-ratio comparison: nondecreasing m/nu means nu is dominated by
// m in the monotone likelihood-ratio order.
OrderingCheck ordering_check(const DistributionVector& m, const DistributionVector& nu);

struct GapIdentityRow {
  std::int64_t k = 0;
  double gap = 0.0;        // Q_{k+1}(lambda) - Q_k(lambda)
  double tail_form = 0.0;  // (lambda / (b_k pi_k)) sum_{i>k} pi_i Q_i(lambda)
  double residual = 0.0;   // relative discrepancy
};

// Certifies the summation-by-parts identity behind strict monotonicity of
// Q(lambda): every gap must be positive and match its tail form within
// `tol`, with Q_1 = 1 the minimum. Violations raise IdentityViolation.
std::vector<GapIdentityRow> monotonicity_certificate(const BirthDeathSpec& spec, double lambda,
                                                     std::int64_t n, double tol = 1e-8);

}  // namespace quasistat

#endif
