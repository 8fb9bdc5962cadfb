#ifndef QUASISTAT_DUALITY_HPP
#define QUASISTAT_DUALITY_HPP

#include <cstdint>
#include <vector>

#include "quasistat/birth_death.hpp"
#include "quasistat/chain_model.hpp"
#include "quasistat/polynomials.hpp"
#include "quasistat/spectral.hpp"

namespace quasistat {

// Residuals of the transfer identities between a reflecting chain and its
// absorbed dual. Series residuals are NaN when either side lacks a
// convergent value.
struct TransferRecord {
  double pi_identity_residual = 0.0;  // max relative error over the checked prefix
  double a_residual = 0.0;            // A vs (Btilde - 1)/btilde_0
  double b_residual = 0.0;            // B vs btilde_0 * Atilde
  double r_residual = 0.0;            // R vs Stilde
  double s_residual = 0.0;            // S vs Rtilde - Atilde
};

// Reflecting primal paired with its absorbed dual under the index map
//   d_0 = 0,  b_i = dtilde_i,  d_{i+1} = btilde_i.
struct DualPair {
  BirthDeathSpec primal;  // ReflectingAtZero
  BirthDeathSpec dual;    // AbsorbedAtZero
  BoundarySeries primal_series;
  BoundarySeries dual_series;
  TransferRecord transfer;
};

// Builds the pair from either convention (the map is an involution up to
// convention) and validates the potential-coefficient and series transfer
// identities numerically.
DualPair dualize(const BirthDeathSpec& spec, double tol_series = 1e-10,
                 std::int64_t max_terms = 10000);

// Dual polynomial family at argument lambda, indexed 0..n with the
// convention Qtilde_0 = 0, Qtilde_1 = 1:
//   Qtilde_i(x) = 1 - (x/d_1) sum_{j<i} pi_j Q_j(x)
// cross-validated against the difference form
//   Qtilde_i - Qtilde_{i+1} = (x/d_1) pi_i Q_i
// and the gap form pitilde_{i-1} Qtilde_i = Q_i - Q_{i-1}. Disagreement
// beyond `tol` (absolute, on the unit scale of Qtilde) raises
// IdentityViolation.
PolynomialTable dual_polynomials(const DualPair& pair, double lambda, std::int64_t n,
                                 double tol = 1e-8);

struct EigentimeReport {
  double r_tilde = 0.0;        // expected passage time 0 -> infinity, direct series
  double series_alt = 0.0;     // B/d_1 + S from the dual's series
  double spectral_sum = 0.0;   // sum 1/xi_i over the dual spectrum, tail folded in
  double tail_estimate = 0.0;  // portion of spectral_sum beyond xi_k
  double tail_bound = 0.0;     // uncertainty of the tail estimate
  double rel_error_alt = 0.0;       // |r_tilde - series_alt| / r_tilde
  double rel_error_spectral = 0.0;  // |r_tilde - spectral_sum| / r_tilde
  std::vector<double> xi;
};

// Three-way check of the eigentime identity: the passage-time series, its
// closed transfer form, and the reciprocal spectrum sum are computed
// independently. Requires an exit-boundary primal (PreconditionFailed
// otherwise).
EigentimeReport eigentime_identity(const DualPair& pair, std::int64_t k_max, double tol);

struct SummabilityReport {
  std::vector<double> partial_sums;  // of pitilde_{i-1} Qtilde_i(lambda)^2
  double bound = 0.0;                // sup_i Q_i(lambda) over a deep prefix
};

// Partial sums of the dual-polynomial weight series; every partial sum is
// bounded by the monotone limit of Q(lambda) (telescoping bound), and a
// violation raises IdentityViolation.
SummabilityReport summability_check(const DualPair& pair, double lambda, std::int64_t n);

}  // namespace quasistat

#endif
