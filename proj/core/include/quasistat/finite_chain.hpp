#ifndef QUASISTAT_FINITE_CHAIN_HPP
#define QUASISTAT_FINITE_CHAIN_HPP

#include <cstdint>
#include <vector>

#include "quasistat/birth_death.hpp"
#include "quasistat/distributions.hpp"

namespace quasistat {

// Dense sub-Markovian generator on states 1..n plus an implicit cemetery:
// off-diagonal rates are nonnegative, each row sums to -absorption[i], and
// at least one absorption rate is positive. The chain restricted to the
// live states must be irreducible for the Perron data to be unique.
class FiniteAbsorbingChain {
public:
  FiniteAbsorbingChain() = default;
  FiniteAbsorbingChain(std::int64_t n_states, std::vector<double> generator_row_major,
                       std::vector<double> absorption_rates);

  // Convenience builder: truncation of a birth-death spec to states
  // 1..n_states with the death rate of state 1 feeding the cemetery and
  // the birth rate at the top state dropped.
  static FiniteAbsorbingChain truncate(const BirthDeathSpec& spec, std::int64_t n_states);

  std::int64_t size() const { return n_; }
  double rate(std::int64_t i, std::int64_t j) const {  // 1-based
    return q_[static_cast<std::size_t>((i - 1) * n_ + (j - 1))];
  }
  double absorption(std::int64_t i) const { return kappa_[static_cast<std::size_t>(i - 1)]; }
  const std::vector<double>& generator() const { return q_; }
  const std::vector<double>& absorption_rates() const { return kappa_; }

  bool irreducible() const;
  // Throws InvalidSpec / NotIrreducible on contract violations.
  void validate() const;

private:
  std::int64_t n_ = 0;
  std::vector<double> q_;      // row-major n x n
  std::vector<double> kappa_;  // n
};

// Dominant eigen-pair of the live-state generator: Q eta = -lambda eta,
// nu Q = -lambda nu, normalized to sum(nu) = 1 and sum(eta nu) = 1.
struct PerronData {
  double lambda = 0.0;
  std::vector<double> eta;
  std::vector<double> nu;
  double eta_residual = 0.0;  // ||Q eta + lambda eta||_inf / ||eta||_inf
  double nu_residual = 0.0;   // ||nu Q + lambda nu||_1
};

PerronData perron_data(const FiniteAbsorbingChain& chain, double tol = 1e-10);

// The product law m_i = eta_i nu_i; a probability vector by normalization.
DistributionVector qed_finite(const PerronData& pd);

// Initial law: a point mass or an explicit distribution over 1..n.
class InitialLaw {
public:
  static InitialLaw point(std::int64_t state);
  static InitialLaw distribution(std::vector<double> weights);  // over 1..n, renormalized
  const std::vector<double>& weights() const { return w_; }
  std::int64_t point_state() const { return point_; }  // 0 when not a point mass
private:
  std::vector<double> w_;
  std::int64_t point_ = 0;
};

// Exact conditional law P_init(X_t in . | T > t) via log-scaled
// uniformization of the killed semigroup (series error <= 1e-12 per step).
std::vector<double> conditional_marginal(const FiniteAbsorbingChain& chain, const InitialLaw& init,
                                         double t);

struct TimeAverageResult {
  double value = 0.0;
  double quadrature_error = 0.0;  // last refinement change
  std::int64_t nodes_used = 0;
};

// Exact E_init[(1/t) int_0^t f(X_s) ds | T > t] by composite Gauss-Legendre
// quadrature over the two-sided semigroup product, refined by node doubling
// until the estimate moves less than 1e-10.
TimeAverageResult conditional_time_average(const FiniteAbsorbingChain& chain,
                                           const InitialLaw& init, double t,
                                           const std::vector<double>& f,
                                           std::int64_t quad_points = 64);

// sup_x |e^{lambda t} P_x(T > t) - eta(x)| for each grid point.
std::vector<double> eta_limit_check(const FiniteAbsorbingChain& chain, const PerronData& pd,
                                    const std::vector<double>& t_grid);

// Survival weights after time t from each state, as log values (the
// uniform-norm object behind eta_limit_check; exposed for tests and the
// CLI oracle report).
std::vector<double> log_survival_by_state(const FiniteAbsorbingChain& chain, double t);

}  // namespace quasistat

#endif
