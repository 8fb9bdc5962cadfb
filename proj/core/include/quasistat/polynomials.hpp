#ifndef QUASISTAT_POLYNOMIALS_HPP
#define QUASISTAT_POLYNOMIALS_HPP

#include <cstdint>
#include <vector>

#include "quasistat/birth_death.hpp"
#include "quasistat/log_domain.hpp"

namespace quasistat {

// Values of the recurrence family
//   Q_0(x) = 0,  Q_1(x) = 1,
//   b_i Q_{i+1}(x) - (b_i + d_i) Q_i(x) + d_i Q_{i-1}(x) = -x Q_i(x)
// stored in signed log form so deep tables survive the double exponent
// range. first_index 1 for the absorbed-boundary family; the dual family
// built by the duality module uses first_index 0.
struct PolynomialTable {
  double x = 0.0;
  std::int64_t first_index = 1;
  std::vector<SignedLog> values;

  std::int64_t last_index() const {
    return first_index + static_cast<std::int64_t>(values.size()) - 1;
  }
  const SignedLog& at(std::int64_t i) const {
    return values[static_cast<std::size_t>(i - first_index)];
  }
  double value(std::int64_t i) const { return at(i).value(); }
  // true when every entry through `up_to` is strictly positive
  bool positive_through(std::int64_t up_to) const;
};

// Forward sweep of the recurrence, signed log domain. Sign patterns are
// reliable everywhere; magnitudes degrade for large i at arguments at or
// below the decay parameter, where Q is the minimal solution of the
// recurrence (use eval_polynomials_stable for accurate values there).
PolynomialTable eval_polynomials(const BirthDeathSpec& spec, double x, std::int64_t n);

// Minimal-solution values by backward recurrence (Miller's device):
// a trial tail started deep past n is recursed downward and normalized to
// Q_1 = 1. Machine-accurate for x <= xi_1; meaningless above the spectrum
// bottom, so callers guard with the positivity criterion. The start depth
// doubles until two runs agree pointwise to `tol`.
std::vector<double> eval_polynomials_stable(const BirthDeathSpec& spec, double x, std::int64_t n,
                                            double tol = 1e-13);

// Largest relative residual of the three-term recurrence over interior
// rows of the table, each row scaled by its largest magnitude term.
double recurrence_residual(const BirthDeathSpec& spec, const PolynomialTable& table);

}  // namespace quasistat

#endif
