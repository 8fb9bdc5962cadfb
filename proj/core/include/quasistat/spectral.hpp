#ifndef QUASISTAT_SPECTRAL_HPP
#define QUASISTAT_SPECTRAL_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "quasistat/birth_death.hpp"
#include "quasistat/errors.hpp"

namespace quasistat {

// Decay parameter and leading spectrum points, with the truncation
// witness kept for auditability.
struct SpectralSummary {
  double lambda = 0.0;             // = xi.front()
  std::vector<double> xi;          // ascending spectrum points xi_1..xi_k
  std::vector<std::int64_t> truncation_sizes;
  std::vector<double> witness;     // smallest eigenvalue per truncation size
  std::vector<bool> converged;     // per xi entry
  std::vector<double> achieved_tol;
  double tol = 0.0;
};

struct SpectralOptions {
  std::int64_t start_truncation = 32;
  std::int64_t max_truncation = std::int64_t{1} << 16;
  bool assume_entrance = false;  // skip the boundary-classification guard
  double solver_tol = 1e-10;     // bisection resolution, separate from the user tol
};

// Eigenvalues of the symmetric tridiagonal truncation of order n:
// diagonal b_j + d_j, off-diagonal -sqrt(b_j d_{j+1}), j = 1..n. These are
// the zeros of Q_{n+1}; the symmetrization is the similarity transform of
// the recurrence by sqrt(pi) weights. Returns the k smallest (all of them
// when k >= n), ascending, by Sturm-count bisection.
std::vector<double> tridiagonal_smallest_eigenvalues(const BirthDeathSpec& spec, std::int64_t n,
                                                     std::int64_t k, double tol = 1e-12);

// The i-1 positive simple zeros of Q_i, ascending. Requires i >= 2.
std::vector<double> polynomial_zeros(const BirthDeathSpec& spec, std::int64_t i);

// Decay parameter as the truncation limit of the smallest zero: the
// truncation size doubles until successive smallest eigenvalues agree to
// `tol`. The witness sequence decreases (interlacing); a rise beyond
// rounding jitter raises SpectralFailure, and exhausting the truncation
// cap raises ToleranceNotMet carrying the best estimate.
SpectralSummary decay_parameter(const BirthDeathSpec& spec, double tol,
                                const SpectralOptions& opts = SpectralOptions{});

// Leading spectrum points xi_1..xi_k, each converged to `tol` under
// truncation doubling; strictly increasing on success.
SpectralSummary spectrum(const BirthDeathSpec& spec, std::int64_t k, double tol,
                         const SpectralOptions& opts = SpectralOptions{});

// Thrown payload carrier for unmet tolerance.
class ToleranceNotMet : public NumericalError {
public:
  ToleranceNotMet(const std::string& what, SpectralSummary best)
      : NumericalError(what), best_(std::move(best)) {}
  const SpectralSummary& best() const { return best_; }

private:
  SpectralSummary best_;
};

}  // namespace quasistat

#endif
