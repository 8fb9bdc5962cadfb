#include "quasistat/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "quasistat/chain_model.hpp"
#include "quasistat/errors.hpp"

namespace quasistat {

namespace {

struct Tridiagonal {
  std::vector<double> diag;      // b_j + d_j
  std::vector<double> off_sq;    // b_j d_{j+1}, between j and j+1
  double gersh_lo = 0.0;
  double gersh_hi = 0.0;
};

Tridiagonal build_truncation(const BirthDeathSpec& spec, std::int64_t n) {
  if (spec.convention() != Convention::AbsorbedAtZero) {
    throw InvalidSpec("spectral truncation expects the absorbed-at-zero convention");
  }
  if (const auto m = spec.max_state(); m && *m < n + 1) {
    std::ostringstream os;
    os << "truncation size " << n << " exceeds the declared rate range (max state " << *m << ")";
    throw InvalidSpec(os.str());
  }
  Tridiagonal t;
  t.diag.resize(static_cast<std::size_t>(n));
  t.off_sq.resize(static_cast<std::size_t>(n > 0 ? n - 1 : 0));
  for (std::int64_t j = 1; j <= n; ++j) {
    t.diag[static_cast<std::size_t>(j - 1)] = spec.birth(j) + spec.death(j);
    if (j < n) {
      t.off_sq[static_cast<std::size_t>(j - 1)] = spec.birth(j) * spec.death(j + 1);
    }
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (std::int64_t j = 0; j < n; ++j) {
    const double left = j > 0 ? std::sqrt(t.off_sq[static_cast<std::size_t>(j - 1)]) : 0.0;
    const double right =
        j + 1 < n ? std::sqrt(t.off_sq[static_cast<std::size_t>(j)]) : 0.0;
    lo = std::min(lo, t.diag[static_cast<std::size_t>(j)] - left - right);
    hi = std::max(hi, t.diag[static_cast<std::size_t>(j)] + left + right);
  }
  t.gersh_lo = std::max(0.0, lo);  // the truncated operator is positive definite
  t.gersh_hi = hi;
  return t;
}

// Number of eigenvalues strictly below x (Sturm count via LDL^T pivots).
std::int64_t sturm_count(const Tridiagonal& t, double x) {
  const std::size_t n = t.diag.size();
  std::int64_t count = 0;
  double q = t.diag[0] - x;
  if (q < 0.0) ++count;
  const double pivmin = 1e-300;
  for (std::size_t j = 1; j < n; ++j) {
    if (std::abs(q) < pivmin) q = q < 0.0 ? -pivmin : pivmin;
    q = (t.diag[j] - x) - t.off_sq[j - 1] / q;
    if (q < 0.0) ++count;
  }
  return count;
}

// k-th smallest eigenvalue (1-based) by bisection on the Sturm count.
double bisect_eigenvalue(const Tridiagonal& t, std::int64_t k, double tol) {
  double lo = t.gersh_lo;
  double hi = t.gersh_hi;
  while (hi - lo > tol + 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(lo), std::abs(hi))) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;  // interval at rounding resolution
    if (sturm_count(t, mid) >= k) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

std::vector<double> tridiagonal_smallest_eigenvalues(const BirthDeathSpec& spec, std::int64_t n,
                                                     std::int64_t k, double tol) {
  if (n < 1) throw InvalidSpec("truncation size must be >= 1");
  const Tridiagonal t = build_truncation(spec, n);
  k = std::min(k, n);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(k));
  for (std::int64_t j = 1; j <= k; ++j) {
    out.push_back(bisect_eigenvalue(t, j, tol));
  }
  return out;
}

std::vector<double> polynomial_zeros(const BirthDeathSpec& spec, std::int64_t i) {
  if (i < 2) throw InvalidSpec("polynomial_zeros requires i >= 2");
  auto zeros = tridiagonal_smallest_eigenvalues(spec, i - 1, i - 1, 1e-13);
  for (std::size_t j = 0; j < zeros.size(); ++j) {
    if (zeros[j] <= 0.0 || (j > 0 && zeros[j] <= zeros[j - 1])) {
      throw SpectralFailure("computed zeros are not positive and simple");
    }
  }
  return zeros;
}

namespace {

void check_entrance(const BirthDeathSpec& spec, const SpectralOptions& opts) {
  if (opts.assume_entrance) return;
  const BoundaryClass cls = classify_boundary(boundary_series(spec));
  if (cls.kind != BoundaryKind::Entrance) {
    throw PreconditionFailed("spectral limits need an entrance boundary (got " +
                             to_string(cls.kind) + "); pass assume_entrance to override");
  }
}

}  // namespace

SpectralSummary decay_parameter(const BirthDeathSpec& spec, double tol,
                                const SpectralOptions& opts) {
  check_entrance(spec, opts);
  SpectralSummary out;
  out.tol = tol;

  std::int64_t n = opts.start_truncation;
  if (const auto m = spec.max_state()) n = std::min(n, *m - 1);
  double prev = std::numeric_limits<double>::infinity();
  while (true) {
    const double x1 = tridiagonal_smallest_eigenvalues(spec, n, 1, opts.solver_tol)[0];
    out.truncation_sizes.push_back(n);
    out.witness.push_back(x1);
    // interlacing forces strict decrease; allow rounding jitter
    const double jitter = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(prev));
    if (x1 > prev + jitter) {
      throw SpectralFailure("smallest-zero witness sequence is not decreasing");
    }
    if (std::isfinite(prev) && std::abs(prev - x1) <= tol) {
      out.lambda = x1;
      out.xi = {x1};
      out.converged = {true};
      out.achieved_tol = {std::abs(prev - x1)};
      return out;
    }
    prev = x1;
    if (n >= opts.max_truncation ||
        (spec.max_state() && n >= *spec.max_state() - 1)) {
      out.lambda = x1;
      out.xi = {x1};
      out.converged = {false};
      out.achieved_tol = {std::numeric_limits<double>::quiet_NaN()};
      throw ToleranceNotMet("decay parameter did not converge within the truncation cap", out);
    }
    n = std::min(n * 2, opts.max_truncation);
  }
}

SpectralSummary spectrum(const BirthDeathSpec& spec, std::int64_t k, double tol,
                         const SpectralOptions& opts) {
  if (k < 1) throw InvalidSpec("spectrum requires k >= 1");
  check_entrance(spec, opts);
  SpectralSummary out;
  out.tol = tol;
  out.xi.assign(static_cast<std::size_t>(k), 0.0);
  out.converged.assign(static_cast<std::size_t>(k), false);
  out.achieved_tol.assign(static_cast<std::size_t>(k), std::numeric_limits<double>::quiet_NaN());

  std::int64_t n = std::max(opts.start_truncation, 4 * k);
  std::vector<double> prev;
  while (true) {
    std::vector<double> cur = tridiagonal_smallest_eigenvalues(spec, n, k, opts.solver_tol);
    out.truncation_sizes.push_back(n);
    out.witness.push_back(cur[0]);
    bool all_converged = cur.size() == static_cast<std::size_t>(k);
    if (prev.size() == cur.size()) {
      for (std::size_t j = 0; j < cur.size(); ++j) {
        const double drift = std::abs(cur[j] - prev[j]);
        out.achieved_tol[j] = drift;
        out.converged[j] = drift <= tol;
        all_converged = all_converged && out.converged[j];
      }
    } else {
      all_converged = false;
    }
    out.xi.assign(cur.begin(), cur.end());
    out.lambda = cur[0];
    if (all_converged) {
      for (std::size_t j = 1; j < out.xi.size(); ++j) {
        if (out.xi[j] <= out.xi[j - 1]) {
          throw SpectralFailure("spectrum points are not strictly increasing");
        }
      }
      return out;
    }
    if (n >= opts.max_truncation || (spec.max_state() && n >= *spec.max_state() - 1)) {
      throw ToleranceNotMet("spectrum did not converge within the truncation cap", out);
    }
    prev = std::move(cur);
    n = std::min(n * 2, opts.max_truncation);
  }
}

}  // namespace quasistat
