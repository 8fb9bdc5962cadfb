#include "quasistat/duality.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "quasistat/errors.hpp"

namespace quasistat {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Rate sequence relabeled so that new index i reads the old sequence at
// i - delta. Expression and table forms stay serializable.
RateFunction reindex_rate(const RateFunction& f, std::int64_t delta) {
  if (f.is_expression()) {
    return RateFunction::from_expression(f.expression().shift_index(-delta));
  }
  if (f.is_table()) {
    std::optional<RateExpression> ext;
    if (f.extension()) ext = f.extension()->shift_index(-delta);
    return RateFunction::from_table(f.table(), f.table_first_index() + delta, std::move(ext));
  }
  return RateFunction::from_callable([f, delta](std::int64_t i) { return f(i - delta); });
}

double rel_diff(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / scale;
}

double series_residual(const SeriesResult& lhs, double rhs_value, bool rhs_convergent) {
  if (!lhs.convergent() || !rhs_convergent) return kNaN;
  return rel_diff(lhs.value, rhs_value);
}

}  // namespace

DualPair dualize(const BirthDeathSpec& spec, double tol_series, std::int64_t max_terms) {
  DualPair pair;
  if (spec.convention() == Convention::ReflectingAtZero) {
    pair.primal = spec;
    // b_i = dtilde_i (i >= 1), d_i = btilde_{i-1} (i >= 1)
    pair.dual = BirthDeathSpec(spec.death_function(), reindex_rate(spec.birth_function(), 1),
                               Convention::AbsorbedAtZero);
  } else {
    // inverse map: btilde_i = d_{i+1}, dtilde_i = b_i
    pair.dual = spec;
    pair.primal = BirthDeathSpec(reindex_rate(spec.death_function(), -1), spec.birth_function(),
                                 Convention::ReflectingAtZero);
  }
  pair.primal.validate(4);
  pair.dual.validate(4);

  pair.primal_series = boundary_series(pair.primal, tol_series, max_terms);
  pair.dual_series = boundary_series(pair.dual, tol_series, max_terms);

  // Potential-coefficient transfer: pi_i = btilde_0 / (dtilde_i pitilde_i)
  // and 1/(b_i pi_i) = pitilde_i / btilde_0, checked on a prefix.
  std::int64_t check_to = 48;
  if (const auto m = pair.dual.max_state()) check_to = std::min(check_to, *m - 1);
  if (const auto m = pair.primal.max_state()) check_to = std::min(check_to, *m - 1);
  const double btilde0 = pair.primal.birth(0);
  const LogWeightVector pi = potential_coefficients(pair.dual, check_to);
  const LogWeightVector pit = potential_coefficients(pair.primal, check_to);
  double worst = 0.0;
  for (std::int64_t i = 1; i <= check_to; ++i) {
    const double lhs1 = pi.log_at(i);
    const double rhs1 = std::log(btilde0) - std::log(pair.primal.death(i)) - pit.log_at(i);
    worst = std::max(worst, std::abs(lhs1 - rhs1));
    const double lhs2 = -std::log(pair.dual.birth(i)) - pi.log_at(i);
    const double rhs2 = pit.log_at(i) - std::log(btilde0);
    worst = std::max(worst, std::abs(lhs2 - rhs2));
  }
  pair.transfer.pi_identity_residual = worst;  // log-scale ~ relative error

  const auto& ps = pair.primal_series;
  const auto& ds = pair.dual_series;
  pair.transfer.a_residual =
      series_residual(ds.A, (ps.B.value - 1.0) / btilde0, ps.B.convergent());
  pair.transfer.b_residual = series_residual(ds.B, btilde0 * ps.A.value, ps.A.convergent());
  pair.transfer.r_residual = series_residual(ds.R, ps.S.value, ps.S.convergent());
  pair.transfer.s_residual = series_residual(
      ds.S, ps.R.value - ps.A.value, ps.R.convergent() && ps.A.convergent());
  return pair;
}

PolynomialTable dual_polynomials(const DualPair& pair, double lambda, std::int64_t n,
                                 double tol) {
  if (n < 1) throw InvalidSpec("dual_polynomials requires n >= 1");
  const BirthDeathSpec& dual = pair.dual;
  const double d1 = dual.death(1);

  const std::vector<double> q = eval_polynomials_stable(dual, lambda, n + 1);
  const LogWeightVector pi = potential_coefficients(dual, n + 1);
  const LogWeightVector pit = potential_coefficients(pair.primal, n);

  PolynomialTable table;
  table.x = lambda;
  table.first_index = 0;
  table.values.reserve(static_cast<std::size_t>(n + 1));
  table.values.push_back(SignedLog{kLogZero, 0});  // Qtilde_0 = 0 by convention

  CompensatedSum prefix;  // sum_{j<i} pi_j Q_j
  std::vector<double> qt(static_cast<std::size_t>(n + 1), 0.0);
  for (std::int64_t i = 1; i <= n; ++i) {
    qt[static_cast<std::size_t>(i)] = 1.0 - (lambda / d1) * prefix.value();
    table.values.push_back(SignedLog::from_value(qt[static_cast<std::size_t>(i)]));
    prefix.add(std::exp(pi.log_at(i)) * q[static_cast<std::size_t>(i - 1)]);
  }

  // Cross-validation. Residuals are absolute on the unit scale of Qtilde
  // (deep entries underflow the 1 - prefix form, so purely relative
  // residuals would be noise-dominated there).
  for (std::int64_t i = 1; i <= n; ++i) {
    const double qt_i = qt[static_cast<std::size_t>(i)];
    if (i < n) {
      const double lhs = qt_i - qt[static_cast<std::size_t>(i + 1)];
      const double rhs =
          (lambda / d1) * std::exp(pi.log_at(i)) * q[static_cast<std::size_t>(i - 1)];
      if (std::abs(lhs - rhs) > tol * std::max({1.0, std::abs(lhs), std::abs(rhs)})) {
        std::ostringstream os;
        os << "difference identity violated at i=" << i << ": " << lhs << " vs " << rhs;
        throw IdentityViolation(os.str());
      }
    }
    // gap form: pitilde_{i-1} Qtilde_i = Q_i - Q_{i-1}
    const double lhs = std::exp(pit.log_at(i - 1)) * qt_i;
    const double rhs =
        q[static_cast<std::size_t>(i - 1)] - (i >= 2 ? q[static_cast<std::size_t>(i - 2)] : 0.0);
    if (std::abs(lhs - rhs) > tol * std::max({1.0, std::abs(lhs), std::abs(rhs)})) {
      std::ostringstream os;
      os << "gap identity violated at i=" << i << ": " << lhs << " vs " << rhs;
      throw IdentityViolation(os.str());
    }
  }
  return table;
}

EigentimeReport eigentime_identity(const DualPair& pair, std::int64_t k_max, double tol) {
  if (k_max < 2) throw InvalidSpec("eigentime_identity requires k_max >= 2");
  const auto& ps = pair.primal_series;
  const auto& ds = pair.dual_series;
  if (!ps.R.convergent() || ps.S.verdict != SeriesVerdict::Divergent) {
    throw PreconditionFailed(
        "eigentime identity needs an exit-boundary primal (Rtilde < inf, Stilde = inf)");
  }
  if (!ds.B.convergent() || !ds.S.convergent()) {
    throw PreconditionFailed("eigentime identity needs summable B and S for the dual");
  }

  EigentimeReport rep;
  rep.r_tilde = ps.R.value;
  const double d1 = pair.dual.death(1);
  rep.series_alt = ds.B.value / d1 + ds.S.value;

  SpectralOptions sopts;
  sopts.assume_entrance = true;  // exit primal forces the entrance dual
  const SpectralSummary spec = spectrum(pair.dual, k_max, tol, sopts);
  rep.xi = spec.xi;

  CompensatedSum ssum;
  for (double x : spec.xi) ssum.add(1.0 / x);

  // Tail beyond xi_k: fit the eigenvalue growth on the trailing half and
  // integrate the reciprocal. Growth close to quadratic gets a quadratic
  // least-squares model; otherwise a log-log power law.
  const std::size_t k = spec.xi.size();
  const std::size_t lo = k / 2;
  double p_hat = 0.0;
  {
    // log-log regression slope over the trailing half
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = static_cast<double>(k - lo);
    for (std::size_t j = lo; j < k; ++j) {
      const double X = std::log(static_cast<double>(j + 1));
      const double Y = std::log(spec.xi[j]);
      sx += X; sy += Y; sxx += X * X; sxy += X * Y;
    }
    p_hat = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  }

  double tail = 0.0, fit_dev = 0.0, leftover = 0.0;
  if (std::abs(p_hat - 2.0) < 0.35) {
    // xi_i ~ a i^2 + b i + c by least squares
    double S0 = 0, S1 = 0, S2 = 0, S3 = 0, S4 = 0, T0 = 0, T1 = 0, T2 = 0;
    for (std::size_t j = lo; j < k; ++j) {
      const double x = static_cast<double>(j + 1);
      const double y = spec.xi[j];
      S0 += 1; S1 += x; S2 += x * x; S3 += x * x * x; S4 += x * x * x * x;
      T0 += y; T1 += x * y; T2 += x * x * y;
    }
    // solve the 3x3 normal equations by Cramer's rule
    const double det = S4 * (S2 * S0 - S1 * S1) - S3 * (S3 * S0 - S1 * S2) +
                       S2 * (S3 * S1 - S2 * S2);
    const double a = (T2 * (S2 * S0 - S1 * S1) - S3 * (T1 * S0 - T0 * S1) +
                      S2 * (T1 * S1 - T0 * S2)) / det;
    const double b = (S4 * (T1 * S0 - T0 * S1) - T2 * (S3 * S0 - S1 * S2) +
                      S2 * (S3 * T0 - S2 * T1)) / det;
    const double c = (S4 * (S2 * T0 - S1 * T1) - S3 * (S3 * T0 - S1 * T2) +
                      S2 * (S3 * T1 - S2 * T2)) / det;
    for (std::size_t j = lo; j < k; ++j) {
      const double x = static_cast<double>(j + 1);
      fit_dev = std::max(fit_dev, std::abs(a * x * x + b * x + c - spec.xi[j]) / spec.xi[j]);
    }
    CompensatedSum tacc;
    const std::int64_t far = 2'000'000;
    for (std::int64_t i = static_cast<std::int64_t>(k) + 1; i <= far; ++i) {
      const double x = static_cast<double>(i);
      tacc.add(1.0 / (a * x * x + b * x + c));
    }
    leftover = 1.0 / (a * static_cast<double>(far));
    tail = tacc.value() + leftover;
  } else if (p_hat > 1.05) {
    // xi_i ~ alpha i^p
    const double alpha = spec.xi[k - 1] / std::pow(static_cast<double>(k), p_hat);
    for (std::size_t j = lo; j < k; ++j) {
      const double x = static_cast<double>(j + 1);
      fit_dev = std::max(fit_dev, std::abs(alpha * std::pow(x, p_hat) - spec.xi[j]) / spec.xi[j]);
    }
    tail = power_tail(p_hat, static_cast<std::int64_t>(k)) / alpha;
    leftover = 0.0;
  } else {
    throw SpectralFailure("eigenvalue growth too slow to certify a summable reciprocal tail");
  }

  rep.tail_estimate = tail;
  rep.tail_bound = 4.0 * fit_dev * tail + leftover;
  rep.spectral_sum = ssum.value() + tail;
  rep.rel_error_alt = std::abs(rep.r_tilde - rep.series_alt) / rep.r_tilde;
  rep.rel_error_spectral = std::abs(rep.r_tilde - rep.spectral_sum) / rep.r_tilde;
  return rep;
}

SummabilityReport summability_check(const DualPair& pair, double lambda, std::int64_t n) {
  if (n < 1) throw InvalidSpec("summability_check requires n >= 1");
  const PolynomialTable qt = dual_polynomials(pair, lambda, n);
  const LogWeightVector pit = potential_coefficients(pair.primal, n);
  const std::vector<double> q =
      eval_polynomials_stable(pair.dual, lambda, std::max<std::int64_t>(n + 1, 64));

  SummabilityReport rep;
  rep.bound = *std::max_element(q.begin(), q.end());

  CompensatedSum acc;
  rep.partial_sums.reserve(static_cast<std::size_t>(n));
  for (std::int64_t i = 1; i <= n; ++i) {
    const double qti = qt.value(i);
    acc.add(std::exp(pit.log_at(i - 1)) * qti * qti);
    const double p = acc.value();
    if (p > rep.bound * (1.0 + 1e-12)) {
      std::ostringstream os;
      os << "summability bound violated at n=" << i << ": partial sum " << p << " exceeds "
         << rep.bound;
      throw IdentityViolation(os.str());
    }
    rep.partial_sums.push_back(p);
  }
  return rep;
}

}  // namespace quasistat
