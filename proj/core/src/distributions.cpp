#include "quasistat/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include "quasistat/errors.hpp"
#include "quasistat/polynomials.hpp"

namespace quasistat {

namespace {

constexpr double kNatGapDefault = 40.0;
constexpr std::int64_t kWeightDepthCap = std::int64_t{1} << 20;

// Log weights log(pi_i) + q_power * log(Q_i(lambda)) extended until the
// trailing term sits `nat_gap` + margin nats under the peak with a
// geometric trailing ratio, so the discarded tail is resolvable.
struct WeightSweep {
  std::vector<double> logs;  // from state 1
  double log_sum = 0.0;      // full-series normalizer (tail folded in)
  double log_tail = kLogZero;
};

WeightSweep weight_sweep(const BirthDeathSpec& spec, double lambda, int q_power,
                         std::int64_t min_depth) {
  if (spec.convention() != Convention::AbsorbedAtZero) {
    throw InvalidSpec("conditioned distributions expect the absorbed-at-zero convention");
  }
  if (!(lambda > 0.0)) throw InvalidSpec("lambda must be positive");

  std::int64_t depth = std::max<std::int64_t>(min_depth + 16, 64);
  if (const auto m = spec.max_state()) depth = std::min(depth, *m);
  for (;;) {
    const std::vector<double> q = eval_polynomials_stable(spec, lambda, depth);
    for (std::size_t k = 0; k < q.size(); ++k) {
      if (!(q[k] > 0.0)) {
        std::ostringstream os;
        os << "Q_" << (k + 1) << "(lambda) <= 0: lambda overshoots the spectrum bottom";
        throw SpectralFailure(os.str());
      }
    }
    WeightSweep sweep;
    sweep.logs.resize(q.size());
    double log_pi = 0.0;
    double peak = kLogZero;
    for (std::size_t k = 0; k < q.size(); ++k) {
      const std::int64_t i = static_cast<std::int64_t>(k) + 1;
      if (i >= 2) log_pi += std::log(spec.birth(i - 1)) - std::log(spec.death(i));
      sweep.logs[k] = log_pi + q_power * std::log(q[k]);
      peak = std::max(peak, sweep.logs[k]);
    }
    const double last = sweep.logs.back();
    const double prev = sweep.logs[sweep.logs.size() - 2];
    const double ratio = last - prev;  // log of trailing term ratio
    const bool tail_resolved = last < peak - kNatGapDefault - 6.0 && ratio < std::log(0.9);
    if (tail_resolved) {
      sweep.log_tail = last + ratio - std::log1p(-std::exp(ratio));
      sweep.log_sum = log_add_exp(log_sum_exp(sweep.logs), sweep.log_tail);
      return sweep;
    }
    if (depth >= kWeightDepthCap || (spec.max_state() && depth >= *spec.max_state())) {
      if (spec.max_state() && depth >= *spec.max_state()) {
        // Rate range exhausted; treat the table range as the whole space.
        sweep.log_tail = kLogZero;
        sweep.log_sum = log_sum_exp(sweep.logs);
        return sweep;
      }
      throw NotSummable(
          "conditioned weights do not decay: lambda below the spectrum bottom or the boundary "
          "is not entrance");
    }
    depth = std::min(depth * 2, kWeightDepthCap);
  }
}

DistributionVector finalize(const WeightSweep& sweep, std::int64_t n) {
  DistributionVector out;
  std::int64_t report = n;
  if (report <= 0) {
    // default output length: where the log weight has dropped 40 nats
    // below the peak (scale-free factorial-decay rule)
    const double peak = *std::max_element(sweep.logs.begin(), sweep.logs.end());
    report = static_cast<std::int64_t>(sweep.logs.size());
    for (std::size_t k = 0; k < sweep.logs.size(); ++k) {
      if (sweep.logs[k] < peak - kNatGapDefault) {
        report = static_cast<std::int64_t>(k) + 1;
        break;
      }
    }
  }
  report = std::min<std::int64_t>(report, static_cast<std::int64_t>(sweep.logs.size()));
  out.weights = LogWeightVector(
      std::vector<double>(sweep.logs.begin(), sweep.logs.begin() + report), 1);
  out.log_normalizer = sweep.log_sum;

  // mass beyond the reported prefix, bounded by the computed remainder
  // plus the geometric tail estimate
  std::vector<double> rest(sweep.logs.begin() + report, sweep.logs.end());
  double log_rest = log_sum_exp(rest);
  log_rest = log_add_exp(log_rest, sweep.log_tail);
  out.truncation_error_bound =
      log_rest == kLogZero ? 0.0 : std::exp(log_rest - sweep.log_sum);
  return out;
}

}  // namespace

double DistributionVector::probability(std::int64_t state) const {
  const std::int64_t first = weights.first_index();
  if (state < first || state >= first + static_cast<std::int64_t>(weights.size())) return 0.0;
  const double lw = weights.log_at(state);
  return lw == kLogZero ? 0.0 : std::exp(lw - log_normalizer);
}

DistributionVector qsd(const BirthDeathSpec& spec, double lambda, std::int64_t n) {
  const WeightSweep sweep = weight_sweep(spec, lambda, 1, n);
  DistributionVector out = finalize(sweep, n);
  // closed-form diagnostic: lambda * sum_i pi_i Q_i(lambda) = d_1
  const double d1 = spec.death(1);
  out.identity_residual = std::abs(lambda * std::exp(sweep.log_sum) - d1) / d1;
  return out;
}

DistributionVector qed(const BirthDeathSpec& spec, double lambda, std::int64_t n) {
  const WeightSweep sweep = weight_sweep(spec, lambda, 2, n);
  DistributionVector out = finalize(sweep, n);
  out.identity_residual = 0.0;
  return out;
}

double HProcessSpec::birth(std::int64_t i) const {
  if (i < 1 || i > depth()) {
    throw ExcursionCapHit("h-process rate table exhausted at state " + std::to_string(i));
  }
  return birth_rates[static_cast<std::size_t>(i - 1)];
}

double HProcessSpec::death(std::int64_t i) const {
  if (i < 1 || i > depth()) {
    throw ExcursionCapHit("h-process rate table exhausted at state " + std::to_string(i));
  }
  return death_rates[static_cast<std::size_t>(i - 1)];
}

BirthDeathSpec HProcessSpec::reflecting_shifted() const {
  std::vector<double> b(birth_rates.begin(), birth_rates.end());
  std::vector<double> d(death_rates.begin() + 1, death_rates.end());
  return BirthDeathSpec(RateFunction::from_table(std::move(b), 0),
                        RateFunction::from_table(std::move(d), 1), Convention::ReflectingAtZero);
}

DistributionVector HProcessSpec::stationary(std::int64_t n) const {
  if (!series.B.convergent()) {
    throw NotSummable("h-process potential coefficients are not summable");
  }
  DistributionVector out;
  std::int64_t report = n <= 0 ? depth() : std::min(n, depth());
  out.weights = LogWeightVector(
      std::vector<double>(pi_bar.logs().begin(), pi_bar.logs().begin() + report), 1);
  out.log_normalizer = std::log(series.B.value);
  std::vector<double> rest(pi_bar.logs().begin() + report, pi_bar.logs().end());
  const double log_rest = log_sum_exp(rest);
  out.truncation_error_bound =
      log_rest == kLogZero ? 0.0 : std::exp(log_rest - out.log_normalizer);
  return out;
}

HProcessSpec h_process(const BirthDeathSpec& spec, double lambda, std::int64_t depth) {
  if (depth < 2) throw InvalidSpec("h_process requires depth >= 2");
  if (spec.convention() != Convention::AbsorbedAtZero) {
    throw InvalidSpec("h_process expects the absorbed-at-zero convention");
  }

  // Lazily extended table of Q_i(lambda); the boundary-series sweep below
  // probes far past `depth`.
  struct LazyQ {
    const BirthDeathSpec* spec;
    double lambda;
    std::vector<double> q;
    double at(std::int64_t i) {
      while (static_cast<std::int64_t>(q.size()) < i + 1) {
        const std::int64_t want = std::max<std::int64_t>(2 * q.size(), 128);
        q = eval_polynomials_stable(*spec, lambda, want);
        for (std::size_t k = 0; k < q.size(); ++k) {
          if (!(q[k] > 0.0)) {
            throw SpectralFailure("Q(lambda) changes sign: lambda overshoots the spectrum bottom");
          }
        }
      }
      return q[static_cast<std::size_t>(i - 1)];
    }
  };
  auto lazy = std::make_shared<LazyQ>();
  lazy->spec = &spec;
  lazy->lambda = lambda;
  lazy->at(depth + 1);

  HProcessSpec h;
  h.lambda = lambda;
  h.birth_rates.resize(static_cast<std::size_t>(depth));
  h.death_rates.resize(static_cast<std::size_t>(depth));
  for (std::int64_t i = 1; i <= depth; ++i) {
    h.birth_rates[static_cast<std::size_t>(i - 1)] = spec.birth(i) * lazy->at(i + 1) / lazy->at(i);
    h.death_rates[static_cast<std::size_t>(i - 1)] =
        i == 1 ? 0.0 : spec.death(i) * lazy->at(i - 1) / lazy->at(i);
  }

  // pibar_i = Q_i(lambda)^2 pi_i
  {
    std::vector<double> logs(static_cast<std::size_t>(depth));
    double log_pi = 0.0;
    for (std::int64_t i = 1; i <= depth; ++i) {
      if (i >= 2) log_pi += std::log(spec.birth(i - 1)) - std::log(spec.death(i));
      logs[static_cast<std::size_t>(i - 1)] = log_pi + 2.0 * std::log(lazy->at(i));
    }
    h.pi_bar = LogWeightVector(std::move(logs), 1);
  }

  // Transformed boundary series, evaluated on the chain re-indexed to
  // start at 0 so the reflecting-convention sums apply. The rate callables
  // extend the Q table on demand; this spec stays local to the call.
  {
    BirthDeathSpec shifted(
        RateFunction::from_callable([lazy, &spec](std::int64_t j) {
          return spec.birth(j + 1) * lazy->at(j + 2) / lazy->at(j + 1);
        }),
        RateFunction::from_callable([lazy, &spec](std::int64_t j) {
          return spec.death(j + 1) * lazy->at(j) / lazy->at(j + 1);
        }),
        Convention::ReflectingAtZero);
    h.series = boundary_series(shifted);
  }
  return h;
}

OrderingCheck ordering_check(const DistributionVector& m, const DistributionVector& nu) {
  if (m.size() != nu.size() || m.weights.first_index() != nu.weights.first_index()) {
    throw PreconditionFailed("ordering_check requires distributions over the same states");
  }
  OrderingCheck out;
  out.ratio.resize(m.size());
  const std::int64_t first = m.weights.first_index();
  for (std::size_t k = 0; k < m.size(); ++k) {
    const std::int64_t i = first + static_cast<std::int64_t>(k);
    const double log_nu = nu.weights.log_at(i) - nu.log_normalizer;
    if (log_nu == kLogZero) {
      throw DegenerateRatio("zero reference entry at state " + std::to_string(i));
    }
    const double log_m = m.weights.log_at(i) - m.log_normalizer;
    out.ratio[k] = log_m == kLogZero ? 0.0 : std::exp(log_m - log_nu);
  }
  out.is_lr_ordered = true;
  for (std::size_t k = 1; k < out.ratio.size(); ++k) {
    if (out.ratio[k] < out.ratio[k - 1] * (1.0 - 1e-12)) {
      out.is_lr_ordered = false;
      break;
    }
  }
  return out;
}

std::vector<GapIdentityRow> monotonicity_certificate(const BirthDeathSpec& spec, double lambda,
                                                     std::int64_t n, double tol) {
  const WeightSweep sweep = weight_sweep(spec, lambda, 1, n + 2);
  const std::vector<double> q =
      eval_polynomials_stable(spec, lambda, static_cast<std::int64_t>(sweep.logs.size()) + 1);

  // suffix sums of pi_i Q_i(lambda), deepest first, tail estimate folded in
  const std::size_t m = sweep.logs.size();
  std::vector<double> log_suffix(m + 1);
  log_suffix[m] = sweep.log_tail;
  for (std::size_t k = m; k-- > 0;) {
    log_suffix[k] = log_add_exp(sweep.logs[k], log_suffix[k + 1]);
  }

  std::vector<GapIdentityRow> rows;
  double log_pi = 0.0;
  for (std::int64_t k = 1; k <= n && k + 1 <= static_cast<std::int64_t>(q.size()); ++k) {
    if (k >= 2) log_pi += std::log(spec.birth(k - 1)) - std::log(spec.death(k));
    GapIdentityRow row;
    row.k = k;
    row.gap = q[static_cast<std::size_t>(k)] - q[static_cast<std::size_t>(k - 1)];
    row.tail_form =
        lambda / (spec.birth(k) * std::exp(log_pi)) * std::exp(log_suffix[static_cast<std::size_t>(k)]);
    const double scale = std::max({std::abs(row.gap), std::abs(row.tail_form), 1e-300});
    row.residual = std::abs(row.gap - row.tail_form) / scale;
    if (row.residual > tol || !(row.gap > 0.0)) {
      std::ostringstream os;
      os << "gap identity violated at k=" << k << ": gap=" << row.gap
         << " tail_form=" << row.tail_form << " residual=" << row.residual;
      throw IdentityViolation(os.str());
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace quasistat
