#include "quasistat/finite_chain.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

#include "quasistat/errors.hpp"
#include "quasistat/log_domain.hpp"

namespace quasistat {

FiniteAbsorbingChain::FiniteAbsorbingChain(std::int64_t n_states,
                                           std::vector<double> generator_row_major,
                                           std::vector<double> absorption_rates)
    : n_(n_states), q_(std::move(generator_row_major)), kappa_(std::move(absorption_rates)) {
  if (n_ < 1 || q_.size() != static_cast<std::size_t>(n_ * n_) ||
      kappa_.size() != static_cast<std::size_t>(n_)) {
    throw InvalidSpec("finite chain dimensions are inconsistent");
  }
}

FiniteAbsorbingChain FiniteAbsorbingChain::truncate(const BirthDeathSpec& spec,
                                                    std::int64_t n_states) {
  if (spec.convention() != Convention::AbsorbedAtZero) {
    throw InvalidSpec("truncate expects the absorbed-at-zero convention");
  }
  if (n_states < 2) throw InvalidSpec("truncate requires at least two states");
  std::vector<double> q(static_cast<std::size_t>(n_states * n_states), 0.0);
  std::vector<double> kappa(static_cast<std::size_t>(n_states), 0.0);
  for (std::int64_t i = 1; i <= n_states; ++i) {
    const double b = i < n_states ? spec.birth(i) : 0.0;  // birth dropped at the top state
    const double d = spec.death(i);
    if (i < n_states) q[static_cast<std::size_t>((i - 1) * n_states + i)] = b;
    if (i > 1) q[static_cast<std::size_t>((i - 1) * n_states + (i - 2))] = d;
    if (i == 1) kappa[0] = d;  // state 1 feeds the cemetery at rate d_1
    q[static_cast<std::size_t>((i - 1) * n_states + (i - 1))] = -(b + (i > 1 ? d : 0.0) + (i == 1 ? d : 0.0));
  }
  return FiniteAbsorbingChain(n_states, std::move(q), std::move(kappa));
}

bool FiniteAbsorbingChain::irreducible() const {
  auto reaches_all = [&](bool transpose) {
    std::vector<char> seen(static_cast<std::size_t>(n_), 0);
    std::deque<std::int64_t> queue{0};
    seen[0] = 1;
    std::int64_t count = 1;
    while (!queue.empty()) {
      const std::int64_t i = queue.front();
      queue.pop_front();
      for (std::int64_t j = 0; j < n_; ++j) {
        const double r = transpose ? q_[static_cast<std::size_t>(j * n_ + i)]
                                   : q_[static_cast<std::size_t>(i * n_ + j)];
        if (i != j && r > 0.0 && !seen[static_cast<std::size_t>(j)]) {
          seen[static_cast<std::size_t>(j)] = 1;
          ++count;
          queue.push_back(j);
        }
      }
    }
    return count == n_;
  };
  return reaches_all(false) && reaches_all(true);
}

void FiniteAbsorbingChain::validate() const {
  double kappa_max = 0.0;
  for (std::int64_t i = 0; i < n_; ++i) {
    if (kappa_[static_cast<std::size_t>(i)] < 0.0) {
      throw InvalidSpec("negative absorption rate");
    }
    kappa_max = std::max(kappa_max, kappa_[static_cast<std::size_t>(i)]);
    double row = kappa_[static_cast<std::size_t>(i)];
    double scale = kappa_[static_cast<std::size_t>(i)];
    for (std::int64_t j = 0; j < n_; ++j) {
      const double r = q_[static_cast<std::size_t>(i * n_ + j)];
      if (i != j && r < 0.0) throw InvalidSpec("negative off-diagonal rate");
      if (i != j) scale = std::max(scale, r);
      row += r;
    }
    if (std::abs(row) > 1e-9 * std::max(1.0, scale)) {
      std::ostringstream os;
      os << "row " << (i + 1) << " plus absorption sums to " << row << ", expected 0";
      throw InvalidSpec(os.str());
    }
  }
  if (!(kappa_max > 0.0)) throw InvalidSpec("at least one absorption rate must be positive");
  if (!irreducible()) throw NotIrreducible("live-state graph is not strongly connected");
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXd to_eigen(const FiniteAbsorbingChain& chain) {
  const std::int64_t n = chain.size();
  MatrixXd m(n, n);
  for (std::int64_t i = 0; i < n; ++i) {
    for (std::int64_t j = 0; j < n; ++j) {
      m(i, j) = chain.generator()[static_cast<std::size_t>(i * n + j)];
    }
  }
  return m;
}

// Perron eigenvector of a Metzler matrix from a dense eigensolve: pick the
// eigenvalue with the largest real part and normalize the sign so the
// vector is entrywise positive.
std::pair<double, VectorXd> dominant_pair(const MatrixXd& m, const char* side) {
  Eigen::EigenSolver<MatrixXd> solver(m);
  if (solver.info() != Eigen::Success) {
    throw SpectralFailure("dense eigensolver did not converge");
  }
  const auto& vals = solver.eigenvalues();
  int best = 0;
  for (int k = 1; k < vals.size(); ++k) {
    if (vals[k].real() > vals[best].real()) best = k;
  }
  VectorXd v = solver.eigenvectors().col(best).real();
  int arg_max = 0;
  v.cwiseAbs().maxCoeff(&arg_max);
  if (v[arg_max] < 0.0) v = -v;
  const double vmax = v.maxCoeff();
  if (!(vmax > 0.0) || v.minCoeff() < -1e-9 * vmax) {
    throw SpectralFailure(std::string("dominant ") + side +
                          " eigenvector is not entrywise positive");
  }
  for (int k = 0; k < v.size(); ++k) v[k] = std::max(v[k], 0.0);
  return {vals[best].real(), v};
}

// Uniformized action of the killed semigroup. Nonzero rates are kept in
// sparse triplet form (birth-death truncations are tridiagonal, so the
// matvec is linear in the state count). Each step of length h applies
// e^{hQ} as a Poisson mixture over powers of P = I + Q/theta, truncated
// when the Poisson tail drops below 1e-14; the vector is L1-renormalized
// afterward and the log of the norm accumulates in log_scale, so
// arbitrarily deep horizons stay in range.
class Propagator {
public:
  explicit Propagator(const FiniteAbsorbingChain& chain) : n_(chain.size()) {
    theta_ = 1e-12;
    for (std::int64_t i = 1; i <= n_; ++i) {
      theta_ = std::max(theta_, -chain.rate(i, i));
    }
    for (std::int64_t i = 1; i <= n_; ++i) {
      for (std::int64_t j = 1; j <= n_; ++j) {
        const double q = chain.rate(i, j);
        if (q != 0.0) {
          src_.push_back(i - 1);
          dst_.push_back(j - 1);
          scaled_.push_back(q / theta_);
        }
      }
    }
  }

  void advance(std::vector<double>& w, double h, bool row, double& log_scale) const {
    while (h > 0.0) {
      const double step = std::min(h, 32.0 / theta_);
      h -= step;
      const double a = theta_ * step;
      std::vector<double> term = w;
      std::vector<double> acc(static_cast<std::size_t>(n_), 0.0);
      std::vector<double> next(static_cast<std::size_t>(n_), 0.0);
      double pois = std::exp(-a);
      double cum = pois;
      for (std::int64_t i = 0; i < n_; ++i) {
        acc[static_cast<std::size_t>(i)] = pois * term[static_cast<std::size_t>(i)];
      }
      const std::int64_t k_cap = 16 + 4 * static_cast<std::int64_t>(a + std::sqrt(a) * 8.0);
      for (std::int64_t k = 1; k < k_cap; ++k) {
        next = term;  // identity part of P
        for (std::size_t e = 0; e < scaled_.size(); ++e) {
          if (row) {
            next[static_cast<std::size_t>(dst_[e])] +=
                scaled_[e] * term[static_cast<std::size_t>(src_[e])];
          } else {
            next[static_cast<std::size_t>(src_[e])] +=
                scaled_[e] * term[static_cast<std::size_t>(dst_[e])];
          }
        }
        std::swap(term, next);
        pois *= a / static_cast<double>(k);
        cum += pois;
        for (std::int64_t i = 0; i < n_; ++i) {
          acc[static_cast<std::size_t>(i)] += pois * term[static_cast<std::size_t>(i)];
        }
        if (1.0 - cum < 1e-14 && pois < 1e-14) break;
      }
      double norm = 0.0;
      for (double x : acc) norm += std::abs(x);
      if (norm == 0.0) {
        throw HorizonTooDeep("survival mass vanished during propagation");
      }
      for (double& x : acc) x /= norm;
      log_scale += std::log(norm);
      w = std::move(acc);
    }
  }

private:
  std::int64_t n_;
  double theta_;
  std::vector<std::int32_t> src_, dst_;
  std::vector<double> scaled_;
};

void propagate(const FiniteAbsorbingChain& chain, std::vector<double>& w, double h, bool row,
               double& log_scale) {
  Propagator(chain).advance(w, h, row, log_scale);
}

std::vector<double> gauss_legendre_nodes(std::int64_t m, std::vector<double>& weights) {
  // Newton iteration on P_m; nodes in (-1, 1).
  std::vector<double> nodes(static_cast<std::size_t>(m));
  weights.assign(static_cast<std::size_t>(m), 0.0);
  for (std::int64_t k = 0; k < m; ++k) {
    double x = std::cos(M_PI * (static_cast<double>(k) + 0.75) /
                        (static_cast<double>(m) + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (std::int64_t j = 2; j <= m; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / static_cast<double>(j);
        p0 = p1;
        p1 = p2;
      }
      const double dp = m * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) {
        weights[static_cast<std::size_t>(k)] = 2.0 / ((1.0 - x * x) * dp * dp);
        break;
      }
    }
    nodes[static_cast<std::size_t>(k)] = x;
  }
  return nodes;
}

struct ScaledVector {
  std::vector<double> v;
  double log_scale = 0.0;
};

// u and v profiles at the requested points, each propagated incrementally
// through the sorted sequence.
std::vector<ScaledVector> profile(const Propagator& prop, std::vector<double> start,
                                  const std::vector<double>& points, bool row) {
  std::vector<ScaledVector> out;
  out.reserve(points.size());
  ScaledVector cur{std::move(start), 0.0};
  double at = 0.0;
  for (double p : points) {
    prop.advance(cur.v, p - at, row, cur.log_scale);
    at = p;
    out.push_back(cur);
  }
  return out;
}

}  // namespace

PerronData perron_data(const FiniteAbsorbingChain& chain, double tol) {
  chain.validate();
  const MatrixXd m = to_eigen(chain);
  auto [lam_r, eta] = dominant_pair(m, "right");
  auto [lam_l, nu] = dominant_pair(m.transpose(), "left");
  if (std::abs(lam_r - lam_l) > 1e-8 * std::max(1.0, std::abs(lam_r))) {
    throw SpectralFailure("left/right dominant eigenvalues disagree");
  }
  const double lambda = -lam_r;
  if (!(lambda > 0.0)) throw SpectralFailure("decay rate is not positive");

  nu /= nu.sum();
  eta /= eta.dot(nu);

  PerronData pd;
  pd.lambda = lambda;
  pd.eta.assign(eta.data(), eta.data() + eta.size());
  pd.nu.assign(nu.data(), nu.data() + nu.size());
  pd.eta_residual = (m * eta + lambda * eta).cwiseAbs().maxCoeff() / eta.cwiseAbs().maxCoeff();
  pd.nu_residual = (nu.transpose() * m + lambda * nu.transpose()).cwiseAbs().sum();
  if (pd.eta_residual > tol || pd.nu_residual > tol) {
    throw SpectralFailure("Perron eigen-pair residuals exceed the requested tolerance");
  }
  return pd;
}

DistributionVector qed_finite(const PerronData& pd) {
  std::vector<double> m(pd.eta.size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = pd.eta[i] * pd.nu[i];
  DistributionVector out;
  out.weights = LogWeightVector::from_values(m, 1);
  out.log_normalizer = out.weights.log_sum();  // ~0 by the eta-nu normalization
  out.truncation_error_bound = 0.0;
  return out;
}

InitialLaw InitialLaw::point(std::int64_t state) {
  InitialLaw law;
  law.point_ = state;
  return law;
}

InitialLaw InitialLaw::distribution(std::vector<double> weights) {
  InitialLaw law;
  double sum = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw InvalidSpec("initial law has a negative weight");
    sum += w;
  }
  if (!(sum > 0.0)) throw InvalidSpec("initial law has no mass");
  for (double& w : weights) w /= sum;
  law.w_ = std::move(weights);
  return law;
}

namespace {

std::vector<double> init_vector(const FiniteAbsorbingChain& chain, const InitialLaw& init) {
  const std::int64_t n = chain.size();
  if (init.point_state() > 0) {
    if (init.point_state() > n) throw InvalidSpec("initial state outside the chain");
    std::vector<double> w(static_cast<std::size_t>(n), 0.0);
    w[static_cast<std::size_t>(init.point_state() - 1)] = 1.0;
    return w;
  }
  if (static_cast<std::int64_t>(init.weights().size()) != n) {
    throw InvalidSpec("initial law dimension mismatch");
  }
  return init.weights();
}

}  // namespace

std::vector<double> conditional_marginal(const FiniteAbsorbingChain& chain, const InitialLaw& init,
                                         double t) {
  if (t < 0.0) throw InvalidSpec("time must be nonnegative");
  std::vector<double> u = init_vector(chain, init);
  double log_scale = 0.0;
  propagate(chain, u, t, /*row=*/true, log_scale);
  double sum = 0.0;
  for (double x : u) sum += x;
  if (!(sum > 0.0)) throw HorizonTooDeep("conditional marginal lost all mass");
  for (double& x : u) x /= sum;
  return u;
}

TimeAverageResult conditional_time_average(const FiniteAbsorbingChain& chain,
                                           const InitialLaw& init, double t,
                                           const std::vector<double>& f,
                                           std::int64_t quad_points) {
  if (!(t > 0.0)) throw InvalidSpec("time horizon must be positive");
  if (quad_points < 8) throw InvalidSpec("quad_points must be >= 8");
  const std::int64_t n = chain.size();
  if (static_cast<std::int64_t>(f.size()) != n) throw InvalidSpec("f dimension mismatch");

  const std::vector<double> u0 = init_vector(chain, init);

  // denominator: survival from init at horizon t
  std::vector<double> ut = u0;
  double log_su_t = 0.0;
  propagate(chain, ut, t, true, log_su_t);
  double denom = 0.0;
  for (double x : ut) denom += x;
  if (!(denom > 0.0)) throw HorizonTooDeep("survival probability vanished");

  auto evaluate = [&](std::int64_t points) {
    const std::int64_t per_panel = std::min<std::int64_t>(points, 16);
    const std::int64_t panels = (points + per_panel - 1) / per_panel;
    std::vector<double> gw;
    const std::vector<double> gx = gauss_legendre_nodes(per_panel, gw);

    std::vector<double> s_nodes;
    s_nodes.reserve(static_cast<std::size_t>(panels * per_panel));
    for (std::int64_t p = 0; p < panels; ++p) {
      const double a = t * static_cast<double>(p) / static_cast<double>(panels);
      const double b = t * static_cast<double>(p + 1) / static_cast<double>(panels);
      for (std::int64_t k = 0; k < per_panel; ++k) {
        s_nodes.push_back(0.5 * (a + b) + 0.5 * (b - a) * gx[static_cast<std::size_t>(k)]);
      }
    }
    std::vector<double> s_sorted = s_nodes;
    std::sort(s_sorted.begin(), s_sorted.end());
    std::vector<double> tau_sorted(s_sorted.size());
    for (std::size_t k = 0; k < s_sorted.size(); ++k) {
      tau_sorted[k] = t - s_sorted[s_sorted.size() - 1 - k];
    }

    const std::vector<ScaledVector> us = profile(chain, u0, s_sorted, true);
    const std::vector<ScaledVector> vs =
        profile(chain, std::vector<double>(static_cast<std::size_t>(n), 1.0), tau_sorted, false);

    // integral via panel weights; nodes were generated panel-major and
    // s_sorted is the same order (panels ascend), so index arithmetic maps
    // node -> weight directly
    CompensatedSum integral;
    const double jac = 0.5 * t / static_cast<double>(panels);
    for (std::size_t k = 0; k < s_sorted.size(); ++k) {
      const ScaledVector& u = us[k];
      const ScaledVector& v = vs[s_sorted.size() - 1 - k];  // tau = t - s
      double dot = 0.0;
      for (std::int64_t j = 0; j < n; ++j) {
        dot += u.v[static_cast<std::size_t>(j)] * f[static_cast<std::size_t>(j)] *
               v.v[static_cast<std::size_t>(j)];
      }
      const double scale = std::exp(u.log_scale + v.log_scale - log_su_t);
      integral.add(gw[k % static_cast<std::size_t>(per_panel)] * jac * dot * scale);
    }
    return integral.value() / (t * denom);
  };

  TimeAverageResult res;
  std::int64_t points = quad_points;
  double prev = evaluate(points);
  for (int round = 0; round < 12; ++round) {
    points *= 2;
    const double cur = evaluate(points);
    res.quadrature_error = std::abs(cur - prev);
    res.value = cur;
    res.nodes_used = points;
    if (res.quadrature_error <= 1e-10 * std::max(1.0, std::abs(cur))) return res;
    prev = cur;
  }
  return res;  // best effort; quadrature_error reports the residual motion
}

std::vector<double> log_survival_by_state(const FiniteAbsorbingChain& chain, double t) {
  const std::int64_t n = chain.size();
  std::vector<double> v(static_cast<std::size_t>(n), 1.0);
  double log_scale = 0.0;
  propagate(chain, v, t, /*row=*/false, log_scale);
  std::vector<double> out(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    const double x = v[static_cast<std::size_t>(i)];
    out[static_cast<std::size_t>(i)] = x > 0.0 ? std::log(x) + log_scale : kLogZero;
  }
  return out;
}

std::vector<double> eta_limit_check(const FiniteAbsorbingChain& chain, const PerronData& pd,
                                    const std::vector<double>& t_grid) {
  std::vector<double> residuals;
  residuals.reserve(t_grid.size());
  for (double t : t_grid) {
    const std::vector<double> ls = log_survival_by_state(chain, t);
    double worst = 0.0;
    for (std::size_t i = 0; i < ls.size(); ++i) {
      const double scaled = ls[i] == kLogZero ? 0.0 : std::exp(pd.lambda * t + ls[i]);
      worst = std::max(worst, std::abs(scaled - pd.eta[i]));
    }
    residuals.push_back(worst);
  }
  return residuals;
}

}  // namespace quasistat
