#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <vector>

#include "panelvar/errors.hpp"
#include "panelvar/parallel.hpp"
#include "panelvar/rng.hpp"
#include "panelvar/var.hpp"

namespace panelvar {

struct HitSeries {
  std::vector<std::uint8_t> hits;
  double tau = 0.0;
  Eigen::VectorXd forecasts;

  double coverage() const {
    if (hits.empty()) return 0.0;
    double s = 0.0;
    for (auto h : hits) s += h;
    return s / double(hits.size());
  }
};

/// hit_t = 1{ r_t <= Q_t } (inclusive boundary).
inline HitSeries hits(const Eigen::VectorXd& returns, const Eigen::VectorXd& forecasts,
                      double tau) {
  if (returns.size() != forecasts.size())
    throw AlignmentError("returns and forecasts differ in length");
  HitSeries h;
  h.tau = tau;
  h.forecasts = forecasts;
  h.hits.resize(returns.size());
  for (Eigen::Index t = 0; t < returns.size(); ++t)
    h.hits[t] = returns[t] <= forecasts[t] ? 1 : 0;
  return h;
}

/// Mean pinball loss of the quantile forecasts.
inline double tick_loss(const Eigen::VectorXd& returns, const Eigen::VectorXd& forecasts,
                        double tau) {
  if (returns.size() != forecasts.size())
    throw AlignmentError("returns and forecasts differ in length");
  double s = 0.0;
  for (Eigen::Index t = 0; t < returns.size(); ++t)
    s += quantile_loss(returns[t] - forecasts[t], tau);
  return s / double(returns.size());
}

inline Eigen::VectorXd tick_loss_series(const Eigen::VectorXd& returns,
                                        const Eigen::VectorXd& forecasts, double tau) {
  if (returns.size() != forecasts.size())
    throw AlignmentError("returns and forecasts differ in length");
  Eigen::VectorXd s(returns.size());
  for (Eigen::Index t = 0; t < returns.size(); ++t)
    s[t] = quantile_loss(returns[t] - forecasts[t], tau);
  return s;
}

struct DqResult {
  double statistic = 0.0;
  double p_value = 1.0;
  bool separation_fallback = false;
  bool degenerate = false;
};

namespace detail {

// Log-likelihood of a logistic regression at linear predictor eta.
inline double logistic_loglik(const Eigen::VectorXd& eta, const std::vector<std::uint8_t>& h,
                              int offset) {
  double ll = 0.0;
  for (Eigen::Index t = 0; t < eta.size(); ++t) {
    const double e = eta[t];
    // log(1+exp(e)) computed stably.
    const double lse = e > 0.0 ? e + std::log1p(std::exp(-e)) : std::log1p(std::exp(e));
    ll += (h[std::size_t(t + offset)] ? e : 0.0) - lse;
  }
  return ll;
}

struct LogisticFit {
  double loglik = 0.0;
  bool separation = false;
};

inline bool gradient_converged(const Eigen::MatrixXd& z, const std::vector<std::uint8_t>& h,
                               int offset, const Eigen::VectorXd& b, double ridge) {
  Eigen::VectorXd eta = z * b;
  Eigen::VectorXd g = Eigen::VectorXd::Zero(z.cols());
  for (Eigen::Index t = 0; t < z.rows(); ++t) {
    const double pt = 1.0 / (1.0 + std::exp(-eta[t]));
    g += (double(h[std::size_t(t + offset)]) - pt) * z.row(t).transpose();
  }
  g -= ridge * b;
  return g.cwiseAbs().maxCoeff() <= 1e-8 * double(z.rows());
}

// Damped Newton MLE; on divergence refits with a small ridge and flags it.
inline LogisticFit logistic_mle(const Eigen::MatrixXd& z, const std::vector<std::uint8_t>& h,
                                int offset, double start_intercept) {
  const Eigen::Index rows = z.rows(), k = z.cols();
  auto run = [&](double ridge, Eigen::VectorXd& b) -> bool {
    b.setZero(k);
    b[0] = start_intercept;
    Eigen::VectorXd eta = z * b;
    double ll = logistic_loglik(eta, h, offset) - 0.5 * ridge * b.squaredNorm();
    for (int iter = 0; iter < 100; ++iter) {
      Eigen::VectorXd p(rows), wdiag(rows);
      for (Eigen::Index t = 0; t < rows; ++t) {
        const double pt = 1.0 / (1.0 + std::exp(-eta[t]));
        p[t] = pt;
        wdiag[t] = std::max(pt * (1.0 - pt), 1e-12);
      }
      Eigen::VectorXd g = Eigen::VectorXd::Zero(k);
      for (Eigen::Index t = 0; t < rows; ++t)
        g += (double(h[std::size_t(t + offset)]) - p[t]) * z.row(t).transpose();
      g -= ridge * b;
      if (g.cwiseAbs().maxCoeff() <= 1e-10 * double(rows)) return true;
      Eigen::MatrixXd hess = z.transpose() * wdiag.asDiagonal() * z;
      hess.diagonal().array() += ridge + 1e-12;
      Eigen::VectorXd step = hess.ldlt().solve(g);
      double scale = 1.0;
      for (int halving = 0; halving < 30; ++halving) {
        Eigen::VectorXd cand = b + scale * step;
        Eigen::VectorXd eta_cand = z * cand;
        const double ll_cand =
            logistic_loglik(eta_cand, h, offset) - 0.5 * ridge * cand.squaredNorm();
        if (ll_cand >= ll - 1e-14) {
          b = cand;
          eta = eta_cand;
          ll = ll_cand;
          break;
        }
        scale *= 0.5;
      }
      if (b.cwiseAbs().maxCoeff() > 50.0) return false;  // separation
    }
    return g_norm_small(z, h, offset, b, ridge);
  };
  LogisticFit out;
  Eigen::VectorXd b;
  if (!run(0.0, b)) {
    out.separation = true;
    run(1e-6 * double(rows), b);
  }
  out.loglik = logistic_loglik((z * b).eval(), h, offset);
  return out;
}

inline bool g_norm_small(const Eigen::MatrixXd& z, const std::vector<std::uint8_t>& h,
                         int offset, const Eigen::VectorXd& b, double ridge) {
  Eigen::VectorXd eta = z * b;
  Eigen::VectorXd g = Eigen::VectorXd::Zero(z.cols());
  for (Eigen::Index t = 0; t < z.rows(); ++t) {
    const double pt = 1.0 / (1.0 + std::exp(-eta[t]));
    g += (double(h[std::size_t(t + offset)]) - pt) * z.row(t).transpose();
  }
  g -= ridge * b;
  return g.cwiseAbs().maxCoeff() <= 1e-8 * double(z.rows());
}

// Build the DQ design: intercept, `lags` hit lags, `lags` forecast terms
// Q_t, Q_{t-1}, ..., Q_{t-lags+1}; rows start at t = lags. Forecast columns
// are standardized for conditioning; the LR statistic is invariant to that.
inline Eigen::MatrixXd dq_design(const std::vector<std::uint8_t>& h,
                                 const Eigen::VectorXd& q, int lags) {
  const int t_len = static_cast<int>(h.size());
  const int rows = t_len - lags;
  const int k = 1 + 2 * lags;
  double q_mean = q.mean();
  double q_sd = std::sqrt((q.array() - q_mean).square().sum() / double(q.size()));
  if (!(q_sd > 0.0)) q_sd = 1.0;
  Eigen::MatrixXd z(rows, k);
  for (int t = lags; t < t_len; ++t) {
    const int r = t - lags;
    z(r, 0) = 1.0;
    for (int l = 1; l <= lags; ++l) z(r, l) = double(h[std::size_t(t - l)]);
    for (int d = 1; d <= lags; ++d) z(r, lags + d) = (q[t - d + 1] - q_mean) / q_sd;
  }
  return z;
}

// Likelihood-ratio statistic of the CAViaR/DQ logistic regression versus the
// fixed null P(hit) = tau with no dynamics.
inline double dq_lr_statistic(const std::vector<std::uint8_t>& h, const Eigen::MatrixXd& z,
                              double tau, int lags, bool* separation) {
  const int rows = static_cast<int>(z.rows());
  double ones = 0.0;
  for (int t = lags; t < lags + rows; ++t) ones += h[std::size_t(t)];
  const double ll_null = ones * std::log(tau) + (double(rows) - ones) * std::log(1.0 - tau);
  if (ones == 0.0 || ones == double(rows)) {
    if (separation) *separation = false;
    return -2.0 * ll_null;  // saturated log-likelihood tends to 0
  }
  const LogisticFit fitres = logistic_mle(z, h, lags, std::log(tau / (1.0 - tau)));
  if (separation) *separation = fitres.separation;
  return 2.0 * (fitres.loglik - ll_null);
}

}  // namespace detail

/// CAViaR/DQ dynamic-specification test. The finite-sample p-value is the
/// fraction of `mc_reps` simulated-null LR statistics (iid Bernoulli(tau)
/// hits against the observed forecast path) at or above the observed one.
inline DqResult dq_test(const HitSeries& h, int lags, int mc_reps, std::uint64_t seed) {
  const int t_len = static_cast<int>(h.hits.size());
  if (t_len <= 10 * (2 * lags + 1))
    throw InsufficientObservations("hit series too short for the DQ test");
  if (Eigen::Index(t_len) != h.forecasts.size())
    throw AlignmentError("hit series and forecasts differ in length");

  DqResult out;
  double ones = 0.0;
  for (auto v : h.hits) ones += v;
  out.degenerate = (ones == 0.0 || ones == double(t_len));

  const Eigen::MatrixXd z_obs = detail::dq_design(h.hits, h.forecasts, lags);
  bool sep = false;
  out.statistic = detail::dq_lr_statistic(h.hits, z_obs, h.tau, lags, &sep);
  out.separation_fallback = sep;

  std::vector<double> sims(std::size_t(mc_reps));
  parallel_for(std::size_t(mc_reps), [&](std::size_t rep) {
    Rng rng(seed, rep);
    std::vector<std::uint8_t> sim(std::size_t(t_len));
    for (int t = 0; t < t_len; ++t) sim[std::size_t(t)] = rng.uniform() < h.tau ? 1 : 0;
    const Eigen::MatrixXd z = detail::dq_design(sim, h.forecasts, lags);
    sims[rep] = detail::dq_lr_statistic(sim, z, h.tau, lags, nullptr);
  });
  int count = 0;
  for (double s : sims)
    if (s >= out.statistic - 1e-12) ++count;
  out.p_value = double(count) / double(mc_reps);
  return out;
}

struct DmResult {
  double statistic = 0.0;
  double p_value = 1.0;
  bool identical = false;
};

/// Diebold-Mariano test on a loss differential, 1-step variant (long-run
/// variance = plain variance). Negative statistic favors model A.
inline DmResult dm_test(const Eigen::VectorXd& loss_a, const Eigen::VectorXd& loss_b) {
  if (loss_a.size() != loss_b.size()) throw AlignmentError("loss series differ in length");
  const Eigen::Index t_len = loss_a.size();
  if (t_len < 30) throw InsufficientObservations("DM test needs >= 30 observations");
  const Eigen::VectorXd d = loss_a - loss_b;
  const double mean = d.mean();
  const double var = (d.array() - mean).square().sum() / double(t_len - 1);
  DmResult out;
  if (!(var > 0.0)) {
    out.identical = true;
    return out;
  }
  out.statistic = mean / std::sqrt(var / double(t_len));
  out.p_value = 2.0 * normal_cdf(-std::fabs(out.statistic));
  return out;
}

/// Per-model absolute performance summary.
struct ModelEvaluation {
  ModelKind model = ModelKind::PQR_RV;
  double tau = 0.0;
  double coverage = 0.0;
  DqResult dq;
  double tick = 0.0;
};

inline ModelEvaluation evaluate_model(const VaRForecastSeries& series, int dq_lags,
                                      int mc_reps, std::uint64_t seed) {
  ModelEvaluation ev;
  ev.model = series.model;
  ev.tau = series.tau;
  const Eigen::VectorXd realized = series.realized();
  const Eigen::VectorXd forecasts = series.forecasts();
  const HitSeries h = hits(realized, forecasts, series.tau);
  ev.coverage = h.coverage();
  ev.dq = dq_test(h, dq_lags, mc_reps, seed);
  ev.tick = tick_loss(realized, forecasts, series.tau);
  return ev;
}

}  // namespace panelvar
