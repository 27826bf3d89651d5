#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "panelvar/errors.hpp"
#include "panelvar/models.hpp"
#include "panelvar/parallel.hpp"
#include "panelvar/qreg.hpp"
#include "panelvar/realized.hpp"
#include "panelvar/rng.hpp"

namespace panelvar {

/// Gaussian portfolio %VaR, Eq-style gamma_tau * sqrt(w' Sigma w). The sign
/// follows the tail: negative below the median, zero at the median.
inline double normal_var(const Eigen::MatrixXd& sigma, const Eigen::VectorXd& w, double tau) {
  const double gamma = normal_quantile(tau);
  const double q = w.dot(sigma * w);
  if (q < -1e-12) throw NumericalPSDError(q);
  return gamma * std::sqrt(std::max(q, 0.0));
}

/// The tau = 0.5 cutoff makes the Gaussian VaR identically zero; portfolio
/// construction downstream must reject such forecasts.
inline bool degenerate_cutoff(double tau) { return normal_quantile(tau) == 0.0; }

/// Portfolio %VaR from per-asset %VaRs and a correlation matrix
/// (Hadamard-product form). The square root carries the tail sign.
inline double aggregate_var(const Eigen::VectorXd& asset_vars, const Eigen::MatrixXd& omega,
                            const Eigen::VectorXd& w) {
  if (asset_vars.size() != omega.rows() || asset_vars.size() != w.size())
    throw AlignmentError("aggregate_var dimensions differ");
  for (Eigen::Index i = 0; i < omega.rows(); ++i)
    if (std::fabs(omega(i, i) - 1.0) > 1e-9)
      throw CorrelationError("correlation matrix diagonal is not 1");
  const Eigen::VectorXd wv = w.cwiseProduct(asset_vars);
  const double q = wv.dot(omega * wv);
  if (q < -1e-12) throw CorrelationError("correlation matrix is not PSD");
  const double root = std::sqrt(std::max(q, 0.0));
  const double lean = w.dot(asset_vars);
  return lean < 0.0 ? -root : (lean > 0.0 ? root : 0.0);
}

struct VaRForecast {
  int day = 0;  // target-day index within the panel
  std::string date;
  double var_p = 0.0;
  double realized = 0.0;
  Eigen::VectorXd asset_vars;  // per-asset forecasts when the model provides them
  bool degenerate = false;
};

struct VaRForecastSeries {
  ModelKind model = ModelKind::PQR_RV;
  double tau = 0.0;
  std::vector<VaRForecast> rows;

  Eigen::VectorXd forecasts() const {
    Eigen::VectorXd v(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) v[i] = rows[i].var_p;
    return v;
  }
  Eigen::VectorXd realized() const {
    Eigen::VectorXd v(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) v[i] = rows[i].realized;
    return v;
  }
};

namespace detail {

// Quantile-model rolling forecasts (PQR and UQR variants).
inline VaRForecastSeries rolling_quantile_model(const ModelSpec& spec,
                                                const std::vector<RealizedDay>& measures,
                                                const DailyPanel& returns, int window,
                                                double tau, double lambda,
                                                const Eigen::VectorXd& weights) {
  const DesignData design = build_design_data(spec, measures, returns);
  const int lags = spec.lag_count;
  const int n = design.n_assets;
  const FitMode mode = is_pqr(spec.kind) ? FitMode::panel : FitMode::univariate;
  if (design.n_pairs <= window)
    throw AlignmentError("rolling window leaves no out-of-sample pairs");
  const int n_out = design.n_pairs - window;

  VaRForecastSeries series;
  series.model = spec.kind;
  series.tau = tau;
  series.rows.resize(n_out);

  parallel_for(std::size_t(n_out), [&](std::size_t task) {
    const int s = window - 1 + int(task);       // window covers pairs [s-window+1, s]
    const int info_day = (s + 1) + lags - 1;    // regressor day of pair s+1
    const int target_day = info_day + 1;
    try {
      QuantileProblem p = make_problem(design, s - window + 1, s, tau, lambda, mode);
      const QuantileFit f = fit(p);
      Eigen::VectorXd vars(n);
      const Eigen::Index base = Eigen::Index(s + 1) * n;
      for (int a = 0; a < n; ++a) {
        const Eigen::Index bcol = (mode == FitMode::panel) ? 0 : a;
        vars[a] = f.alphas[a] + design.x.row(base + a).dot(f.betas.col(bcol));
      }
      const Eigen::MatrixXd omega = correlation_from_covariance(measures[info_day].cov);
      VaRForecast row;
      row.day = target_day;
      row.date = returns.dates[target_day];
      row.asset_vars = vars;
      row.var_p = aggregate_var(vars, omega, weights);
      row.realized = returns.returns.row(target_day).dot(weights);
      series.rows[task] = std::move(row);
    } catch (const Error& e) {
      throw Error(std::string(e.what()) + " [window ending " +
                  returns.dates[info_day] + "]");
    }
  });
  return series;
}

inline VaRForecastSeries rolling_portfolio_uqr(const ModelSpec& spec,
                                               const std::vector<RealizedDay>& measures,
                                               const DailyPanel& returns, int window,
                                               double tau, double lambda,
                                               const Eigen::VectorXd& weights) {
  const int t_days = static_cast<int>(returns.dates.size());
  const int lags = spec.lag_count;
  std::vector<Eigen::MatrixXd> covs(measures.size());
  for (std::size_t d = 0; d < measures.size(); ++d) covs[d] = measures[d].cov;
  const auto [r_p, sigma_p] = portfolio_uqr_series(returns, covs, weights);

  const int n_pairs = t_days - lags;
  if (n_pairs <= window) throw AlignmentError("rolling window leaves no out-of-sample pairs");
  const int n_out = n_pairs - window;

  VaRForecastSeries series;
  series.model = spec.kind;
  series.tau = tau;
  series.rows.resize(n_out);

  parallel_for(std::size_t(n_out), [&](std::size_t task) {
    const int s = window - 1 + int(task);
    const int info_day = (s + 1) + lags - 1;
    const int target_day = info_day + 1;
    try {
      QuantileProblem p;
      p.n_assets = 1;
      p.tau = tau;
      p.lambda = lambda;
      p.mode = FitMode::univariate;
      p.column_names.assign(std::size_t(lags), "sigma_p");
      p.responses.resize(window);
      p.regressors.resize(window, lags);
      p.asset_index.assign(window, 0);
      p.day_index.resize(window);
      for (int j = 0; j < window; ++j) {
        const int pair = s - window + 1 + j;
        const int day = pair + lags - 1;
        p.responses[j] = r_p[day + 1];
        for (int lag = 1; lag <= lags; ++lag) p.regressors(j, lag - 1) = sigma_p[day - lag + 1];
        p.day_index[j] = j;
      }
      const QuantileFit f = fit(p);
      double forecast = f.alphas[0];
      for (int lag = 1; lag <= lags; ++lag)
        forecast += f.betas(lag - 1, 0) * sigma_p[info_day - lag + 1];
      VaRForecast row;
      row.day = target_day;
      row.date = returns.dates[target_day];
      row.var_p = forecast;
      row.realized = r_p[target_day];
      series.rows[task] = std::move(row);
    } catch (const Error& e) {
      throw Error(std::string(e.what()) + " [window ending " +
                  returns.dates[info_day] + "]");
    }
  });
  return series;
}

inline VaRForecastSeries rolling_riskmetrics(const ModelSpec& spec,
                                             const std::vector<RealizedDay>& /*measures*/,
                                             const DailyPanel& returns, int window,
                                             double tau, const Eigen::VectorXd& weights) {
  const int t_days = static_cast<int>(returns.dates.size());
  const int lags = spec.lag_count;
  const int n_pairs = t_days - lags;
  if (n_pairs <= window) throw AlignmentError("rolling window leaves no out-of-sample pairs");
  const int n_out = n_pairs - window;
  const int first_info = window + lags - 1;  // info day of the first forecast

  VaRForecastSeries series;
  series.model = spec.kind;
  series.tau = tau;
  series.rows.resize(n_out);

  EwmaState state;
  state.sigma = sample_covariance(returns.returns.topRows(first_info));
  // Bring the recursion up to the first information day.
  // state after processing day t incorporates returns up to and including t.
  const double gamma = normal_quantile(tau);
  const bool degenerate = gamma == 0.0;
  int processed = first_info - 1;  // seed treated as state through day first_info-1
  for (int task = 0; task < n_out; ++task) {
    const int info_day = first_info + task;
    while (processed < info_day) {
      ++processed;
      state = riskmetrics_update(state, returns.returns.row(processed).transpose());
    }
    const int target_day = info_day + 1;
    VaRForecast row;
    row.day = target_day;
    row.date = returns.dates[target_day];
    row.asset_vars = gamma * state.sigma.diagonal().cwiseMax(0.0).cwiseSqrt();
    row.var_p = normal_var(state.sigma, weights, tau);
    row.realized = returns.returns.row(target_day).dot(weights);
    row.degenerate = degenerate;
    series.rows[task] = std::move(row);
  }
  return series;
}

}  // namespace detail

/// Rolling one-step-ahead forecasts: for each window of `window` pairs the
/// model is re-estimated and the next day's portfolio %VaR is produced from
/// information dated no later than the window end.
inline VaRForecastSeries rolling_forecast(const ModelSpec& spec,
                                          const std::vector<RealizedDay>& measures,
                                          const DailyPanel& returns, int window, double tau,
                                          double lambda, const Eigen::VectorXd& weights) {
  if (window < 2) throw ConfigError("window must be >= 2");
  if (spec.kind == ModelKind::RISKMETRICS)
    return detail::rolling_riskmetrics(spec, measures, returns, window, tau, weights);
  if (spec.kind == ModelKind::PORTFOLIO_UQR)
    return detail::rolling_portfolio_uqr(spec, measures, returns, window, tau, lambda, weights);
  return detail::rolling_quantile_model(spec, measures, returns, window, tau, lambda, weights);
}

/// Forecast CSV: `date,model,tau,var_forecast,realized_return`.
inline void write_forecast_csv(const std::vector<VaRForecastSeries>& all,
                               const std::string& path) {
  CsvWriter w(path);
  w.row({"date", "model", "tau", "var_forecast", "realized_return", "flag"});
  for (const auto& series : all)
    for (const auto& row : series.rows)
      w.row({row.date, model_name(series.model), fmt_double(series.tau),
             fmt_double(row.var_p), fmt_double(row.realized),
             row.degenerate ? "degenerate_cutoff" : ""});
}

}  // namespace panelvar
