#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "panelvar/errors.hpp"
#include "panelvar/market_data.hpp"
#include "panelvar/qreg.hpp"
#include "panelvar/realized.hpp"

namespace panelvar {

enum class ModelKind {
  PQR_RV,
  PQR_RSV,
  PQR_BPV,
  UQR_RV,
  UQR_RSV,
  UQR_BPV,
  PORTFOLIO_UQR,
  RISKMETRICS,
};

inline const char* model_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::PQR_RV: return "pqr-rv";
    case ModelKind::PQR_RSV: return "pqr-rsv";
    case ModelKind::PQR_BPV: return "pqr-bpv";
    case ModelKind::UQR_RV: return "uqr-rv";
    case ModelKind::UQR_RSV: return "uqr-rsv";
    case ModelKind::UQR_BPV: return "uqr-bpv";
    case ModelKind::PORTFOLIO_UQR: return "portfolio-uqr";
    case ModelKind::RISKMETRICS: return "riskmetrics";
  }
  return "?";
}

inline ModelKind model_from_name(const std::string& name) {
  for (ModelKind k : {ModelKind::PQR_RV, ModelKind::PQR_RSV, ModelKind::PQR_BPV,
                      ModelKind::UQR_RV, ModelKind::UQR_RSV, ModelKind::UQR_BPV,
                      ModelKind::PORTFOLIO_UQR, ModelKind::RISKMETRICS})
    if (name == model_name(k)) return k;
  throw ConfigError("unknown model '" + name + "'");
}

inline bool is_pqr(ModelKind k) {
  return k == ModelKind::PQR_RV || k == ModelKind::PQR_RSV || k == ModelKind::PQR_BPV;
}
inline bool is_uqr(ModelKind k) {
  return k == ModelKind::UQR_RV || k == ModelKind::UQR_RSV || k == ModelKind::UQR_BPV;
}

struct ModelSpec {
  ModelKind kind = ModelKind::PQR_RV;
  int lag_count = 1;
  std::vector<double> taus;
};

/// Full aligned design for the quantile models: one row per (asset, pair),
/// where pair j couples day-j regressors with the day-(j+1) return. The
/// rolling harness slices windows out of this without rebuilding.
struct DesignData {
  Eigen::MatrixXd x;           // rows x k, square-root measures
  Eigen::VectorXd y;           // next-day returns
  std::vector<int> asset;      // row -> asset
  std::vector<int> pair;       // row -> pair index in [0, n_pairs)
  int n_assets = 0;
  int n_pairs = 0;
  std::vector<std::string> column_names;
};

namespace detail {

inline std::vector<std::string> measure_columns(ModelKind kind) {
  if (kind == ModelKind::PQR_RV || kind == ModelKind::UQR_RV) return {"sqrt_rv"};
  if (kind == ModelKind::PQR_RSV || kind == ModelKind::UQR_RSV)
    return {"sqrt_rs_plus", "sqrt_rs_minus"};
  if (kind == ModelKind::PQR_BPV || kind == ModelKind::UQR_BPV)
    return {"sqrt_bpv", "sqrt_jv"};
  throw ConfigError("model has no measure design");
}

inline double measure_value(const AssetMeasures& m, const std::string& column) {
  if (column == "sqrt_rv") return std::sqrt(m.rv);
  if (column == "sqrt_rs_plus") return std::sqrt(m.rs_plus);
  if (column == "sqrt_rs_minus") return std::sqrt(m.rs_minus);
  if (column == "sqrt_bpv") return std::sqrt(m.bpv);
  if (column == "sqrt_jv") return std::sqrt(m.jv);
  throw ConfigError("unknown design column '" + column + "'");
}

}  // namespace detail

/// Build the aligned (measures, next-day return) design for a quantile model.
inline DesignData build_design_data(const ModelSpec& spec,
                                    const std::vector<RealizedDay>& measures,
                                    const DailyPanel& returns) {
  if (measures.size() != returns.dates.size())
    throw AlignmentError("measure series and return panel differ in length");
  const int t_days = static_cast<int>(measures.size());
  const int n = static_cast<int>(returns.returns.cols());
  const int lags = spec.lag_count;
  if (lags < 1) throw ConfigError("lag_count must be >= 1");
  if (t_days <= lags) throw AlignmentError("not enough days for the requested lags");

  const auto base_cols = detail::measure_columns(spec.kind);
  DesignData d;
  d.n_assets = n;
  d.n_pairs = t_days - lags;
  const int k = static_cast<int>(base_cols.size()) * lags;
  for (int lag = 1; lag <= lags; ++lag)
    for (const auto& c : base_cols)
      d.column_names.push_back(lags == 1 ? c : c + "_lag" + std::to_string(lag));

  const Eigen::Index rows = Eigen::Index(n) * d.n_pairs;
  d.x.resize(rows, k);
  d.y.resize(rows);
  d.asset.resize(rows);
  d.pair.resize(rows);
  Eigen::Index o = 0;
  for (int j = 0; j < d.n_pairs; ++j) {
    const int day = j + lags - 1;  // most recent regressor day of pair j
    for (int a = 0; a < n; ++a, ++o) {
      d.y[o] = returns.returns(day + 1, a);
      d.asset[o] = a;
      d.pair[o] = j;
      int col = 0;
      for (int lag = 1; lag <= lags; ++lag)
        for (const auto& c : base_cols)
          d.x(o, col++) = detail::measure_value(measures[day - lag + 1].assets[a], c);
    }
  }
  return d;
}

/// Slice pairs [pair_lo, pair_hi] of a design into a QuantileProblem.
inline QuantileProblem make_problem(const DesignData& d, int pair_lo, int pair_hi,
                                    double tau, double lambda, FitMode mode) {
  if (pair_lo < 0 || pair_hi >= d.n_pairs || pair_lo > pair_hi)
    throw AlignmentError("window outside design range");
  QuantileProblem p;
  p.n_assets = d.n_assets;
  p.tau = tau;
  p.lambda = lambda;
  p.mode = mode;
  p.column_names = d.column_names;
  const Eigen::Index rows = Eigen::Index(d.n_assets) * (pair_hi - pair_lo + 1);
  p.responses.resize(rows);
  p.regressors.resize(rows, d.x.cols());
  p.asset_index.resize(rows);
  p.day_index.resize(rows);
  const Eigen::Index begin = Eigen::Index(pair_lo) * d.n_assets;
  for (Eigen::Index r = 0; r < rows; ++r) {
    p.responses[r] = d.y[begin + r];
    p.regressors.row(r) = d.x.row(begin + r);
    p.asset_index[r] = d.asset[begin + r];
    p.day_index[r] = d.pair[begin + r] - pair_lo;
  }
  return p;
}

/// Spec-level design builder covering the whole sample.
inline QuantileProblem build_design(const ModelSpec& spec,
                                    const std::vector<RealizedDay>& measures,
                                    const DailyPanel& returns, double tau,
                                    double lambda = 0.0) {
  const DesignData d = build_design_data(spec, measures, returns);
  const FitMode mode = is_pqr(spec.kind) ? FitMode::panel : FitMode::univariate;
  return make_problem(d, 0, d.n_pairs - 1, tau, lambda, mode);
}

/// RiskMetrics EWMA covariance state.
struct EwmaState {
  Eigen::MatrixXd sigma;
  double decay = 0.94;
};

/// sigma_t = decay * sigma_{t-1} + (1 - decay) * r r'.
inline EwmaState riskmetrics_update(const EwmaState& state, const Eigen::VectorXd& r) {
  if (state.sigma.rows() != r.size())
    throw AlignmentError("EWMA state and return vector dimensions differ");
  EwmaState next;
  next.decay = state.decay;
  next.sigma = state.decay * state.sigma;
  next.sigma.noalias() += (1.0 - state.decay) * (r * r.transpose());
  return next;
}

/// Sample covariance (about zero mean is not assumed; the usual centered
/// estimator) of a block of daily returns, used to seed the EWMA recursion.
inline Eigen::MatrixXd sample_covariance(const Eigen::MatrixXd& rows) {
  const Eigen::Index t = rows.rows();
  if (t < 2) throw InsufficientObservations("sample covariance needs >= 2 rows");
  const Eigen::RowVectorXd mean = rows.colwise().mean();
  const Eigen::MatrixXd centered = rows.rowwise() - mean;
  return centered.transpose() * centered / double(t - 1);
}

/// Portfolio return and portfolio volatility series for Portfolio-UQR:
/// r_{P,t} = w'r_t and sigma_{P,t} = sqrt(w' Sigma_t w).
inline std::pair<Eigen::VectorXd, Eigen::VectorXd> portfolio_uqr_series(
    const DailyPanel& returns, const std::vector<Eigen::MatrixXd>& covariances,
    const Eigen::VectorXd& weights) {
  const Eigen::Index t_days = returns.returns.rows();
  if (Eigen::Index(covariances.size()) != t_days)
    throw AlignmentError("covariance series and return panel differ in length");
  if (std::fabs(weights.sum() - 1.0) > 1e-9)
    throw ConfigError("portfolio weights must sum to 1");
  Eigen::VectorXd r_p(t_days), sigma_p(t_days);
  for (Eigen::Index t = 0; t < t_days; ++t) {
    r_p[t] = returns.returns.row(t).dot(weights);
    const double q = weights.dot(covariances[t] * weights);
    if (q < -1e-12) throw NumericalPSDError(q);
    sigma_p[t] = std::sqrt(std::max(q, 0.0));
  }
  return {r_p, sigma_p};
}

}  // namespace panelvar
