#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "panelvar/errors.hpp"
#include "panelvar/market_data.hpp"

namespace panelvar {

/// Daily realized variance: sum of squared intraday returns.
inline double realized_variance(const Eigen::VectorXd& intraday_returns) {
  if (intraday_returns.size() == 0) throw InsufficientObservations("empty return vector");
  return intraday_returns.squaredNorm();
}

/// Upside/downside semivariances. Zero returns contribute to neither side,
/// so rs_plus + rs_minus still reproduces the realized variance.
inline std::pair<double, double> realized_semivariances(const Eigen::VectorXd& intraday_returns) {
  if (intraday_returns.size() == 0) throw InsufficientObservations("empty return vector");
  double plus = 0.0, minus = 0.0;
  for (int k = 0; k < intraday_returns.size(); ++k) {
    const double r = intraday_returns[k];
    if (r > 0.0)
      plus += r * r;
    else if (r < 0.0)
      minus += r * r;
  }
  return {plus, minus};
}

/// Skip-one bipower variation, scaled by mu1^-2 * N/(N-2) with mu1 = sqrt(2/pi).
inline double bipower_variation(const Eigen::VectorXd& intraday_returns) {
  const int n = static_cast<int>(intraday_returns.size());
  if (n < 3) throw InsufficientObservations("bipower variation needs N >= 3");
  double sum = 0.0;
  for (int k = 2; k < n; ++k)
    sum += std::fabs(intraday_returns[k - 2]) * std::fabs(intraday_returns[k]);
  const double mu1_sq = 2.0 / std::numbers::pi;
  return (sum / mu1_sq) * (double(n) / double(n - 2));
}

/// Jump variation RV - BPV, truncated at zero.
inline double jump_variation(double rv, double bpv) {
  return std::max(rv - bpv, 0.0);
}

/// Realized covariance from per-asset intraday return vectors sharing a grid.
inline Eigen::MatrixXd realized_covariance(const std::vector<Eigen::VectorXd>& asset_returns) {
  const int n = static_cast<int>(asset_returns.size());
  if (n == 0) throw InsufficientObservations("no assets");
  const Eigen::Index steps = asset_returns[0].size();
  for (const auto& r : asset_returns)
    if (r.size() != steps)
      throw GridMismatch("intraday return vectors differ in length");
  Eigen::MatrixXd ret(steps, n);
  for (int a = 0; a < n; ++a) ret.col(a) = asset_returns[a];
  return ret.transpose() * ret;
}

/// Omega = D^-1/2 Sigma D^-1/2 with D = diag(Sigma).
inline Eigen::MatrixXd correlation_from_covariance(
    const Eigen::MatrixXd& cov, const std::vector<std::string>* asset_names = nullptr) {
  const Eigen::Index n = cov.rows();
  Eigen::VectorXd inv_sd(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(cov(i, i) > 0.0)) {
      const std::string name =
          asset_names && i < Eigen::Index(asset_names->size())
              ? (*asset_names)[i] : "asset " + std::to_string(i);
      throw DegenerateVariance(name);
    }
    inv_sd[i] = 1.0 / std::sqrt(cov(i, i));
  }
  Eigen::MatrixXd omega = inv_sd.asDiagonal() * cov * inv_sd.asDiagonal();
  for (Eigen::Index i = 0; i < n; ++i) omega(i, i) = 1.0;
  return omega;
}

/// Per-asset measures for one day.
struct AssetMeasures {
  double rv = 0.0;
  double rs_plus = 0.0;
  double rs_minus = 0.0;
  double bpv = 0.0;
  double jv = 0.0;
};

/// All realized measures for a single day plus the cross-asset covariance.
struct RealizedDay {
  std::vector<AssetMeasures> assets;
  Eigen::MatrixXd cov;
};

inline RealizedDay compute_realized_day(const std::vector<Eigen::VectorXd>& asset_returns) {
  RealizedDay day;
  day.assets.reserve(asset_returns.size());
  for (const auto& r : asset_returns) {
    AssetMeasures m;
    m.rv = realized_variance(r);
    std::tie(m.rs_plus, m.rs_minus) = realized_semivariances(r);
    m.bpv = bipower_variation(r);
    m.jv = jump_variation(m.rv, m.bpv);
    day.assets.push_back(m);
  }
  day.cov = realized_covariance(asset_returns);
  return day;
}

inline std::vector<RealizedDay> compute_realized_series(const IntradayPanel& panel) {
  std::vector<RealizedDay> series;
  series.reserve(panel.n_days());
  std::vector<Eigen::VectorXd> day_returns(panel.n_assets());
  for (int d = 0; d < panel.n_days(); ++d) {
    for (int a = 0; a < panel.n_assets(); ++a)
      day_returns[a] = panel.intraday_returns(a, d);
    series.push_back(compute_realized_day(day_returns));
  }
  return series;
}

/// Measures CSV: `date,asset,rv,rs_plus,rs_minus,bpv,jv`.
inline void write_measures_csv(const std::vector<RealizedDay>& series,
                               const std::vector<std::string>& dates,
                               const std::vector<std::string>& assets,
                               const std::string& path) {
  CsvWriter w(path);
  w.row({"date", "asset", "rv", "rs_plus", "rs_minus", "bpv", "jv"});
  for (std::size_t d = 0; d < series.size(); ++d)
    for (std::size_t a = 0; a < assets.size(); ++a) {
      const AssetMeasures& m = series[d].assets[a];
      w.row({dates[d], assets[a], fmt_double(m.rv), fmt_double(m.rs_plus),
             fmt_double(m.rs_minus), fmt_double(m.bpv), fmt_double(m.jv)});
    }
}

/// Covariance CSV in long format: `date,asset_i,asset_j,value`.
inline void write_covariance_csv(const std::vector<RealizedDay>& series,
                                 const std::vector<std::string>& dates,
                                 const std::vector<std::string>& assets,
                                 const std::string& path) {
  CsvWriter w(path);
  w.row({"date", "asset_i", "asset_j", "value"});
  for (std::size_t d = 0; d < series.size(); ++d)
    for (std::size_t i = 0; i < assets.size(); ++i)
      for (std::size_t j = i; j < assets.size(); ++j)
        w.row({dates[d], assets[i], assets[j], fmt_double(series[d].cov(i, j))});
}

}  // namespace panelvar
