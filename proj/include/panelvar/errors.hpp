#pragma once

#include <stdexcept>
#include <string>

namespace panelvar {

/// Base class for all toolkit errors.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// An asset has no observations at all on a trading day.
struct MissingDay : Error {
  MissingDay(const std::string& asset, const std::string& date)
      : Error("missing day: asset '" + asset + "' has no ticks on " + date),
        asset(asset), date(date) {}
  std::string asset;
  std::string date;
};

/// Intraday return vectors do not share a common grid length.
struct GridMismatch : Error {
  explicit GridMismatch(const std::string& msg) : Error("grid mismatch: " + msg) {}
};

/// Too few intraday observations for the requested estimator.
struct InsufficientObservations : Error {
  explicit InsufficientObservations(const std::string& msg)
      : Error("insufficient observations: " + msg) {}
};

/// A covariance diagonal entry is zero or negative.
struct DegenerateVariance : Error {
  explicit DegenerateVariance(const std::string& asset)
      : Error("degenerate variance for asset '" + asset + "'"), asset(asset) {}
  std::string asset;
};

/// Design matrix is rank deficient after within-asset centering.
struct RankDeficient : Error {
  explicit RankDeficient(const std::string& column)
      : Error("rank-deficient design, offending column '" + column + "'"),
        column(column) {}
  std::string column;
};

/// Interior-point solver failed to reach the duality-gap tolerance.
struct SolverFailure : Error {
  explicit SolverFailure(double gap)
      : Error("quantile solver did not converge, relative gap " + std::to_string(gap)),
        gap(gap) {}
  double gap;
};

/// More than 20% of bootstrap resamples produced singular designs.
struct BootstrapDegenerate : Error {
  explicit BootstrapDegenerate(int skipped, int total)
      : Error("bootstrap degenerate: " + std::to_string(skipped) + "/" +
              std::to_string(total) + " resamples skipped") {}
};

/// Measure and return series are not aligned on the same dates.
struct AlignmentError : Error {
  explicit AlignmentError(const std::string& msg) : Error("alignment error: " + msg) {}
};

/// A quadratic form that must be nonnegative came out materially negative.
struct NumericalPSDError : Error {
  explicit NumericalPSDError(double value)
      : Error("negative quadratic form: " + std::to_string(value)) {}
};

/// A correlation matrix fails the PSD tolerance.
struct CorrelationError : Error {
  explicit CorrelationError(const std::string& msg) : Error("correlation error: " + msg) {}
};

/// Cholesky factorization failed (matrix not positive semidefinite).
struct CholeskyError : Error {
  explicit CholeskyError(const std::string& msg) : Error("cholesky error: " + msg) {}
};

/// The correlated-VaR covariance matrix is numerically singular.
struct SingularXi : Error {
  explicit SingularXi(double condition)
      : Error("singular VaR covariance, condition estimate " + std::to_string(condition)) {}
};

/// Requested frontier return target lies outside the attainable range.
struct TargetInfeasible : Error {
  explicit TargetInfeasible(double target)
      : Error("infeasible target return " + std::to_string(target)), target(target) {}
  double target;
};

/// Run configuration failed validation.
struct ConfigError : Error {
  explicit ConfigError(const std::string& msg) : Error("config error: " + msg) {}
};

}  // namespace panelvar
