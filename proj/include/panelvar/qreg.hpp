#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "panelvar/errors.hpp"
#include "panelvar/rng.hpp"

namespace panelvar {

/// rho_tau(u) = u * (tau - 1{u<0}).
inline double quantile_loss(double u, double tau) {
  return u * (tau - (u < 0.0 ? 1.0 : 0.0));
}

enum class FitMode { panel, univariate };

/// Stacked quantile-regression problem. In panel mode the slope vector is
/// shared across assets and each asset gets its own fixed effect; in
/// univariate mode every asset is fitted separately with its own intercept
/// and slopes.
struct QuantileProblem {
  Eigen::VectorXd responses;           // stacked y, length R
  Eigen::MatrixXd regressors;          // R x k design (slope columns only)
  std::vector<int> asset_index;        // row -> asset in [0, n_assets)
  std::vector<int> day_index;          // row -> day/pair id, used by the bootstrap
  int n_assets = 1;
  double tau = 0.5;
  double lambda = 0.0;
  FitMode mode = FitMode::panel;
  std::vector<std::string> column_names;

  Eigen::Index rows() const { return responses.size(); }
  Eigen::Index cols() const { return regressors.cols(); }

  void validate() const;
};

struct QuantileFit {
  Eigen::VectorXd alphas;  // per-asset fixed effects / intercepts
  Eigen::MatrixXd betas;   // k x 1 (panel) or k x n_assets (univariate)
  double objective = 0.0;
  double tau = 0.0;
  double lambda = 0.0;
  double gap = 0.0;  // attained relative duality gap
  int iterations = 0;
};

namespace detail {

// One weighted-quantile row of the LP: loss w * rho_tau(y - alpha_i - x'beta).
// Penalty terms |alpha_i| enter as pseudo rows with y = 0, tau = 1/2, w = 2*lambda.
struct QrLpData {
  int n_assets = 0;
  int k = 0;
  std::vector<int> asset;
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> x;
  Eigen::VectorXd y;
  Eigen::VectorXd w;
  Eigen::VectorXd tau;
};

struct QrSolution {
  Eigen::VectorXd alpha;
  Eigen::VectorXd beta;
  double gap = 0.0;
  int iterations = 0;
};

// Normal-matrix solver for M = sum_r d_r w_r^2 a_r a_r' with a_r the
// indicator-plus-slopes design row. The alpha block of M is diagonal, so M u = v
// reduces to a k x k Schur system on the slope block.
class BlockNormal {
 public:
  explicit BlockNormal(const QrLpData& d) : d_(d) {
    s_.resize(d.n_assets);
    c_.resize(d.n_assets, d.k);
    g_.resize(d.k, d.k);
  }

  void assemble(const Eigen::VectorXd& diag) {
    const int k = d_.k;
    s_.setZero();
    c_.setZero();
    g_.setZero();
    const double* xp = d_.x.data();
    for (Eigen::Index r = 0; r < d_.y.size(); ++r) {
      const double wr = d_.w[r];
      const double dr = diag[r] * wr * wr;
      const int i = d_.asset[r];
      s_[i] += dr;
      const double* xr = xp + r * k;
      for (int a = 0; a < k; ++a) {
        const double da = dr * xr[a];
        c_(i, a) += da;
        for (int b = a; b < k; ++b) g_(a, b) += da * xr[b];
      }
    }
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < a; ++b) g_(a, b) = g_(b, a);
    // Schur complement onto the slope block.
    Eigen::MatrixXd schur = g_;
    inv_s_ = s_.cwiseMax(1e-300).cwiseInverse();
    schur.noalias() -= c_.transpose() * inv_s_.asDiagonal() * c_;
    if (d_.k > 0) {
      schur_ldlt_.compute(schur);
    }
  }

  // Solve M [u_alpha; u_beta] = [v_alpha; v_beta].
  void solve(const Eigen::VectorXd& v_alpha, const Eigen::VectorXd& v_beta,
             Eigen::VectorXd& u_alpha, Eigen::VectorXd& u_beta) const {
    if (d_.k > 0) {
      Eigen::VectorXd rhs = v_beta - c_.transpose() * (inv_s_.asDiagonal() * v_alpha);
      u_beta = schur_ldlt_.solve(rhs);
      u_alpha = inv_s_.asDiagonal() * (v_alpha - c_ * u_beta);
    } else {
      u_beta.resize(0);
      u_alpha = inv_s_.asDiagonal() * v_alpha;
    }
  }

 private:
  const QrLpData& d_;
  Eigen::VectorXd s_, inv_s_;
  Eigen::MatrixXd c_;
  Eigen::MatrixXd g_;
  Eigen::LDLT<Eigen::MatrixXd> schur_ldlt_;
};

// t_r = w_r * (alpha_{i(r)} + x_r' beta)
inline void apply_bt(const QrLpData& d, const Eigen::VectorXd& alpha,
                     const Eigen::VectorXd& beta, Eigen::VectorXd& out) {
  const int k = d.k;
  const double* xp = d.x.data();
  out.resize(d.y.size());
  for (Eigen::Index r = 0; r < d.y.size(); ++r) {
    double f = alpha[d.asset[r]];
    const double* xr = xp + r * k;
    for (int a = 0; a < k; ++a) f += xr[a] * beta[a];
    out[r] = d.w[r] * f;
  }
}

// [out_alpha; out_beta] += sum_r v_r w_r a_r
inline void apply_b(const QrLpData& d, const Eigen::VectorXd& v,
                    Eigen::VectorXd& out_alpha, Eigen::VectorXd& out_beta) {
  const int k = d.k;
  const double* xp = d.x.data();
  out_alpha.setZero(d.n_assets);
  out_beta.setZero(k);
  for (Eigen::Index r = 0; r < d.y.size(); ++r) {
    const double vr = v[r] * d.w[r];
    out_alpha[d.asset[r]] += vr;
    const double* xr = xp + r * k;
    for (int a = 0; a < k; ++a) out_beta[a] += vr * xr[a];
  }
}

inline double step_length(const Eigen::VectorXd& v, const Eigen::VectorXd& dv) {
  double alpha = 1.0;
  for (Eigen::Index r = 0; r < v.size(); ++r)
    if (dv[r] < 0.0) alpha = std::min(alpha, -v[r] / dv[r]);
  return alpha;
}

// Mehrotra predictor-corrector on the bounded-variable dual LP
//   min c'a  s.t.  B a = b,  0 <= a <= 1,
// whose equality multiplier is the coefficient vector (alpha, beta).
inline QrSolution solve_qr_lp(const QrLpData& d, double rel_tol, int max_iter) {
  const Eigen::Index R = d.y.size();
  const int k = d.k;

  Eigen::VectorXd c = d.w.cwiseProduct(d.y);

  // Primal-feasible start a = tau; dual start from a least-squares fit.
  Eigen::VectorXd a = d.tau;
  Eigen::VectorXd s = Eigen::VectorXd::Ones(R) - a;

  BlockNormal normal(d);
  normal.assemble(Eigen::VectorXd::Ones(R));
  Eigen::VectorXd rhs_a, rhs_b, alpha(d.n_assets), beta(std::max(k, 0));
  apply_b(d, d.y, rhs_a, rhs_b);
  normal.solve(rhs_a, rhs_b, alpha, beta);

  Eigen::VectorXd fitted;
  apply_bt(d, alpha, beta, fitted);  // = w .* (design * theta)
  Eigen::VectorXd resid = c - fitted;
  const double scale = resid.cwiseAbs().mean() + 1e-12;
  Eigen::VectorXd z = resid.cwiseMax(0.0).array() + 0.1 * scale;
  Eigen::VectorXd q = (-resid).cwiseMax(0.0).array() + 0.1 * scale;

  // b = sum_r w_r tau_r a_r
  Eigen::VectorXd b_alpha, b_beta;
  apply_b(d, d.tau, b_alpha, b_beta);

  auto objective_primal = [&](const Eigen::VectorXd& al, const Eigen::VectorXd& be) {
    Eigen::VectorXd f;
    apply_bt(d, al, be, f);
    double obj = 0.0;
    for (Eigen::Index r = 0; r < R; ++r) {
      const double u = d.y[r] - f[r] / d.w[r];
      obj += d.w[r] * quantile_loss(u, d.tau[r]);
    }
    return obj;
  };

  QrSolution sol;
  double rel_gap = std::numeric_limits<double>::infinity();
  Eigen::VectorXd da(R), ds(R), dz(R), dq(R), dal(d.n_assets), dbe(k);
  Eigen::VectorXd ra(d.n_assets), rb(k);

  for (int iter = 1; iter <= max_iter; ++iter) {
    apply_bt(d, alpha, beta, fitted);
    Eigen::VectorXd rd = c - fitted - z + q;  // dual residual
    apply_b(d, a, ra, rb);
    Eigen::VectorXd rp_alpha = b_alpha - ra;
    Eigen::VectorXd rp_beta = b_beta - rb;

    const double mu = (a.dot(z) + s.dot(q)) / double(2 * R);

    // Convergence: relative duality gap of the quantile objective.
    const double primal_obj = objective_primal(alpha, beta);
    const double dual_obj = c.dot(d.tau) - c.dot(a);
    const double gap = primal_obj - dual_obj;
    rel_gap = std::fabs(gap) / std::max(std::fabs(primal_obj), 1e-12);
    sol.iterations = iter - 1;
    if (rel_gap <= rel_tol && mu <= rel_tol * (scale + 1.0)) break;
    if (iter == max_iter) {
      sol.alpha = alpha;
      sol.beta = beta;
      sol.gap = rel_gap;
      throw SolverFailure(rel_gap);
    }

    Eigen::VectorXd e = z.cwiseQuotient(a) + q.cwiseQuotient(s);
    Eigen::VectorXd dinv = e.cwiseInverse();
    normal.assemble(dinv);

    auto kkt_solve = [&](const Eigen::VectorXd& rc1, const Eigen::VectorXd& rc2) {
      // rc1, rc2 are the complementarity right-hand sides for (a,z) and (s,q).
      // The bound residual 1 - a - s stays zero because s moves with -da.
      Eigen::VectorXd t = rd - rc1.cwiseQuotient(a) + rc2.cwiseQuotient(s);
      Eigen::VectorXd bd = dinv.cwiseProduct(t);
      Eigen::VectorXd v_alpha, v_beta;
      apply_b(d, bd, v_alpha, v_beta);
      v_alpha = rp_alpha + v_alpha;
      v_beta = rp_beta + v_beta;
      normal.solve(v_alpha, v_beta, dal, dbe);
      Eigen::VectorXd bt;
      apply_bt(d, dal, dbe, bt);
      da = dinv.cwiseProduct(bt - t);
      ds = -da;
      dz = (rc1 - z.cwiseProduct(da)).cwiseQuotient(a);
      dq = (rc2 - q.cwiseProduct(ds)).cwiseQuotient(s);
    };

    // Affine (predictor) step.
    kkt_solve(-a.cwiseProduct(z), -s.cwiseProduct(q));
    double ap = std::min(step_length(a, da), step_length(s, ds));
    double ad = std::min(step_length(z, dz), step_length(q, dq));
    const double mu_aff =
        ((a + ap * da).dot(z + ad * dz) + (s + ap * ds).dot(q + ad * dq)) / double(2 * R);
    const double sigma = std::pow(mu_aff / std::max(mu, 1e-300), 3.0);

    // Corrector step.
    Eigen::VectorXd rc1 =
        Eigen::VectorXd::Constant(R, sigma * mu) - a.cwiseProduct(z) - da.cwiseProduct(dz);
    Eigen::VectorXd rc2 =
        Eigen::VectorXd::Constant(R, sigma * mu) - s.cwiseProduct(q) - ds.cwiseProduct(dq);
    kkt_solve(rc1, rc2);
    ap = std::min(step_length(a, da), step_length(s, ds));
    ad = std::min(step_length(z, dz), step_length(q, dq));
    const double eta = 0.9995;
    ap = std::min(1.0, eta * ap);
    ad = std::min(1.0, eta * ad);
    if (ap < 1e-12 && ad < 1e-12) {
      sol.alpha = alpha;
      sol.beta = beta;
      sol.gap = rel_gap;
      throw SolverFailure(rel_gap);
    }

    a += ap * da;
    s += ap * ds;
    z += ad * dz;
    q += ad * dq;
    alpha += ad * dal;
    beta += ad * dbe;
  }

  sol.alpha = alpha;
  sol.beta = beta;
  sol.gap = rel_gap;
  return sol;
}

// Identifiability: every asset needs at least one data row, and the slope
// columns must have full rank after within-asset demeaning.
inline void check_rank(const QuantileProblem& p, const std::vector<int>& rows_of_interest,
                       int n_assets_local, const std::vector<int>& asset_local) {
  const int k = static_cast<int>(p.cols());
  std::vector<int> count(n_assets_local, 0);
  std::vector<Eigen::VectorXd> mean(n_assets_local, Eigen::VectorXd::Zero(k));
  for (int r : rows_of_interest) {
    count[asset_local[r]]++;
    mean[asset_local[r]] += p.regressors.row(r).transpose();
  }
  for (int i = 0; i < n_assets_local; ++i) {
    if (count[i] == 0) throw RankDeficient("alpha[" + std::to_string(i) + "]");
    mean[i] /= double(count[i]);
  }
  if (k == 0) return;
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(k, k);
  for (int r : rows_of_interest) {
    Eigen::VectorXd xc = p.regressors.row(r).transpose() - mean[asset_local[r]];
    gram.noalias() += xc * xc.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
  const double top = es.eigenvalues().maxCoeff();
  if (!(top > 0.0) || es.eigenvalues().minCoeff() <= 1e-12 * top) {
    Eigen::Index worst = 0;
    es.eigenvectors().col(0).cwiseAbs().maxCoeff(&worst);
    const std::string name = worst < Eigen::Index(p.column_names.size())
                                 ? p.column_names[worst]
                                 : "column " + std::to_string(worst);
    throw RankDeficient(name);
  }
}

}  // namespace detail

inline void QuantileProblem::validate() const {
  if (!(tau > 0.0 && tau < 1.0)) throw ConfigError("tau must lie in (0,1)");
  if (lambda < 0.0) throw ConfigError("lambda must be nonnegative");
  if (rows() != Eigen::Index(asset_index.size()) || rows() != regressors.rows())
    throw ConfigError("problem rows misaligned");
  const Eigen::Index min_rows = cols() + n_assets + 1;
  if (rows() < min_rows) throw InsufficientObservations("quantile problem too small");
  std::vector<int> all(rows());
  for (Eigen::Index r = 0; r < rows(); ++r) all[r] = static_cast<int>(r);
  if (mode == FitMode::panel) {
    detail::check_rank(*this, all, n_assets, asset_index);
  } else {
    for (int i = 0; i < n_assets; ++i) {
      std::vector<int> rows_i;
      for (Eigen::Index r = 0; r < rows(); ++r)
        if (asset_index[r] == i) rows_i.push_back(static_cast<int>(r));
      std::vector<int> zero(rows(), 0);
      detail::check_rank(*this, rows_i, 1, zero);
    }
  }
}

/// Exact evaluation of the penalized objective at given parameters.
inline double objective(const QuantileProblem& p, const Eigen::VectorXd& alphas,
                        const Eigen::MatrixXd& betas) {
  double obj = 0.0;
  for (Eigen::Index r = 0; r < p.rows(); ++r) {
    const int i = p.asset_index[r];
    const Eigen::Index bcol = (p.mode == FitMode::panel) ? 0 : i;
    double fit = alphas[i];
    if (p.cols() > 0) fit += p.regressors.row(r).dot(betas.col(bcol));
    obj += quantile_loss(p.responses[r] - fit, p.tau);
  }
  obj += p.lambda * alphas.cwiseAbs().sum();
  return obj;
}

namespace detail {

inline QrLpData build_lp(const QuantileProblem& p, const std::vector<int>& rows,
                         int n_assets_local, const std::vector<int>& asset_local,
                         const Eigen::VectorXd& col_scale) {
  QrLpData d;
  d.n_assets = n_assets_local;
  d.k = static_cast<int>(p.cols());
  const int penalty_rows = p.lambda > 0.0 ? n_assets_local : 0;
  const Eigen::Index R = Eigen::Index(rows.size()) + penalty_rows;
  d.asset.resize(R);
  d.x.resize(R, d.k);
  d.y.resize(R);
  d.w.resize(R);
  d.tau.resize(R);
  Eigen::Index o = 0;
  for (int r : rows) {
    d.asset[o] = asset_local[r];
    for (int j = 0; j < d.k; ++j) d.x(o, j) = p.regressors(r, j) * col_scale[j];
    d.y[o] = p.responses[r];
    d.w[o] = 1.0;
    d.tau[o] = p.tau;
    ++o;
  }
  for (int i = 0; i < penalty_rows; ++i, ++o) {
    d.asset[o] = i;
    d.x.row(o).setZero();
    d.y[o] = 0.0;
    d.w[o] = 2.0 * p.lambda;
    d.tau[o] = 0.5;
  }
  return d;
}

}  // namespace detail

/// Solve the penalized fixed-effects quantile program (panel mode) or the
/// per-asset classical quantile regressions (univariate mode).
inline QuantileFit fit(const QuantileProblem& p) {
  p.validate();
  constexpr double kRelTol = 1e-8;
  constexpr int kMaxIter = 200;
  const int k = static_cast<int>(p.cols());

  // Scale slope columns to unit RMS for the interior-point iterations.
  Eigen::VectorXd col_scale = Eigen::VectorXd::Ones(k);
  for (int j = 0; j < k; ++j) {
    const double rms = std::sqrt(p.regressors.col(j).squaredNorm() / double(p.rows()));
    if (rms > 0.0) col_scale[j] = 1.0 / rms;
  }

  QuantileFit out;
  out.tau = p.tau;
  out.lambda = p.lambda;
  if (p.mode == FitMode::panel) {
    std::vector<int> all(p.rows());
    for (Eigen::Index r = 0; r < p.rows(); ++r) all[r] = static_cast<int>(r);
    const auto d = detail::build_lp(p, all, p.n_assets, p.asset_index, col_scale);
    auto sol = detail::solve_qr_lp(d, kRelTol, kMaxIter);
    out.alphas = sol.alpha;
    out.betas = sol.beta.cwiseProduct(col_scale);
    out.betas.resize(k, 1);
    out.gap = sol.gap;
    out.iterations = sol.iterations;
  } else {
    out.alphas.resize(p.n_assets);
    out.betas.resize(k, p.n_assets);
    out.gap = 0.0;
    std::vector<int> zero(p.rows(), 0);
    for (int i = 0; i < p.n_assets; ++i) {
      std::vector<int> rows_i;
      for (Eigen::Index r = 0; r < p.rows(); ++r)
        if (p.asset_index[r] == i) rows_i.push_back(static_cast<int>(r));
      const auto d = detail::build_lp(p, rows_i, 1, zero, col_scale);
      auto sol = detail::solve_qr_lp(d, kRelTol, kMaxIter);
      out.alphas[i] = sol.alpha[0];
      out.betas.col(i) = sol.beta.cwiseProduct(col_scale);
      out.gap = std::max(out.gap, sol.gap);
      out.iterations += sol.iterations;
    }
  }
  out.objective = objective(p, out.alphas, out.betas);
  return out;
}

/// One-sided directional derivative of the objective at (alphas, betas) along
/// +/- the unit direction of a single parameter. Parameters are indexed as
/// [alpha_0..alpha_{n-1}, beta columns stacked]. Nonnegative values at an
/// optimum certify subgradient optimality.
inline double directional_derivative(const QuantileProblem& p, const Eigen::VectorXd& alphas,
                                     const Eigen::MatrixXd& betas, int param, double sign) {
  const int n = p.n_assets;
  const int k = static_cast<int>(p.cols());
  double deriv = 0.0;
  for (Eigen::Index r = 0; r < p.rows(); ++r) {
    const int i = p.asset_index[r];
    const Eigen::Index bcol = (p.mode == FitMode::panel) ? 0 : i;
    double fitv = alphas[i];
    if (k > 0) fitv += p.regressors.row(r).dot(betas.col(bcol));
    // Change in fitted value per unit parameter step.
    double delta = 0.0;
    if (param < n) {
      if (i == param) delta = sign;
    } else {
      const int j = (param - n) % k;
      const int col = (param - n) / k;
      if (bcol == col) delta = sign * p.regressors(r, j);
    }
    if (delta == 0.0) continue;
    const double u = p.responses[r] - fitv;
    if (u > 0.0)
      deriv += -delta * p.tau;
    else if (u < 0.0)
      deriv += delta * (1.0 - p.tau);
    else
      deriv += std::max(delta * (1.0 - p.tau), -delta * p.tau);
  }
  if (p.lambda > 0.0 && param < n) {
    const double av = alphas[param];
    deriv += p.lambda * (av > 0.0 ? sign : (av < 0.0 ? -sign : std::fabs(sign)));
  }
  return deriv;
}

/// Bootstrap standard errors and t-statistics (moving blocks over days,
/// resampling whole cross-sections).
struct BootstrapSE {
  std::vector<std::string> names;
  Eigen::VectorXd estimate;
  Eigen::VectorXd se;
  Eigen::VectorXd tstat;
  int skipped = 0;
  int replications = 0;
};

namespace detail {

inline Eigen::VectorXd flatten_params(const QuantileFit& f) {
  Eigen::VectorXd v(f.alphas.size() + f.betas.size());
  v.head(f.alphas.size()) = f.alphas;
  for (Eigen::Index c = 0; c < f.betas.cols(); ++c)
    v.segment(f.alphas.size() + c * f.betas.rows(), f.betas.rows()) = f.betas.col(c);
  return v;
}

}  // namespace detail

inline BootstrapSE bootstrap_se(const QuantileProblem& p, int B, std::uint64_t seed) {
  if (B < 2) throw ConfigError("bootstrap needs B >= 2");
  const QuantileFit point = fit(p);

  // Group rows by day so a resampled day keeps its full cross-section.
  int n_days = 0;
  for (int di : p.day_index) n_days = std::max(n_days, di + 1);
  if (p.day_index.empty() || n_days == 0) throw ConfigError("bootstrap needs day_index");
  std::vector<std::vector<int>> rows_of_day(n_days);
  for (Eigen::Index r = 0; r < p.rows(); ++r) rows_of_day[p.day_index[r]].push_back(int(r));

  const int block = std::max(1, int(std::ceil(std::cbrt(double(n_days)))));
  const int n_params = int(point.alphas.size() + point.betas.size());
  Eigen::MatrixXd draws(n_params, B);
  int skipped = 0;

  for (int rep = 0; rep < B; ++rep) {
    Rng rng(seed, std::uint64_t(rep));
    std::vector<int> days;
    days.reserve(n_days);
    while (int(days.size()) < n_days) {
      const int start = int(rng.index(std::uint64_t(std::max(1, n_days - block + 1))));
      for (int j = 0; j < block && int(days.size()) < n_days; ++j)
        days.push_back(start + j);
    }
    QuantileProblem q;
    q.n_assets = p.n_assets;
    q.tau = p.tau;
    q.lambda = p.lambda;
    q.mode = p.mode;
    q.column_names = p.column_names;
    Eigen::Index total = 0;
    for (int day : days) total += Eigen::Index(rows_of_day[day].size());
    q.responses.resize(total);
    q.regressors.resize(total, p.cols());
    q.asset_index.resize(total);
    q.day_index.resize(total);
    Eigen::Index o = 0;
    int new_day = 0;
    for (int day : days) {
      for (int r : rows_of_day[day]) {
        q.responses[o] = p.responses[r];
        q.regressors.row(o) = p.regressors.row(r);
        q.asset_index[o] = p.asset_index[r];
        q.day_index[o] = new_day;
        ++o;
      }
      ++new_day;
    }
    try {
      draws.col(rep - skipped) = detail::flatten_params(fit(q));
    } catch (const Error&) {
      ++skipped;
    }
  }
  const int kept = B - skipped;
  if (skipped * 5 > B) throw BootstrapDegenerate(skipped, B);

  BootstrapSE out;
  out.replications = kept;
  out.skipped = skipped;
  out.estimate = detail::flatten_params(point);
  out.se.resize(n_params);
  out.tstat.resize(n_params);
  for (int j = 0; j < n_params; ++j) {
    const auto row = draws.row(j).head(kept);
    const double mean = row.mean();
    double ss = 0.0;
    for (int rep = 0; rep < kept; ++rep) ss += (row[rep] - mean) * (row[rep] - mean);
    out.se[j] = kept > 1 ? std::sqrt(ss / double(kept - 1)) : 0.0;
    out.tstat[j] = out.se[j] > 0.0 ? out.estimate[j] / out.se[j] : 0.0;
  }
  for (int i = 0; i < p.n_assets; ++i) out.names.push_back("alpha[" + std::to_string(i) + "]");
  const int bcols = (p.mode == FitMode::panel) ? 1 : p.n_assets;
  for (int c = 0; c < bcols; ++c)
    for (Eigen::Index j = 0; j < p.cols(); ++j) {
      std::string base = j < Eigen::Index(p.column_names.size())
                             ? p.column_names[j] : "beta" + std::to_string(j);
      out.names.push_back(p.mode == FitMode::panel ? base : base + "[" + std::to_string(c) + "]");
    }
  return out;
}

}  // namespace panelvar
