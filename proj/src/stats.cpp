#include "proxkit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

namespace proxkit::stats {

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

void check_design(const DesignMatrix& X) {
  if (X.values.cols() != static_cast<Eigen::Index>(X.names.size())) {
    throw ValidationError("design matrix: name count does not match column count");
  }
  std::set<std::string> uniq(X.names.begin(), X.names.end());
  if (uniq.size() != X.names.size()) {
    throw ValidationError("design matrix: duplicate column names");
  }
  if (!X.values.allFinite()) {
    throw ValidationError("design matrix: non-finite entries");
  }
}

/// Columns flagged as linearly dependent by a column-pivoted QR.
std::vector<std::string> dependent_columns(const DesignMatrix& X,
                                           const Eigen::ColPivHouseholderQR<Eigen::MatrixXd>& qr) {
  std::vector<std::string> out;
  const auto rank = qr.rank();
  const auto& perm = qr.colsPermutation().indices();
  for (Eigen::Index i = rank; i < X.values.cols(); ++i) {
    out.push_back(X.names[static_cast<std::size_t>(perm[i])]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

double FitResult::coef_of(std::string_view name) const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return coef[static_cast<Eigen::Index>(i)];
  }
  throw ValidationError("no coefficient named " + std::string(name));
}

double FitResult::se_of(std::string_view name) const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return robust_se[static_cast<Eigen::Index>(i)];
  }
  throw ValidationError("no standard error named " + std::string(name));
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw ValidationError("quantile of empty sequence");
  if (!(q > 0.0 && q < 1.0)) throw ValidationError("quantile order must lie in (0,1)");
  for (double v : values) {
    if (!std::isfinite(v)) throw ValidationError("quantile input contains non-finite value");
  }
  std::sort(values.begin(), values.end());
  const double h = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(h);
  const double frac = h - static_cast<double>(lo);
  if (lo + 1 >= values.size()) return values.back();
  return values[lo] + frac * (values[lo + 1] - values[lo]);
}

FitResult ols_robust(const DesignMatrix& X, const Eigen::VectorXd& y) {
  check_design(X);
  const Eigen::Index n = X.values.rows();
  const Eigen::Index k = X.values.cols();
  if (y.size() != n) throw ValidationError("ols_robust: y length does not match design rows");
  if (!y.allFinite()) throw ValidationError("ols_robust: non-finite response");
  if (n <= k) throw ValidationError("ols_robust: need more observations than predictors");

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X.values);
  if (qr.rank() < k) {
    std::string msg = "ols_robust: rank-deficient design; collinear columns:";
    for (const auto& c : dependent_columns(X, qr)) msg += " " + c;
    throw ValidationError(msg);
  }

  const Eigen::VectorXd beta = qr.solve(y);
  const Eigen::VectorXd resid = y - X.values * beta;

  const double ssr = resid.squaredNorm();
  const double ymean = y.mean();
  const double sst = (y.array() - ymean).square().sum();
  const double r2 = sst > 0.0 ? std::clamp(1.0 - ssr / sst, 0.0, 1.0) : 0.0;

  // HC1 sandwich: (X'X)^-1 [sum e_i^2 x_i x_i'] (X'X)^-1 * n/(n-k)
  const Eigen::MatrixXd xtx_inv = (X.values.transpose() * X.values).ldlt().solve(
      Eigen::MatrixXd::Identity(k, k));
  const Eigen::MatrixXd meat =
      X.values.transpose() * resid.array().square().matrix().asDiagonal() * X.values;
  const Eigen::MatrixXd cov =
      xtx_inv * meat * xtx_inv * (static_cast<double>(n) / static_cast<double>(n - k));

  FitResult out;
  out.names = X.names;
  out.coef = beta;
  out.robust_se = cov.diagonal().array().max(0.0).sqrt();
  out.r_squared = r2;
  out.n_obs = static_cast<std::size_t>(n);
  return out;
}

std::map<std::string, double> vif(const DesignMatrix& X, std::string_view intercept_name) {
  check_design(X);
  const Eigen::Index k = X.values.cols();
  std::map<std::string, double> out;
  for (Eigen::Index j = 0; j < k; ++j) {
    if (X.names[static_cast<std::size_t>(j)] == intercept_name) continue;
    Eigen::MatrixXd others(X.values.rows(), k - 1);
    Eigen::Index c = 0;
    for (Eigen::Index i = 0; i < k; ++i) {
      if (i == j) continue;
      others.col(c++) = X.values.col(i);
    }
    const Eigen::VectorXd target = X.values.col(j);
    const Eigen::VectorXd fit_coef = others.colPivHouseholderQr().solve(target);
    const double ssr = (target - others * fit_coef).squaredNorm();
    const double mean = target.mean();
    const double sst = (target.array() - mean).square().sum();
    double r2j = sst > 0.0 ? 1.0 - ssr / sst : 1.0;  // constant column: perfectly collinear
    if (r2j >= 1.0 - 1e-12) {
      out[X.names[static_cast<std::size_t>(j)]] = std::numeric_limits<double>::infinity();
    } else {
      out[X.names[static_cast<std::size_t>(j)]] = 1.0 / (1.0 - std::max(r2j, 0.0));
    }
  }
  return out;
}

LogitFit logit_fit(const DesignMatrix& X, const std::vector<int>& y) {
  check_design(X);
  const Eigen::Index n = X.values.rows();
  const Eigen::Index k = X.values.cols();
  if (static_cast<Eigen::Index>(y.size()) != n) {
    throw ValidationError("logit_fit: y length does not match design rows");
  }
  long ones = 0;
  for (int v : y) {
    if (v != 0 && v != 1) throw ValidationError("logit_fit: outcomes must be 0/1");
    ones += v;
  }
  if (ones == 0 || ones == static_cast<long>(y.size())) {
    throw ValidationError("logit_fit: both outcome classes must be present");
  }
  {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X.values);
    if (qr.rank() < k) {
      std::string msg = "logit_fit: rank-deficient design; collinear columns:";
      for (const auto& c : dependent_columns(X, qr)) msg += " " + c;
      throw ValidationError(msg);
    }
  }

  Eigen::VectorXd yv(n);
  for (Eigen::Index i = 0; i < n; ++i) yv[i] = y[static_cast<std::size_t>(i)];

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(k);
  int iter = 0;
  for (; iter < 100; ++iter) {
    const Eigen::VectorXd eta = X.values * beta;
    const Eigen::VectorXd p = (1.0 / (1.0 + (-eta.array()).exp())).matrix();
    const Eigen::VectorXd w = (p.array() * (1.0 - p.array())).max(1e-10).matrix();

    Eigen::MatrixXd normal_mat = X.values.transpose() * w.asDiagonal() * X.values;
    const Eigen::VectorXd rhs =
        X.values.transpose() * (w.asDiagonal() * eta + (yv - p));

    Eigen::LDLT<Eigen::MatrixXd> ldlt(normal_mat);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
      normal_mat.diagonal().array() += 1e-8;
      ldlt.compute(normal_mat);
    }
    const Eigen::VectorXd beta_new = ldlt.solve(rhs);

    if (!beta_new.allFinite() || beta_new.cwiseAbs().maxCoeff() > 1e4) {
      throw ValidationError(
          "logit_fit: diverging coefficients (possible perfect separation); review covariates");
    }
    const double delta = (beta_new - beta).cwiseAbs().maxCoeff();
    beta = beta_new;
    if (delta < 1e-8) {
      ++iter;
      break;
    }
  }

  const Eigen::VectorXd eta = X.values * beta;
  const Eigen::VectorXd p = (1.0 / (1.0 + (-eta.array()).exp())).matrix();
  double ll = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double pi = std::clamp(p[i], 1e-15, 1.0 - 1e-15);
    ll += yv[i] * std::log(pi) + (1.0 - yv[i]) * std::log(1.0 - pi);
  }
  // complete separation drives the deviance to zero: the fitted probabilities
  // saturate and the gradient vanishes, masquerading as convergence
  if (ll > -1e-6 * static_cast<double>(n)) {
    throw ValidationError(
        "logit_fit: zero deviance (perfect separation); review covariates");
  }
  const Eigen::VectorXd w = (p.array() * (1.0 - p.array())).max(1e-10).matrix();
  const Eigen::MatrixXd info = X.values.transpose() * w.asDiagonal() * X.values;
  const Eigen::MatrixXd cov = info.ldlt().solve(Eigen::MatrixXd::Identity(k, k));

  LogitFit out;
  out.fit.names = X.names;
  out.fit.coef = beta;
  out.fit.robust_se = cov.diagonal().array().max(0.0).sqrt();
  out.fit.r_squared = 0.0;
  out.fit.n_obs = static_cast<std::size_t>(n);
  out.fitted = p;
  out.log_likelihood = ll;
  out.iterations = iter;
  return out;
}

namespace {

/// U statistic of the values at `mask` positions, with midranks over `ranked`.
double u_from_ranks(const std::vector<double>& ranks, const std::vector<char>& is_a,
                    std::size_t n1) {
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    if (is_a[i]) rank_sum += ranks[i];
  }
  return rank_sum - static_cast<double>(n1) * (static_cast<double>(n1) + 1.0) / 2.0;
}

std::vector<double> midranks(const std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double mid = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = mid;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

UTestResult mann_whitney_u(std::span<const double> a, std::span<const double> b, MwuMode mode) {
  const std::size_t n1 = a.size();
  const std::size_t n2 = b.size();
  if (n1 == 0 || n2 == 0) throw ValidationError("mann_whitney_u: both samples must be non-empty");

  std::vector<double> all;
  all.reserve(n1 + n2);
  all.insert(all.end(), a.begin(), a.end());
  all.insert(all.end(), b.begin(), b.end());
  const std::vector<double> ranks = midranks(all);

  std::vector<char> is_a(n1 + n2, 0);
  std::fill(is_a.begin(), is_a.begin() + static_cast<std::ptrdiff_t>(n1), 1);
  const double u = u_from_ranks(ranks, is_a, n1);
  const double mu = static_cast<double>(n1) * static_cast<double>(n2) / 2.0;

  UTestResult out;
  out.u_statistic = u;

  const bool exact = mode == MwuMode::Exact || (mode == MwuMode::Auto && n1 + n2 <= 10);
  if (exact) {
    // enumerate every assignment of n1 labels; the permutation distribution of
    // U is symmetric about n1*n2/2, so two-sided p counts |U - mu| as extreme
    const std::size_t n = n1 + n2;
    std::vector<char> mask(n, 0);
    std::fill(mask.begin(), mask.begin() + static_cast<std::ptrdiff_t>(n1), 1);
    std::sort(mask.begin(), mask.end());  // lowest permutation for next_permutation loop
    const double margin = std::abs(u - mu);
    std::size_t total = 0;
    std::size_t extreme = 0;
    do {
      const double up = u_from_ranks(ranks, mask, n1);
      ++total;
      if (std::abs(up - mu) >= margin - 1e-12) ++extreme;
    } while (std::next_permutation(mask.begin(), mask.end()));
    out.p_value = static_cast<double>(extreme) / static_cast<double>(total);
    out.z = 0.0;
    return out;
  }

  // normal approximation with tie-corrected variance and continuity correction
  const double n = static_cast<double>(n1 + n2);
  double tie_term = 0.0;
  {
    std::vector<double> sorted(all);
    std::sort(sorted.begin(), sorted.end());
    std::size_t i = 0;
    while (i < sorted.size()) {
      std::size_t j = i;
      while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
      const double t = static_cast<double>(j - i + 1);
      tie_term += t * t * t - t;
      i = j + 1;
    }
  }
  const double var = static_cast<double>(n1) * static_cast<double>(n2) / 12.0 *
                     ((n + 1.0) - tie_term / (n * (n - 1.0)));
  if (var <= 0.0) {  // every value identical across both samples
    out.z = 0.0;
    out.p_value = 1.0;
    return out;
  }
  double z = 0.0;
  if (u > mu) z = (u - mu - 0.5) / std::sqrt(var);
  else if (u < mu) z = (u - mu + 0.5) / std::sqrt(var);
  out.z = z;
  out.p_value = std::min(1.0, 2.0 * (1.0 - normal_cdf(std::abs(z))));
  return out;
}

std::string stars(double p) {
  if (p < 0.01) return "***";
  if (p < 0.05) return "**";
  if (p < 0.1) return "*";
  return "";
}

}  // namespace proxkit::stats
