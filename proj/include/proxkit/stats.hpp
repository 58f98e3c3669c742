#pragma once

#include <Eigen/Dense>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "proxkit/types.hpp"

namespace proxkit::stats {

/// Named N x k predictor matrix. Fitting operations require full column rank.
struct DesignMatrix {
  std::vector<std::string> names;
  Eigen::MatrixXd values;

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }
};

struct FitResult {
  std::vector<std::string> names;
  Eigen::VectorXd coef;
  Eigen::VectorXd robust_se;  // HC1 for OLS, observed-information SE for logit
  double r_squared = 0.0;
  std::size_t n_obs = 0;

  double coef_of(std::string_view name) const;
  double se_of(std::string_view name) const;
};

/// Linear-interpolation quantile (type 7): h = q*(n-1) between order statistics.
double quantile(std::vector<double> values, double q);

/// OLS via Householder QR with HC1 sandwich standard errors.
FitResult ols_robust(const DesignMatrix& X, const Eigen::VectorXd& y);

/// Variance inflation factors for every non-intercept column.
/// Perfect collinearity is reported as +infinity.
std::map<std::string, double> vif(const DesignMatrix& X,
                                  std::string_view intercept_name = "intercept");

struct LogitFit {
  FitResult fit;
  Eigen::VectorXd fitted;  // probabilities, in (0,1)
  double log_likelihood = 0.0;
  int iterations = 0;
};

/// Maximum-likelihood logit via IRLS (tol 1e-8 on coefficients, <=100 iterations,
/// ridge 1e-8 fallback on near-singular weighted normal matrices).
LogitFit logit_fit(const DesignMatrix& X, const std::vector<int>& y);

enum class MwuMode { Auto, Exact, Normal };

struct UTestResult {
  double u_statistic = 0.0;  // U of the first sample
  double z = 0.0;
  double p_value = 1.0;  // two-sided
};

/// Mann-Whitney U with midranks. Exact mode enumerates every label assignment;
/// Auto switches to it when n1+n2 <= 10. Normal mode applies the tie-corrected
/// variance and a continuity correction.
UTestResult mann_whitney_u(std::span<const double> a, std::span<const double> b,
                           MwuMode mode = MwuMode::Auto);

/// Significance stars at the 0.01/0.05/0.1 thresholds.
std::string stars(double p);

}  // namespace proxkit::stats
