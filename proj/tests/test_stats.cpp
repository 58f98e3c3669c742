#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "proxkit/rng.hpp"
#include "proxkit/stats.hpp"

using namespace proxkit;
using stats::DesignMatrix;

TEST_CASE("quantile: pinned examples") {
  CHECK(stats::quantile({5.0}, 0.3) == 5.0);
  CHECK(stats::quantile({5.0}, 0.9) == 5.0);
  CHECK(stats::quantile({1, 2, 3, 4, 5, 6, 7, 8, 9, 10}, 0.9) == doctest::Approx(9.1).epsilon(1e-12));
  CHECK(stats::quantile({1, 2, 3, 4}, 0.5) == doctest::Approx(2.5).epsilon(1e-12));
  CHECK_THROWS_AS(stats::quantile({}, 0.5), ValidationError);
  CHECK_THROWS_AS(stats::quantile({1.0}, 0.0), ValidationError);
  CHECK_THROWS_AS(stats::quantile({1.0}, 1.0), ValidationError);
}

TEST_CASE("quantile: monotone in q, bracketed by min/max, matches sort oracle") {
  Rng rng(99);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 1 + rng.below(40);
    std::vector<double> v(n);
    for (auto& x : v) x = rng.normal() * 10.0;
    double prev = -1e300;
    for (double q : {0.05, 0.25, 0.5, 0.75, 0.9, 0.95}) {
      const double value = stats::quantile(v, q);
      CHECK(value >= prev - 1e-12);
      prev = value;
      CHECK(value >= *std::min_element(v.begin(), v.end()) - 1e-12);
      CHECK(value <= *std::max_element(v.begin(), v.end()) + 1e-12);
      CHECK(value == doctest::Approx(oracles::quantile_sorted(v, q)).epsilon(1e-12));
    }
  }
}

TEST_CASE("quantile: pointwise dominance is preserved") {
  // if every opposing similarity rises, a quantile-based score cannot fall
  Rng rng(314);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> v(1 + rng.below(20));
    for (auto& x : v) x = rng.uniform(-1.0, 0.8);
    std::vector<double> shifted(v);
    const double delta = rng.uniform(0.0, 0.2);
    for (auto& x : shifted) x += delta;
    for (double q : {0.1, 0.5, 0.9}) {
      CHECK(stats::quantile(shifted, q) >= stats::quantile(v, q) - 1e-12);
    }
  }
}

namespace {

DesignMatrix make_design(const std::vector<std::string>& names,
                         const std::vector<std::vector<double>>& rows) {
  DesignMatrix X;
  X.names = names;
  X.values.resize(static_cast<Eigen::Index>(rows.size()),
                  static_cast<Eigen::Index>(names.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < names.size(); ++j) {
      X.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return X;
}

}  // namespace

TEST_CASE("ols_robust: exact fit y = 2x + 3") {
  std::vector<std::vector<double>> rows;
  Eigen::VectorXd y(6);
  for (int i = 0; i < 6; ++i) {
    const double x = i;
    rows.push_back({1.0, x});
    y[i] = 2.0 * x + 3.0;
  }
  const auto fit = stats::ols_robust(make_design({"intercept", "x"}, rows), y);
  CHECK(fit.coef_of("intercept") == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(fit.coef_of("x") == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("ols_robust: constant response gives zero slope and zero R^2") {
  std::vector<std::vector<double>> rows;
  Eigen::VectorXd y(8);
  for (int i = 0; i < 8; ++i) {
    rows.push_back({1.0, static_cast<double>(i)});
    y[i] = 4.0;
  }
  const auto fit = stats::ols_robust(make_design({"intercept", "x"}, rows), y);
  CHECK(std::abs(fit.coef_of("x")) < 1e-12);
  CHECK(fit.r_squared == 0.0);
}

TEST_CASE("ols_robust: matches normal-equations oracle and recovers planted beta") {
  Rng rng(1234);
  const std::size_t n = 200;
  const std::vector<double> beta_true = {1.5, -0.8, 0.3};
  std::vector<std::vector<double>> rows;
  std::vector<double> yv;
  for (std::size_t i = 0; i < n; ++i) {
    const double x1 = rng.normal();
    const double x2 = rng.uniform(-2.0, 2.0);
    const double eps = 0.5 * rng.normal();
    rows.push_back({1.0, x1, x2});
    yv.push_back(beta_true[0] + beta_true[1] * x1 + beta_true[2] * x2 + eps);
  }
  Eigen::VectorXd y(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) y[static_cast<Eigen::Index>(i)] = yv[i];
  const auto X = make_design({"intercept", "x1", "x2"}, rows);
  const auto fit = stats::ols_robust(X, y);

  const auto oracle = oracles::ols_normal_equations(rows, yv);
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(fit.coef[static_cast<Eigen::Index>(j)] == doctest::Approx(oracle[j]).epsilon(1e-8));
    CHECK(std::abs(fit.coef[static_cast<Eigen::Index>(j)] - beta_true[j]) <
          3.0 * fit.robust_se[static_cast<Eigen::Index>(j)] + 1e-9);
  }

  // residual orthogonality to every design column
  const Eigen::VectorXd resid = y - X.values * fit.coef;
  for (Eigen::Index j = 0; j < X.values.cols(); ++j) {
    const double dot = std::abs(resid.dot(X.values.col(j)));
    CHECK(dot <= 1e-8 * X.values.col(j).norm() * (1.0 + resid.norm()));
  }
}

TEST_CASE("ols_robust: coefficients invariant under observation reordering") {
  Rng rng(555);
  std::vector<std::vector<double>> rows;
  std::vector<double> yv;
  for (int i = 0; i < 60; ++i) {
    const double x = rng.normal();
    rows.push_back({1.0, x});
    yv.push_back(0.3 + 1.1 * x + 0.2 * rng.normal());
  }
  auto fit_of = [&](const std::vector<std::size_t>& order) {
    std::vector<std::vector<double>> r2;
    Eigen::VectorXd y2(static_cast<Eigen::Index>(order.size()));
    for (std::size_t i = 0; i < order.size(); ++i) {
      r2.push_back(rows[order[i]]);
      y2[static_cast<Eigen::Index>(i)] = yv[order[i]];
    }
    return stats::ols_robust(make_design({"intercept", "x"}, r2), y2);
  };
  std::vector<std::size_t> order(rows.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto a = fit_of(order);
  rng.shuffle(order);
  const auto b = fit_of(order);
  CHECK(a.coef_of("x") == doctest::Approx(b.coef_of("x")).epsilon(1e-12));
  CHECK(a.se_of("x") == doctest::Approx(b.se_of("x")).epsilon(1e-10));
}

TEST_CASE("ols_robust: rank deficiency names the collinear column") {
  std::vector<std::vector<double>> rows;
  Eigen::VectorXd y(10);
  for (int i = 0; i < 10; ++i) {
    const double x = i * 0.7 - 2.0;
    rows.push_back({1.0, x, 2.0 * x});
    y[i] = x;
  }
  CHECK_THROWS_WITH_AS(stats::ols_robust(make_design({"intercept", "x", "x_twice"}, rows), y),
                       doctest::Contains("collinear"), ValidationError);
}

TEST_CASE("vif: orthogonal columns give 1, correlation 0.6 gives 1.5625, duplicates infinite") {
  // exactly orthogonal +-1 design, centered against the intercept
  std::vector<std::vector<double>> rows = {
      {1, 1, 1, 1},   {1, 1, -1, -1}, {1, -1, 1, -1}, {1, -1, -1, 1},
      {1, 1, 1, 1},   {1, 1, -1, -1}, {1, -1, 1, -1}, {1, -1, -1, 1},
  };
  const auto v = stats::vif(make_design({"intercept", "a", "b", "c"}, rows));
  for (const auto& [name, value] : v) CHECK(value == doctest::Approx(1.0).epsilon(1e-9));

  {
    // two predictors with sample correlation exactly 0.6:
    // x2 = 0.6*x1 + 0.8*z with z orthogonal to x1, both zero-sum unit-scale
    std::vector<std::vector<double>> r2;
    const std::vector<double> x1 = {1, 1, 1, 1, -1, -1, -1, -1};
    const std::vector<double> z = {1, 1, -1, -1, 1, 1, -1, -1};
    for (std::size_t i = 0; i < x1.size(); ++i) {
      r2.push_back({1.0, x1[i], 0.6 * x1[i] + 0.8 * z[i]});
    }
    const auto v2 = stats::vif(make_design({"intercept", "x1", "x2"}, r2));
    CHECK(v2.at("x1") == doctest::Approx(1.5625).epsilon(1e-9));
    CHECK(v2.at("x2") == doctest::Approx(1.5625).epsilon(1e-9));
  }

  {
    std::vector<std::vector<double>> r3;
    for (int i = 0; i < 10; ++i) {
      const double x = i;
      r3.push_back({1.0, x, x});
    }
    const auto v3 = stats::vif(make_design({"intercept", "x", "x_dup"}, r3));
    CHECK(std::isinf(v3.at("x")));
    CHECK(std::isinf(v3.at("x_dup")));
  }
}

TEST_CASE("logit_fit: intercept-only model fits the base rate") {
  std::vector<std::vector<double>> rows;
  std::vector<int> y;
  for (int i = 0; i < 40; ++i) {
    rows.push_back({1.0});
    y.push_back(i < 12 ? 1 : 0);
  }
  const auto fit = stats::logit_fit(make_design({"intercept"}, rows), y);
  for (Eigen::Index i = 0; i < fit.fitted.size(); ++i) {
    CHECK(fit.fitted[i] == doctest::Approx(0.3).epsilon(1e-8));
  }
}

TEST_CASE("logit_fit: balanced symmetric fixture has zero slope") {
  std::vector<std::vector<double>> rows;
  std::vector<int> y;
  for (double x : {-2.0, -1.0, 1.0, 2.0}) {
    rows.push_back({1.0, x});
    y.push_back(1);
    rows.push_back({1.0, x});
    y.push_back(0);
  }
  const auto fit = stats::logit_fit(make_design({"intercept", "x"}, rows), y);
  CHECK(std::abs(fit.fit.coef_of("x")) < 1e-8);
}

TEST_CASE("logit_fit: recovers planted coefficients; likelihood beats a grid oracle") {
  Rng rng(2024);
  const double b0 = -0.5;
  const double b1 = 1.2;
  std::vector<std::vector<double>> rows;
  std::vector<int> y;
  for (int i = 0; i < 500; ++i) {
    const double x = rng.normal();
    const double p = 1.0 / (1.0 + std::exp(-(b0 + b1 * x)));
    rows.push_back({1.0, x});
    y.push_back(rng.unit() < p ? 1 : 0);
  }
  const auto X = make_design({"intercept", "x"}, rows);
  const auto fit = stats::logit_fit(X, y);
  CHECK(std::abs(fit.fit.coef_of("intercept") - b0) < 3.0 * fit.fit.se_of("intercept") + 1e-9);
  CHECK(std::abs(fit.fit.coef_of("x") - b1) < 3.0 * fit.fit.se_of("x") + 1e-9);

  // fitted probabilities average to the base rate (score equation)
  double mean_p = 0.0;
  double mean_y = 0.0;
  for (Eigen::Index i = 0; i < fit.fitted.size(); ++i) {
    mean_p += fit.fitted[i];
    mean_y += y[static_cast<std::size_t>(i)];
  }
  CHECK(mean_p / fit.fitted.size() ==
        doctest::Approx(mean_y / fit.fitted.size()).epsilon(1e-8));

  // no grid point outperforms the IRLS maximum (coarse grid around truth)
  auto ll_of = [&](double g0, double g1) {
    double ll = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const double eta = g0 + g1 * rows[i][1];
      const double p = 1.0 / (1.0 + std::exp(-eta));
      const double pc = std::clamp(p, 1e-12, 1.0 - 1e-12);
      ll += y[i] * std::log(pc) + (1 - y[i]) * std::log(1.0 - pc);
    }
    return ll;
  };
  double best_grid = -1e300;
  for (double g0 = -1.5; g0 <= 0.5; g0 += 0.05) {
    for (double g1 = 0.2; g1 <= 2.2; g1 += 0.05) best_grid = std::max(best_grid, ll_of(g0, g1));
  }
  CHECK(fit.log_likelihood >= best_grid - 1e-6);
}

TEST_CASE("logit_fit: perfect separation raises an error") {
  std::vector<std::vector<double>> rows;
  std::vector<int> y;
  for (int i = 0; i < 20; ++i) {
    const double x = i < 10 ? -1.0 - i * 0.1 : 1.0 + i * 0.1;
    rows.push_back({1.0, x});
    y.push_back(i < 10 ? 0 : 1);
  }
  CHECK_THROWS_AS(stats::logit_fit(make_design({"intercept", "x"}, rows), y), ValidationError);
}

TEST_CASE("logit_fit: requires both outcome classes") {
  std::vector<std::vector<double>> rows = {{1.0}, {1.0}};
  CHECK_THROWS_AS(stats::logit_fit(make_design({"intercept"}, rows), {1, 1}), ValidationError);
}

TEST_CASE("mann_whitney_u: pinned examples") {
  {
    const std::vector<double> a = {1, 2};
    const std::vector<double> b = {3, 4};
    const auto r = stats::mann_whitney_u(a, b, stats::MwuMode::Exact);
    CHECK(r.u_statistic == 0.0);
    CHECK(r.p_value == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  }
  {
    const std::vector<double> a = {1, 2, 3};
    const std::vector<double> b = {1, 2, 3};
    const auto r = stats::mann_whitney_u(a, b);
    CHECK(r.u_statistic == doctest::Approx(4.5));  // n1*n2/2
    CHECK(r.p_value == doctest::Approx(1.0).epsilon(1e-9));
  }
  {
    // one sample entirely above the other: maximal U
    const std::vector<double> a = {10, 11, 12};
    const std::vector<double> b = {1, 2, 3};
    const auto r = stats::mann_whitney_u(a, b);
    CHECK(r.u_statistic == 9.0);
  }
  {
    // all values identical: p = 1 by convention (normal mode)
    const std::vector<double> a = {2, 2, 2, 2, 2, 2};
    const std::vector<double> b = {2, 2, 2, 2, 2, 2};
    const auto r = stats::mann_whitney_u(a, b, stats::MwuMode::Normal);
    CHECK(r.p_value == 1.0);
  }
}

TEST_CASE("mann_whitney_u: U_a + U_b = n1*n2 and exact mode matches enumeration") {
  Rng rng(31337);
  for (int rep = 0; rep < 120; ++rep) {
    const std::size_t n1 = 1 + rng.below(4);
    const std::size_t n2 = 1 + rng.below(4);
    std::vector<double> a(n1);
    std::vector<double> b(n2);
    for (auto& x : a) x = static_cast<double>(rng.below(5));  // ties likely
    for (auto& x : b) x = static_cast<double>(rng.below(5));

    const auto ra = stats::mann_whitney_u(a, b, stats::MwuMode::Exact);
    const auto rb = stats::mann_whitney_u(b, a, stats::MwuMode::Exact);
    CHECK(ra.u_statistic + rb.u_statistic ==
          doctest::Approx(static_cast<double>(n1 * n2)).epsilon(1e-12));
    CHECK(ra.p_value == doctest::Approx(oracles::mwu_exact_p(a, b)).epsilon(1e-9));
  }
}

TEST_CASE("mann_whitney_u: normal approximation is sane on shifted samples") {
  Rng rng(777);
  std::vector<double> a(60);
  std::vector<double> b(60);
  for (auto& x : a) x = rng.normal();
  for (auto& x : b) x = rng.normal() + 1.5;
  const auto r = stats::mann_whitney_u(a, b, stats::MwuMode::Normal);
  CHECK(r.p_value < 1e-6);
  CHECK(r.u_statistic < 60.0 * 60.0 / 2.0);
}

// Frozen reference values computed once with statsmodels 0.14 / scipy 1.x;
// they pin the HC1 flavor, the tie-corrected continuity-corrected normal
// approximation, and the IRLS maximum.
TEST_CASE("frozen external references") {
  {
    const std::vector<double> a = {1.0, 2.0, 2.0, 4.0, 5.0};
    const std::vector<double> b = {2.0, 3.0, 3.0, 5.0, 6.0, 6.0};
    const auto r = stats::mann_whitney_u(a, b, stats::MwuMode::Normal);
    CHECK(r.u_statistic == 7.5);
    CHECK(r.p_value == doctest::Approx(0.19399546022894099).epsilon(1e-10));
  }
  {
    const double xs[] = {0, 1, 2, 3, 4, 5, 6, 7};
    const double ys[] = {1.1, 2.0, 2.8, 4.3, 4.9, 6.2, 6.8, 8.4};
    std::vector<std::vector<double>> rows;
    Eigen::VectorXd y(8);
    for (int i = 0; i < 8; ++i) {
      rows.push_back({1.0, xs[i]});
      y[i] = ys[i];
    }
    const auto fit = stats::ols_robust(make_design({"intercept", "x"}, rows), y);
    CHECK(fit.coef_of("intercept") == doctest::Approx(0.9833333333333347).epsilon(1e-12));
    CHECK(fit.coef_of("x") == doctest::Approx(1.0226190476190467).epsilon(1e-12));
    CHECK(fit.se_of("intercept") == doctest::Approx(0.11617432015354914).epsilon(1e-10));
    CHECK(fit.se_of("x") == doctest::Approx(0.0367355249619044).epsilon(1e-10));
    CHECK(fit.r_squared == doctest::Approx(0.9923797688646447).epsilon(1e-12));
  }
  {
    const double xs[] = {-2.0, -1.5, -1.0, -0.5, -0.25, 0.0, 0.25, 0.5, 1.0, 1.5, 2.0, 2.5};
    const int ys[] = {0, 0, 0, 1, 0, 0, 1, 1, 0, 1, 1, 1};
    std::vector<std::vector<double>> rows;
    std::vector<int> y;
    for (int i = 0; i < 12; ++i) {
      rows.push_back({1.0, xs[i]});
      y.push_back(ys[i]);
    }
    const auto fit = stats::logit_fit(make_design({"intercept", "x"}, rows), y);
    CHECK(fit.fit.coef_of("intercept") == doctest::Approx(-0.26855461827316784).epsilon(1e-7));
    CHECK(fit.fit.coef_of("x") == doctest::Approx(1.4740901887577225).epsilon(1e-7));
    CHECK(fit.fit.se_of("intercept") == doctest::Approx(0.7623104581758595).epsilon(1e-6));
    CHECK(fit.fit.se_of("x") == doctest::Approx(0.8473825158728335).epsilon(1e-6));
    CHECK(fit.log_likelihood == doctest::Approx(-5.421410628260669).epsilon(1e-9));
  }
}

TEST_CASE("stars thresholds") {
  CHECK(stats::stars(0.005) == "***");
  CHECK(stats::stars(0.03) == "**");
  CHECK(stats::stars(0.07) == "*");
  CHECK(stats::stars(0.2) == "");
}
