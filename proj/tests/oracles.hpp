// Test-only reference implementations, kept independent of the library code
// paths they check.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

namespace oracles {

/// Dense cosine over an explicit union vocabulary.
inline double dense_cosine(const std::map<int, int>& a, const std::map<int, int>& b) {
  std::set<int> vocab;
  for (const auto& [k, v] : a) vocab.insert(k);
  for (const auto& [k, v] : b) vocab.insert(k);
  std::vector<double> va;
  std::vector<double> vb;
  for (int k : vocab) {
    auto ia = a.find(k);
    auto ib = b.find(k);
    va.push_back(ia == a.end() ? 0.0 : ia->second);
    vb.push_back(ib == b.end() ? 0.0 : ib->second);
  }
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < va.size(); ++i) {
    dot += va[i] * vb[i];
    na += va[i] * va[i];
    nb += vb[i] * vb[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

/// Full-matrix Levenshtein, written independently of the two-row version.
inline std::size_t levenshtein_matrix(const std::string& a, const std::string& b) {
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  std::vector<std::vector<std::size_t>> d(n + 1, std::vector<std::size_t>(m + 1));
  for (std::size_t i = 0; i <= n; ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= m; ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t cost = a[i - 1] == b[j - 1] ? 0 : 1;
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + cost});
    }
  }
  return d[n][m];
}

/// Sort-based quantile with linear interpolation, written from the rule.
inline double quantile_sorted(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double h = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - std::floor(h)) * (v[hi] - v[lo]);
}

/// Modularity from the dense adjacency, double loop over ordered node pairs.
inline double modularity_dense(const std::vector<std::vector<double>>& w,
                               const std::vector<int>& community) {
  const std::size_t n = w.size();
  std::vector<double> k(n, 0.0);
  double two_m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) k[i] += w[i][j];
    two_m += k[i];
  }
  double q = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (community[i] != community[j]) continue;
      q += w[i][j] - k[i] * k[j] / two_m;
    }
  }
  return q / two_m;
}

/// Every set partition of {0..n-1} as community assignments (restricted
/// growth strings).
inline void enumerate_partitions(std::size_t n, const std::function<void(const std::vector<int>&)>& fn) {
  std::vector<int> assign(n, 0);
  std::function<void(std::size_t, int)> rec = [&](std::size_t i, int max_used) {
    if (i == n) {
      fn(assign);
      return;
    }
    for (int c = 0; c <= max_used + 1; ++c) {
      assign[i] = c;
      rec(i + 1, std::max(max_used, c));
    }
  };
  rec(1, 0);  // assign[0] stays 0
}

/// Union-find connected components; returns the size of the largest.
inline std::size_t lcc_size_union_find(std::size_t n,
                                       const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (const auto& [u, v] : edges) parent[find(u)] = find(v);
  std::map<std::size_t, std::size_t> count;
  std::size_t best = n == 0 ? 0 : 1;
  for (std::size_t i = 0; i < n; ++i) best = std::max(best, ++count[find(i)]);
  return n == 0 ? 0 : best;
}

/// OLS through explicitly formed normal equations with Gaussian elimination.
inline std::vector<double> ols_normal_equations(const std::vector<std::vector<double>>& x,
                                                const std::vector<double>& y) {
  const std::size_t n = x.size();
  const std::size_t k = x[0].size();
  std::vector<std::vector<double>> a(k, std::vector<double>(k + 1, 0.0));
  for (std::size_t p = 0; p < k; ++p) {
    for (std::size_t q = 0; q < k; ++q) {
      for (std::size_t i = 0; i < n; ++i) a[p][q] += x[i][p] * x[i][q];
    }
    for (std::size_t i = 0; i < n; ++i) a[p][k] += x[i][p] * y[i];
  }
  for (std::size_t col = 0; col < k; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < k; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    }
    std::swap(a[col], a[pivot]);
    for (std::size_t r = 0; r < k; ++r) {
      if (r == col) continue;
      const double f = a[r][col] / a[col][col];
      for (std::size_t c = col; c <= k; ++c) a[r][c] -= f * a[col][c];
    }
  }
  std::vector<double> beta(k);
  for (std::size_t i = 0; i < k; ++i) beta[i] = a[i][k] / a[i][i];
  return beta;
}

/// Exact two-sided Mann-Whitney p by enumerating every label assignment.
inline double mwu_exact_p(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> all(a);
  all.insert(all.end(), b.begin(), b.end());
  const std::size_t n = all.size();
  const std::size_t n1 = a.size();

  auto u_of = [&](const std::vector<std::size_t>& idx_a) {
    double u = 0.0;
    std::vector<char> in_a(n, 0);
    for (std::size_t i : idx_a) in_a[i] = 1;
    for (std::size_t i = 0; i < n; ++i) {
      if (!in_a[i]) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (in_a[j]) continue;
        if (all[i] > all[j]) u += 1.0;
        else if (all[i] == all[j]) u += 0.5;
      }
    }
    return u;
  };

  std::vector<std::size_t> observed(n1);
  std::iota(observed.begin(), observed.end(), std::size_t{0});
  const double u_obs = u_of(observed);
  const double mu = static_cast<double>(n1) * static_cast<double>(n - n1) / 2.0;
  const double margin = std::abs(u_obs - mu);

  std::vector<std::size_t> pick(n1);
  std::iota(pick.begin(), pick.end(), std::size_t{0});
  std::size_t total = 0;
  std::size_t extreme = 0;
  while (true) {
    ++total;
    if (std::abs(u_of(pick) - mu) >= margin - 1e-12) ++extreme;
    // next combination
    std::size_t i = n1;
    while (i > 0) {
      --i;
      if (pick[i] != i + n - n1) {
        ++pick[i];
        for (std::size_t j = i + 1; j < n1; ++j) pick[j] = pick[j - 1] + 1;
        break;
      }
      if (i == 0) return static_cast<double>(extreme) / static_cast<double>(total);
    }
  }
}

}  // namespace oracles
