#pragma once

// Rank statistics: Mann-Whitney U (normal approximation with tie and
// continuity correction) and Spearman rank correlation with a permutation
// p-value.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "ndsearch/core.hpp"

namespace ndsearch {

// Average ranks (1-based) with ties sharing the mean rank.
inline std::vector<double> average_ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
    i = j + 1;
  }
  return r;
}

struct RankSumResult {
  double u = 0.0;        // U statistic of the first sample
  double p_value = 1.0;  // two-sided
  std::string verdict;   // "-", "=" or "+" for the first sample, lower is better
};

// Two-sided test. The verdict reads the first sample against the second when
// lower values are better: "-" significantly worse, "+" significantly better.
inline RankSumResult rank_sum_test(const std::vector<double>& a, const std::vector<double>& b, double alpha = 0.05) {
  if (a.empty() || b.empty()) throw std::invalid_argument("rank_sum_test: both samples must be nonempty");
  std::vector<double> all(a);
  all.insert(all.end(), b.begin(), b.end());
  const auto r = average_ranks(all);
  const double n1 = static_cast<double>(a.size()), n2 = static_cast<double>(b.size()), n = n1 + n2;
  double r1 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) r1 += r[i];
  RankSumResult res;
  res.u = r1 - n1 * (n1 + 1.0) / 2.0;
  const double mu = n1 * n2 / 2.0;

  std::vector<double> sorted(all);
  std::sort(sorted.begin(), sorted.end());
  double tie = 0.0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i);
    tie += t * t * t - t;
    i = j;
  }
  const double var = n1 * n2 / 12.0 * ((n + 1.0) - tie / (n * (n - 1.0)));
  if (!(var > 0.0)) {
    res.p_value = 1.0;
    res.verdict = "=";
    return res;
  }
  const double big = std::max(res.u, n1 * n2 - res.u);
  const double z = (big - mu - 0.5) / std::sqrt(var);
  res.p_value = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
  if (res.p_value < alpha)
    res.verdict = res.u > mu ? "-" : "+";
  else
    res.verdict = "=";
  return res;
}

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("pearson: need two equal-length samples");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) throw DomainError("pearson: zero variance");
  return sxy / std::sqrt(sxx * syy);
}

struct SpearmanResult {
  double rho = 0.0;
  double p_value = 1.0;  // two-sided
  bool exact = false;
};

// Exact permutation p-value up to n = 10, otherwise 200000 seeded random
// permutations.
inline SpearmanResult spearman(const std::vector<double>& x, const std::vector<double>& y) {
  const auto rx = average_ranks(x), ry = average_ranks(y);
  SpearmanResult res;
  res.rho = pearson(rx, ry);
  const double obs = std::fabs(res.rho) - 1e-12;
  std::vector<double> perm(ry);
  std::uint64_t hits = 0, total = 0;
  if (x.size() <= 10) {
    res.exact = true;
    std::sort(perm.begin(), perm.end());
    do {
      ++total;
      if (std::fabs(pearson(rx, perm)) >= obs) ++hits;
    } while (std::next_permutation(perm.begin(), perm.end()));
  } else {
    Rng rng(0x5eed);
    for (total = 0; total < 200000; ++total) {
      rng.shuffle(perm);
      if (std::fabs(pearson(rx, perm)) >= obs) ++hits;
    }
  }
  res.p_value = static_cast<double>(hits) / static_cast<double>(total);
  return res;
}

}  // namespace ndsearch
