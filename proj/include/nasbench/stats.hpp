#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "nasbench/errors.hpp"

namespace nasbench::stats {

/// Neumaier-compensated sum; order-dependent only at the rounding level.
inline double sum(std::span<const double> xs) {
  double s = 0.0, c = 0.0;
  for (double x : xs) {
    const double t = s + x;
    if (std::abs(s) >= std::abs(x))
      c += (s - t) + x;
    else
      c += (x - t) + s;
    s = t;
  }
  return s + c;
}

inline double mean(std::span<const double> xs) {
  if (xs.empty()) throw UndefinedStatisticError("mean of an empty sample");
  return sum(xs) / static_cast<double>(xs.size());
}

/// Sample standard deviation (n - 1 denominator).
inline double stddev(std::span<const double> xs) {
  if (xs.size() < 2) throw UndefinedStatisticError("stddev needs at least two values");
  const double m = mean(xs);
  std::vector<double> sq(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) sq[i] = (xs[i] - m) * (xs[i] - m);
  return std::sqrt(sum(sq) / static_cast<double>(xs.size() - 1));
}

inline double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw UndefinedStatisticError("pearson needs two equal series of length >= 2");
  const double mx = mean(x), my = mean(y);
  std::vector<double> sxy(x.size()), sxx(x.size()), syy(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy[i] = (x[i] - mx) * (y[i] - my);
    sxx[i] = (x[i] - mx) * (x[i] - mx);
    syy[i] = (y[i] - my) * (y[i] - my);
  }
  const double vx = sum(sxx), vy = sum(syy);
  if (vx <= 0.0 || vy <= 0.0) throw UndefinedStatisticError("correlation undefined for a constant series");
  return std::clamp(sum(sxy) / std::sqrt(vx * vy), -1.0, 1.0);
}

/// Ranks starting at 1; ties get their average rank.
inline std::vector<double> ranks(std::span<const double> xs) {
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  std::vector<double> r(xs.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && xs[order[j + 1]] == xs[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
    i = j + 1;
  }
  return r;
}

inline double spearman(std::span<const double> x, std::span<const double> y) {
  const auto rx = ranks(x);
  const auto ry = ranks(y);
  return pearson(rx, ry);
}

/// Sample autocorrelation r_k = sum (x_t - m)(x_{t+k} - m) / sum (x_t - m)^2 for k = 0..max_lag.
inline std::vector<double> autocorrelation(std::span<const double> xs, int max_lag) {
  if (max_lag < 0 || static_cast<std::size_t>(max_lag) >= xs.size())
    throw UndefinedStatisticError("max_lag must be smaller than the series length");
  const double m = mean(xs);
  std::vector<double> centered(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) centered[i] = xs[i] - m;
  std::vector<double> terms(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) terms[i] = centered[i] * centered[i];
  const double denom = sum(terms);
  if (denom <= 0.0) throw UndefinedStatisticError("autocorrelation undefined for a constant series");
  std::vector<double> out(max_lag + 1);
  for (int k = 0; k <= max_lag; ++k) {
    const std::size_t n = xs.size() - k;
    terms.resize(n);
    for (std::size_t i = 0; i < n; ++i) terms[i] = centered[i] * centered[i + k];
    out[k] = k == 0 ? 1.0 : sum(terms) / denom;
  }
  return out;
}

/// Quantile with linear interpolation between order statistics (type 7).
inline double quantile(std::vector<double> xs, double q) {
  if (xs.empty()) throw UndefinedStatisticError("quantile of an empty sample");
  std::sort(xs.begin(), xs.end());
  const double h = q * static_cast<double>(xs.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, xs.size() - 1);
  return xs[lo] + (h - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

/// Right-continuous empirical CDF as (distinct value, fraction <= value) pairs.
inline std::vector<std::pair<double, double>> ecdf(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  std::vector<std::pair<double, double>> out;
  const double n = static_cast<double>(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i + 1 < xs.size() && xs[i + 1] == xs[i]) continue;
    out.emplace_back(xs[i], static_cast<double>(i + 1) / n);
  }
  return out;
}

/// Upper-tail probability of the standard normal.
inline double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

struct MannWhitney {
  double u;        // U statistic of the first sample
  double z;        // normal approximation with tie correction
  double p_less;   // one-sided p-value for "first sample tends to be smaller"
};

inline MannWhitney mann_whitney(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw UndefinedStatisticError("mann_whitney needs two non-empty samples");
  std::vector<double> all(a.begin(), a.end());
  all.insert(all.end(), b.begin(), b.end());
  const auto r = ranks(all);
  const double n1 = static_cast<double>(a.size()), n2 = static_cast<double>(b.size());
  const double n = n1 + n2;
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) rank_sum += r[i];
  const double u = rank_sum - n1 * (n1 + 1.0) / 2.0;

  std::vector<double> sorted = all;
  std::sort(sorted.begin(), sorted.end());
  double tie_term = 0.0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i + 1);
    tie_term += t * t * t - t;
    i = j + 1;
  }
  const double var = n1 * n2 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
  if (var <= 0.0) return {u, 0.0, 0.5};
  const double z = (u - n1 * n2 / 2.0) / std::sqrt(var);
  return {u, z, 1.0 - normal_sf(z)};
}

}  // namespace nasbench::stats
