#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

namespace egonet::stats {

inline constexpr double kZ95 = 1.959963984540054;

inline double mean(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

// Sample standard deviation (n - 1 denominator); 0 for fewer than 2 values.
inline double stddev(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

// Half-width of the normal-approximation 95% confidence interval of the mean.
// Undefined for fewer than two observations.
inline std::optional<double> ci95(std::span<const double> xs) {
  if (xs.size() < 2) return std::nullopt;
  return kZ95 * stddev(xs) / std::sqrt(static_cast<double>(xs.size()));
}

inline double median(std::vector<double> xs) {
  if (xs.empty()) return 0.0;
  std::sort(xs.begin(), xs.end());
  const auto n = xs.size();
  return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

struct MeanCi {
  double mean = 0.0;
  std::optional<double> ci;
  std::size_t n = 0;
};

inline MeanCi summarize(std::span<const double> xs) { return {mean(xs), ci95(xs), xs.size()}; }

// Standard normal upper-tail complement: 2 * (1 - Phi(|z|)).
inline double two_sided_normal_p(double z) { return std::erfc(std::fabs(z) / std::sqrt(2.0)); }

}  // namespace egonet::stats
