#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "egonet/core_model.hpp"
#include "egonet/random.hpp"

namespace egonet {

// Quantile with linear interpolation between order statistics.
inline double quantile(std::vector<double> xs, double q) {
  if (xs.empty()) return 0.0;
  std::sort(xs.begin(), xs.end());
  const double pos = q * static_cast<double>(xs.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, xs.size() - 1);
  return xs[lo] + (pos - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

// Silverman's rule of thumb: 0.9 * min(sd, IQR / 1.34) * n^(-1/5).
inline double silverman_bandwidth(std::span<const double> xs) {
  const std::size_t n = xs.size();
  if (n < 2) return 0.0;
  const double m = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  std::vector<double> v(xs.begin(), xs.end());
  const double iqr = (quantile(v, 0.75) - quantile(v, 0.25)) / 1.34;
  const double spread = iqr > 0 ? std::min(sd, iqr) : sd;
  return 0.9 * spread * std::pow(static_cast<double>(n), -0.2);
}

// ---------------------------------------------------------------------------
// 1-D Mean Shift on log10(1 + w)

struct MeanShiftOptions {
  std::optional<double> bandwidth;  // fixed bandwidth in transformed units
  double bandwidth_scale = 0.5;     // multiplier on Silverman's rule
  double bandwidth_floor = 0.05;
  double tolerance = 1e-6;
  int max_iterations = 500;
};

struct MeanShiftResult {
  std::vector<int> labels;    // 1-based; 1 = cluster with the highest mean
  int tau = 0;
  double bandwidth = 0.0;
  std::vector<double> modes;  // per cluster, transformed units, label order
};

inline double intimacy_transform(double w) { return std::log10(1.0 + w); }

inline double mean_shift_bandwidth(std::span<const double> transformed, const MeanShiftOptions& opt) {
  if (opt.bandwidth) return *opt.bandwidth;
  return std::max(opt.bandwidth_scale * silverman_bandwidth(transformed), opt.bandwidth_floor);
}

// Gaussian-kernel Mean Shift. Every distinct value is shifted to its mode on
// the fixed density estimate; modes closer than bandwidth/2 are merged. In one
// dimension the shift map is monotone, so clusters are contiguous value ranges
// and equal values always share a cluster.
inline MeanShiftResult mean_shift_1d(std::span<const double> values, const MeanShiftOptions& opt = {}) {
  if (values.empty()) throw DataError("mean_shift_1d: no values");
  if (opt.bandwidth && !(*opt.bandwidth > 0.0)) throw DataError("mean_shift_1d: bandwidth must be positive");
  for (double v : values) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw DataError("mean_shift_1d: values must be finite and >= 0");
  }
  std::vector<double> x;
  x.reserve(values.size());
  for (double v : values) x.push_back(intimacy_transform(v));

  MeanShiftResult res;
  res.bandwidth = mean_shift_bandwidth(x, opt);
  const double h = res.bandwidth;

  // Distinct transformed values with multiplicities.
  std::vector<double> uniq = x;
  std::sort(uniq.begin(), uniq.end());
  std::vector<double> weight;
  {
    std::vector<double> u;
    for (double v : uniq) {
      if (!u.empty() && u.back() == v) {
        weight.back() += 1.0;
      } else {
        u.push_back(v);
        weight.push_back(1.0);
      }
    }
    uniq.swap(u);
  }

  const double inv2h2 = 1.0 / (2.0 * h * h);
  std::vector<double> mode(uniq.size());
  for (std::size_t i = 0; i < uniq.size(); ++i) {
    double y = uniq[i];
    for (int it = 0; it < opt.max_iterations; ++it) {
      double num = 0.0, den = 0.0;
      for (std::size_t j = 0; j < uniq.size(); ++j) {
        const double d = y - uniq[j];
        const double k = weight[j] * std::exp(-d * d * inv2h2);
        num += k * uniq[j];
        den += k;
      }
      const double next = num / den;
      const double shift = std::fabs(next - y);
      y = next;
      if (shift < opt.tolerance) break;
    }
    mode[i] = y;
  }

  // Walk distinct values in ascending order; a new cluster starts whenever the
  // converged mode moves more than bandwidth/2 away from the previous one.
  std::vector<int> ascending_cluster(uniq.size(), 0);
  std::vector<double> cluster_mode_sum{mode[0]};
  std::vector<double> cluster_count{1.0};
  for (std::size_t i = 1; i < uniq.size(); ++i) {
    if (std::fabs(mode[i] - mode[i - 1]) > 0.5 * h) {
      cluster_mode_sum.push_back(0.0);
      cluster_count.push_back(0.0);
    }
    ascending_cluster[i] = static_cast<int>(cluster_count.size()) - 1;
    cluster_mode_sum.back() += mode[i];
    cluster_count.back() += 1.0;
  }
  res.tau = static_cast<int>(cluster_count.size());
  for (int c = res.tau - 1; c >= 0; --c) res.modes.push_back(cluster_mode_sum[c] / cluster_count[c]);

  res.labels.reserve(x.size());
  for (double v : x) {
    const auto idx = static_cast<std::size_t>(std::lower_bound(uniq.begin(), uniq.end(), v) - uniq.begin());
    res.labels.push_back(res.tau - ascending_cluster[idx]);
  }
  return res;
}

// ---------------------------------------------------------------------------
// Exact 1-D k-partition (minimum within-group sum of squares)

// Splits values into at most k contiguous groups minimizing total squared
// deviation; equal values are never separated. Returns 1-based labels with 1
// for the highest group. When fewer than k distinct values exist, only that
// many labels are used.
inline std::vector<int> optimal_partition_1d(std::span<const double> values, int k) {
  const std::size_t n = values.size();
  std::vector<int> labels(n, 0);
  if (n == 0) return labels;
  if (k < 1) throw DataError("optimal_partition_1d: k must be >= 1");

  // Distinct values (descending) with counts.
  std::vector<double> u(values.begin(), values.end());
  std::sort(u.begin(), u.end(), std::greater<>());
  std::vector<double> cnt;
  {
    std::vector<double> uu;
    for (double v : u) {
      if (!uu.empty() && uu.back() == v) {
        cnt.back() += 1.0;
      } else {
        uu.push_back(v);
        cnt.push_back(1.0);
      }
    }
    u.swap(uu);
  }
  const std::size_t m = u.size();
  const auto groups = static_cast<std::size_t>(std::min<std::size_t>(static_cast<std::size_t>(k), m));

  std::vector<double> pc(m + 1, 0.0), ps(m + 1, 0.0), pq(m + 1, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    pc[i + 1] = pc[i] + cnt[i];
    ps[i + 1] = ps[i] + cnt[i] * u[i];
    pq[i + 1] = pq[i] + cnt[i] * u[i] * u[i];
  }
  const auto sse = [&](std::size_t a, std::size_t b) {  // distinct values [a, b)
    const double c = pc[b] - pc[a], s = ps[b] - ps[a], q = pq[b] - pq[a];
    return std::max(0.0, q - s * s / c);
  };

  constexpr double kInf = std::numeric_limits<double>::infinity();
  // cost[g][i]: best split of the first i distinct values into g groups.
  std::vector<std::vector<double>> cost(groups + 1, std::vector<double>(m + 1, kInf));
  std::vector<std::vector<std::size_t>> cut(groups + 1, std::vector<std::size_t>(m + 1, 0));
  cost[0][0] = 0.0;
  for (std::size_t g = 1; g <= groups; ++g) {
    for (std::size_t i = g; i <= m; ++i) {
      for (std::size_t j = g - 1; j < i; ++j) {
        if (cost[g - 1][j] == kInf) continue;
        const double c = cost[g - 1][j] + sse(j, i);
        if (c < cost[g][i]) {
          cost[g][i] = c;
          cut[g][i] = j;
        }
      }
    }
  }
  std::vector<int> group_of(m, 0);
  for (std::size_t g = groups, i = m; g >= 1; --g) {
    const std::size_t j = cut[g][i];
    for (std::size_t t = j; t < i; ++t) group_of[t] = static_cast<int>(g);
    i = j;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto pos = static_cast<std::size_t>(
        std::lower_bound(u.begin(), u.end(), values[i], std::greater<>()) - u.begin());
    labels[i] = group_of[pos];
  }
  return labels;
}

// ---------------------------------------------------------------------------
// k-means, silhouette and PCA for small dense feature sets

using FeatureMatrix = std::vector<std::vector<double>>;

inline double squared_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

// Column-wise z-scores (population sd); constant columns become 0.
inline FeatureMatrix standardize(const FeatureMatrix& x) {
  if (x.empty()) return {};
  const std::size_t d = x.front().size();
  const auto n = static_cast<double>(x.size());
  FeatureMatrix out(x.size(), std::vector<double>(d, 0.0));
  for (std::size_t c = 0; c < d; ++c) {
    double m = 0.0, ss = 0.0;
    for (const auto& row : x) m += row[c];
    m /= n;
    for (const auto& row : x) ss += (row[c] - m) * (row[c] - m);
    const double sd = std::sqrt(ss / n);
    for (std::size_t r = 0; r < x.size(); ++r) out[r][c] = sd > 0 ? (x[r][c] - m) / sd : 0.0;
  }
  return out;
}

struct KMeansResult {
  std::vector<int> labels;  // 0-based
  FeatureMatrix centers;
  double inertia = 0.0;
  std::vector<double> inertia_history;  // per Lloyd iteration of the chosen run
};

// One Lloyd run from the given initial centers.
inline KMeansResult lloyd(const FeatureMatrix& x, FeatureMatrix centers, int max_iterations = 300) {
  KMeansResult r;
  const std::size_t k = centers.size();
  const std::size_t d = x.empty() ? 0 : x.front().size();
  r.labels.assign(x.size(), -1);
  for (int it = 0; it < max_iterations; ++it) {
    bool changed = false;
    double inertia = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      int best = 0;
      double bd = squared_distance(x[i], centers[0]);
      for (std::size_t c = 1; c < k; ++c) {
        const double dd = squared_distance(x[i], centers[c]);
        if (dd < bd) {
          bd = dd;
          best = static_cast<int>(c);
        }
      }
      if (r.labels[i] != best) changed = true;
      r.labels[i] = best;
      inertia += bd;
    }
    r.inertia_history.push_back(inertia);
    r.inertia = inertia;
    if (!changed && it > 0) break;
    FeatureMatrix sum(k, std::vector<double>(d, 0.0));
    std::vector<std::size_t> count(k, 0);
    for (std::size_t i = 0; i < x.size(); ++i) {
      for (std::size_t c = 0; c < d; ++c) sum[r.labels[i]][c] += x[i][c];
      ++count[r.labels[i]];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (count[c] == 0) continue;  // keep an empty cluster's center in place
      for (std::size_t j = 0; j < d; ++j) centers[c][j] = sum[c][j] / static_cast<double>(count[c]);
    }
  }
  r.centers = std::move(centers);
  return r;
}

// Farthest-point initialization from a random first center.
inline FeatureMatrix farthest_point_init(const FeatureMatrix& x, std::size_t k, SplitMix64& rng) {
  FeatureMatrix centers;
  centers.push_back(x[rng.below(x.size())]);
  std::vector<double> nearest(x.size(), std::numeric_limits<double>::infinity());
  while (centers.size() < k) {
    std::size_t best = 0;
    double bd = -1.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      nearest[i] = std::min(nearest[i], squared_distance(x[i], centers.back()));
      if (nearest[i] > bd) {
        bd = nearest[i];
        best = i;
      }
    }
    centers.push_back(x[best]);
  }
  return centers;
}

inline KMeansResult kmeans(const FeatureMatrix& x, std::size_t k, int restarts, std::uint64_t seed) {
  if (x.empty() || k == 0 || k > x.size()) throw DataError("kmeans: need 1 <= k <= number of points");
  SplitMix64 rng(seed);
  KMeansResult best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (int r = 0; r < std::max(1, restarts); ++r) {
    auto run = lloyd(x, farthest_point_init(x, k, rng));
    if (run.inertia < best.inertia) best = std::move(run);
  }
  return best;
}

// Mean silhouette coefficient; points in singleton clusters score 0.
inline double silhouette(const FeatureMatrix& x, const std::vector<int>& labels) {
  const std::size_t n = x.size();
  if (n == 0) return 0.0;
  const int k = *std::max_element(labels.begin(), labels.end()) + 1;
  std::vector<std::size_t> size(k, 0);
  for (int l : labels) ++size[l];
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (size[labels[i]] <= 1) continue;
    std::vector<double> sum(k, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) sum[labels[j]] += std::sqrt(squared_distance(x[i], x[j]));
    }
    const double a = sum[labels[i]] / static_cast<double>(size[labels[i]] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (int c = 0; c < k; ++c) {
      if (c != labels[i] && size[c] > 0) b = std::min(b, sum[c] / static_cast<double>(size[c]));
    }
    if (!std::isfinite(b)) continue;
    const double m = std::max(a, b);
    total += m > 0 ? (b - a) / m : 0.0;
  }
  return total / static_cast<double>(n);
}

// Projection of centered data onto the top-2 covariance eigenvectors; each
// eigenvector's largest-magnitude component is made positive.
inline FeatureMatrix pca_2d(const FeatureMatrix& x) {
  const std::size_t n = x.size();
  if (n == 0) return {};
  const std::size_t d = x.front().size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = x[i][j];
  }
  const Eigen::RowVectorXd mu = m.colwise().mean();
  m.rowwise() -= mu;
  const Eigen::MatrixXd cov = (m.transpose() * m) / std::max<double>(1.0, static_cast<double>(n) - 1.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  // Eigenvalues ascend; take the last two.
  const Eigen::Index dd = static_cast<Eigen::Index>(d);
  FeatureMatrix out(n, std::vector<double>(2, 0.0));
  for (int c = 0; c < 2 && c < static_cast<int>(d); ++c) {
    Eigen::VectorXd v = es.eigenvectors().col(dd - 1 - c);
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0) v = -v;
    const Eigen::VectorXd proj = m * v;
    for (std::size_t i = 0; i < n; ++i) out[i][c] = proj(static_cast<Eigen::Index>(i));
  }
  return out;
}

}  // namespace egonet
