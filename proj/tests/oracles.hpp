#pragma once

// Straight-line reference implementations used to cross-check the library.
// They favour obviousness over speed and share no code with include/egonet.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "egonet/core_model.hpp"

namespace oracle {

// Tie frequency by direct recount over the raw records.
inline double tie_frequency(const egonet::Timeline& t, const std::string& alter, egonet::Instant reference) {
  std::int64_t contacts = 0;
  std::optional<std::int64_t> first;
  for (const auto& r : t.interactions) {
    if (r.kind == egonet::InteractionKind::Indirect || !r.alter_id || *r.alter_id != alter) continue;
    ++contacts;
    if (!first || r.timestamp.epoch_seconds < *first) first = r.timestamp.epoch_seconds;
  }
  const double years = static_cast<double>(reference.epoch_seconds - *first) / (365.25 * 86400.0);
  return static_cast<double>(contacts) / years;
}

struct Kendall {
  double tau;
  double p;
  std::int64_t s;
};

// O(n^2) pair enumeration; tau-b and the tie-corrected normal approximation
// with continuity correction.
inline Kendall kendall(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  std::int64_t conc = 0, disc = 0, tied_x = 0, tied_y = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = x[i] - x[j], dy = y[i] - y[j];
      if (dx == 0) ++tied_x;
      if (dy == 0) ++tied_y;
      if (dx == 0 || dy == 0) continue;
      if ((dx > 0) == (dy > 0)) ++conc;
      else ++disc;
    }
  }
  const auto n0 = static_cast<std::int64_t>(n * (n - 1) / 2);
  Kendall k{};
  k.s = conc - disc;
  k.tau = static_cast<double>(k.s) / std::sqrt(static_cast<double>(n0 - tied_x) * static_cast<double>(n0 - tied_y));

  const auto group_sizes = [](std::vector<double> v) {
    std::map<double, double> m;
    for (double a : v) m[a] += 1.0;
    std::vector<double> out;
    for (auto& [_, c] : m) out.push_back(c);
    return out;
  };
  const auto gx = group_sizes(x), gy = group_sizes(y);
  const double dn = static_cast<double>(n);
  double v0 = dn * (dn - 1) * (2 * dn + 5), vt = 0, vu = 0, t1 = 0, u1 = 0, t2 = 0, u2 = 0;
  for (double t : gx) {
    vt += t * (t - 1) * (2 * t + 5);
    t1 += t * (t - 1);
    t2 += t * (t - 1) * (t - 2);
  }
  for (double u : gy) {
    vu += u * (u - 1) * (2 * u + 5);
    u1 += u * (u - 1);
    u2 += u * (u - 1) * (u - 2);
  }
  double var = (v0 - vt - vu) / 18.0 + t1 * u1 / (2 * dn * (dn - 1));
  if (n > 2) var += t2 * u2 / (9 * dn * (dn - 1) * (dn - 2));
  const double z = std::max(std::fabs(static_cast<double>(k.s)) - 1.0, 0.0) / std::sqrt(var);
  k.p = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
  return k;
}

// Textbook DBSCAN: -1 = noise, clusters numbered from 0 in discovery order.
// A point's neighbourhood includes itself.
inline std::vector<int> dbscan(const std::vector<std::pair<double, double>>& p, double eps, std::size_t min_pts) {
  const std::size_t n = p.size();
  const auto near = [&](std::size_t i, std::size_t j) {
    const double dx = p[i].first - p[j].first, dy = p[i].second - p[j].second;
    return dx * dx + dy * dy <= eps * eps;
  };
  std::vector<bool> core(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t c = 0;
    for (std::size_t j = 0; j < n; ++j) c += near(i, j) ? 1 : 0;
    core[i] = c >= min_pts;
  }
  std::vector<int> label(n, -1);
  int next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!core[i] || label[i] != -1) continue;
    std::vector<std::size_t> stack{i};
    label[i] = next;
    while (!stack.empty()) {
      const std::size_t a = stack.back();
      stack.pop_back();
      if (!core[a]) continue;
      for (std::size_t b = 0; b < n; ++b) {
        if (label[b] == -1 && near(a, b)) {
          label[b] = next;
          stack.push_back(b);
        }
      }
    }
    ++next;
  }
  return label;
}

// True when both labelings induce the same partition and the same noise set.
inline bool same_partition(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) return false;
  std::map<int, int> ab, ba;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if ((a[i] < 0) != (b[i] < 0)) return false;
    if (a[i] < 0) continue;
    auto [it1, ins1] = ab.emplace(a[i], b[i]);
    auto [it2, ins2] = ba.emplace(b[i], a[i]);
    if (it1->second != b[i] || it2->second != a[i]) return false;
  }
  return true;
}

using Ring = std::vector<std::string>;
using Snapshots = std::vector<std::vector<Ring>>;  // [t][ring]

inline std::vector<double> jaccard(const Snapshots& s) {
  const std::size_t n = s.front().size();
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double total = 0;
    for (std::size_t t = 0; t + 1 < s.size(); ++t) {
      std::set<std::string> a(s[t][i].begin(), s[t][i].end()), b(s[t + 1][i].begin(), s[t + 1][i].end());
      std::set<std::string> inter, uni;
      std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(inter, inter.end()));
      std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::inserter(uni, uni.end()));
      total += uni.empty() ? 1.0 : static_cast<double>(inter.size()) / static_cast<double>(uni.size());
    }
    out[i] = total / static_cast<double>(s.size() - 1);
  }
  return out;
}

inline std::vector<double> jump(const Snapshots& s) {
  const std::size_t n = s.front().size();
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double total = 0;
    int pairs = 0;
    for (std::size_t t = 0; t + 1 < s.size(); ++t) {
      const Ring& dest = s[t + 1][i];
      if (dest.empty()) continue;
      double sum = 0;
      for (const auto& id : dest) {
        int src = static_cast<int>(n) + 1;
        for (std::size_t r = 0; r < n; ++r) {
          if (std::find(s[t][r].begin(), s[t][r].end(), id) != s[t][r].end()) src = static_cast<int>(r) + 1;
        }
        sum += std::abs(src - static_cast<int>(i + 1));
      }
      total += sum / static_cast<double>(dest.size());
      ++pairs;
    }
    out[i] = pairs ? total / pairs : 0.0;
  }
  return out;
}

// Point-wise Gaussian mode seeking (every sample iterated separately, no
// de-duplication). Modes within tol are the same cluster; labels are 1-based
// with 1 for the highest mode.
inline std::vector<int> mode_seeking(const std::vector<double>& x, double h, double tol) {
  std::vector<double> modes;
  for (double start : x) {
    double y = start;
    for (int it = 0; it < 5000; ++it) {
      double num = 0, den = 0;
      for (double v : x) {
        const double k = std::exp(-(y - v) * (y - v) / (2 * h * h));
        num += k * v;
        den += k;
      }
      const double next = num / den;
      const bool done = std::fabs(next - y) < 1e-10;
      y = next;
      if (done) break;
    }
    modes.push_back(y);
  }
  std::vector<double> centers;
  for (double m : modes) {
    bool found = false;
    for (double c : centers) found = found || std::fabs(c - m) <= tol;
    if (!found) centers.push_back(m);
  }
  std::sort(centers.begin(), centers.end(), std::greater<>());
  std::vector<int> labels;
  for (double m : modes) {
    for (std::size_t c = 0; c < centers.size(); ++c) {
      if (std::fabs(centers[c] - m) <= tol) {
        labels.push_back(static_cast<int>(c) + 1);
        break;
      }
    }
  }
  return labels;
}

// Minimum within-group SSE over every split of the sorted distinct values
// into exactly min(k, m) contiguous groups, by exhaustive enumeration.
inline double best_partition_sse(std::vector<double> v, int k) {
  std::sort(v.begin(), v.end(), std::greater<>());
  std::vector<double> u = v;
  u.erase(std::unique(u.begin(), u.end()), u.end());
  const std::size_t m = u.size();
  const std::size_t g = std::min<std::size_t>(static_cast<std::size_t>(k), m);
  double best = std::numeric_limits<double>::infinity();
  // Choose g-1 cut positions among the m-1 gaps.
  std::vector<int> mask(m - 1, 0);
  std::fill(mask.begin(), mask.begin() + static_cast<std::ptrdiff_t>(g - 1), 1);
  std::sort(mask.begin(), mask.end());
  do {
    double total = 0;
    std::size_t start = 0;
    for (std::size_t cut = 0; cut <= m - 1; ++cut) {
      if (cut == m - 1 || mask[cut]) {
        const double lo = u[cut], hi = u[start];
        double s = 0, c = 0;
        for (double a : v) {
          if (a <= hi && a >= lo) {
            s += a;
            c += 1;
          }
        }
        const double mean = s / c;
        for (double a : v) {
          if (a <= hi && a >= lo) total += (a - mean) * (a - mean);
        }
        start = cut + 1;
      }
    }
    best = std::min(best, total);
  } while (std::next_permutation(mask.begin(), mask.end()));
  return best;
}

inline double partition_sse(const std::vector<double>& v, const std::vector<int>& labels) {
  std::map<int, std::pair<double, double>> acc;
  for (std::size_t i = 0; i < v.size(); ++i) {
    acc[labels[i]].first += v[i];
    acc[labels[i]].second += 1;
  }
  double total = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto& [s, c] = acc[labels[i]];
    total += (v[i] - s / c) * (v[i] - s / c);
  }
  return total;
}

// Mean silhouette by definition; singleton clusters score 0.
inline double silhouette(const std::vector<std::vector<double>>& x, const std::vector<int>& labels) {
  const auto dist = [&](std::size_t a, std::size_t b) {
    double s = 0;
    for (std::size_t d = 0; d < x[a].size(); ++d) s += (x[a][d] - x[b][d]) * (x[a][d] - x[b][d]);
    return std::sqrt(s);
  };
  std::set<int> clusters(labels.begin(), labels.end());
  double total = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    std::map<int, std::pair<double, int>> by;
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (j == i) continue;
      by[labels[j]].first += dist(i, j);
      by[labels[j]].second += 1;
    }
    if (by[labels[i]].second == 0) continue;
    const double a = by[labels[i]].first / by[labels[i]].second;
    double b = std::numeric_limits<double>::infinity();
    for (int c : clusters) {
      if (c != labels[i] && by[c].second > 0) b = std::min(b, by[c].first / by[c].second);
    }
    total += (b - a) / std::max(a, b);
  }
  return total / static_cast<double>(x.size());
}

}  // namespace oracle
