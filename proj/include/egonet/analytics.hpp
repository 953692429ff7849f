#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "egonet/clustering.hpp"
#include "egonet/core_model.hpp"
#include "egonet/stats.hpp"

namespace egonet {

// ---------------------------------------------------------------------------
// Hashtag-activated relationships

struct HashtagRingStats {
  int ring = 0;  // 1-based
  std::size_t n_alters = 0;
  std::size_t n_activated = 0;
  stats::MeanCi pct_activated;  // across egos with a non-empty ring
  stats::MeanCi hashtags_per_alter_activated;
  stats::MeanCi hashtags_per_alter_other;
  stats::MeanCi frequency_activated;
  stats::MeanCi frequency_other;
};

struct HashtagStats {
  std::size_t n_egos = 0;
  std::size_t total_ties = 0;
  std::size_t activated_ties = 0;
  stats::MeanCi pct_activated;  // across egos
  std::vector<HashtagRingStats> rings;
};

struct EgoTies {
  const CircleStructure* structure = nullptr;
  const std::vector<Tie>* ties = nullptr;
};

// A tie is hashtag-activated when its first direct contact carried a hashtag.
// Ring membership comes from the static circle structure.
inline HashtagStats hashtag_activation_stats(const std::vector<EgoTies>& egos) {
  HashtagStats out;
  std::size_t max_ring = 0;
  for (const auto& e : egos) max_ring = std::max(max_ring, e.structure->ring_members.size());
  std::vector<std::vector<double>> pct(max_ring), h_act(max_ring), h_oth(max_ring), f_act(max_ring), f_oth(max_ring);
  std::vector<std::size_t> n_alters(max_ring, 0), n_act(max_ring, 0);
  std::vector<double> overall;
  for (const auto& e : egos) {
    std::unordered_map<std::string, const Tie*> by_alter;
    for (const auto& t : *e.ties) by_alter.emplace(t.alter_id, &t);
    std::size_t ego_total = 0, ego_act = 0;
    for (std::size_t r = 0; r < e.structure->ring_members.size(); ++r) {
      std::size_t ring_total = 0, ring_act = 0;
      for (const auto& id : e.structure->ring_members[r]) {
        const auto it = by_alter.find(id);
        if (it == by_alter.end()) throw DataError("hashtag_activation_stats: no tie for alter " + id);
        const Tie& t = *it->second;
        ++ring_total;
        const auto hashtags = static_cast<double>(t.hashtag_count);
        if (t.first_contact_had_hashtag) {
          ++ring_act;
          h_act[r].push_back(hashtags);
          f_act[r].push_back(t.frequency);
        } else {
          h_oth[r].push_back(hashtags);
          f_oth[r].push_back(t.frequency);
        }
      }
      if (ring_total > 0) {
        pct[r].push_back(100.0 * static_cast<double>(ring_act) / static_cast<double>(ring_total));
      }
      n_alters[r] += ring_total;
      n_act[r] += ring_act;
      ego_total += ring_total;
      ego_act += ring_act;
    }
    if (ego_total > 0) overall.push_back(100.0 * static_cast<double>(ego_act) / static_cast<double>(ego_total));
    out.total_ties += ego_total;
    out.activated_ties += ego_act;
    ++out.n_egos;
  }
  out.pct_activated = stats::summarize(overall);
  for (std::size_t r = 0; r < max_ring; ++r) {
    out.rings.push_back({static_cast<int>(r + 1), n_alters[r], n_act[r], stats::summarize(pct[r]),
                         stats::summarize(h_act[r]), stats::summarize(h_oth[r]), stats::summarize(f_act[r]),
                         stats::summarize(f_oth[r])});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Kendall rank correlation

struct KendallResult {
  double tau = 0.0;      // tau-b
  double p_value = 1.0;  // two-sided, normal approximation with continuity correction
  std::size_t n = 0;
  std::int64_t s = 0;    // concordant minus discordant pairs
  double variance = 0.0; // null variance of s, tie-corrected
};

namespace detail {

// Sum of t(t-1)/2, t(t-1)(2t+5), t(t-1), t(t-1)(t-2) over runs of equal values.
struct TieSums {
  std::int64_t pairs = 0;
  double v = 0.0;
  double t1 = 0.0;
  double t2 = 0.0;
};

inline TieSums tie_sums(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  TieSums s;
  for (std::size_t i = 0; i < v.size();) {
    std::size_t j = i;
    while (j < v.size() && v[j] == v[i]) ++j;
    const auto t = static_cast<double>(j - i);
    s.pairs += static_cast<std::int64_t>((j - i) * (j - i - 1) / 2);
    s.v += t * (t - 1) * (2 * t + 5);
    s.t1 += t * (t - 1);
    s.t2 += t * (t - 1) * (t - 2);
    i = j;
  }
  return s;
}

// Counts inversions (strictly decreasing pairs) with a bottom-up merge sort.
inline std::int64_t count_inversions(std::vector<double>& a) {
  std::int64_t inv = 0;
  std::vector<double> buf(a.size());
  for (std::size_t width = 1; width < a.size(); width *= 2) {
    for (std::size_t lo = 0; lo < a.size(); lo += 2 * width) {
      const std::size_t mid = std::min(lo + width, a.size());
      const std::size_t hi = std::min(lo + 2 * width, a.size());
      std::size_t i = lo, j = mid, k = lo;
      while (i < mid && j < hi) {
        if (a[j] < a[i]) {
          inv += static_cast<std::int64_t>(mid - i);
          buf[k++] = a[j++];
        } else {
          buf[k++] = a[i++];
        }
      }
      while (i < mid) buf[k++] = a[i++];
      while (j < hi) buf[k++] = a[j++];
    }
    std::swap(a, buf);
  }
  return inv;
}

}  // namespace detail

// Null variance of S = C - D with ties in both rankings.
inline double kendall_s_variance(std::size_t n_size, const detail::TieSums& tx, const detail::TieSums& ty) {
  const auto n = static_cast<double>(n_size);
  double var = (n * (n - 1) * (2 * n + 5) - tx.v - ty.v) / 18.0;
  var += tx.t1 * ty.t1 / (2.0 * n * (n - 1));
  if (n_size > 2) var += tx.t2 * ty.t2 / (9.0 * n * (n - 1) * (n - 2));
  return var;
}

// Tie-corrected Kendall tau-b with Knight's O(n log n) pair counting.
inline KendallResult kendall_tau(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DataError("kendall_tau: length mismatch");
  if (x.size() < 2) throw DataError("kendall_tau: need at least 2 observations");
  const std::size_t n = x.size();
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return x[a] != x[b] ? x[a] < x[b] : y[a] < y[b];
  });
  std::int64_t joint_ties = 0;  // pairs tied in both x and y
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && x[idx[j]] == x[idx[i]] && y[idx[j]] == y[idx[i]]) ++j;
    joint_ties += static_cast<std::int64_t>((j - i) * (j - i - 1) / 2);
    i = j;
  }
  std::vector<double> ys;
  ys.reserve(n);
  for (std::size_t i : idx) ys.push_back(y[i]);
  const std::int64_t discordant = detail::count_inversions(ys);

  const auto tx = detail::tie_sums(std::vector<double>(x.begin(), x.end()));
  const auto ty = detail::tie_sums(std::vector<double>(y.begin(), y.end()));
  const auto n0 = static_cast<std::int64_t>(n * (n - 1) / 2);
  if (tx.pairs == n0 || ty.pairs == n0) throw DataError("kendall_tau: degenerate ranking (all values tied)");

  KendallResult r;
  r.n = n;
  r.s = n0 - tx.pairs - ty.pairs + joint_ties - 2 * discordant;
  r.tau = static_cast<double>(r.s) /
          std::sqrt(static_cast<double>(n0 - tx.pairs) * static_cast<double>(n0 - ty.pairs));
  r.tau = std::clamp(r.tau, -1.0, 1.0);
  r.variance = kendall_s_variance(n, tx, ty);
  const double z = std::max(std::fabs(static_cast<double>(r.s)) - 1.0, 0.0) / std::sqrt(r.variance);
  r.p_value = std::min(1.0, stats::two_sided_normal_p(z));
  return r;
}

// ---------------------------------------------------------------------------
// Popularity assortativity

struct AssortativityCell {
  int ring = 0;  // 1-based
  bool journalist_alters = false;
  double tau = 0.0;
  double p_value = 1.0;
  std::size_t n = 0;
  bool reported = false;  // p < report_threshold
};

struct AssortativityOptions {
  int max_ring = 6;
  double report_threshold = 0.1;
};

// Kendall correlation, per ring and alter category, between ego follower
// counts and the mean follower count of the ego's alters of that category in
// that ring. Egos without such alters are dropped; cells with fewer than two
// egos, or with an all-tied ranking, are omitted.
inline std::vector<AssortativityCell> assortativity_by_ring(
    const std::vector<CircleStructure>& structures, const std::map<std::string, UserProfile>& profiles,
    const std::map<std::string, bool>& alter_is_journalist, const AssortativityOptions& opt = {}) {
  std::vector<AssortativityCell> out;
  for (int ring = 1; ring <= opt.max_ring; ++ring) {
    for (bool journalist : {true, false}) {
      std::vector<double> ego_pop, alter_pop;
      for (const auto& cs : structures) {
        if (static_cast<int>(cs.ring_members.size()) < ring) continue;
        const auto ego = profiles.find(cs.ego_id);
        if (ego == profiles.end()) continue;
        double sum = 0.0;
        std::size_t cnt = 0;
        for (const auto& id : cs.ring_members[static_cast<std::size_t>(ring - 1)]) {
          const auto lab = alter_is_journalist.find(id);
          if (lab == alter_is_journalist.end() || lab->second != journalist) continue;
          const auto prof = profiles.find(id);
          if (prof == profiles.end()) continue;
          sum += static_cast<double>(prof->second.follower_count);
          ++cnt;
        }
        if (cnt == 0) continue;
        ego_pop.push_back(static_cast<double>(ego->second.follower_count));
        alter_pop.push_back(sum / static_cast<double>(cnt));
      }
      if (ego_pop.size() < 2) continue;
      KendallResult k;
      try {
        k = kendall_tau(ego_pop, alter_pop);
      } catch (const DataError&) {
        continue;
      }
      out.push_back({ring, journalist, k.tau, k.p_value, k.n, k.p_value < opt.report_threshold});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Tweet-type profiles

using TypeCounts = std::array<std::int64_t, 4>;  // reply, mention, retweet, indirect

inline TypeCounts type_counts(const Timeline& t) {
  TypeCounts c{};
  for (const auto& r : t.interactions) ++c[static_cast<std::size_t>(r.kind)];
  return c;
}

struct TypeProfile {
  std::string group;
  std::array<double, 4> percent{};  // sums to 100
  std::int64_t tweets = 0;
};

inline TypeProfile type_profile(std::string group, const TypeCounts& c) {
  TypeProfile p;
  p.group = std::move(group);
  for (auto v : c) p.tweets += v;
  if (p.tweets == 0) throw DataError("type_profile: group '" + p.group + "' has no tweets");
  for (std::size_t i = 0; i < 4; ++i) {
    p.percent[i] = 100.0 * static_cast<double>(c[i]) / static_cast<double>(p.tweets);
  }
  return p;
}

// Pools tweet-kind counts over each group's members; users without a group
// are ignored. Groups come out in name order.
inline std::vector<TypeProfile> tweet_type_profiles(const std::map<std::string, TypeCounts>& per_user,
                                                    const std::map<std::string, std::string>& grouping) {
  std::map<std::string, TypeCounts> pooled;
  for (const auto& [user, counts] : per_user) {
    const auto g = grouping.find(user);
    if (g == grouping.end()) continue;
    auto& acc = pooled[g->second];
    for (std::size_t i = 0; i < 4; ++i) acc[i] += counts[i];
  }
  std::vector<TypeProfile> out;
  for (const auto& [group, counts] : pooled) out.push_back(type_profile(group, counts));
  return out;
}

inline std::vector<TypeProfile> tweet_type_profiles(const std::vector<Timeline>& timelines,
                                                    const std::map<std::string, std::string>& grouping) {
  std::map<std::string, TypeCounts> per_user;
  for (const auto& t : timelines) {
    auto& acc = per_user[t.ego_id()];
    const auto c = type_counts(t);
    for (std::size_t i = 0; i < 4; ++i) acc[i] += c[i];
  }
  return tweet_type_profiles(per_user, grouping);
}

struct ProfileClustering {
  std::vector<int> labels;  // 0-based
  int k = 1;
  double silhouette = 0.0;
  bool degenerate = false;
  std::map<int, double> silhouette_by_k;
  FeatureMatrix pca;  // n x 2, from the unscaled percentages
};

struct ProfileClusteringOptions {
  int k_min = 2;
  int k_max = 6;
  int restarts = 50;
  std::uint64_t seed = 1;
};

// k-means on standardized type vectors, k by maximum mean silhouette.
inline ProfileClustering cluster_profiles(const std::vector<TypeProfile>& profiles,
                                          const ProfileClusteringOptions& opt = {}) {
  if (profiles.size() < 3) throw DataError("cluster_profiles: need at least 3 profiles");
  FeatureMatrix raw;
  for (const auto& p : profiles) raw.emplace_back(p.percent.begin(), p.percent.end());
  ProfileClustering out;
  out.pca = pca_2d(raw);
  const auto z = standardize(raw);
  bool all_same = true;
  for (const auto& row : z) all_same = all_same && row == z.front();
  if (all_same) {
    out.degenerate = true;
    out.labels.assign(profiles.size(), 0);
    return out;
  }
  const int k_hi = std::min<int>(opt.k_max, static_cast<int>(profiles.size()) - 1);
  double best = -2.0;
  for (int k = std::max(2, opt.k_min); k <= k_hi; ++k) {
    const auto km = kmeans(z, static_cast<std::size_t>(k), opt.restarts, derive_seed(opt.seed, static_cast<std::uint64_t>(k)));
    const double s = silhouette(z, km.labels);
    out.silhouette_by_k[k] = s;
    if (s > best) {
      best = s;
      out.k = k;
      out.labels = km.labels;
      out.silhouette = s;
    }
  }
  if (out.labels.empty()) {
    out.degenerate = true;
    out.labels.assign(profiles.size(), 0);
  }
  return out;
}

}  // namespace egonet
