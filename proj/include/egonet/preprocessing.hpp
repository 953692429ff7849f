#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "egonet/core_model.hpp"
#include "egonet/time.hpp"

namespace egonet {

enum class Observability { FullyObserved, PartiallyObserved };
enum class Engagement { Active, Abandoned };
enum class Regularity { Regular, Sporadic };

inline constexpr std::string_view to_string(Observability o) {
  return o == Observability::FullyObserved ? "fully_observed" : "partially_observed";
}
inline constexpr std::string_view to_string(Engagement e) {
  return e == Engagement::Active ? "active" : "abandoned";
}
inline constexpr std::string_view to_string(Regularity r) {
  return r == Regularity::Regular ? "regular" : "sporadic";
}

struct PreprocessingConfig {
  Seconds abandonment_grace = kHalfYear;     // "six months" = 182.625 d
  Seconds regularity_bin = 3 * kSecondsPerDay;
  double regularity_min_fraction = 0.5;      // inclusive
  double dbscan_eps = 0.5;                   // in standardized feature units
  std::size_t dbscan_min_pts = 4;            // neighbourhood count includes the point
  Seconds min_span = kSecondsPerYear;
  std::size_t stationarity_weeks = 80;
};

inline Observability classify_observability(const Timeline& t) {
  if (t.interactions.empty()) throw DataError("classify_observability: empty timeline for " + t.ego_id());
  return t.interactions.size() >= t.cap ? Observability::PartiallyObserved : Observability::FullyObserved;
}

struct AbandonmentResult {
  Engagement engagement = Engagement::Abandoned;
  bool insufficient_history = false;
  Seconds trailing_silence = 0;
  Seconds longest_gap = 0;
};

// A user has abandoned the platform when the silence before download exceeds
// the grace period plus their own longest intertweet time.
inline AbandonmentResult detect_abandonment(const Timeline& t, Seconds grace = kHalfYear) {
  AbandonmentResult r;
  if (t.interactions.size() < 2) {
    r.insufficient_history = true;
    if (!t.interactions.empty()) r.trailing_silence = t.download_time - t.interactions.back().timestamp;
    return r;
  }
  for (std::size_t i = 1; i < t.interactions.size(); ++i) {
    r.longest_gap = std::max(r.longest_gap, t.interactions[i].timestamp - t.interactions[i - 1].timestamp);
  }
  r.trailing_silence = t.download_time - t.interactions.back().timestamp;
  r.engagement = r.trailing_silence > grace + r.longest_gap ? Engagement::Abandoned : Engagement::Active;
  return r;
}

// Fraction of consecutive bins (anchored at the first interaction, covering
// the observed span) that contain at least one interaction.
inline double active_bin_fraction(const Timeline& t, Seconds bin) {
  const Seconds span = t.observed_span();
  if (t.interactions.empty() || span <= 0) {
    throw DataError("classify_regularity: observed span must be positive for " + t.ego_id());
  }
  if (bin <= 0) throw DataError("classify_regularity: bin length must be positive");
  const auto n_bins = static_cast<std::size_t>((span + bin - 1) / bin);
  std::vector<bool> hit(n_bins, false);
  const Instant first = t.interactions.front().timestamp;
  for (const auto& r : t.interactions) {
    auto idx = static_cast<std::size_t>((r.timestamp - first) / bin);
    hit[std::min(idx, n_bins - 1)] = true;
  }
  const auto filled = static_cast<double>(std::count(hit.begin(), hit.end(), true));
  return filled / static_cast<double>(n_bins);
}

inline Regularity classify_regularity(const Timeline& t, Seconds bin = 3 * kSecondsPerDay,
                                      double min_fraction = 0.5) {
  return active_bin_fraction(t, bin) >= min_fraction ? Regularity::Regular : Regularity::Sporadic;
}

// ---------------------------------------------------------------------------
// DBSCAN on small point sets

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

// Returns a cluster id per point, -1 for noise. Points are visited in index
// order; the noise set does not depend on that order.
inline std::vector<int> dbscan(const std::vector<Point2>& pts, double eps, std::size_t min_pts) {
  const std::size_t n = pts.size();
  const double eps2 = eps * eps;
  std::vector<std::vector<std::size_t>> nbrs(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double dx = pts[i].x - pts[j].x, dy = pts[i].y - pts[j].y;
      if (dx * dx + dy * dy <= eps2) nbrs[i].push_back(j);
    }
  }
  constexpr int kUnvisited = -2;
  std::vector<int> label(n, kUnvisited);
  int cluster = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (label[i] != kUnvisited) continue;
    if (nbrs[i].size() < min_pts) {
      label[i] = -1;
      continue;
    }
    label[i] = cluster;
    std::vector<std::size_t> frontier(nbrs[i].begin(), nbrs[i].end());
    while (!frontier.empty()) {
      const std::size_t j = frontier.back();
      frontier.pop_back();
      if (label[j] == -1) label[j] = cluster;  // border point
      if (label[j] != kUnvisited) continue;
      label[j] = cluster;
      if (nbrs[j].size() >= min_pts) frontier.insert(frontier.end(), nbrs[j].begin(), nbrs[j].end());
    }
    ++cluster;
  }
  return label;
}

struct ActivityFeature {
  std::string user_id;
  double span_days = 0.0;
  double tweets_per_day = 0.0;
};

inline ActivityFeature activity_feature(const Timeline& t) {
  const double span_days = to_days(t.observed_span());
  return {t.ego_id(), span_days, static_cast<double>(t.interactions.size()) / std::max(span_days, 1.0)};
}

// Flags users whose (span, rate) feature is DBSCAN noise after per-feature
// standardization.
inline std::set<std::string> detect_frequency_outliers(std::vector<ActivityFeature> features, double eps = 0.5,
                                                       std::size_t min_pts = 4) {
  std::sort(features.begin(), features.end(),
            [](const auto& a, const auto& b) { return a.user_id < b.user_id; });
  const auto n = static_cast<double>(features.size());
  const auto standardize = [&](auto get) {
    double m = 0.0, ss = 0.0;
    for (const auto& f : features) m += get(f);
    m /= n;
    for (const auto& f : features) ss += (get(f) - m) * (get(f) - m);
    const double sd = std::sqrt(ss / n);
    std::vector<double> z;
    for (const auto& f : features) z.push_back(sd > 0 ? (get(f) - m) / sd : 0.0);
    return z;
  };
  std::set<std::string> out;
  if (features.empty()) return out;
  const auto zs = standardize([](const ActivityFeature& f) { return f.span_days; });
  const auto zr = standardize([](const ActivityFeature& f) { return f.tweets_per_day; });
  std::vector<Point2> pts;
  for (std::size_t i = 0; i < features.size(); ++i) pts.push_back({zs[i], zr[i]});
  const auto labels = dbscan(pts, eps, min_pts);
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (labels[i] < 0) out.insert(features[i].user_id);
  }
  return out;
}

inline std::set<std::string> detect_frequency_outliers(const std::vector<Timeline>& timelines, double eps = 0.5,
                                                       std::size_t min_pts = 4) {
  std::vector<ActivityFeature> f;
  for (const auto& t : timelines) {
    if (!t.interactions.empty()) f.push_back(activity_feature(t));
  }
  return detect_frequency_outliers(std::move(f), eps, min_pts);
}

// ---------------------------------------------------------------------------
// Stationarity

// Weekly counts from the first interaction to download, capped at max_weeks.
inline std::vector<double> weekly_counts(const Timeline& t, std::size_t max_weeks) {
  if (t.interactions.empty() || max_weeks == 0) return {};
  constexpr Seconds week = 7 * kSecondsPerDay;
  const Seconds span = t.observed_span();
  const auto n = std::min<std::size_t>(max_weeks, std::max<Seconds>(1, (span + week - 1) / week));
  std::vector<double> counts(n, 0.0);
  const Instant first = t.interactions.front().timestamp;
  for (const auto& r : t.interactions) {
    const auto w = static_cast<std::size_t>((r.timestamp - first) / week);
    if (w < n) counts[w] += 1.0;
  }
  return counts;
}

// (x - mean) / (max - min); a constant series maps to zeros.
inline std::vector<double> mean_normalize(const std::vector<double>& xs) {
  if (xs.empty()) return {};
  const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
  const double range = *hi - *lo;
  double m = 0.0;
  for (double x : xs) m += x;
  m /= static_cast<double>(xs.size());
  std::vector<double> out;
  out.reserve(xs.size());
  for (double x : xs) out.push_back(range > 0 ? (x - m) / range : 0.0);
  return out;
}

// Across-user mean of the mean-normalized weekly activity, per week index.
inline std::vector<double> stationarity_profile(const std::vector<const Timeline*>& fully_observed,
                                                std::size_t weeks = 80) {
  std::vector<double> sum(weeks, 0.0);
  std::vector<std::size_t> cnt(weeks, 0);
  std::size_t longest = 0;
  for (const Timeline* t : fully_observed) {
    const auto norm = mean_normalize(weekly_counts(*t, weeks));
    for (std::size_t w = 0; w < norm.size(); ++w) {
      sum[w] += norm[w];
      ++cnt[w];
    }
    longest = std::max(longest, norm.size());
  }
  std::vector<double> profile;
  for (std::size_t w = 0; w < longest; ++w) profile.push_back(sum[w] / static_cast<double>(cnt[w]));
  return profile;
}

inline std::vector<double> stationarity_profile(const std::vector<Timeline>& fully_observed, std::size_t weeks = 80) {
  std::vector<const Timeline*> ptrs;
  for (const auto& t : fully_observed) ptrs.push_back(&t);
  return stationarity_profile(ptrs, weeks);
}

// ---------------------------------------------------------------------------
// Per-user classification and the filter ledger

struct UserActivityLabel {
  std::string user_id;
  Observability observability = Observability::FullyObserved;
  Engagement engagement = Engagement::Abandoned;
  Regularity regularity = Regularity::Sporadic;
  bool outlier = false;
  bool long_enough = false;  // observed span >= min_span
  bool insufficient_history = false;
  bool retained = false;
};

struct ActivitySummary {
  Observability observability = Observability::FullyObserved;
  AbandonmentResult abandonment;
  Regularity regularity = Regularity::Sporadic;
  Seconds span = 0;
  std::size_t n_interactions = 0;
  ActivityFeature feature;
};

// Per-timeline part of the classification; pure, safe to run in parallel.
inline ActivitySummary summarize_activity(const Timeline& t, const PreprocessingConfig& cfg = {}) {
  ActivitySummary s;
  s.n_interactions = t.interactions.size();
  s.observability = classify_observability(t);
  s.abandonment = detect_abandonment(t, cfg.abandonment_grace);
  s.span = t.observed_span();
  s.regularity = s.span > 0 ? classify_regularity(t, cfg.regularity_bin, cfg.regularity_min_fraction)
                            : Regularity::Sporadic;
  s.feature = activity_feature(t);
  return s;
}

inline UserActivityLabel make_label(const ActivitySummary& s, bool outlier, const PreprocessingConfig& cfg = {}) {
  UserActivityLabel l;
  l.user_id = s.feature.user_id;
  l.observability = s.observability;
  l.engagement = s.abandonment.engagement;
  l.insufficient_history = s.abandonment.insufficient_history;
  l.regularity = s.regularity;
  l.outlier = outlier;
  l.long_enough = s.span >= cfg.min_span;
  l.retained = l.engagement == Engagement::Active && l.regularity == Regularity::Regular && !l.outlier &&
               l.long_enough;
  return l;
}

// Users dropped by the first failing filter, in pipeline order.
struct FilterLedger {
  std::size_t input = 0;
  std::size_t empty = 0;
  std::size_t partially_observed = 0;  // informational, not a filter
  std::size_t abandoned = 0;
  std::size_t sporadic = 0;
  std::size_t outlier = 0;
  std::size_t short_span = 0;
  std::size_t retained = 0;

  bool conserves() const { return empty + abandoned + sporadic + outlier + short_span + retained == input; }
};

inline void tally(FilterLedger& ledger, const UserActivityLabel& l) {
  if (l.observability == Observability::PartiallyObserved) ++ledger.partially_observed;
  if (l.engagement == Engagement::Abandoned) ++ledger.abandoned;
  else if (l.regularity == Regularity::Sporadic) ++ledger.sporadic;
  else if (l.outlier) ++ledger.outlier;
  else if (!l.long_enough) ++ledger.short_span;
  else ++ledger.retained;
}

// Labels a whole dataset. Empty timelines are counted and skipped.
inline std::vector<UserActivityLabel> label_users(const std::vector<Timeline>& timelines, FilterLedger* ledger = nullptr,
                                                  const PreprocessingConfig& cfg = {}) {
  std::vector<ActivitySummary> summaries;
  FilterLedger local;
  local.input = timelines.size();
  for (const auto& t : timelines) {
    if (t.interactions.empty()) {
      ++local.empty;
      continue;
    }
    summaries.push_back(summarize_activity(t, cfg));
  }
  std::vector<ActivityFeature> features;
  for (const auto& s : summaries) features.push_back(s.feature);
  const auto outliers = features.size() >= 2 ? detect_frequency_outliers(features, cfg.dbscan_eps, cfg.dbscan_min_pts)
                                             : std::set<std::string>{};
  std::vector<UserActivityLabel> labels;
  for (const auto& s : summaries) {
    labels.push_back(make_label(s, outliers.contains(s.feature.user_id), cfg));
    tally(local, labels.back());
  }
  if (ledger) *ledger = local;
  return labels;
}

}  // namespace egonet
