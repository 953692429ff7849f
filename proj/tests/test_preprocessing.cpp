#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "egonet/preprocessing.hpp"
#include "egonet/random.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace egonet;
using fixture::days_after;
using fixture::kT0;
using fixture::posts_at;

namespace {

std::vector<double> daily(int n, double step = 1.0) {
  std::vector<double> d;
  for (int i = 0; i < n; ++i) d.push_back(i * step);
  return d;
}

Timeline random_timeline(SplitMix64& rng, const std::string& id) {
  std::vector<double> days;
  double d = 0;
  const auto n = 2 + rng.below(60);
  for (std::uint64_t i = 0; i < n; ++i) {
    d += rng.uniform() * 20.0;
    days.push_back(d);
  }
  return posts_at(id, days, days_after(kT0, d + rng.uniform() * 400.0));
}

}  // namespace

TEST(Observability, CapBoundary) {
  std::vector<double> d(3200, 1.0);
  EXPECT_EQ(classify_observability(posts_at("u", d, days_after(kT0, 10), 3200)), Observability::PartiallyObserved);
  EXPECT_EQ(classify_observability(posts_at("u", daily(10), days_after(kT0, 10), 3200)), Observability::FullyObserved);
  EXPECT_THROW(classify_observability(posts_at("u", {}, days_after(kT0, 10))), DataError);
}

TEST(Abandonment, Examples) {
  // Gaps of 30 days, last post one day before download.
  auto active = detect_abandonment(posts_at("u", daily(10, 30.0), days_after(kT0, 271)));
  EXPECT_EQ(active.engagement, Engagement::Active);
  EXPECT_FALSE(active.insufficient_history);

  // Daily posts then a 190-day silence: 190 > 182.625 + 1.
  auto gone = detect_abandonment(posts_at("u", daily(100), days_after(kT0, 99 + 190)));
  EXPECT_EQ(gone.engagement, Engagement::Abandoned);
  EXPECT_EQ(gone.longest_gap, kSecondsPerDay);

  // 183 days of silence is still within 182.625 + 1.
  EXPECT_EQ(detect_abandonment(posts_at("u", daily(100), days_after(kT0, 99 + 183))).engagement, Engagement::Active);

  auto single = detect_abandonment(posts_at("u", {0}, days_after(kT0, 365)));
  EXPECT_EQ(single.engagement, Engagement::Abandoned);
  EXPECT_TRUE(single.insufficient_history);
}

TEST(Abandonment, MonotoneInTrailingSilence) {
  SplitMix64 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    auto t = random_timeline(rng, "u");
    bool was_abandoned = false;
    for (int extra = 0; extra < 40; ++extra) {
      t.download_time = t.download_time + 10 * kSecondsPerDay;
      const bool abandoned = detect_abandonment(t).engagement == Engagement::Abandoned;
      EXPECT_FALSE(was_abandoned && !abandoned);
      was_abandoned = abandoned;
    }
  }
}

TEST(Regularity, Examples) {
  EXPECT_EQ(classify_regularity(posts_at("u", daily(300), days_after(kT0, 300))), Regularity::Regular);

  // One post every 30 days: each post fills its own bin.
  const auto monthly = posts_at("u", daily(13, 30.0), days_after(kT0, 365));
  const double bins = std::ceil(365.0 / 3.0);
  EXPECT_DOUBLE_EQ(active_bin_fraction(monthly, 3 * kSecondsPerDay), 13.0 / bins);
  EXPECT_EQ(classify_regularity(monthly), Regularity::Sporadic);

  // Span 12 days = 4 bins, posts land in bins 0 and 3: exactly half.
  const auto half = posts_at("u", {0, 1, 11}, days_after(kT0, 12));
  EXPECT_DOUBLE_EQ(active_bin_fraction(half, 3 * kSecondsPerDay), 0.5);
  EXPECT_EQ(classify_regularity(half), Regularity::Regular);
  // One more (partial) bin drops it to 2/5.
  EXPECT_EQ(classify_regularity(posts_at("u", {0, 1, 11}, days_after(kT0, 12.5))), Regularity::Sporadic);

  EXPECT_THROW(classify_regularity(posts_at("u", {}, kT0)), DataError);
}

TEST(Regularity, TranslationInvariant) {
  SplitMix64 rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    auto t = random_timeline(rng, "u");
    const double before = active_bin_fraction(t, 3 * kSecondsPerDay);
    const auto shift = static_cast<Seconds>(rng.below(4000 * kSecondsPerDay)) - 2000 * kSecondsPerDay;
    for (auto& r : t.interactions) r.timestamp = r.timestamp + shift;
    t.download_time = t.download_time + shift;
    EXPECT_DOUBLE_EQ(active_bin_fraction(t, 3 * kSecondsPerDay), before);
  }
}

namespace {

std::vector<std::pair<double, double>> standardized(const std::vector<ActivityFeature>& f) {
  const auto z = [&](auto get) {
    double m = 0, ss = 0;
    for (const auto& a : f) m += get(a);
    m /= static_cast<double>(f.size());
    for (const auto& a : f) ss += (get(a) - m) * (get(a) - m);
    const double sd = std::sqrt(ss / static_cast<double>(f.size()));
    std::vector<double> out;
    for (const auto& a : f) out.push_back(sd > 0 ? (get(a) - m) / sd : 0.0);
    return out;
  };
  const auto a = z([](const ActivityFeature& x) { return x.span_days; });
  const auto b = z([](const ActivityFeature& x) { return x.tweets_per_day; });
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < f.size(); ++i) pts.emplace_back(a[i], b[i]);
  return pts;
}

}  // namespace

TEST(FrequencyOutliers, ExtremeUserFlagged) {
  SplitMix64 rng(21);
  std::vector<ActivityFeature> f;
  for (int i = 0; i < 50; ++i) {
    char id[8];
    std::snprintf(id, sizeof id, "u%02d", i);
    f.push_back({id, 700.0 + rng.uniform() * 30.0, 1.9 + rng.uniform() * 0.2});
  }
  f.push_back({"x", 20.0, 300.0});
  const auto out = detect_frequency_outliers(f);

  const auto labels = oracle::dbscan(standardized(f), 0.5, 4);
  std::set<std::string> expected;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (labels[i] < 0) expected.insert(f[i].user_id);
  }
  EXPECT_EQ(out, expected);
  EXPECT_EQ(out, std::set<std::string>{"x"});
}

TEST(FrequencyOutliers, ExtremeUserFromTimelines) {
  std::vector<Timeline> ts;
  const Instant dl = days_after(kT0, 800);
  for (int i = 0; i < 12; ++i) {
    std::vector<double> days;
    for (int d = 0; d < 700 + i; ++d) days.push_back(d + 0.25), days.push_back(d + 0.5);
    ts.push_back(posts_at("u" + std::to_string(i), days, dl, 100000));
  }
  std::vector<double> burst;
  for (int k = 0; k < 6000; ++k) burst.push_back(780.0 + k * (20.0 / 6000));
  ts.push_back(posts_at("burst", burst, dl, 100000));
  EXPECT_EQ(detect_frequency_outliers(ts), std::set<std::string>{"burst"});
}

TEST(FrequencyOutliers, IdenticalAndSparse) {
  std::vector<ActivityFeature> same(10, {"", 400.0, 3.0});
  for (int i = 0; i < 10; ++i) same[static_cast<std::size_t>(i)].user_id = "u" + std::to_string(i);
  EXPECT_TRUE(detect_frequency_outliers(same).empty());

  std::vector<ActivityFeature> two{{"a", 10.0, 1.0}, {"b", 900.0, 50.0}};
  EXPECT_EQ(detect_frequency_outliers(two, 0.5, 3), (std::set<std::string>{"a", "b"}));
  EXPECT_EQ(dbscan({{0, 0}, {100, 100}}, 0.5, 3), (std::vector<int>{-1, -1}));
}

TEST(Dbscan, MatchesOracleAndPermutationInvariant) {
  SplitMix64 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const auto n = 5 + rng.below(60);
    std::vector<Point2> p;
    std::vector<std::pair<double, double>> q;
    for (std::uint64_t i = 0; i < n; ++i) {
      // A few blobs plus scattered points.
      const double cx = static_cast<double>(rng.below(3)) * 2.0, cy = static_cast<double>(rng.below(2)) * 2.0;
      const double spread = rng.uniform() < 0.2 ? 3.0 : 0.4;
      p.push_back({cx + (rng.uniform() - 0.5) * spread, cy + (rng.uniform() - 0.5) * spread});
      q.emplace_back(p.back().x, p.back().y);
    }
    const double eps = 0.2 + rng.uniform() * 0.5;
    const std::size_t min_pts = 2 + rng.below(4);
    const auto got = dbscan(p, eps, min_pts);
    const auto want = oracle::dbscan(q, eps, min_pts);
    // Border points reachable from two clusters may legally differ; cores and noise may not.
    for (std::size_t i = 0; i < n; ++i) EXPECT_EQ(got[i] < 0, want[i] < 0);

    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<Point2> pp;
    for (auto i : perm) pp.push_back(p[i]);
    const auto shuffled = dbscan(pp, eps, min_pts);
    for (std::size_t k = 0; k < n; ++k) EXPECT_EQ(shuffled[k] < 0, got[perm[k]] < 0);
  }
}

TEST(Dbscan, PartitionMatchesOracleWithoutSharedBorders) {
  // Well separated blobs: no border point can be claimed by two clusters.
  std::vector<Point2> p;
  std::vector<std::pair<double, double>> q;
  for (int b = 0; b < 3; ++b) {
    for (int i = 0; i < 8; ++i) {
      p.push_back({b * 10.0 + 0.1 * i, 0.05 * (i % 3)});
      q.emplace_back(p.back().x, p.back().y);
    }
  }
  p.push_back({5, 5});
  q.emplace_back(5, 5);
  EXPECT_TRUE(oracle::same_partition(dbscan(p, 0.3, 3), oracle::dbscan(q, 0.3, 3)));
}

TEST(Stationarity, Examples) {
  // Ten posts in week 0, none in week 1.
  std::vector<double> ten(10, 1.0);
  const auto one = posts_at("u", ten, days_after(kT0, 14));
  EXPECT_EQ(weekly_counts(one, 80), (std::vector<double>{10, 0}));
  const auto p = stationarity_profile(std::vector<Timeline>{one});
  ASSERT_EQ(p.size(), 2u);
  EXPECT_DOUBLE_EQ(p[0], 0.5);
  EXPECT_DOUBLE_EQ(p[1], -0.5);

  std::vector<double> steady;
  for (int w = 0; w < 20; ++w) {
    for (int k = 0; k < 3; ++k) steady.push_back(w * 7.0 + k);
  }
  const auto flat = stationarity_profile(std::vector<Timeline>{posts_at("a", steady, days_after(kT0, 140)),
                                                               posts_at("b", steady, days_after(kT0, 140))});
  ASSERT_EQ(flat.size(), 20u);
  for (double v : flat) EXPECT_EQ(v, 0.0);

  EXPECT_TRUE(stationarity_profile(std::vector<Timeline>{}).empty());
}

TEST(Stationarity, RangeAndTruncation) {
  SplitMix64 rng(4);
  std::vector<Timeline> ts;
  for (int i = 0; i < 40; ++i) ts.push_back(random_timeline(rng, "u" + std::to_string(i)));
  const auto p = stationarity_profile(ts, 80);
  EXPECT_LE(p.size(), 80u);
  for (double v : p) {
    EXPECT_GE(v, -1.0);
    EXPECT_LE(v, 1.0);
  }
  EXPECT_LE(stationarity_profile(ts, 5).size(), 5u);
}

TEST(FilterLedger, ConservesUsersAndRetainedRule) {
  SplitMix64 rng(99);
  std::vector<Timeline> ts;
  for (int i = 0; i < 80; ++i) ts.push_back(random_timeline(rng, "u" + std::to_string(i)));
  for (int i = 0; i < 20; ++i) ts.push_back(posts_at("d" + std::to_string(i), daily(500), days_after(kT0, 520)));
  ts.push_back(posts_at("empty", {}, days_after(kT0, 10)));
  FilterLedger ledger;
  const auto labels = label_users(ts, &ledger);
  EXPECT_EQ(ledger.input, ts.size());
  EXPECT_EQ(ledger.empty, 1u);
  EXPECT_EQ(labels.size(), ts.size() - 1);
  EXPECT_TRUE(ledger.conserves());
  std::size_t retained = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto& l = labels[i];
    const bool rule = l.engagement == Engagement::Active && l.regularity == Regularity::Regular && !l.outlier &&
                      ts[i].observed_span() >= kSecondsPerYear;
    EXPECT_EQ(l.retained, rule) << l.user_id;
    retained += l.retained;
  }
  EXPECT_EQ(retained, ledger.retained);
  EXPECT_GT(retained, 0u);
}
