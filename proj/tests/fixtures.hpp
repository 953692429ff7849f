#pragma once

#include <optional>
#include <string>
#include <vector>

#include "egonet/core_model.hpp"
#include "egonet/time.hpp"

namespace fixture {

using egonet::Instant;
using egonet::InteractionKind;

inline const Instant kT0 = egonet::parse_rfc3339("2020-01-01T00:00:00Z");

inline Instant days_after(Instant t, double d) {
  return t + static_cast<egonet::Seconds>(d * egonet::kSecondsPerDay);
}

inline Instant years_after(Instant t, double y) {
  return t + static_cast<egonet::Seconds>(y * egonet::kSecondsPerYear);
}

inline egonet::InteractionRecord rec(const std::string& ego, std::optional<std::string> alter, Instant ts,
                                     InteractionKind kind, std::vector<std::string> tags = {},
                                     std::string id = {}) {
  egonet::InteractionRecord r;
  r.ego_id = ego;
  r.alter_id = std::move(alter);
  r.timestamp = ts;
  r.kind = kind;
  r.hashtags = std::move(tags);
  r.record_id = id.empty() ? ego + "-" + std::to_string(ts.epoch_seconds) : std::move(id);
  return r;
}

inline egonet::Timeline timeline(const std::string& ego, std::vector<egonet::InteractionRecord> recs,
                                 Instant download, std::size_t cap = egonet::kDefaultCap) {
  egonet::Timeline t;
  t.profile.user_id = ego;
  t.interactions = std::move(recs);
  t.download_time = download;
  t.cap = cap;
  return t;
}

// Indirect posts at the given day offsets from kT0.
inline egonet::Timeline posts_at(const std::string& ego, const std::vector<double>& day_offsets, Instant download,
                                 std::size_t cap = egonet::kDefaultCap) {
  std::vector<egonet::InteractionRecord> recs;
  int i = 0;
  for (double d : day_offsets) {
    recs.push_back(rec(ego, std::nullopt, days_after(kT0, d), InteractionKind::Indirect, {},
                       ego + "-" + std::to_string(i++)));
  }
  return timeline(ego, std::move(recs), download, cap);
}

}  // namespace fixture
