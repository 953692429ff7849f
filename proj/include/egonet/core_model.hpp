#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "egonet/time.hpp"

namespace egonet {

// Raised for malformed or inconsistent input data.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class InteractionKind { Reply, Mention, Retweet, Indirect };

inline constexpr std::string_view to_string(InteractionKind k) {
  switch (k) {
    case InteractionKind::Reply: return "reply";
    case InteractionKind::Mention: return "mention";
    case InteractionKind::Retweet: return "retweet";
    case InteractionKind::Indirect: return "indirect";
  }
  return "indirect";
}

inline std::optional<InteractionKind> parse_kind(std::string_view s) {
  if (s == "reply") return InteractionKind::Reply;
  if (s == "mention") return InteractionKind::Mention;
  // Quote tweets are folded into retweets.
  if (s == "retweet" || s == "quote") return InteractionKind::Retweet;
  if (s == "indirect") return InteractionKind::Indirect;
  return std::nullopt;
}

inline constexpr bool is_direct(InteractionKind k) { return k != InteractionKind::Indirect; }

// One timeline event. alter_id is absent exactly for indirect posts.
struct InteractionRecord {
  std::string ego_id;
  std::optional<std::string> alter_id;
  Instant timestamp;
  InteractionKind kind = InteractionKind::Indirect;
  std::vector<std::string> hashtags;  // lowercase, no '#'
  std::string record_id;

  bool operator==(const InteractionRecord&) const = default;
};

struct UserProfile {
  std::string user_id;
  std::string display_name;
  std::string screen_name;
  std::vector<std::string> bio_tokens;
  std::int64_t follower_count = 0;
  std::optional<Instant> registered_at;

  bool operator==(const UserProfile&) const = default;
};

inline constexpr std::size_t kDefaultCap = 3200;

struct Timeline {
  UserProfile profile;
  std::vector<InteractionRecord> interactions;  // nondecreasing timestamps
  Instant download_time;
  std::size_t cap = kDefaultCap;

  bool operator==(const Timeline&) const = default;

  const std::string& ego_id() const { return profile.user_id; }

  // download_time minus the first interaction; zero for an empty timeline.
  Seconds observed_span() const {
    return interactions.empty() ? 0 : download_time - interactions.front().timestamp;
  }
};

// Aggregated ego -> alter relationship over direct interactions.
struct Tie {
  std::string ego_id;
  std::string alter_id;
  std::int64_t n_reply = 0;
  std::int64_t n_mention = 0;
  std::int64_t n_retweet = 0;
  Instant first_contact;
  Instant last_contact;
  double duration_years = 0.0;  // L_R, first contact to reference time
  double frequency = 0.0;       // contacts per year
  bool first_contact_had_hashtag = false;
  std::int64_t hashtag_count = 0;

  std::int64_t contacts() const { return n_reply + n_mention + n_retweet; }
};

// Clustered layers of one ego. Ring 0 is the most intimate.
struct CircleStructure {
  std::string ego_id;
  int tau = 0;
  std::vector<std::vector<std::string>> ring_members;
  std::vector<std::vector<double>> ring_frequencies;  // parallel to ring_members
  std::vector<std::size_t> circle_sizes;              // cumulative
  std::vector<double> scaling_ratios;                 // tau - 1 entries
  double bandwidth = 0.0;
  bool degenerate = false;
};

using Ring = std::vector<std::string>;  // sorted alter ids

struct Snapshot {
  Instant window_start;
  std::vector<Ring> rings;  // exactly n_rings, possibly empty
};

struct SnapshotSeries {
  std::string ego_id;
  Seconds window_length = kSecondsPerYear;
  Seconds step = kSecondsPerYear;
  int n_rings = 5;
  std::vector<Snapshot> snapshots;
};

struct EvaluationReport {
  std::int64_t tp = 0, fp = 0, tn = 0, fn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double accuracy = 0.0;
  double f1 = 0.0;
  double mcc = 0.0;

  // Ratios with a zero denominator are reported as 0, including MCC.
  static EvaluationReport from_counts(std::int64_t tp, std::int64_t fp, std::int64_t tn, std::int64_t fn) {
    EvaluationReport r{tp, fp, tn, fn};
    const auto ratio = [](double num, double den) { return den > 0 ? num / den : 0.0; };
    const double dtp = static_cast<double>(tp), dfp = static_cast<double>(fp);
    const double dtn = static_cast<double>(tn), dfn = static_cast<double>(fn);
    r.precision = ratio(dtp, dtp + dfp);
    r.recall = ratio(dtp, dtp + dfn);
    r.accuracy = ratio(dtp + dtn, dtp + dtn + dfp + dfn);
    r.f1 = ratio(2.0 * r.precision * r.recall, r.precision + r.recall);
    const double den = (dtp + dfp) * (dtp + dfn) * (dtn + dfp) * (dtn + dfn);
    r.mcc = den > 0 ? (dtp * dtn - dfp * dfn) / std::sqrt(den) : 0.0;
    return r;
  }
};

// Lists every broken Timeline invariant; empty when the timeline is valid.
inline std::vector<std::string> validate_timeline(const Timeline& t) {
  std::vector<std::string> out;
  if (t.cap < 1) out.emplace_back("cap must be positive");
  if (t.interactions.size() > t.cap) out.emplace_back("cap exceeded");
  for (std::size_t i = 1; i < t.interactions.size(); ++i) {
    if (t.interactions[i].timestamp < t.interactions[i - 1].timestamp) {
      out.emplace_back("interactions not sorted");
      break;
    }
  }
  for (const auto& r : t.interactions) {
    if ((r.kind == InteractionKind::Indirect) == r.alter_id.has_value()) {
      out.push_back("record " + r.record_id + ": kind/alter_id mismatch");
    }
    if (r.timestamp > t.download_time) {
      out.push_back("record " + r.record_id + ": timestamp after download_time");
    }
    if (!t.profile.user_id.empty() && r.ego_id != t.profile.user_id) {
      out.push_back("record " + r.record_id + ": ego_id differs from timeline owner");
    }
  }
  if (t.profile.follower_count < 0) out.emplace_back("follower_count negative");
  return out;
}

}  // namespace egonet
