#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "egonet/clustering.hpp"
#include "egonet/core_model.hpp"
#include "egonet/stats.hpp"

namespace egonet {

struct SnapshotOptions {
  Seconds window = kSecondsPerYear;
  Seconds step = kSecondsPerYear;
  int n_rings = 5;
  Seconds min_span = 2 * kSecondsPerYear;
  double min_frequency = 1.0;  // contacts per year within the window
};

// Rings of one window: direct contacts inside [start, start + window) only,
// frequency = count / window length, active ties split into exactly n_rings
// groups by optimal 1-D partition of log10(1 + w).
inline std::vector<Ring> window_rings(const Timeline& t, Instant start, const SnapshotOptions& opt) {
  const Instant end = start + opt.window;
  std::map<std::string, std::int64_t> counts;
  const auto first = std::lower_bound(t.interactions.begin(), t.interactions.end(), start,
                                      [](const InteractionRecord& r, Instant s) { return r.timestamp < s; });
  for (auto it = first; it != t.interactions.end() && it->timestamp < end; ++it) {
    if (is_direct(it->kind)) ++counts[*it->alter_id];
  }
  const double years = to_years(opt.window);
  std::vector<std::string> ids;
  std::vector<double> x;
  for (const auto& [id, c] : counts) {
    const double w = static_cast<double>(c) / years;
    if (w >= opt.min_frequency) {
      ids.push_back(id);
      x.push_back(intimacy_transform(w));
    }
  }
  std::vector<Ring> rings(static_cast<std::size_t>(opt.n_rings));
  const auto labels = optimal_partition_1d(x, opt.n_rings);
  for (std::size_t i = 0; i < ids.size(); ++i) rings[static_cast<std::size_t>(labels[i] - 1)].push_back(ids[i]);
  // ids come from an ordered map, so each ring is already sorted.
  return rings;
}

// Sliding windows from the first interaction; the last window ends at or
// before download. Returns nullopt when the observed span is under min_span.
inline std::optional<SnapshotSeries> build_snapshots(const Timeline& t, const SnapshotOptions& opt = {}) {
  if (opt.window <= 0 || opt.step <= 0 || opt.n_rings < 1) throw DataError("build_snapshots: bad options");
  if (t.interactions.empty() || t.observed_span() < opt.min_span) return std::nullopt;
  SnapshotSeries s;
  s.ego_id = t.ego_id();
  s.window_length = opt.window;
  s.step = opt.step;
  s.n_rings = opt.n_rings;
  const Instant origin = t.interactions.front().timestamp;
  for (Instant start = origin; start + opt.window <= t.download_time; start = start + opt.step) {
    s.snapshots.push_back({start, window_rings(t, start, opt)});
  }
  return s;
}

namespace detail {

inline std::size_t intersection_size(const Ring& a, const Ring& b) {
  std::size_t n = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) ++i;
    else if (*j < *i) ++j;
    else {
      ++n;
      ++i;
      ++j;
    }
  }
  return n;
}

inline void require_pairs(const SnapshotSeries& s, const char* what) {
  if (s.snapshots.size() < 2) throw DataError(std::string(what) + ": need at least 2 snapshots");
}

}  // namespace detail

// Per-ring mean Jaccard similarity over the T-1 consecutive snapshot pairs.
// Two empty rings count as identical (1); empty vs non-empty counts as 0.
inline std::vector<double> jaccard_index(const SnapshotSeries& s) {
  detail::require_pairs(s, "jaccard_index");
  const auto n = static_cast<std::size_t>(s.n_rings);
  std::vector<double> out(n, 0.0);
  const std::size_t pairs = s.snapshots.size() - 1;
  for (std::size_t t = 0; t < pairs; ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      const Ring& a = s.snapshots[t].rings[i];
      const Ring& b = s.snapshots[t + 1].rings[i];
      if (a.empty() && b.empty()) {
        out[i] += 1.0;
        continue;
      }
      const std::size_t inter = detail::intersection_size(a, b);
      out[i] += static_cast<double>(inter) / static_cast<double>(a.size() + b.size() - inter);
    }
  }
  for (auto& v : out) v /= static_cast<double>(pairs);
  return out;
}

// Per-ring mean jump distance of the alters found in the ring at t+1,
// measured from their ring at t (n+1 when they were outside the network).
// Pairs whose destination ring is empty are left out of the ring's average.
inline std::vector<double> jump_index(const SnapshotSeries& s) {
  detail::require_pairs(s, "jump_index");
  const auto n = static_cast<std::size_t>(s.n_rings);
  std::vector<double> sum(n, 0.0);
  std::vector<std::size_t> used(n, 0);
  for (std::size_t t = 0; t + 1 < s.snapshots.size(); ++t) {
    std::unordered_map<std::string, std::size_t> ring_at_t;  // 1-based
    for (std::size_t i = 0; i < n; ++i) {
      for (const auto& id : s.snapshots[t].rings[i]) ring_at_t[id] = i + 1;
    }
    for (std::size_t i = 0; i < n; ++i) {
      const Ring& dest = s.snapshots[t + 1].rings[i];
      if (dest.empty()) continue;
      double total = 0.0;
      for (const auto& id : dest) {
        const auto it = ring_at_t.find(id);
        const std::size_t src = it == ring_at_t.end() ? n + 1 : it->second;
        total += static_cast<double>(src > i + 1 ? src - (i + 1) : (i + 1) - src);
      }
      sum[i] += total / static_cast<double>(dest.size());
      ++used[i];
    }
  }
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) out[i] = used[i] ? sum[i] / static_cast<double>(used[i]) : 0.0;
  return out;
}

struct DynamicsReport {
  std::string ego_id;
  Seconds step = kSecondsPerYear;
  int n_rings = 5;
  std::vector<double> jaccard;
  std::vector<double> jump;
  std::size_t windows_used = 0;
};

inline DynamicsReport dynamics_report(const SnapshotSeries& s) {
  return {s.ego_id, s.step, s.n_rings, jaccard_index(s), jump_index(s), s.snapshots.size()};
}

struct PopulationDynamics {
  Seconds step = kSecondsPerYear;
  std::size_t n_egos = 0;
  std::vector<stats::MeanCi> jaccard;
  std::vector<stats::MeanCi> jump;
};

// Per-ring means with 95% CIs, one entry per step size present.
inline std::vector<PopulationDynamics> population_dynamics(const std::vector<DynamicsReport>& reports) {
  std::map<Seconds, std::vector<const DynamicsReport*>> by_step;
  for (const auto& r : reports) by_step[r.step].push_back(&r);
  std::vector<PopulationDynamics> out;
  for (const auto& [step, rs] : by_step) {
    PopulationDynamics p;
    p.step = step;
    p.n_egos = rs.size();
    const int n = rs.front()->n_rings;
    for (const auto* r : rs) {
      if (r->n_rings != n) throw DataError("population_dynamics: mixed ring counts for one step size");
    }
    for (int i = 0; i < n; ++i) {
      std::vector<double> jac, jmp;
      for (const auto* r : rs) {
        jac.push_back(r->jaccard[static_cast<std::size_t>(i)]);
        jmp.push_back(r->jump[static_cast<std::size_t>(i)]);
      }
      p.jaccard.push_back(stats::summarize(jac));
      p.jump.push_back(stats::summarize(jmp));
    }
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace egonet
