#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "egonet/clustering.hpp"
#include "egonet/core_model.hpp"
#include "egonet/stats.hpp"

namespace egonet {

// One Tie per alter reached by at least one direct interaction, sorted by
// alter id. L_R runs from the first contact to reference_time.
inline std::vector<Tie> build_ties(const Timeline& t, Instant reference_time) {
  std::map<std::string, Tie> by_alter;
  for (const auto& r : t.interactions) {
    if (!is_direct(r.kind)) continue;
    auto [it, inserted] = by_alter.try_emplace(*r.alter_id);
    Tie& tie = it->second;
    if (inserted) {
      tie.ego_id = t.ego_id();
      tie.alter_id = *r.alter_id;
      tie.first_contact = r.timestamp;
      tie.last_contact = r.timestamp;
      tie.first_contact_had_hashtag = !r.hashtags.empty();
    }
    switch (r.kind) {
      case InteractionKind::Reply: ++tie.n_reply; break;
      case InteractionKind::Mention: ++tie.n_mention; break;
      case InteractionKind::Retweet: ++tie.n_retweet; break;
      case InteractionKind::Indirect: break;
    }
    tie.first_contact = std::min(tie.first_contact, r.timestamp);
    tie.last_contact = std::max(tie.last_contact, r.timestamp);
    tie.hashtag_count += static_cast<std::int64_t>(r.hashtags.size());
  }
  std::vector<Tie> out;
  out.reserve(by_alter.size());
  for (auto& [_, tie] : by_alter) {
    tie.duration_years = to_years(reference_time - tie.first_contact);
    tie.frequency = tie.duration_years > 0 ? static_cast<double>(tie.contacts()) / tie.duration_years
                                           : std::numeric_limits<double>::infinity();
    out.push_back(std::move(tie));
  }
  return out;
}

struct ActiveNetwork {
  std::string ego_id;
  std::vector<Tie> ties;
  Instant reference_time;
};

struct ActivityThresholds {
  double min_duration_years = 1.0;
  double min_frequency = 1.0;  // contacts per year
};

inline ActiveNetwork active_network(const std::vector<Tie>& ties, Instant reference_time,
                                    const ActivityThresholds& th = {}) {
  ActiveNetwork net;
  net.reference_time = reference_time;
  for (const auto& tie : ties) {
    if (net.ego_id.empty()) net.ego_id = tie.ego_id;
    if (tie.duration_years >= th.min_duration_years && tie.frequency >= th.min_frequency) net.ties.push_back(tie);
  }
  return net;
}

// Clusters tie frequencies into rings (ring 0 most intimate) and derives the
// cumulative circle sizes and scaling ratios.
inline CircleStructure extract_circles(const ActiveNetwork& net, const MeanShiftOptions& opt = {}) {
  CircleStructure cs;
  cs.ego_id = net.ego_id;
  if (net.ties.size() < 2) {
    cs.degenerate = true;
    cs.tau = 1;
    cs.ring_members.resize(1);
    cs.ring_frequencies.resize(1);
    for (const auto& t : net.ties) {
      cs.ring_members[0].push_back(t.alter_id);
      cs.ring_frequencies[0].push_back(t.frequency);
    }
    cs.circle_sizes = {net.ties.size()};
    return cs;
  }
  std::vector<double> w;
  w.reserve(net.ties.size());
  for (const auto& t : net.ties) w.push_back(t.frequency);
  const auto ms = mean_shift_1d(w, opt);
  cs.tau = ms.tau;
  cs.bandwidth = ms.bandwidth;

  // Within a ring, members are listed by decreasing frequency, then id.
  std::vector<std::size_t> order(net.ties.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (w[a] != w[b]) return w[a] > w[b];
    return net.ties[a].alter_id < net.ties[b].alter_id;
  });
  cs.ring_members.resize(static_cast<std::size_t>(cs.tau));
  cs.ring_frequencies.resize(static_cast<std::size_t>(cs.tau));
  for (std::size_t i : order) {
    const auto ring = static_cast<std::size_t>(ms.labels[i] - 1);
    cs.ring_members[ring].push_back(net.ties[i].alter_id);
    cs.ring_frequencies[ring].push_back(w[i]);
  }
  std::size_t cum = 0;
  for (const auto& ring : cs.ring_members) {
    cum += ring.size();
    cs.circle_sizes.push_back(cum);
  }
  for (std::size_t i = 1; i < cs.circle_sizes.size(); ++i) {
    cs.scaling_ratios.push_back(static_cast<double>(cs.circle_sizes[i]) /
                                static_cast<double>(cs.circle_sizes[i - 1]));
  }
  return cs;
}

// ---------------------------------------------------------------------------
// Population summary

struct TauCohort {
  int tau = 0;
  std::size_t n_egos = 0;
  std::vector<stats::MeanCi> circle_sizes;    // tau entries
  std::vector<stats::MeanCi> scaling_ratios;  // tau - 1 entries, means of per-ego ratios
};

struct PopulationSummary {
  std::size_t n_egos = 0;
  stats::MeanCi active_size;
  int tau_mode = 0;
  double tau_mean = 0.0;
  double tau_median = 0.0;
  std::map<int, std::size_t> tau_distribution;
  std::vector<TauCohort> cohorts;  // ascending tau
};

inline PopulationSummary population_summary(const std::vector<CircleStructure>& structures) {
  if (structures.empty()) throw DataError("population_summary: no structures");
  PopulationSummary s;
  s.n_egos = structures.size();
  std::vector<double> sizes, taus;
  std::map<int, std::vector<const CircleStructure*>> by_tau;
  for (const auto& cs : structures) {
    sizes.push_back(static_cast<double>(cs.circle_sizes.empty() ? 0 : cs.circle_sizes.back()));
    taus.push_back(cs.tau);
    ++s.tau_distribution[cs.tau];
    by_tau[cs.tau].push_back(&cs);
  }
  s.active_size = stats::summarize(sizes);
  s.tau_mean = stats::mean(taus);
  s.tau_median = stats::median(taus);
  std::size_t best = 0;
  for (const auto& [tau, n] : s.tau_distribution) {
    if (n > best) {  // smallest tau wins ties
      best = n;
      s.tau_mode = tau;
    }
  }
  for (const auto& [tau, members] : by_tau) {
    TauCohort c;
    c.tau = tau;
    c.n_egos = members.size();
    for (int i = 0; i < tau; ++i) {
      std::vector<double> v;
      for (const auto* cs : members) v.push_back(static_cast<double>(cs->circle_sizes[static_cast<std::size_t>(i)]));
      c.circle_sizes.push_back(stats::summarize(v));
    }
    for (int i = 0; i + 1 < tau; ++i) {
      std::vector<double> v;
      for (const auto* cs : members) v.push_back(cs->scaling_ratios[static_cast<std::size_t>(i)]);
      c.scaling_ratios.push_back(stats::summarize(v));
    }
    s.cohorts.push_back(std::move(c));
  }
  return s;
}

}  // namespace egonet
