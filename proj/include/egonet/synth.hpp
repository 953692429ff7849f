#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "egonet/core_model.hpp"
#include "egonet/random.hpp"
#include "egonet/time.hpp"

namespace egonet {

// Parameters of one synthetic ego with planted rings. Ring 0 is innermost.
struct PlantedEgoSpec {
  int tau = 5;
  std::vector<int> ring_sizes{3, 5, 12, 28, 77};
  std::vector<double> ring_rates{52, 24, 12, 4, 1.5};  // direct contacts per year
  double span_years = 5.0;
  std::array<double, 4> type_mix{0.15, 0.15, 0.4, 0.3};  // reply, mention, retweet, indirect
  double hashtag_prob_first_contact = 0.25;
  double hashtag_rate = 0.2;  // chance that a later direct tweet carries a hashtag
  std::vector<double> churn{0, 0, 0, 0, 0};  // per-ring replacement probability per year
  std::uint64_t seed = 1;
  std::size_t cap = 100'000;  // records beyond the cap are truncated oldest-first
  Instant start = parse_rfc3339("2015-01-01T00:00:00Z");
  std::string ego_id = "ego0";
};

inline std::vector<std::string> validate_spec(const PlantedEgoSpec& s) {
  std::vector<std::string> v;
  const auto tau = static_cast<std::size_t>(std::max(s.tau, 0));
  if (s.tau < 1) v.emplace_back("tau must be >= 1");
  if (s.ring_sizes.size() != tau) v.emplace_back("ring_sizes must have tau entries");
  if (s.ring_rates.size() != tau) v.emplace_back("ring_rates must have tau entries");
  if (s.churn.size() != tau) v.emplace_back("churn must have tau entries");
  for (int n : s.ring_sizes) {
    if (n < 0) v.emplace_back("ring_sizes must be >= 0");
  }
  for (std::size_t i = 1; i < s.ring_rates.size(); ++i) {
    if (!(s.ring_rates[i] < s.ring_rates[i - 1])) v.emplace_back("ring_rates must be strictly decreasing");
  }
  if (!s.ring_rates.empty() && !(s.ring_rates.back() >= 1.0)) v.emplace_back("outermost ring rate must be >= 1");
  if (!(s.span_years > 0)) v.emplace_back("span_years must be positive");
  double mix = 0.0;
  for (double p : s.type_mix) {
    if (p < 0) v.emplace_back("type_mix entries must be >= 0");
    mix += p;
  }
  if (std::fabs(mix - 1.0) > 1e-9) v.emplace_back("type_mix must sum to 1");
  if (!(s.type_mix[3] < 1.0)) v.emplace_back("type_mix must leave room for direct tweets");
  const auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!prob(s.hashtag_prob_first_contact) || !prob(s.hashtag_rate)) v.emplace_back("hashtag probabilities in [0,1]");
  for (double c : s.churn) {
    if (!prob(c)) v.emplace_back("churn entries in [0,1]");
  }
  if (s.cap < 1) v.emplace_back("cap must be >= 1");
  return v;
}

struct SyntheticEgo {
  Timeline timeline;
  // Planted ring identities per calendar year of the span (window = step =
  // 1 year, starting at spec.start). Ring membership ignores whether the alter
  // was actually contacted in that year.
  SnapshotSeries ground_truth;
};

namespace detail {

inline std::string alter_name(const std::string& ego, std::size_t slot, int generation) {
  return ego + "-a" + std::to_string(slot) + (generation ? "." + std::to_string(generation) : "");
}

}  // namespace detail

// Homogeneous Poisson contacts per planted alter slot; churn replaces a slot's
// identity at year boundaries. Deterministic given spec.seed.
inline SyntheticEgo generate_ego(const PlantedEgoSpec& spec) {
  if (auto errs = validate_spec(spec); !errs.empty()) throw DataError("invalid planted spec: " + errs.front());
  SplitMix64 rng(spec.seed);
  const auto tau = static_cast<std::size_t>(spec.tau);
  const Seconds span = static_cast<Seconds>(std::llround(spec.span_years * static_cast<double>(kSecondsPerYear)));
  const auto years = static_cast<std::size_t>(std::ceil(spec.span_years - 1e-12));

  struct Event {
    Seconds at;
    std::size_t slot;
    std::size_t seq;
    InteractionKind kind;
    int generation;
    bool first_for_identity;
  };
  std::vector<Event> events;
  std::vector<std::vector<int>> generation_by_year;  // [slot][year]
  std::vector<std::size_t> ring_of_slot;

  const double direct_share = 1.0 - spec.type_mix[3];
  const std::array<double, 3> direct_mix{spec.type_mix[0] / direct_share, spec.type_mix[1] / direct_share,
                                         spec.type_mix[2] / direct_share};
  std::size_t seq = 0;
  for (std::size_t ring = 0; ring < tau; ++ring) {
    for (int k = 0; k < spec.ring_sizes[ring]; ++k) {
      const std::size_t slot = ring_of_slot.size();
      ring_of_slot.push_back(ring);
      // Identity generation in force during each year of the span.
      std::vector<int> gen(years, 0);
      for (std::size_t y = 1; y < years; ++y) {
        gen[y] = gen[y - 1] + (rng.uniform() < spec.churn[ring] ? 1 : 0);
      }
      int last_gen_seen = -1;
      double t = rng.exponential(spec.ring_rates[ring]);
      while (t < spec.span_years) {
        const auto at = static_cast<Seconds>(t * static_cast<double>(kSecondsPerYear));
        const auto y = std::min(static_cast<std::size_t>(t), years - 1);
        const double u = rng.uniform();
        const InteractionKind kind = u < direct_mix[0]                  ? InteractionKind::Reply
                                     : u < direct_mix[0] + direct_mix[1] ? InteractionKind::Mention
                                                                         : InteractionKind::Retweet;
        const bool first = gen[y] != last_gen_seen;
        last_gen_seen = gen[y];
        events.push_back({at, slot, seq++, kind, gen[y], first});
        t += rng.exponential(spec.ring_rates[ring]);
      }
      generation_by_year.push_back(std::move(gen));
    }
  }
  // Indirect posts keep the requested type mix in expectation.
  double direct_rate = 0.0;
  for (std::size_t r = 0; r < tau; ++r) direct_rate += spec.ring_sizes[r] * spec.ring_rates[r];
  const double indirect_rate = direct_rate * spec.type_mix[3] / direct_share;
  if (indirect_rate > 0) {
    for (double t = rng.exponential(indirect_rate); t < spec.span_years; t += rng.exponential(indirect_rate)) {
      events.push_back({static_cast<Seconds>(t * static_cast<double>(kSecondsPerYear)), SIZE_MAX, seq++,
                        InteractionKind::Indirect, 0, false});
    }
  }
  std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
    return a.at != b.at ? a.at < b.at : a.seq < b.seq;
  });

  SyntheticEgo out;
  Timeline& tl = out.timeline;
  tl.profile.user_id = spec.ego_id;
  tl.download_time = spec.start + span;
  tl.cap = spec.cap;
  const std::size_t skip = events.size() > spec.cap ? events.size() - spec.cap : 0;
  tl.interactions.reserve(events.size() - skip);
  std::size_t counter = 0;
  for (std::size_t i = 0; i < events.size(); ++i) {
    const Event& e = events[i];
    // Hashtag draws happen for every event so truncation does not shift the stream.
    const bool tagged = rng.uniform() < (e.first_for_identity ? spec.hashtag_prob_first_contact : spec.hashtag_rate);
    const auto topic = rng.below(20);
    if (i < skip) continue;
    InteractionRecord r;
    r.ego_id = spec.ego_id;
    r.timestamp = spec.start + e.at;
    r.kind = e.kind;
    r.record_id = spec.ego_id + "-" + std::to_string(counter++);
    if (e.kind != InteractionKind::Indirect) {
      r.alter_id = detail::alter_name(spec.ego_id, e.slot, e.generation);
      if (tagged) r.hashtags.push_back("topic" + std::to_string(topic));
    } else if (tagged) {
      r.hashtags.push_back("topic" + std::to_string(topic));
    }
    tl.interactions.push_back(std::move(r));
  }

  SnapshotSeries& gt = out.ground_truth;
  gt.ego_id = spec.ego_id;
  gt.window_length = kSecondsPerYear;
  gt.step = kSecondsPerYear;
  gt.n_rings = spec.tau;
  for (std::size_t y = 0; y < years; ++y) {
    Snapshot snap;
    snap.window_start = spec.start + static_cast<Seconds>(y) * kSecondsPerYear;
    snap.rings.resize(tau);
    for (std::size_t slot = 0; slot < ring_of_slot.size(); ++slot) {
      snap.rings[ring_of_slot[slot]].push_back(detail::alter_name(spec.ego_id, slot, generation_by_year[slot][y]));
    }
    for (auto& ring : snap.rings) std::sort(ring.begin(), ring.end());
    gt.snapshots.push_back(std::move(snap));
  }
  return out;
}

inline PlantedEgoSpec planted_spec_from_json(const nlohmann::json& j, PlantedEgoSpec s = {}) {
  try {
    if (j.contains("ring_sizes")) s.ring_sizes = j.at("ring_sizes").get<std::vector<int>>();
    if (j.contains("ring_rates")) s.ring_rates = j.at("ring_rates").get<std::vector<double>>();
    s.tau = j.value("tau", static_cast<int>(s.ring_sizes.size()));
    if (j.contains("churn")) s.churn = j.at("churn").get<std::vector<double>>();
    else s.churn.assign(static_cast<std::size_t>(std::max(s.tau, 0)), 0.0);
    s.span_years = j.value("span_years", s.span_years);
    if (j.contains("type_mix")) {
      const auto mix = j.at("type_mix").get<std::vector<double>>();
      if (mix.size() != 4) throw DataError("synth spec: type_mix needs 4 entries");
      std::copy(mix.begin(), mix.end(), s.type_mix.begin());
    }
    s.hashtag_prob_first_contact = j.value("hashtag_prob_first_contact", s.hashtag_prob_first_contact);
    s.hashtag_rate = j.value("hashtag_rate", s.hashtag_rate);
    s.seed = j.value("seed", s.seed);
    s.cap = j.value("cap", s.cap);
    if (j.contains("start")) s.start = parse_rfc3339(j.at("start").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("synth spec: ") + e.what());
  } catch (const TimeParseError& e) {
    throw DataError(std::string("synth spec: ") + e.what());
  }
  return s;
}

// ---------------------------------------------------------------------------
// Whole synthetic datasets: egos plus alter profiles and labels

struct SyntheticPopulationSpec {
  PlantedEgoSpec ego;
  std::size_t n_egos = 10;
  std::uint64_t seed = 1;
  double journalist_alter_fraction = 0.4;
  // Alter popularity: journalist alters follow the ego's popularity in every
  // ring; non-journalist alters only in the first `nonjournalist_assortative_rings`.
  bool assortative = true;
  int nonjournalist_assortative_rings = 2;
  double popularity_noise = 0.5;  // sd of the log-ratio alter/ego followers
  double provider_miss_rate = 0.15;
  double bot_fraction = 0.05;
};

struct SyntheticPopulation {
  std::vector<SyntheticEgo> egos;
  std::map<std::string, UserProfile> profiles;
  std::map<std::string, bool> is_journalist;  // egos and alters
  struct ProviderRow {
    std::optional<bool> is_journalist;
    double bot_score = 0.0;
    double cap_score = 0.0;
  };
  std::map<std::string, ProviderRow> provider;
};

// Generates ego number e and registers its users in pop (profiles, labels,
// provider rows) without storing the ego itself, so callers can stream.
inline SyntheticEgo generate_member(const SyntheticPopulationSpec& spec, std::size_t e, SyntheticPopulation& pop) {
  PlantedEgoSpec es = spec.ego;
  es.ego_id = "ego" + std::to_string(e);
  es.seed = derive_seed(spec.seed, e);
  SyntheticEgo ego = generate_ego(es);
  {
    SplitMix64 rng(derive_seed(spec.seed ^ 0xA5A5A5A5ULL, e));
    const auto& gt = ego.ground_truth;

    const auto bio = [&](bool journalist) {
      static const std::vector<std::vector<std::string>> jb{
          {"senior", "writer", "news"}, {"political", "journalist"}, {"editor", "daily"},
          {"foreign", "correspondent"}, {"staff", "writer"}, {"reporter", "city", "desk"}};
      static const std::vector<std::vector<std::string>> ob{
          {"coffee", "lover"}, {"father", "runner"}, {"writer", "poet"}, {"tech", "enthusiast"}, {}};
      // Some journalists do not mention their job.
      if (journalist && rng.uniform() < 0.8) return jb[rng.below(jb.size())];
      return ob[rng.below(ob.size())];
    };
    const auto add_user = [&](const std::string& id, bool journalist, std::int64_t followers) {
      UserProfile p;
      p.user_id = id;
      p.display_name = id;
      p.screen_name = id;
      p.bio_tokens = bio(journalist);
      p.follower_count = followers;
      pop.profiles[id] = p;
      pop.is_journalist[id] = journalist;
      SyntheticPopulation::ProviderRow row;
      if (rng.uniform() >= spec.provider_miss_rate) row.is_journalist = journalist && rng.uniform() < 0.5;
      const bool bot = !journalist && rng.uniform() < spec.bot_fraction;
      row.bot_score = bot ? 0.6 + 0.4 * rng.uniform() : 0.5 * rng.uniform();
      row.cap_score = bot ? 0.6 + 0.4 * rng.uniform() : 0.5 * rng.uniform();
      pop.provider[id] = row;
    };

    const double ego_log = 8.0 + 1.5 * rng.normal();
    add_user(es.ego_id, true, static_cast<std::int64_t>(std::exp(ego_log)));
    for (const auto& snap : gt.snapshots) {
      for (std::size_t r = 0; r < snap.rings.size(); ++r) {
        for (const auto& id : snap.rings[r]) {
          if (pop.profiles.contains(id)) continue;
          const bool journalist = rng.uniform() < spec.journalist_alter_fraction;
          const bool follows_ego =
              spec.assortative && (journalist || static_cast<int>(r) < spec.nonjournalist_assortative_rings);
          const double base = follows_ego ? ego_log : 8.0 + 1.5 * rng.normal();
          const double lg = base + spec.popularity_noise * rng.normal();
          add_user(id, journalist, static_cast<std::int64_t>(std::exp(lg)));
        }
      }
    }
  }
  return ego;
}

inline SyntheticPopulation generate_population(const SyntheticPopulationSpec& spec) {
  SyntheticPopulation pop;
  for (std::size_t e = 0; e < spec.n_egos; ++e) pop.egos.push_back(generate_member(spec, e, pop));
  return pop;
}

}  // namespace egonet
