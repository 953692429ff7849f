#pragma once

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "egonet/analytics.hpp"
#include "egonet/core_model.hpp"
#include "egonet/csv.hpp"
#include "egonet/egonet_dynamic.hpp"
#include "egonet/egonet_static.hpp"
#include "egonet/ingestion.hpp"
#include "egonet/labeling.hpp"
#include "egonet/preprocessing.hpp"
#include "egonet/svg.hpp"
#include "egonet/synth.hpp"

namespace egonet::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

inline constexpr const char* kVersion = "1.0.0";

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An upstream artifact is missing; the message names the stage to run first.
struct DependencyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline const std::vector<std::string>& stage_order() {
  static const std::vector<std::string> s{"ingest", "filter",        "label",    "extract", "dynamics",
                                          "hashtags", "assortativity", "profiles", "report"};
  return s;
}

// ---------------------------------------------------------------------------
// Configuration

struct Config {
  fs::path manifest;
  fs::path out = "out";
  std::uint64_t seed = 1;
  unsigned jobs = 1;

  PreprocessingConfig filter;
  MeanShiftOptions mean_shift;
  ActivityThresholds activity;
  SnapshotOptions dynamics;
  std::string step = "12m";

  std::string expr = "g|k";
  std::vector<fs::path> providers;
  fs::path truth;
  fs::path keywords;
  bool invert_b = false;

  fs::path labels;
  AssortativityOptions assortativity;

  fs::path groups;
  ProfileClusteringOptions profiles;

  fs::path synth_spec;
  std::size_t synth_egos = 10;

  std::map<std::string, bool> stages;  // toggles for `all`; absent means enabled

  bool stage_enabled(const std::string& s) const {
    const auto it = stages.find(s);
    return it == stages.end() || it->second;
  }
};

// "1m", "12m", "1y": window step in months or years.
inline Seconds parse_step(const std::string& s) {
  if (s.size() < 2) throw UsageError("bad step '" + s + "' (expected e.g. 1m or 12m)");
  int n = 0;
  const auto* end = s.data() + s.size() - 1;
  const auto [ptr, ec] = std::from_chars(s.data(), end, n);
  if (ec != std::errc() || ptr != end || n < 1) throw UsageError("bad step '" + s + "' (expected e.g. 1m or 12m)");
  if (s.back() == 'm') return n * kSecondsPerMonth;
  if (s.back() == 'y') return n * kSecondsPerYear;
  throw UsageError("bad step '" + s + "' (expected e.g. 1m or 12m)");
}

namespace detail {

inline void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw UsageError("config: '" + where + "' must be an object");
  for (const auto& item : j.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return item.key() == a; })) {
      throw UsageError("config: unknown key '" + (where.empty() ? "" : where + ".") + item.key() + "'");
    }
  }
}

template <class T>
void get(const json& j, const char* key, T& dst) {
  if (auto it = j.find(key); it != j.end() && !it->is_null()) dst = it->get<T>();
}

inline void get_path(const json& j, const char* key, fs::path& dst, const fs::path& base) {
  if (auto it = j.find(key); it != j.end() && !it->is_null()) {
    fs::path p = it->get<std::string>();
    dst = p.is_absolute() || base.empty() ? p : base / p;
  }
}

inline Seconds days(double d) { return static_cast<Seconds>(std::llround(d * kSecondsPerDay)); }
inline Seconds years(double y) { return static_cast<Seconds>(std::llround(y * kSecondsPerYear)); }

}  // namespace detail

// Applies a JSON config on top of `cfg`. Relative paths resolve against base.
inline Config apply_config(const json& j, Config cfg = {}, const fs::path& base = {}) {
  using detail::get;
  try {
    detail::check_keys(j,
                       {"manifest", "out", "seed", "jobs", "filter", "extract", "dynamics", "label", "assortativity",
                        "profiles", "synth", "stages"},
                       "");
    detail::get_path(j, "manifest", cfg.manifest, base);
    detail::get_path(j, "out", cfg.out, base);
    get(j, "seed", cfg.seed);
    get(j, "jobs", cfg.jobs);
    if (auto it = j.find("filter"); it != j.end()) {
      const json& f = *it;
      detail::check_keys(f,
                         {"abandonment_grace_days", "regularity_bin_days", "regularity_min_fraction", "dbscan_eps",
                          "dbscan_min_pts", "min_span_years", "stationarity_weeks"},
                         "filter");
      if (f.contains("abandonment_grace_days")) cfg.filter.abandonment_grace = detail::days(f["abandonment_grace_days"].get<double>());
      if (f.contains("regularity_bin_days")) cfg.filter.regularity_bin = detail::days(f["regularity_bin_days"].get<double>());
      get(f, "regularity_min_fraction", cfg.filter.regularity_min_fraction);
      get(f, "dbscan_eps", cfg.filter.dbscan_eps);
      get(f, "dbscan_min_pts", cfg.filter.dbscan_min_pts);
      if (f.contains("min_span_years")) cfg.filter.min_span = detail::years(f["min_span_years"].get<double>());
      get(f, "stationarity_weeks", cfg.filter.stationarity_weeks);
    }
    if (auto it = j.find("extract"); it != j.end()) {
      const json& e = *it;
      detail::check_keys(e,
                         {"bandwidth", "bandwidth_scale", "bandwidth_floor", "tolerance", "max_iterations",
                          "min_duration_years", "min_frequency"},
                         "extract");
      if (auto b = e.find("bandwidth"); b != e.end()) {
        cfg.mean_shift.bandwidth = b->is_null() ? std::nullopt : std::optional<double>(b->get<double>());
      }
      get(e, "bandwidth_scale", cfg.mean_shift.bandwidth_scale);
      get(e, "bandwidth_floor", cfg.mean_shift.bandwidth_floor);
      get(e, "tolerance", cfg.mean_shift.tolerance);
      get(e, "max_iterations", cfg.mean_shift.max_iterations);
      get(e, "min_duration_years", cfg.activity.min_duration_years);
      get(e, "min_frequency", cfg.activity.min_frequency);
    }
    if (auto it = j.find("dynamics"); it != j.end()) {
      const json& d = *it;
      detail::check_keys(d, {"step", "window_years", "rings", "min_span_years", "min_frequency"}, "dynamics");
      get(d, "step", cfg.step);
      if (d.contains("window_years")) cfg.dynamics.window = detail::years(d["window_years"].get<double>());
      get(d, "rings", cfg.dynamics.n_rings);
      if (d.contains("min_span_years")) cfg.dynamics.min_span = detail::years(d["min_span_years"].get<double>());
      get(d, "min_frequency", cfg.dynamics.min_frequency);
    }
    if (auto it = j.find("label"); it != j.end()) {
      const json& l = *it;
      detail::check_keys(l, {"expr", "providers", "truth", "keywords", "invert_b"}, "label");
      get(l, "expr", cfg.expr);
      if (auto p = l.find("providers"); p != l.end()) {
        cfg.providers.clear();
        for (const auto& s : *p) {
          fs::path path = s.get<std::string>();
          cfg.providers.push_back(path.is_absolute() || base.empty() ? path : base / path);
        }
      }
      detail::get_path(l, "truth", cfg.truth, base);
      detail::get_path(l, "keywords", cfg.keywords, base);
      get(l, "invert_b", cfg.invert_b);
    }
    if (auto it = j.find("assortativity"); it != j.end()) {
      const json& a = *it;
      detail::check_keys(a, {"labels", "max_ring", "report_threshold"}, "assortativity");
      detail::get_path(a, "labels", cfg.labels, base);
      get(a, "max_ring", cfg.assortativity.max_ring);
      get(a, "report_threshold", cfg.assortativity.report_threshold);
    }
    if (auto it = j.find("profiles"); it != j.end()) {
      const json& p = *it;
      detail::check_keys(p, {"groups", "k_min", "k_max", "restarts"}, "profiles");
      detail::get_path(p, "groups", cfg.groups, base);
      get(p, "k_min", cfg.profiles.k_min);
      get(p, "k_max", cfg.profiles.k_max);
      get(p, "restarts", cfg.profiles.restarts);
    }
    if (auto it = j.find("synth"); it != j.end()) {
      const json& s = *it;
      detail::check_keys(s, {"spec", "egos"}, "synth");
      detail::get_path(s, "spec", cfg.synth_spec, base);
      get(s, "egos", cfg.synth_egos);
    }
    if (auto it = j.find("stages"); it != j.end()) {
      detail::check_keys(*it, {"ingest", "filter", "label", "extract", "dynamics", "hashtags", "assortativity",
                               "profiles", "report"},
                         "stages");
      for (const auto& item : it->items()) cfg.stages[item.key()] = item.value().get<bool>();
    }
  } catch (const json::exception& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
  return cfg;
}

inline Config load_config(const fs::path& path, Config cfg = {}) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw UsageError("config " + path.string() + ": " + e.what());
  }
  return apply_config(j, std::move(cfg), path.parent_path());
}

inline json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

// Effective configuration, echoed into the run manifest.
inline json config_to_json(const Config& c) {
  json providers = json::array();
  for (const auto& p : c.providers) providers.push_back(p.string());
  json stages = json::object();
  for (const auto& s : stage_order()) stages[s] = c.stage_enabled(s);
  return {
      {"manifest", c.manifest.string()},
      {"seed", c.seed},
      {"jobs", c.jobs},
      {"filter",
       {{"abandonment_grace_days", to_days(c.filter.abandonment_grace)},
        {"regularity_bin_days", to_days(c.filter.regularity_bin)},
        {"regularity_min_fraction", c.filter.regularity_min_fraction},
        {"dbscan_eps", c.filter.dbscan_eps},
        {"dbscan_min_pts", c.filter.dbscan_min_pts},
        {"min_span_years", to_years(c.filter.min_span)},
        {"stationarity_weeks", c.filter.stationarity_weeks}}},
      {"extract",
       {{"bandwidth", optional_json(c.mean_shift.bandwidth)},
        {"bandwidth_scale", c.mean_shift.bandwidth_scale},
        {"bandwidth_floor", c.mean_shift.bandwidth_floor},
        {"tolerance", c.mean_shift.tolerance},
        {"max_iterations", c.mean_shift.max_iterations},
        {"min_duration_years", c.activity.min_duration_years},
        {"min_frequency", c.activity.min_frequency}}},
      {"dynamics",
       {{"step", c.step},
        {"window_years", to_years(c.dynamics.window)},
        {"rings", c.dynamics.n_rings},
        {"min_span_years", to_years(c.dynamics.min_span)},
        {"min_frequency", c.dynamics.min_frequency}}},
      {"label",
       {{"expr", c.expr},
        {"providers", providers},
        {"truth", c.truth.string()},
        {"keywords", c.keywords.string()},
        {"invert_b", c.invert_b}}},
      {"assortativity",
       {{"labels", c.labels.string()},
        {"max_ring", c.assortativity.max_ring},
        {"report_threshold", c.assortativity.report_threshold}}},
      {"profiles",
       {{"groups", c.groups.string()},
        {"k_min", c.profiles.k_min},
        {"k_max", c.profiles.k_max},
        {"restarts", c.profiles.restarts}}},
      {"stages", stages},
  };
}

// ---------------------------------------------------------------------------
// Plumbing

// Runs body(i) for i in [0, n) on up to `jobs` threads. The first captured
// exception (lowest index) is rethrown after all workers stop.
template <class F>
void parallel_for(std::size_t n, unsigned jobs, F&& body) {
  const auto workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, jobs), n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::vector<std::exception_ptr> errors(n);
  const auto run = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n || failed.load()) return;
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
        failed = true;
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(run);
  run();
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t col(std::string_view name, const std::string& source) const {
    return csv::Header(header).require(name, source);
  }
};

inline Table read_table(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  csv::Reader reader(in, path.string());
  Table t;
  auto h = reader.next_row();
  if (!h) throw DataError(path.string() + ": missing header");
  t.header = *h;
  while (auto row = reader.next_row()) {
    if (row->size() == 1 && row->front().empty()) continue;
    if (row->size() != t.header.size()) {
      throw DataError(path.string() + ":" + std::to_string(reader.line()) + ": expected " +
                      std::to_string(t.header.size()) + " columns");
    }
    t.rows.push_back(std::move(*row));
  }
  return t;
}

inline double to_double(const std::string& s, const std::string& where) {
  double v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw DataError(where + ": bad number '" + s + "'");
  return v;
}

inline std::int64_t to_int(const std::string& s, const std::string& where) {
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw DataError(where + ": bad integer '" + s + "'");
  return v;
}

inline std::string opt_num(const std::optional<double>& v) { return v ? csv::num(*v) : std::string(); }
inline std::string flag(bool b) { return b ? "true" : "false"; }

inline void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << content;
  if (!out) throw DataError("write failed: " + path.string());
}

inline fs::path require_artifact(const Config& cfg, const std::string& file, const std::string& stage) {
  const fs::path p = cfg.out / file;
  if (!fs::exists(p)) throw DependencyError("missing " + p.string() + "; run stage '" + stage + "' first");
  return p;
}

inline DatasetManifest require_manifest(const Config& cfg) {
  if (cfg.manifest.empty()) throw UsageError("no dataset manifest given (--manifest or config \"manifest\")");
  return load_manifest(cfg.manifest);
}

// Merges one stage's entry into <out>/run_manifest.json.
inline void record_stage(const Config& cfg, const std::string& stage, json info) {
  const fs::path p = cfg.out / "run_manifest.json";
  json run = json::object();
  if (std::ifstream in(p); in) {
    try {
      run = json::parse(in);
    } catch (const json::exception&) {
      run = json::object();
    }
  }
  run["tool"] = "egonet";
  run["version"] = kVersion;
  run["seed"] = cfg.seed;
  run["config"] = config_to_json(cfg);
  run["stages"][stage] = std::move(info);
  write_file(p, run.dump(2) + "\n");
}

struct Source {
  std::string user_id;
  fs::path path;
};

// Timeline sources in manifest order, as recorded by the ingest stage.
inline std::vector<Source> load_sources(const Config& cfg) {
  const auto p = require_artifact(cfg, "ingest.csv", "ingest");
  const Table t = read_table(p);
  const auto c_id = t.col("user_id", p.string());
  const auto c_src = t.col("source", p.string());
  const fs::path base = cfg.manifest.parent_path();
  std::vector<Source> out;
  for (const auto& r : t.rows) out.push_back({r[c_id], base / fs::path(r[c_src])});
  return out;
}

inline Timeline load_timeline(const Source& s, const DatasetManifest& m) { return parse_timeline_file(s.path, m); }

// ---------------------------------------------------------------------------
// Plots

namespace plots {

inline std::optional<Table> maybe_table(const fs::path& p) {
  if (!fs::exists(p)) return std::nullopt;
  return read_table(p);
}

inline std::optional<double> opt_cell(const std::string& s, const std::string& where) {
  if (s.empty()) return std::nullopt;
  return to_double(s, where);
}

inline void circles(const fs::path& out) {
  const std::string title = "Average circle size (modal tau cohort)";
  const auto summary = maybe_table(out / "circles_summary.csv");
  const auto dist = maybe_table(out / "tau_distribution.csv");
  if (!summary || !dist || summary->rows.empty() || dist->rows.empty()) {
    write_file(out / "circle_sizes.svg", svg::placeholder(title, "no circle data"));
    write_file(out / "tau_distribution.svg", svg::placeholder("Optimal number of circles", "no circle data"));
    return;
  }
  const std::string src = (out / "circles_summary.csv").string();
  std::string modal;
  std::int64_t best = -1;
  std::vector<std::string> tl;
  std::vector<double> tv;
  for (const auto& r : dist->rows) {
    const auto n = to_int(r[1], src);
    tl.push_back(r[0]);
    tv.push_back(static_cast<double>(n));
    if (n > best) {
      best = n;
      modal = r[0];
    }
  }
  write_file(out / "tau_distribution.svg",
             svg::bar_chart("Optimal number of circles", tl, tv, {}, "tau", "egos"));
  std::vector<std::string> labels;
  std::vector<double> values;
  std::vector<std::optional<double>> ci;
  const auto c_tau = summary->col("tau", src), c_circle = summary->col("circle", src);
  const auto c_mean = summary->col("size_mean", src), c_ci = summary->col("size_ci", src);
  for (const auto& r : summary->rows) {
    if (r[c_tau] != modal) continue;
    labels.push_back("C" + r[c_circle]);
    values.push_back(to_double(r[c_mean], src));
    ci.push_back(opt_cell(r[c_ci], src));
  }
  write_file(out / "circle_sizes.svg",
             svg::bar_chart(title + ", tau = " + modal, labels, values, ci, "circle", "alters"));
}

inline void hashtags(const fs::path& out) {
  const std::string title = "Hashtag-activated relationships per ring";
  const auto t = maybe_table(out / "hashtags.csv");
  std::vector<std::string> labels;
  std::vector<double> values;
  std::vector<std::optional<double>> ci;
  if (t) {
    const std::string src = (out / "hashtags.csv").string();
    const auto c_ring = t->col("ring", src), c_mean = t->col("pct_mean", src), c_ci = t->col("pct_ci", src);
    for (const auto& r : t->rows) {
      if (r[c_ring] == "all" || r[c_mean].empty()) continue;
      labels.push_back("R" + r[c_ring]);
      values.push_back(to_double(r[c_mean], src));
      ci.push_back(opt_cell(r[c_ci], src));
    }
  }
  write_file(out / "hashtags.svg", values.empty() ? svg::placeholder(title, "no hashtag data")
                                                  : svg::bar_chart(title, labels, values, ci, "ring", "% activated"));
}

inline void dynamics(const fs::path& out) {
  const auto t = maybe_table(out / "dynamics_summary.csv");
  std::map<std::string, svg::Series> jac, jmp;
  std::vector<std::string> rings;
  if (t) {
    const std::string src = (out / "dynamics_summary.csv").string();
    const auto c_step = t->col("step", src), c_ring = t->col("ring", src);
    const auto c_jm = t->col("jaccard_mean", src), c_jc = t->col("jaccard_ci", src);
    const auto c_pm = t->col("jump_mean", src), c_pc = t->col("jump_ci", src);
    for (const auto& r : t->rows) {
      auto& a = jac[r[c_step]];
      auto& b = jmp[r[c_step]];
      a.name = b.name = "step " + r[c_step];
      a.values.push_back(to_double(r[c_jm], src));
      a.ci.push_back(opt_cell(r[c_jc], src));
      b.values.push_back(to_double(r[c_pm], src));
      b.ci.push_back(opt_cell(r[c_pc], src));
      const std::string label = "R" + r[c_ring];
      if (std::find(rings.begin(), rings.end(), label) == rings.end()) rings.push_back(label);
    }
  }
  std::vector<svg::Series> js, ps;
  for (auto& [_, s] : jac) js.push_back(std::move(s));
  for (auto& [_, s] : jmp) ps.push_back(std::move(s));
  write_file(out / "dynamics_jaccard.svg", svg::line_chart("Jaccard index per ring", rings, js, "ring", "Jaccard"));
  write_file(out / "dynamics_jump.svg", svg::line_chart("Jump index per ring", rings, ps, "ring", "Jump"));
}

// One point per ring where both alter categories have a reported correlation;
// x = journalist alters, y = non-journalist alters.
inline std::vector<svg::ScatterPoint> assortativity_points(const Table& t, const std::string& src) {
  const auto c_ring = t.col("ring", src), c_alters = t.col("alters", src);
  const auto c_tau = t.col("tau", src), c_rep = t.col("reported", src);
  std::map<int, std::pair<std::optional<double>, std::optional<double>>> by_ring;
  for (const auto& r : t.rows) {
    if (r[c_rep] != "true") continue;
    auto& cell = by_ring[static_cast<int>(to_int(r[c_ring], src))];
    (r[c_alters] == "journalist" ? cell.first : cell.second) = to_double(r[c_tau], src);
  }
  std::vector<svg::ScatterPoint> pts;
  for (const auto& [ring, cell] : by_ring) {
    if (cell.first && cell.second) pts.push_back({*cell.first, *cell.second, 0, "R" + std::to_string(ring)});
  }
  return pts;
}

inline void assortativity(const fs::path& out) {
  const std::string title = "Popularity correlation: journalist vs other alters";
  const auto t = maybe_table(out / "assortativity.csv");
  std::vector<svg::ScatterPoint> pts;
  if (t) pts = assortativity_points(*t, (out / "assortativity.csv").string());
  write_file(out / "assortativity.svg",
             pts.empty() ? svg::placeholder(title, "no reported correlations")
                         : svg::scatter(title, pts, "tau (journalist alters)", "tau (non-journalist alters)", true));
}

inline void profiles(const fs::path& out) {
  const std::string title = "Tweet-type profiles (PCA)";
  const auto t = maybe_table(out / "profiles.csv");
  std::vector<svg::ScatterPoint> pts;
  if (t) {
    const std::string src = (out / "profiles.csv").string();
    const auto c_g = t->col("group", src), c_c = t->col("cluster", src);
    const auto c_x = t->col("pc1", src), c_y = t->col("pc2", src);
    for (const auto& r : t->rows) {
      pts.push_back({to_double(r[c_x], src), to_double(r[c_y], src), static_cast<int>(to_int(r[c_c], src)), r[c_g]});
    }
  }
  write_file(out / "profiles.svg",
             pts.empty() ? svg::placeholder(title, "no profiles") : svg::scatter(title, pts, "PC1", "PC2", false));
}

}  // namespace plots

// ---------------------------------------------------------------------------
// Stages

inline json run_ingest(const Config& cfg) {
  const auto m = require_manifest(cfg);
  struct Row {
    std::string user_id;
    std::size_t n = 0, direct = 0;
    std::string first, last, observability;
    double span_days = 0;
  };
  std::vector<Row> rows(m.timeline_paths.size());
  parallel_for(rows.size(), cfg.jobs, [&](std::size_t i) {
    const Timeline t = parse_timeline_file(m.timeline_paths[i], m);
    if (const auto v = validate_timeline(t); !v.empty()) {
      throw DataError(m.timeline_paths[i].string() + ": " + v.front());
    }
    Row& r = rows[i];
    r.user_id = t.ego_id();
    r.n = t.interactions.size();
    for (const auto& rec : t.interactions) r.direct += is_direct(rec.kind) ? 1 : 0;
    if (!t.interactions.empty()) {
      r.first = format_rfc3339(t.interactions.front().timestamp);
      r.last = format_rfc3339(t.interactions.back().timestamp);
      r.observability = std::string(to_string(classify_observability(t)));
    } else {
      r.observability = "empty";
    }
    r.span_days = to_days(t.observed_span());
  });
  std::set<std::string> seen;
  for (const auto& r : rows) {
    if (!seen.insert(r.user_id).second) throw DataError("manifest: two timelines for user " + r.user_id);
  }
  const auto profiles = parse_profiles(m.profile_path);

  std::ostringstream out;
  csv::write_row(out, {"user_id", "source", "interactions", "direct", "indirect", "first_ts", "last_ts",
                       "span_days", "observability"});
  std::size_t total = 0;
  const fs::path base = cfg.manifest.parent_path();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    total += r.n;
    const fs::path& p = m.timeline_paths[i];
    const std::string src = base.empty() ? p.string() : p.lexically_relative(base).string();
    csv::write_row(out, {r.user_id, src, csv::num(r.n), csv::num(r.direct), csv::num(r.n - r.direct), r.first, r.last,
                         csv::num(r.span_days), r.observability});
  }
  write_file(cfg.out / "ingest.csv", out.str());
  json info{{"dataset", m.dataset_name},
            {"timelines", rows.size()},
            {"interactions", total},
            {"profiles", profiles.profiles.size()},
            {"profile_warnings", profiles.warnings},
            {"download_time", format_rfc3339(m.download_time)},
            {"cap", m.cap},
            {"outputs", {"ingest.csv"}}};
  record_stage(cfg, "ingest", info);
  return info;
}

inline json run_filter(const Config& cfg) {
  const auto sources = load_sources(cfg);
  const auto m = require_manifest(cfg);
  struct Work {
    bool empty = true;
    ActivitySummary summary;
    std::vector<double> weekly;  // mean-normalized, fully observed users only
  };
  std::vector<Work> work(sources.size());
  parallel_for(sources.size(), cfg.jobs, [&](std::size_t i) {
    const Timeline t = load_timeline(sources[i], m);
    if (t.interactions.empty()) return;
    Work& w = work[i];
    w.empty = false;
    w.summary = summarize_activity(t, cfg.filter);
    if (w.summary.observability == Observability::FullyObserved) {
      w.weekly = mean_normalize(weekly_counts(t, cfg.filter.stationarity_weeks));
    }
  });

  std::vector<ActivityFeature> features;
  for (const auto& w : work) {
    if (!w.empty) features.push_back(w.summary.feature);
  }
  const auto outliers = features.size() >= 2
                            ? detect_frequency_outliers(features, cfg.filter.dbscan_eps, cfg.filter.dbscan_min_pts)
                            : std::set<std::string>{};
  FilterLedger ledger;
  ledger.input = sources.size();
  std::ostringstream out;
  csv::write_row(out, {"user_id", "observability", "engagement", "regularity", "outlier", "retained"});
  std::vector<double> sum(cfg.filter.stationarity_weeks, 0.0);
  std::vector<std::size_t> cnt(cfg.filter.stationarity_weeks, 0);
  for (std::size_t i = 0; i < work.size(); ++i) {
    const auto& w = work[i];
    if (w.empty) {
      ++ledger.empty;
      csv::write_row(out, {sources[i].user_id, "empty", "abandoned", "sporadic", "false", "false"});
      continue;
    }
    const auto l = make_label(w.summary, outliers.contains(w.summary.feature.user_id), cfg.filter);
    tally(ledger, l);
    csv::write_row(out, {l.user_id, std::string(to_string(l.observability)), std::string(to_string(l.engagement)),
                         std::string(to_string(l.regularity)), flag(l.outlier), flag(l.retained)});
    for (std::size_t k = 0; k < w.weekly.size(); ++k) {
      sum[k] += w.weekly[k];
      ++cnt[k];
    }
  }
  write_file(cfg.out / "filter.csv", out.str());

  std::ostringstream st;
  csv::write_row(st, {"week", "mean_normalized_activity", "users"});
  for (std::size_t k = 0; k < sum.size() && cnt[k] > 0; ++k) {
    csv::write_row(st, {csv::num(k), csv::num(sum[k] / static_cast<double>(cnt[k])), csv::num(cnt[k])});
  }
  write_file(cfg.out / "stationarity.csv", st.str());

  json info{{"ledger",
             {{"input", ledger.input},
              {"empty", ledger.empty},
              {"partially_observed", ledger.partially_observed},
              {"abandoned", ledger.abandoned},
              {"sporadic", ledger.sporadic},
              {"outlier", ledger.outlier},
              {"short_span", ledger.short_span},
              {"retained", ledger.retained}}},
            {"conserves", ledger.conserves()},
            {"outputs", {"filter.csv", "stationarity.csv"}}};
  record_stage(cfg, "filter", info);
  return info;
}

inline json run_label(const Config& cfg) {
  const auto m = require_manifest(cfg);
  const auto table = parse_profiles(m.profile_path);
  std::vector<std::shared_ptr<const AttributeProvider>> parts;
  for (const auto& p : cfg.providers) parts.push_back(std::make_shared<FileAttributeProvider>(FileAttributeProvider::load(p)));
  const CompositeProvider provider(std::move(parts));
  const auto expr = CombinatorExpr::parse(cfg.expr);
  const auto keywords = cfg.keywords.empty() ? KeywordSet::journalism_defaults() : KeywordSet::load(cfg.keywords);
  std::vector<std::string> warnings;
  const auto verdicts = label_profiles(table.profiles, provider, expr, keywords, cfg.invert_b, &warnings);

  std::ostringstream v, l;
  csv::write_row(v, {"user_id", "k", "g", "is_bot", "is_journalist"});
  csv::write_row(l, {"user_id", "is_journalist"});
  std::map<std::string, bool> predicted;
  std::size_t positives = 0;
  for (const auto& x : verdicts) {
    csv::write_row(v, {x.user_id, flag(x.k), flag(x.g), flag(x.is_bot), flag(x.journalist)});
    csv::write_row(l, {x.user_id, flag(x.journalist)});
    predicted[x.user_id] = x.journalist;
    positives += x.journalist ? 1 : 0;
  }
  write_file(cfg.out / "verdicts.csv", v.str());
  write_file(cfg.out / "labels.csv", l.str());
  json info{{"expr", cfg.expr},
            {"users", verdicts.size()},
            {"journalists", positives},
            {"warnings", warnings.size()},
            {"outputs", {"verdicts.csv", "labels.csv"}}};
  if (!cfg.truth.empty()) {
    const auto truth = load_label_file(cfg.truth);
    std::map<std::string, bool> scored;
    for (const auto& [id, _] : truth) {
      const auto it = predicted.find(id);
      if (it == predicted.end()) throw DataError(cfg.truth.string() + ": no profile for labelled user " + id);
      scored[id] = it->second;
    }
    const auto r = evaluate_predictions(scored, truth);
    const json report{{"expr", cfg.expr}, {"tp", r.tp},           {"fp", r.fp},   {"tn", r.tn},
                      {"fn", r.fn},       {"precision", r.precision}, {"recall", r.recall},
                      {"accuracy", r.accuracy}, {"f1", r.f1}, {"mcc", r.mcc}};
    write_file(cfg.out / "label_report.json", report.dump(2) + "\n");
    info["evaluation"] = report;
    info["outputs"].push_back("label_report.json");
  }
  record_stage(cfg, "label", info);
  return info;
}

inline json run_extract(const Config& cfg) {
  const auto sources = load_sources(cfg);
  const auto fpath = require_artifact(cfg, "filter.csv", "filter");
  const auto m = require_manifest(cfg);
  std::set<std::string> retained;
  {
    const Table f = read_table(fpath);
    const auto c_id = f.col("user_id", fpath.string()), c_r = f.col("retained", fpath.string());
    for (const auto& r : f.rows) {
      if (r[c_r] == "true") retained.insert(r[c_id]);
    }
  }
  std::vector<const Source*> egos;
  for (const auto& s : sources) {
    if (retained.contains(s.user_id)) egos.push_back(&s);
  }
  struct Result {
    CircleStructure cs;
    std::vector<Tie> active;
    std::size_t total_alters = 0;
  };
  std::vector<Result> results(egos.size());
  parallel_for(egos.size(), cfg.jobs, [&](std::size_t i) {
    const Timeline t = load_timeline(*egos[i], m);
    const auto ties = build_ties(t, t.download_time);
    auto net = active_network(ties, t.download_time, cfg.activity);
    net.ego_id = t.ego_id();
    results[i].cs = extract_circles(net, cfg.mean_shift);
    results[i].active = std::move(net.ties);
    results[i].total_alters = ties.size();
  });

  std::ostringstream c, r;
  csv::write_row(c, {"ego_id", "tau", "sizes", "ratios", "active_size", "total_alters", "bandwidth", "degenerate"});
  csv::write_row(r, {"ego_id", "ring", "alter_id", "frequency", "contacts", "duration_years",
                     "first_contact_hashtag", "hashtag_count"});
  std::vector<CircleStructure> valid;
  for (const auto& res : results) {
    const auto& cs = res.cs;
    const auto active = cs.circle_sizes.empty() ? 0 : cs.circle_sizes.back();
    csv::write_row(c, {cs.ego_id, csv::num(cs.tau),
                       csv::join(cs.circle_sizes, ';', [](std::size_t v) { return csv::num(v); }),
                       csv::join(cs.scaling_ratios, ';', [](double v) { return csv::num(v); }), csv::num(active),
                       csv::num(res.total_alters), csv::num(cs.bandwidth), flag(cs.degenerate)});
    std::map<std::string, const Tie*> by_alter;
    for (const auto& t : res.active) by_alter[t.alter_id] = &t;
    for (std::size_t ring = 0; ring < cs.ring_members.size(); ++ring) {
      for (const auto& id : cs.ring_members[ring]) {
        const Tie& t = *by_alter.at(id);
        csv::write_row(r, {cs.ego_id, csv::num(ring + 1), id, csv::num(t.frequency), csv::num(t.contacts()),
                           csv::num(t.duration_years), flag(t.first_contact_had_hashtag), csv::num(t.hashtag_count)});
      }
    }
    if (!cs.degenerate) valid.push_back(cs);
  }
  write_file(cfg.out / "circles.csv", c.str());
  write_file(cfg.out / "rings.csv", r.str());

  std::ostringstream s, d;
  csv::write_row(s, {"tau", "n_egos", "circle", "size_mean", "size_ci", "ratio_mean", "ratio_ci"});
  csv::write_row(d, {"tau", "n_egos", "fraction"});
  json info{{"egos", results.size()}, {"degenerate", results.size() - valid.size()}};
  if (!valid.empty()) {
    const auto pop = population_summary(valid);
    for (const auto& cohort : pop.cohorts) {
      for (int i = 0; i < cohort.tau; ++i) {
        const auto& sz = cohort.circle_sizes[static_cast<std::size_t>(i)];
        std::string rm, rc;
        if (i > 0) {
          const auto& ratio = cohort.scaling_ratios[static_cast<std::size_t>(i - 1)];
          rm = csv::num(ratio.mean);
          rc = opt_num(ratio.ci);
        }
        csv::write_row(s, {csv::num(cohort.tau), csv::num(cohort.n_egos), csv::num(i + 1), csv::num(sz.mean),
                           opt_num(sz.ci), rm, rc});
      }
    }
    for (const auto& [tau, n] : pop.tau_distribution) {
      csv::write_row(d, {csv::num(tau), csv::num(n), csv::num(static_cast<double>(n) / static_cast<double>(pop.n_egos))});
    }
    info["tau_mode"] = pop.tau_mode;
    info["tau_mean"] = pop.tau_mean;
    info["tau_median"] = pop.tau_median;
    info["active_size_mean"] = pop.active_size.mean;
  }
  write_file(cfg.out / "circles_summary.csv", s.str());
  write_file(cfg.out / "tau_distribution.csv", d.str());
  plots::circles(cfg.out);
  info["outputs"] = {"circles.csv", "rings.csv", "circles_summary.csv", "tau_distribution.csv", "circle_sizes.svg",
                     "tau_distribution.svg"};
  record_stage(cfg, "extract", info);
  return info;
}

inline json run_dynamics(const Config& cfg) {
  const auto cpath = require_artifact(cfg, "circles.csv", "extract");
  const auto sources = load_sources(cfg);
  const auto m = require_manifest(cfg);
  SnapshotOptions opt = cfg.dynamics;
  opt.step = parse_step(cfg.step);
  std::set<std::string> eligible;
  {
    const Table t = read_table(cpath);
    const auto c_id = t.col("ego_id", cpath.string()), c_tau = t.col("tau", cpath.string());
    const auto c_deg = t.col("degenerate", cpath.string());
    for (const auto& r : t.rows) {
      if (r[c_deg] != "true" && to_int(r[c_tau], cpath.string()) == opt.n_rings) eligible.insert(r[c_id]);
    }
  }
  std::vector<const Source*> egos;
  for (const auto& s : sources) {
    if (eligible.contains(s.user_id)) egos.push_back(&s);
  }
  std::vector<std::optional<DynamicsReport>> reports(egos.size());
  parallel_for(egos.size(), cfg.jobs, [&](std::size_t i) {
    const Timeline t = load_timeline(*egos[i], m);
    const auto series = build_snapshots(t, opt);
    if (series && series->snapshots.size() >= 2) reports[i] = dynamics_report(*series);
  });
  std::ostringstream d;
  csv::write_row(d, {"ego_id", "ring", "jaccard", "jump", "T"});
  std::vector<DynamicsReport> used;
  for (const auto& r : reports) {
    if (!r) continue;
    for (int ring = 0; ring < r->n_rings; ++ring) {
      const auto k = static_cast<std::size_t>(ring);
      csv::write_row(d, {r->ego_id, csv::num(ring + 1), csv::num(r->jaccard[k]), csv::num(r->jump[k]),
                         csv::num(r->windows_used)});
    }
    used.push_back(*r);
  }
  write_file(cfg.out / "dynamics.csv", d.str());
  std::ostringstream s;
  csv::write_row(s, {"step", "ring", "n_egos", "jaccard_mean", "jaccard_ci", "jump_mean", "jump_ci"});
  for (const auto& p : population_dynamics(used)) {
    for (std::size_t k = 0; k < p.jaccard.size(); ++k) {
      csv::write_row(s, {cfg.step, csv::num(k + 1), csv::num(p.n_egos), csv::num(p.jaccard[k].mean),
                         opt_num(p.jaccard[k].ci), csv::num(p.jump[k].mean), opt_num(p.jump[k].ci)});
    }
  }
  write_file(cfg.out / "dynamics_summary.csv", s.str());
  plots::dynamics(cfg.out);
  json info{{"step", cfg.step},
            {"rings", opt.n_rings},
            {"eligible", egos.size()},
            {"analysed", used.size()},
            {"too_short", egos.size() - used.size()},
            {"outputs", {"dynamics.csv", "dynamics_summary.csv", "dynamics_jaccard.svg", "dynamics_jump.svg"}}};
  record_stage(cfg, "dynamics", info);
  return info;
}

struct RingData {
  std::vector<CircleStructure> structures;
  std::vector<std::vector<Tie>> ties;  // parallel to structures
};

// Rebuilds per-ego ring membership and active ties from rings.csv.
inline RingData load_rings(const Config& cfg) {
  const auto p = require_artifact(cfg, "rings.csv", "extract");
  const std::string src = p.string();
  const Table t = read_table(p);
  const auto c_ego = t.col("ego_id", src), c_ring = t.col("ring", src), c_alter = t.col("alter_id", src);
  const auto c_f = t.col("frequency", src), c_h = t.col("first_contact_hashtag", src);
  const auto c_n = t.col("hashtag_count", src), c_c = t.col("contacts", src), c_d = t.col("duration_years", src);
  RingData out;
  std::map<std::string, std::size_t> index;
  for (const auto& r : t.rows) {
    auto [it, inserted] = index.try_emplace(r[c_ego], out.structures.size());
    if (inserted) {
      out.structures.emplace_back().ego_id = r[c_ego];
      out.ties.emplace_back();
    }
    auto& cs = out.structures[it->second];
    const auto ring = static_cast<std::size_t>(to_int(r[c_ring], src));
    if (ring < 1) throw DataError(src + ": ring numbers start at 1");
    if (cs.ring_members.size() < ring) {
      cs.ring_members.resize(ring);
      cs.ring_frequencies.resize(ring);
    }
    const double f = to_double(r[c_f], src);
    cs.ring_members[ring - 1].push_back(r[c_alter]);
    cs.ring_frequencies[ring - 1].push_back(f);
    Tie tie;
    tie.ego_id = r[c_ego];
    tie.alter_id = r[c_alter];
    tie.frequency = f;
    tie.n_reply = to_int(r[c_c], src);
    tie.duration_years = to_double(r[c_d], src);
    tie.first_contact_had_hashtag = r[c_h] == "true";
    tie.hashtag_count = to_int(r[c_n], src);
    out.ties[it->second].push_back(std::move(tie));
  }
  for (auto& cs : out.structures) {
    cs.tau = static_cast<int>(cs.ring_members.size());
    std::size_t cum = 0;
    for (const auto& ring : cs.ring_members) cs.circle_sizes.push_back(cum += ring.size());
  }
  return out;
}

inline json run_hashtags(const Config& cfg) {
  const auto data = load_rings(cfg);
  std::vector<EgoTies> egos;
  for (std::size_t i = 0; i < data.structures.size(); ++i) egos.push_back({&data.structures[i], &data.ties[i]});
  std::ostringstream out;
  csv::write_row(out, {"ring", "n_egos", "n_alters", "n_activated", "pct_mean", "pct_ci", "hashtags_activated_mean",
                       "hashtags_activated_ci", "hashtags_other_mean", "hashtags_other_ci", "freq_activated_mean",
                       "freq_activated_ci", "freq_other_mean", "freq_other_ci"});
  json info{{"egos", egos.size()}};
  if (!egos.empty()) {
    const auto st = hashtag_activation_stats(egos);
    const auto cell = [](const stats::MeanCi& m) {
      return std::pair{m.n ? csv::num(m.mean) : std::string(), opt_num(m.ci)};
    };
    const auto [pm, pc] = cell(st.pct_activated);
    csv::write_row(out, {"all", csv::num(st.n_egos), csv::num(st.total_ties), csv::num(st.activated_ties), pm, pc, "",
                         "", "", "", "", "", "", ""});
    for (const auto& r : st.rings) {
      const auto [a, b] = cell(r.pct_activated);
      const auto [c, d] = cell(r.hashtags_per_alter_activated);
      const auto [e, f] = cell(r.hashtags_per_alter_other);
      const auto [g, h] = cell(r.frequency_activated);
      const auto [i, j] = cell(r.frequency_other);
      csv::write_row(out, {csv::num(r.ring), csv::num(r.pct_activated.n), csv::num(r.n_alters),
                           csv::num(r.n_activated), a, b, c, d, e, f, g, h, i, j});
    }
    info["total_ties"] = st.total_ties;
    info["activated_ties"] = st.activated_ties;
  }
  write_file(cfg.out / "hashtags.csv", out.str());
  plots::hashtags(cfg.out);
  info["outputs"] = {"hashtags.csv", "hashtags.svg"};
  record_stage(cfg, "hashtags", info);
  return info;
}

inline json run_assortativity(const Config& cfg) {
  const auto data = load_rings(cfg);
  const fs::path labels_path = cfg.labels.empty() ? require_artifact(cfg, "labels.csv", "label") : cfg.labels;
  const auto labels = load_label_file(labels_path);
  const auto m = require_manifest(cfg);
  const auto profiles = parse_profiles(m.profile_path);
  const auto cells = assortativity_by_ring(data.structures, profiles.profiles, labels, cfg.assortativity);
  std::ostringstream out;
  csv::write_row(out, {"ring", "alters", "tau", "p_value", "n", "reported"});
  std::size_t reported = 0;
  for (const auto& c : cells) {
    csv::write_row(out, {csv::num(c.ring), c.journalist_alters ? "journalist" : "non_journalist", csv::num(c.tau),
                         csv::num(c.p_value), csv::num(c.n), flag(c.reported)});
    reported += c.reported ? 1 : 0;
  }
  write_file(cfg.out / "assortativity.csv", out.str());
  plots::assortativity(cfg.out);
  json info{{"cells", cells.size()},
            {"reported", reported},
            {"labels", labels_path.string()},
            {"outputs", {"assortativity.csv", "assortativity.svg"}}};
  record_stage(cfg, "assortativity", info);
  return info;
}

inline std::map<std::string, std::string> load_groups(const fs::path& path) {
  const Table t = read_table(path);
  const auto c_id = t.col("user_id", path.string()), c_g = t.col("group", path.string());
  std::map<std::string, std::string> out;
  for (const auto& r : t.rows) out[r[c_id]] = r[c_g];
  return out;
}

inline json run_profiles(const Config& cfg) {
  if (cfg.groups.empty()) throw UsageError("profiles: no groups file given (--groups or config profiles.groups)");
  const auto sources = load_sources(cfg);
  const auto m = require_manifest(cfg);
  const auto grouping = load_groups(cfg.groups);
  std::vector<TypeCounts> counts(sources.size());
  parallel_for(sources.size(), cfg.jobs, [&](std::size_t i) {
    if (grouping.contains(sources[i].user_id)) counts[i] = type_counts(load_timeline(sources[i], m));
  });
  std::map<std::string, TypeCounts> per_user;
  for (std::size_t i = 0; i < sources.size(); ++i) {
    if (grouping.contains(sources[i].user_id)) per_user[sources[i].user_id] = counts[i];
  }
  const auto profiles = tweet_type_profiles(per_user, grouping);
  ProfileClusteringOptions opt = cfg.profiles;
  opt.seed = cfg.seed;
  const auto pc = cluster_profiles(profiles, opt);
  std::ostringstream out, ks;
  csv::write_row(out, {"group", "reply_pct", "mention_pct", "retweet_pct", "indirect_pct", "tweets", "cluster", "pc1",
                       "pc2"});
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    const auto& p = profiles[i];
    csv::write_row(out, {p.group, csv::num(p.percent[0]), csv::num(p.percent[1]), csv::num(p.percent[2]),
                         csv::num(p.percent[3]), csv::num(p.tweets), csv::num(pc.labels[i]), csv::num(pc.pca[i][0]),
                         csv::num(pc.pca[i][1])});
  }
  csv::write_row(ks, {"k", "silhouette"});
  for (const auto& [k, s] : pc.silhouette_by_k) csv::write_row(ks, {csv::num(k), csv::num(s)});
  write_file(cfg.out / "profiles.csv", out.str());
  write_file(cfg.out / "profiles_k.csv", ks.str());
  plots::profiles(cfg.out);
  json info{{"groups", profiles.size()},
            {"k", pc.k},
            {"silhouette", pc.silhouette},
            {"degenerate", pc.degenerate},
            {"outputs", {"profiles.csv", "profiles_k.csv", "profiles.svg"}}};
  record_stage(cfg, "profiles", info);
  return info;
}

inline json run_report(const Config& cfg) {
  fs::create_directories(cfg.out);
  plots::circles(cfg.out);
  plots::dynamics(cfg.out);
  plots::hashtags(cfg.out);
  plots::assortativity(cfg.out);
  plots::profiles(cfg.out);
  json info{{"outputs",
             {"circle_sizes.svg", "tau_distribution.svg", "dynamics_jaccard.svg", "dynamics_jump.svg", "hashtags.svg",
              "assortativity.svg", "profiles.svg"}}};
  record_stage(cfg, "report", info);
  return info;
}

// Enabled stages in dependency order. Profiles are skipped without a groups
// file; assortativity and label run on whatever labels are configured.
inline json run_all(const Config& cfg) {
  json done = json::object();
  for (const auto& s : stage_order()) {
    if (!cfg.stage_enabled(s)) continue;
    if (s == "ingest") done[s] = run_ingest(cfg);
    else if (s == "filter") done[s] = run_filter(cfg);
    else if (s == "label") done[s] = run_label(cfg);
    else if (s == "extract") done[s] = run_extract(cfg);
    else if (s == "dynamics") done[s] = run_dynamics(cfg);
    else if (s == "hashtags") done[s] = run_hashtags(cfg);
    else if (s == "assortativity") done[s] = run_assortativity(cfg);
    else if (s == "profiles" && !cfg.groups.empty()) done[s] = run_profiles(cfg);
    else if (s == "report") done[s] = run_report(cfg);
  }
  return done;
}

// ---------------------------------------------------------------------------
// Synthetic datasets

inline SyntheticPopulationSpec synth_spec_from_json(const json& j) {
  SyntheticPopulationSpec s;
  json planted = j;
  if (planted.is_object()) planted.erase("population");
  s.ego = planted_spec_from_json(planted);
  if (auto it = j.find("population"); it != j.end()) {
    try {
      const json& p = *it;
      s.journalist_alter_fraction = p.value("journalist_alter_fraction", s.journalist_alter_fraction);
      s.assortative = p.value("assortative", s.assortative);
      s.nonjournalist_assortative_rings = p.value("nonjournalist_assortative_rings", s.nonjournalist_assortative_rings);
      s.popularity_noise = p.value("popularity_noise", s.popularity_noise);
      s.provider_miss_rate = p.value("provider_miss_rate", s.provider_miss_rate);
      s.bot_fraction = p.value("bot_fraction", s.bot_fraction);
    } catch (const json::exception& e) {
      throw DataError(std::string("synth spec: ") + e.what());
    }
  }
  return s;
}

// Writes a complete dataset: timelines/, profiles.csv, manifest.json,
// ground_truth.csv, providers.csv, truth.csv and groups.csv.
inline json run_synth(const Config& cfg) {
  SyntheticPopulationSpec spec;
  if (!cfg.synth_spec.empty()) {
    std::ifstream in(cfg.synth_spec);
    if (!in) throw DataError("cannot open synth spec " + cfg.synth_spec.string());
    try {
      spec = synth_spec_from_json(json::parse(in));
    } catch (const json::parse_error& e) {
      throw DataError("synth spec " + cfg.synth_spec.string() + ": " + e.what());
    }
  }
  spec.n_egos = cfg.synth_egos;
  spec.seed = cfg.seed;
  if (auto errs = validate_spec(spec.ego); !errs.empty()) throw DataError("invalid synth spec: " + errs.front());
  const fs::path dir = cfg.out;
  fs::create_directories(dir / "timelines");

  SyntheticPopulation pop;
  std::ofstream gt(dir / "ground_truth.csv", std::ios::binary);
  csv::write_row(gt, {"ego_id", "window_start", "ring", "alter_id"});
  json paths = json::array();
  std::size_t total = 0;
  Instant download;
  std::ostringstream groups;
  csv::write_row(groups, {"user_id", "group"});
  for (std::size_t e = 0; e < spec.n_egos; ++e) {
    const SyntheticEgo ego = generate_member(spec, e, pop);
    const auto& tl = ego.timeline;
    const std::string rel = "timelines/" + tl.ego_id() + ".jsonl";
    std::ofstream out(dir / rel, std::ios::binary);
    emit_timeline(tl, out);
    if (!out) throw DataError("cannot write " + (dir / rel).string());
    paths.push_back(rel);
    total += tl.interactions.size();
    download = tl.download_time;
    for (const auto& snap : ego.ground_truth.snapshots) {
      const auto start = format_rfc3339(snap.window_start);
      for (std::size_t r = 0; r < snap.rings.size(); ++r) {
        for (const auto& id : snap.rings[r]) csv::write_row(gt, {tl.ego_id(), start, csv::num(r + 1), id});
      }
    }
    csv::write_row(groups, {tl.ego_id(), "group" + std::to_string(e % 4)});
  }
  if (spec.n_egos == 0) download = spec.ego.start + static_cast<Seconds>(spec.ego.span_years * kSecondsPerYear);
  {
    std::ofstream out(dir / "profiles.csv", std::ios::binary);
    emit_profiles(pop.profiles, out);
  }
  std::ostringstream prov, truth;
  csv::write_row(prov, {"user_id", "is_journalist", "bot_score", "cap_score"});
  csv::write_row(truth, {"user_id", "is_journalist"});
  for (const auto& [id, row] : pop.provider) {
    csv::write_row(prov, {id, row.is_journalist ? flag(*row.is_journalist) : std::string(), csv::num(row.bot_score),
                          csv::num(row.cap_score)});
    csv::write_row(truth, {id, flag(pop.is_journalist.at(id))});
  }
  write_file(dir / "providers.csv", prov.str());
  write_file(dir / "truth.csv", truth.str());
  write_file(dir / "groups.csv", groups.str());
  const json manifest{{"dataset_name", "synthetic"},
                      {"timeline_paths", paths},
                      {"profile_path", "profiles.csv"},
                      {"download_time", format_rfc3339(download)},
                      {"cap", spec.ego.cap}};
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");
  return {{"egos", spec.n_egos}, {"interactions", total}, {"users", pop.profiles.size()}, {"out", dir.string()}};
}

}  // namespace egonet::pipeline
