#pragma once

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "egonet/core_model.hpp"
#include "egonet/csv.hpp"
#include "egonet/time.hpp"

namespace egonet {

namespace fs = std::filesystem;

struct DatasetManifest {
  std::string dataset_name;
  std::vector<fs::path> timeline_paths;
  fs::path profile_path;
  Instant download_time;
  std::size_t cap = kDefaultCap;
};

inline DatasetManifest manifest_from_json(const nlohmann::json& j, const fs::path& base_dir) {
  DatasetManifest m;
  try {
    m.dataset_name = j.at("dataset_name").get<std::string>();
    for (const auto& p : j.at("timeline_paths")) {
      fs::path path = p.get<std::string>();
      m.timeline_paths.push_back(path.is_absolute() ? path : base_dir / path);
    }
    fs::path prof = j.at("profile_path").get<std::string>();
    m.profile_path = prof.is_absolute() ? prof : base_dir / prof;
    m.download_time = parse_rfc3339(j.at("download_time").get<std::string>());
    const auto cap = j.value("cap", static_cast<std::int64_t>(kDefaultCap));
    if (cap < 1) throw DataError("manifest: cap must be >= 1");
    m.cap = static_cast<std::size_t>(cap);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("manifest: ") + e.what());
  } catch (const TimeParseError& e) {
    throw DataError(std::string("manifest: ") + e.what());
  }
  return m;
}

// Loads a manifest; relative paths resolve against the manifest's directory.
inline DatasetManifest load_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open manifest " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DataError("manifest " + path.string() + ": " + e.what());
  }
  auto m = manifest_from_json(j, path.parent_path());
  for (const auto& p : m.timeline_paths) {
    if (!fs::exists(p)) throw DataError("manifest: timeline file not found: " + p.string());
  }
  if (!fs::exists(m.profile_path)) throw DataError("manifest: profile file not found: " + m.profile_path.string());
  return m;
}

inline nlohmann::json manifest_to_json(const DatasetManifest& m, const fs::path& base_dir = {}) {
  nlohmann::json paths = nlohmann::json::array();
  auto rel = [&](const fs::path& p) {
    return base_dir.empty() ? p.string() : fs::relative(p, base_dir).string();
  };
  for (const auto& p : m.timeline_paths) paths.push_back(rel(p));
  return {{"dataset_name", m.dataset_name},
          {"timeline_paths", paths},
          {"profile_path", rel(m.profile_path)},
          {"download_time", format_rfc3339(m.download_time)},
          {"cap", m.cap}};
}

namespace detail {

inline bool is_word_byte(unsigned char c) { return std::isalnum(c) || c == '_' || c >= 0x80; }

inline std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace detail

// Maximal word-character runs after '#', lowercased, in order, duplicates kept.
inline std::vector<std::string> extract_hashtags(std::string_view text) {
  std::vector<std::string> tags;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '#') continue;
    std::size_t j = i + 1;
    while (j < text.size() && detail::is_word_byte(static_cast<unsigned char>(text[j]))) ++j;
    if (j > i + 1) tags.push_back(detail::ascii_lower(text.substr(i + 1, j - i - 1)));
    i = j - 1;
  }
  return tags;
}

inline std::string normalize_hashtag(std::string_view tag) {
  if (!tag.empty() && tag.front() == '#') tag.remove_prefix(1);
  return detail::ascii_lower(tag);
}

// Parses one interaction line. Errors carry "<source>:<line>".
inline InteractionRecord parse_interaction_line(std::string_view line, std::size_t line_no,
                                                const std::string& source) {
  const auto where = [&] { return source + ":" + std::to_string(line_no) + ": "; };
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(where() + "malformed line: " + e.what());
  }
  if (!j.is_object()) throw DataError(where() + "malformed line: not a JSON object");
  InteractionRecord r;
  try {
    r.ego_id = j.at("ego_id").get<std::string>();
    r.record_id = j.at("id").get<std::string>();
    const auto kind_str = j.at("kind").get<std::string>();
    auto kind = parse_kind(kind_str);
    if (!kind) throw DataError(where() + "record " + r.record_id + ": unknown kind '" + kind_str + "'");
    r.kind = *kind;
    if (auto it = j.find("alter_id"); it != j.end() && !it->is_null()) r.alter_id = it->get<std::string>();
    r.timestamp = parse_rfc3339(j.at("ts").get<std::string>());
    if (auto it = j.find("hashtags"); it != j.end() && !it->is_null()) {
      for (const auto& h : *it) r.hashtags.push_back(normalize_hashtag(h.get<std::string>()));
    } else if (auto t = j.find("text"); t != j.end() && t->is_string()) {
      r.hashtags = extract_hashtags(t->get<std::string>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(where() + "malformed line: " + e.what());
  } catch (const TimeParseError& e) {
    throw DataError(where() + "malformed line: " + e.what());
  }
  if (r.kind == InteractionKind::Indirect && r.alter_id) {
    throw DataError(where() + "record " + r.record_id + ": indirect record carries alter_id");
  }
  if (r.kind != InteractionKind::Indirect && !r.alter_id) {
    throw DataError(where() + "record " + r.record_id + ": " + std::string(to_string(r.kind)) +
                    " record without alter_id");
  }
  return r;
}

// Streams line-delimited interaction records into a Timeline. Records are
// stably sorted by timestamp; unknown fields are ignored.
inline Timeline parse_timeline_stream(std::istream& in, const std::string& source, Instant download_time,
                                      std::size_t cap, std::string fallback_ego_id = {}) {
  Timeline t;
  t.download_time = download_time;
  t.cap = cap;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    auto rec = parse_interaction_line(line, line_no, source);
    if (!t.interactions.empty() && rec.ego_id != t.interactions.front().ego_id) {
      throw DataError(source + ":" + std::to_string(line_no) + ": record " + rec.record_id +
                      ": ego_id differs from earlier records");
    }
    if (rec.timestamp > download_time) {
      throw DataError(source + ":" + std::to_string(line_no) + ": record " + rec.record_id +
                      ": timestamp after download_time");
    }
    if (t.interactions.size() == cap) {
      throw DataError(source + ": cap exceeded (" + std::to_string(cap) + " records)");
    }
    t.interactions.push_back(std::move(rec));
  }
  std::stable_sort(t.interactions.begin(), t.interactions.end(),
                   [](const auto& a, const auto& b) { return a.timestamp < b.timestamp; });
  t.profile.user_id = t.interactions.empty() ? std::move(fallback_ego_id) : t.interactions.front().ego_id;
  return t;
}

inline Timeline parse_timeline_file(const fs::path& path, const DatasetManifest& manifest) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open timeline " + path.string());
  return parse_timeline_stream(in, path.string(), manifest.download_time, manifest.cap, path.stem().string());
}

inline nlohmann::json interaction_to_json(const InteractionRecord& r) {
  nlohmann::json j{{"ego_id", r.ego_id},
                   {"alter_id", nullptr},
                   {"ts", format_rfc3339(r.timestamp)},
                   {"kind", to_string(r.kind)},
                   {"hashtags", r.hashtags},
                   {"id", r.record_id}};
  if (r.alter_id) j["alter_id"] = *r.alter_id;
  return j;
}

inline void emit_timeline(const Timeline& t, std::ostream& out) {
  for (const auto& r : t.interactions) out << interaction_to_json(r).dump() << '\n';
}

// ---------------------------------------------------------------------------
// Profiles

struct ProfileTable {
  std::map<std::string, UserProfile> profiles;
  std::vector<std::string> warnings;
};

inline ProfileTable parse_profiles_stream(std::istream& in, const std::string& source) {
  csv::Reader reader(in, source);
  auto header_row = reader.next_row();
  if (!header_row) throw DataError(source + ": empty profile table (header required)");
  const csv::Header header(*header_row);
  const auto c_id = header.require("user_id", source);
  const auto c_display = header.require("display_name", source);
  const auto c_screen = header.require("screen_name", source);
  const auto c_bio = header.require("bio_tokens", source);
  const auto c_followers = header.require("follower_count", source);
  const auto c_registered = header.require("registered_at", source);
  const std::size_t width = header_row->size();

  ProfileTable table;
  while (auto row = reader.next_row()) {
    const auto where = source + ":" + std::to_string(reader.line()) + ": ";
    if (row->size() == 1 && row->front().empty()) continue;
    if (row->size() < width) throw DataError(where + "expected " + std::to_string(width) + " columns");
    UserProfile p;
    p.user_id = (*row)[c_id];
    if (p.user_id.empty()) throw DataError(where + "empty user_id");
    p.display_name = (*row)[c_display];
    p.screen_name = (*row)[c_screen];
    for (auto& tok : csv::split((*row)[c_bio], ';')) {
      if (!tok.empty()) p.bio_tokens.push_back(std::move(tok));
    }
    const auto& fc = (*row)[c_followers];
    try {
      std::size_t used = 0;
      p.follower_count = std::stoll(fc, &used);
      if (used != fc.size()) throw std::invalid_argument(fc);
    } catch (const std::logic_error&) {
      throw DataError(where + "bad follower_count '" + fc + "'");
    }
    if (p.follower_count < 0) throw DataError(where + "negative follower_count for " + p.user_id);
    if (const auto& reg = (*row)[c_registered]; !reg.empty()) {
      try {
        p.registered_at = parse_rfc3339(reg);
      } catch (const TimeParseError& e) {
        throw DataError(where + e.what());
      }
    }
    if (table.profiles.contains(p.user_id)) {
      table.warnings.push_back(where + "duplicate user_id " + p.user_id + " (last row wins)");
    }
    table.profiles[p.user_id] = std::move(p);
  }
  return table;
}

inline ProfileTable parse_profiles(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open profile table " + path.string());
  return parse_profiles_stream(in, path.string());
}

inline void emit_profiles(const std::map<std::string, UserProfile>& profiles, std::ostream& out) {
  csv::write_row(out, {"user_id", "display_name", "screen_name", "bio_tokens", "follower_count", "registered_at"});
  for (const auto& [id, p] : profiles) {
    csv::write_row(out, {p.user_id, p.display_name, p.screen_name,
                         csv::join(p.bio_tokens, ';', [](const std::string& s) { return s; }),
                         std::to_string(p.follower_count),
                         p.registered_at ? format_rfc3339(*p.registered_at) : std::string()});
  }
}

// Attaches the owner's profile when the table has one.
inline void attach_profile(Timeline& t, const std::map<std::string, UserProfile>& profiles) {
  if (auto it = profiles.find(t.ego_id()); it != profiles.end()) t.profile = it->second;
}

}  // namespace egonet
