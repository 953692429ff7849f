#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "egonet/egonet_static.hpp"
#include "egonet/ingestion.hpp"
#include "egonet/random.hpp"
#include "fixtures.hpp"

using namespace egonet;
using fixture::kT0;

namespace {

const Instant kDownload = parse_rfc3339("2022-01-01T00:00:00Z");

Timeline parse(const std::string& text, std::size_t cap = kDefaultCap) {
  std::istringstream in(text);
  return parse_timeline_stream(in, "t.jsonl", kDownload, cap);
}

std::string line(const std::string& id, const std::string& ts, const std::string& kind, const std::string& alter,
                 const std::string& extra = {}) {
  return R"({"ego_id":"e","alter_id":)" + (alter.empty() ? std::string("null") : "\"" + alter + "\"") +
         R"(,"ts":")" + ts + R"(","kind":")" + kind + R"(","hashtags":[],"id":")" + id + "\"" + extra + "}\n";
}

}  // namespace

TEST(Ingestion, ThreeWellFormedLines) {
  const auto t = parse(line("1", "2020-01-01T00:00:00Z", "reply", "a") + line("2", "2020-01-02T00:00:00Z", "indirect", "") +
                       line("3", "2020-01-03T00:00:00Z", "mention", "b"));
  EXPECT_EQ(t.interactions.size(), 3u);
  EXPECT_EQ(t.ego_id(), "e");
  EXPECT_TRUE(validate_timeline(t).empty());
}

TEST(Ingestion, IndirectWithAlterNamesRecord) {
  try {
    parse(line("1", "2020-01-01T00:00:00Z", "reply", "a") + line("rec-77", "2020-01-02T00:00:00Z", "indirect", "a"));
    FAIL();
  } catch (const DataError& e) {
    const std::string m = e.what();
    EXPECT_NE(m.find("rec-77"), std::string::npos);
    EXPECT_NE(m.find("t.jsonl:2"), std::string::npos);
  }
}

TEST(Ingestion, ReplyWithoutAlterNamesRecord) {
  try {
    parse(line("rec-9", "2020-01-01T00:00:00Z", "reply", ""));
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("rec-9"), std::string::npos);
  }
}

TEST(Ingestion, MalformedLineNamesLineNumber) {
  try {
    parse(line("1", "2020-01-01T00:00:00Z", "reply", "a") + "\n{not json\n");
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("t.jsonl:3"), std::string::npos);
  }
  EXPECT_THROW(parse(line("1", "2020/01/01", "reply", "a")), DataError);
  EXPECT_THROW(parse(line("1", "2020-01-01T00:00:00Z", "like", "a")), DataError);
}

TEST(Ingestion, UnknownFieldsIgnoredAndTextFallback) {
  const auto t = parse(R"({"ego_id":"e","alter_id":"a","ts":"2020-01-01T00:00:00Z","kind":"retweet","id":"1",)"
                       R"("text":"Breaking #News on #COVID19","lang":"en"})"
                       "\n");
  ASSERT_EQ(t.interactions.size(), 1u);
  EXPECT_EQ(t.interactions[0].hashtags, (std::vector<std::string>{"news", "covid19"}));
}

TEST(Ingestion, UnsortedInputIsStablySorted) {
  const auto t = parse(line("late", "2020-03-01T00:00:00Z", "reply", "a") + line("x1", "2020-01-01T00:00:00Z", "reply", "a") +
                       line("x2", "2020-01-01T00:00:00Z", "mention", "b") + line("x3", "2020-01-01T00:00:00Z", "reply", "c"));
  ASSERT_EQ(t.interactions.size(), 4u);
  EXPECT_EQ(t.interactions[0].record_id, "x1");
  EXPECT_EQ(t.interactions[1].record_id, "x2");
  EXPECT_EQ(t.interactions[2].record_id, "x3");
  EXPECT_EQ(t.interactions[3].record_id, "late");
}

TEST(Ingestion, CapOverflowRejected) {
  std::string text;
  for (int i = 0; i < 4; ++i) text += line(std::to_string(i), "2020-01-01T00:00:00Z", "indirect", "");
  EXPECT_NO_THROW(parse(text, 4));
  EXPECT_THROW(parse(text, 3), DataError);
}

TEST(Ingestion, TimestampAfterDownloadRejected) {
  EXPECT_THROW(parse(line("1", "2023-01-01T00:00:00Z", "reply", "a")), DataError);
}

TEST(Ingestion, TwoRetweetsOverTwoYearsGiveUnitFrequency) {
  // 10 records; alter A gets 2 retweets, the first exactly 2.0 years before download.
  std::string text = line("0", format_rfc3339(kDownload - 2 * kSecondsPerYear), "retweet", "A") +
                     line("1", "2021-06-01T00:00:00Z", "retweet", "A");
  for (int i = 2; i < 10; ++i) text += line(std::to_string(i), "2021-02-01T00:00:00Z", i % 2 ? "indirect" : "reply", i % 2 ? "" : "B");
  const auto t = parse(text);
  ASSERT_EQ(t.interactions.size(), 10u);
  const auto ties = build_ties(t, kDownload);
  ASSERT_EQ(ties.front().alter_id, "A");
  EXPECT_DOUBLE_EQ(ties.front().frequency, 1.0);
}

TEST(Ingestion, Hashtags) {
  EXPECT_EQ(extract_hashtags("Breaking #News on #COVID19"), (std::vector<std::string>{"news", "covid19"}));
  EXPECT_TRUE(extract_hashtags("no tags here").empty());
  EXPECT_EQ(extract_hashtags("#A #a #A"), (std::vector<std::string>{"a", "a", "a"}));
  EXPECT_EQ(extract_hashtags("#snake_case, #x-y #"), (std::vector<std::string>{"snake_case", "x"}));
}

TEST(Ingestion, EmitParseRoundTrip) {
  SplitMix64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    Timeline t;
    t.profile.user_id = "e";
    t.download_time = kDownload;
    Instant ts = kT0;
    const auto n = rng.below(40);
    for (std::uint64_t i = 0; i < n; ++i) {
      ts = ts + static_cast<Seconds>(rng.below(3) * 3600);  // equal timestamps happen
      const auto kind = static_cast<InteractionKind>(rng.below(4));
      std::vector<std::string> tags;
      for (std::uint64_t h = rng.below(3); h > 0; --h) tags.push_back("tag" + std::to_string(rng.below(5)));
      t.interactions.push_back(fixture::rec("e", kind == InteractionKind::Indirect ? std::nullopt
                                                                                  : std::optional<std::string>("a" + std::to_string(rng.below(6))),
                                            ts, kind, tags, "r" + std::to_string(i)));
    }
    std::stringstream buf;
    emit_timeline(t, buf);
    const auto back = parse_timeline_stream(buf, "rt", kDownload, kDefaultCap, "e");
    EXPECT_EQ(back, t);
  }
}

TEST(Ingestion, Profiles) {
  std::istringstream two("user_id,display_name,screen_name,bio_tokens,follower_count,registered_at\n"
                         "u1,Ann,ann,staff;writer,10,2010-01-01T00:00:00Z\n"
                         "u2,\"Bob, Jr\",bob,,0,\n");
  const auto t = parse_profiles_stream(two, "p.csv");
  ASSERT_EQ(t.profiles.size(), 2u);
  EXPECT_EQ(t.profiles.at("u1").bio_tokens, (std::vector<std::string>{"staff", "writer"}));
  EXPECT_TRUE(t.profiles.at("u2").bio_tokens.empty());
  EXPECT_EQ(t.profiles.at("u2").display_name, "Bob, Jr");
  EXPECT_FALSE(t.profiles.at("u2").registered_at.has_value());

  std::istringstream neg("user_id,display_name,screen_name,bio_tokens,follower_count,registered_at\nu1,A,a,,-5,\n");
  EXPECT_THROW(parse_profiles_stream(neg, "p.csv"), DataError);

  std::istringstream missing("user_id,display_name,screen_name,bio_tokens,registered_at\n");
  try {
    parse_profiles_stream(missing, "p.csv");
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("follower_count"), std::string::npos);
  }

  std::istringstream dup("user_id,display_name,screen_name,bio_tokens,follower_count,registered_at\n"
                         "u1,A,a,,1,\nu1,B,b,,2,\n");
  const auto d = parse_profiles_stream(dup, "p.csv");
  EXPECT_EQ(d.profiles.at("u1").follower_count, 2);
  EXPECT_EQ(d.warnings.size(), 1u);
}

TEST(Ingestion, ProfilesRoundTrip) {
  std::map<std::string, UserProfile> m;
  UserProfile p;
  p.user_id = "u1";
  p.display_name = "A \"quoted\", name";
  p.screen_name = "a";
  p.bio_tokens = {"senior", "writer"};
  p.follower_count = 1234;
  p.registered_at = kT0;
  m[p.user_id] = p;
  std::stringstream buf;
  emit_profiles(m, buf);
  EXPECT_EQ(parse_profiles_stream(buf, "rt").profiles, m);
}

TEST(Ingestion, ManifestResolvesRelativePaths) {
  const auto dir = std::filesystem::temp_directory_path() / "egonet_manifest_test";
  std::filesystem::create_directories(dir / "tl");
  std::ofstream(dir / "tl" / "e.jsonl") << line("1", "2020-01-01T00:00:00Z", "reply", "a");
  std::ofstream(dir / "p.csv") << "user_id,display_name,screen_name,bio_tokens,follower_count,registered_at\n";
  std::ofstream(dir / "m.json") << R"({"dataset_name":"d","timeline_paths":["tl/e.jsonl"],"profile_path":"p.csv",)"
                                   R"("download_time":"2022-01-01T00:00:00Z","cap":10})";
  const auto m = load_manifest(dir / "m.json");
  EXPECT_EQ(m.cap, 10u);
  EXPECT_EQ(m.timeline_paths.at(0), dir / "tl" / "e.jsonl");
  const auto t = parse_timeline_file(m.timeline_paths[0], m);
  EXPECT_EQ(t.interactions.size(), 1u);

  std::ofstream(dir / "bad.json") << R"({"dataset_name":"d","timeline_paths":["nope.jsonl"],"profile_path":"p.csv",)"
                                     R"("download_time":"2022-01-01T00:00:00Z"})";
  EXPECT_THROW(load_manifest(dir / "bad.json"), DataError);
  std::filesystem::remove_all(dir);
}
