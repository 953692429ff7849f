#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "egonet/labeling.hpp"
#include "egonet/random.hpp"

using namespace egonet;

namespace {

UserProfile bio(std::vector<std::string> tokens) {
  UserProfile p;
  p.user_id = "u";
  p.bio_tokens = std::move(tokens);
  return p;
}

double trunc2(double v) { return std::floor(v * 100.0 + 1e-9) / 100.0; }

}  // namespace

TEST(Keywords, Examples) {
  const auto kw = KeywordSet::journalism_defaults();
  EXPECT_EQ(kw.unigrams.size(), 6u);
  EXPECT_EQ(kw.bigrams.size(), 2u);
  EXPECT_TRUE(keyword_match(bio({"freelance", "journalist"}), kw));
  EXPECT_TRUE(keyword_match(bio({"staff", "writer"}), kw));
  EXPECT_TRUE(keyword_match(bio({"proud", "senior", "writer", "at", "x"}), kw));
  EXPECT_FALSE(keyword_match(bio({"writer", "staff"}), kw));
  EXPECT_FALSE(keyword_match(bio({"staff", "x", "writer"}), kw));
  EXPECT_FALSE(keyword_match(bio({}), kw));
  EXPECT_FALSE(keyword_match(bio({"journalism", "student"}), kw));
}

TEST(Keywords, DuplicationInvariant) {
  const auto kw = KeywordSet::journalism_defaults();
  const std::vector<std::string> vocab{"staff", "writer", "senior", "editor", "cat", "dog", "news", "critic"};
  SplitMix64 rng(2);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<std::string> toks;
    for (auto n = rng.below(5); n > 0; --n) toks.push_back(vocab[rng.below(vocab.size())]);
    // Each token repeated in place; concatenating the list would create new bigrams at the seam.
    std::vector<std::string> twice;
    for (const auto& t : toks) twice.insert(twice.end(), {t, t});
    EXPECT_EQ(keyword_match(bio(toks), kw), keyword_match(bio(twice), kw));
  }
}

TEST(Keywords, ParseFile) {
  std::istringstream in("# professions\nNurse\n\nhead nurse\n");
  const auto kw = KeywordSet::parse(in);
  EXPECT_EQ(kw.unigrams, std::set<std::string>{"nurse"});
  EXPECT_TRUE(keyword_match(bio({"head", "nurse"}), kw));
  std::istringstream bad("too many words here\n");
  EXPECT_THROW(KeywordSet::parse(bad), DataError);
}

TEST(BotVerdict, Boundaries) {
  EXPECT_TRUE(bot_verdict({std::nullopt, 0.9, 0.8}));
  EXPECT_FALSE(bot_verdict({std::nullopt, 0.9, 0.4}));
  EXPECT_FALSE(bot_verdict({std::nullopt, 0.5, 0.5}));
  EXPECT_TRUE(bot_verdict({std::nullopt, 0.5000001, 0.51}));
  std::vector<std::string> warnings;
  EXPECT_FALSE(bot_verdict({std::nullopt, 0.9, std::nullopt}, &warnings, "u7"));
  ASSERT_EQ(warnings.size(), 1u);
  EXPECT_NE(warnings[0].find("u7"), std::string::npos);
}

TEST(Combinator, Examples) {
  EXPECT_TRUE(evaluate_combinator(CombinatorExpr::parse("g | k"), {true, false, false}));
  EXPECT_FALSE(evaluate_combinator(CombinatorExpr::parse("k | (b & g)"), {false, true, true}));
  EXPECT_TRUE(evaluate_combinator(CombinatorExpr::parse("g & k"), {true, true, false}));
  EXPECT_TRUE(evaluate_combinator(CombinatorExpr::parse("k|(b&g)"), {false, true, false}));
}

TEST(Combinator, AndBindsTighter) {
  // k | b & g parses as k | (b & g).
  const auto e = CombinatorExpr::parse("k | b & g");
  const auto f = CombinatorExpr::parse("(k | b) & g");
  EXPECT_TRUE(e.evaluate({true, false, true}));
  EXPECT_FALSE(f.evaluate({true, false, true}));
}

TEST(Combinator, OrCommutesOverAllAssignments) {
  const std::vector<std::pair<std::string, std::string>> pairs{
      {"k", "g"}, {"b", "k"}, {"g", "(b & k)"}, {"(k|g)", "(b&g)"}};
  for (const auto& [x, y] : pairs) {
    const auto xy = CombinatorExpr::parse(x + " | " + y), yx = CombinatorExpr::parse(y + " | " + x);
    for (int m = 0; m < 8; ++m) {
      const CombinatorExpr::Atoms a{(m & 1) != 0, (m & 2) != 0, (m & 4) != 0};
      EXPECT_EQ(xy.evaluate(a), yx.evaluate(a));
      EXPECT_EQ(xy.evaluate(a, true), yx.evaluate(a, true));
    }
  }
}

TEST(Combinator, InvertB) {
  const auto b = CombinatorExpr::parse("b");
  EXPECT_TRUE(b.evaluate({false, false, false}));
  EXPECT_FALSE(b.evaluate({false, false, true}));
  EXPECT_FALSE(b.evaluate({false, false, false}, true));
  EXPECT_TRUE(b.evaluate({false, false, true}, true));
}

TEST(Combinator, Malformed) {
  for (const char* bad : {"x", "k | z", "k |", "(k", "k)", "", "kg", "k & & g"}) {
    EXPECT_THROW(CombinatorExpr::parse(bad), CombinatorError) << bad;
  }
}

TEST(Evaluation, ReferenceRowWithinRounding) {
  // UK, b | k.
  const auto r = EvaluationReport::from_counts(433, 78, 1, 1);
  EXPECT_NEAR(trunc2(r.precision), 0.84, 0.005);
  EXPECT_NEAR(trunc2(r.recall), 0.99, 0.005);
  EXPECT_NEAR(trunc2(r.accuracy), 0.84, 0.005);
  EXPECT_NEAR(trunc2(r.f1), 0.91, 0.005);
}

TEST(Evaluation, FromMaps) {
  std::map<std::string, bool> pred{{"a", true}, {"b", true}, {"c", false}, {"d", false}, {"e", true}};
  std::map<std::string, bool> truth{{"a", true}, {"b", false}, {"c", false}, {"d", true}, {"e", true}};
  const auto r = evaluate_predictions(pred, truth);
  EXPECT_EQ(r.tp, 2);
  EXPECT_EQ(r.fp, 1);
  EXPECT_EQ(r.tn, 1);
  EXPECT_EQ(r.fn, 1);
  EXPECT_DOUBLE_EQ(r.mcc, (2.0 * 1 - 1 * 1) / std::sqrt(3.0 * 3 * 2 * 2));

  pred.erase("c");
  truth["zz"] = true;
  try {
    evaluate_predictions(pred, truth);
    FAIL();
  } catch (const DataError& e) {
    const std::string m = e.what();
    EXPECT_NE(m.find("c (no prediction)"), std::string::npos);
    EXPECT_NE(m.find("zz"), std::string::npos);
  }
}

TEST(Providers, FileAndComposite) {
  std::istringstream a("user_id,is_journalist,bot_score,cap_score\nu1,1,,\nu2,,0.9,0.9\n");
  std::istringstream b("user_id,is_journalist,bot_score,cap_score\nu1,0,0.1,0.2\nu3,true,0.2,0.3\n");
  auto pa = std::make_shared<FileAttributeProvider>(FileAttributeProvider::parse(a, "a.csv"));
  auto pb = std::make_shared<FileAttributeProvider>(FileAttributeProvider::parse(b, "b.csv"));
  const CompositeProvider both({pa, pb});
  const auto u1 = both.lookup("u1");
  ASSERT_TRUE(u1);
  EXPECT_EQ(u1->is_journalist, true);
  EXPECT_EQ(u1->bot_score, 0.1);
  EXPECT_FALSE(both.lookup("nobody"));
  EXPECT_EQ(both.name(), "a.csv,b.csv");

  std::istringstream bad("user_id,bot_score\nu1,1.5\n");
  EXPECT_THROW(FileAttributeProvider::parse(bad, "bad.csv"), DataError);
}

TEST(Providers, LabelProfiles) {
  std::map<std::string, UserProfile> profiles;
  for (const auto& [id, toks] : std::vector<std::pair<std::string, std::vector<std::string>>>{
           {"k_only", {"reporter"}}, {"g_only", {"cook"}}, {"g_bot", {"cook"}}, {"none", {"cook"}}}) {
    profiles[id] = bio(toks);
    profiles[id].user_id = id;
  }
  const FileAttributeProvider prov("p", {{"g_only", {true, 0.1, 0.1}}, {"g_bot", {true, 0.9, 0.9}}});
  std::vector<std::string> warnings;
  const auto v = label_profiles(profiles, prov, CombinatorExpr::parse("k | (b & g)"),
                                KeywordSet::journalism_defaults(), false, &warnings);
  std::map<std::string, bool> got;
  for (const auto& x : v) got[x.user_id] = x.journalist;
  EXPECT_EQ(got, (std::map<std::string, bool>{{"g_bot", false}, {"g_only", true}, {"k_only", true}, {"none", false}}));
  EXPECT_TRUE(warnings.empty());
}
