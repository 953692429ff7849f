#pragma once

#include <cctype>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "egonet/core_model.hpp"
#include "egonet/csv.hpp"

namespace egonet {

// ---------------------------------------------------------------------------
// Keyword matching on normalized bio tokens

struct KeywordSet {
  std::set<std::string> unigrams;
  std::set<std::pair<std::string, std::string>> bigrams;

  static KeywordSet journalism_defaults() {
    KeywordSet k;
    k.unigrams = {"critic", "columnist", "correspondent", "editor", "journalist", "reporter"};
    k.bigrams = {{"staff", "writer"}, {"senior", "writer"}};
    return k;
  }

  // One keyword per line; two whitespace-separated words form a bigram.
  // Blank lines and lines starting with '#' are skipped.
  static KeywordSet parse(std::istream& in, const std::string& source = "<keywords>") {
    KeywordSet k;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      std::vector<std::string> words;
      std::string w;
      for (char c : line) {
        if (std::isspace(static_cast<unsigned char>(c))) {
          if (!w.empty()) words.push_back(std::move(w));
          w.clear();
        } else {
          w.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        }
      }
      if (!w.empty()) words.push_back(std::move(w));
      if (words.empty() || words.front().front() == '#') continue;
      if (words.size() == 1) {
        k.unigrams.insert(words[0]);
      } else if (words.size() == 2) {
        k.bigrams.emplace(words[0], words[1]);
      } else {
        throw DataError(source + ":" + std::to_string(line_no) + ": keywords must be one or two words");
      }
    }
    return k;
  }

  static KeywordSet load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open keyword file " + path.string());
    return parse(in, path.string());
  }
};

inline bool keyword_match(const UserProfile& profile, const KeywordSet& keywords) {
  const auto& toks = profile.bio_tokens;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    if (keywords.unigrams.contains(toks[i])) return true;
    if (i + 1 < toks.size() && keywords.bigrams.contains({toks[i], toks[i + 1]})) return true;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Attribute providers

struct ProviderRecord {
  std::optional<bool> is_journalist;
  std::optional<double> bot_score;
  std::optional<double> cap_score;
};

class AttributeProvider {
 public:
  virtual ~AttributeProvider() = default;
  virtual std::string name() const = 0;
  virtual std::optional<ProviderRecord> lookup(const std::string& user_id) const = 0;
};

// Backed by a CSV with columns user_id, is_journalist, bot_score, cap_score;
// empty cells mean "unknown".
class FileAttributeProvider final : public AttributeProvider {
 public:
  FileAttributeProvider(std::string name, std::map<std::string, ProviderRecord> records)
      : name_(std::move(name)), records_(std::move(records)) {}

  static FileAttributeProvider parse(std::istream& in, const std::string& source) {
    csv::Reader reader(in, source);
    auto header_row = reader.next_row();
    if (!header_row) throw DataError(source + ": empty provider file (header required)");
    const csv::Header header(*header_row);
    const auto c_id = header.require("user_id", source);
    const auto c_j = header.find("is_journalist");
    const auto c_bot = header.find("bot_score");
    const auto c_cap = header.find("cap_score");
    std::map<std::string, ProviderRecord> records;
    while (auto row = reader.next_row()) {
      const auto where = source + ":" + std::to_string(reader.line()) + ": ";
      if (row->size() == 1 && row->front().empty()) continue;
      if (row->size() < header_row->size()) throw DataError(where + "short row");
      ProviderRecord rec;
      if (c_j && !(*row)[*c_j].empty()) rec.is_journalist = parse_bool((*row)[*c_j], where);
      if (c_bot && !(*row)[*c_bot].empty()) rec.bot_score = parse_score((*row)[*c_bot], where);
      if (c_cap && !(*row)[*c_cap].empty()) rec.cap_score = parse_score((*row)[*c_cap], where);
      records[(*row)[c_id]] = rec;
    }
    return FileAttributeProvider(source, std::move(records));
  }

  static FileAttributeProvider load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open provider file " + path.string());
    return parse(in, path.string());
  }

  std::string name() const override { return name_; }

  std::optional<ProviderRecord> lookup(const std::string& user_id) const override {
    auto it = records_.find(user_id);
    if (it == records_.end()) return std::nullopt;
    return it->second;
  }

  static bool parse_bool(const std::string& s, const std::string& where) {
    if (s == "1" || s == "true" || s == "True" || s == "TRUE") return true;
    if (s == "0" || s == "false" || s == "False" || s == "FALSE") return false;
    throw DataError(where + "bad boolean '" + s + "'");
  }

 private:
  static double parse_score(const std::string& s, const std::string& where) {
    double v = 0;
    try {
      std::size_t used = 0;
      v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
    } catch (const std::logic_error&) {
      throw DataError(where + "bad score '" + s + "'");
    }
    if (v < 0.0 || v > 1.0) throw DataError(where + "score out of [0,1]: '" + s + "'");
    return v;
  }

  std::string name_;
  std::map<std::string, ProviderRecord> records_;
};

// Field-wise merge: the first provider that knows a field wins.
class CompositeProvider final : public AttributeProvider {
 public:
  explicit CompositeProvider(std::vector<std::shared_ptr<const AttributeProvider>> parts) : parts_(std::move(parts)) {}

  std::string name() const override {
    std::string n;
    for (const auto& p : parts_) n += (n.empty() ? "" : ",") + p->name();
    return n;
  }

  std::optional<ProviderRecord> lookup(const std::string& user_id) const override {
    std::optional<ProviderRecord> out;
    for (const auto& p : parts_) {
      auto r = p->lookup(user_id);
      if (!r) continue;
      if (!out) out.emplace();
      if (!out->is_journalist) out->is_journalist = r->is_journalist;
      if (!out->bot_score) out->bot_score = r->bot_score;
      if (!out->cap_score) out->cap_score = r->cap_score;
    }
    return out;
  }

 private:
  std::vector<std::shared_ptr<const AttributeProvider>> parts_;
};

// Bot iff both scores exceed 0.5. Unknown scores count as human and leave a
// warning when `warnings` is given.
inline bool bot_verdict(const ProviderRecord& rec, std::vector<std::string>* warnings = nullptr,
                        std::string_view user_id = {}) {
  if (!rec.bot_score || !rec.cap_score) {
    if (warnings) warnings->push_back("missing bot/cap score for '" + std::string(user_id) + "'; treated as human");
    return false;
  }
  return *rec.bot_score > 0.5 && *rec.cap_score > 0.5;
}

// ---------------------------------------------------------------------------
// Boolean combinators over the atoms k (keyword), g (provider says journalist)
// and b (passes the bot check). Grammar, '&' binding tighter than '|':
//   expr := term ('|' term)* ; term := factor ('&' factor)* ;
//   factor := atom | '(' expr ')'

struct CombinatorError : DataError {
  using DataError::DataError;
};

class CombinatorExpr {
 public:
  enum class Op { Atom, And, Or };

  static CombinatorExpr parse(std::string_view text) {
    Parser p{text};
    auto root = p.parse_expr();
    p.skip_ws();
    if (p.pos != text.size()) p.fail("unexpected '" + std::string(1, text[p.pos]) + "'");
    CombinatorExpr e;
    e.root_ = std::move(root);
    e.text_ = std::string(text);
    return e;
  }

  struct Atoms {
    bool k = false;
    bool g = false;
    bool is_bot = false;
  };

  // Atom b is "not a bot" unless invert_b is set, in which case b = is_bot.
  bool evaluate(const Atoms& a, bool invert_b = false) const { return eval(*root_, a, invert_b); }

  const std::string& text() const { return text_; }

 private:
  struct Node {
    Op op = Op::Atom;
    char atom = 0;
    std::unique_ptr<Node> lhs, rhs;
  };

  struct Parser {
    std::string_view s;
    std::size_t pos = 0;

    [[noreturn]] void fail(const std::string& why) const {
      throw CombinatorError("combinator '" + std::string(s) + "' at " + std::to_string(pos) + ": " + why);
    }
    void skip_ws() {
      while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    std::unique_ptr<Node> parse_expr() {
      auto lhs = parse_term();
      for (skip_ws(); pos < s.size() && s[pos] == '|'; skip_ws()) {
        ++pos;
        lhs = join(Op::Or, std::move(lhs), parse_term());
      }
      return lhs;
    }
    std::unique_ptr<Node> parse_term() {
      auto lhs = parse_factor();
      for (skip_ws(); pos < s.size() && s[pos] == '&'; skip_ws()) {
        ++pos;
        lhs = join(Op::And, std::move(lhs), parse_factor());
      }
      return lhs;
    }
    std::unique_ptr<Node> parse_factor() {
      skip_ws();
      if (pos >= s.size()) fail("unexpected end of expression");
      if (s[pos] == '(') {
        ++pos;
        auto inner = parse_expr();
        skip_ws();
        if (pos >= s.size() || s[pos] != ')') fail("missing ')'");
        ++pos;
        return inner;
      }
      const char c = s[pos];
      if (c != 'k' && c != 'g' && c != 'b') fail("unknown atom '" + std::string(1, c) + "'");
      ++pos;
      if (pos < s.size() && std::isalnum(static_cast<unsigned char>(s[pos]))) fail("unknown atom");
      auto n = std::make_unique<Node>();
      n->atom = c;
      return n;
    }
    static std::unique_ptr<Node> join(Op op, std::unique_ptr<Node> l, std::unique_ptr<Node> r) {
      auto n = std::make_unique<Node>();
      n->op = op;
      n->lhs = std::move(l);
      n->rhs = std::move(r);
      return n;
    }
  };

  static bool eval(const Node& n, const Atoms& a, bool invert_b) {
    switch (n.op) {
      case Op::And: return eval(*n.lhs, a, invert_b) && eval(*n.rhs, a, invert_b);
      case Op::Or: return eval(*n.lhs, a, invert_b) || eval(*n.rhs, a, invert_b);
      case Op::Atom: break;
    }
    switch (n.atom) {
      case 'k': return a.k;
      case 'g': return a.g;
      default: return invert_b ? a.is_bot : !a.is_bot;
    }
  }

  std::shared_ptr<const Node> root_;
  std::string text_;
};

inline bool evaluate_combinator(const CombinatorExpr& expr, const CombinatorExpr::Atoms& atoms,
                                bool invert_b = false) {
  return expr.evaluate(atoms, invert_b);
}

// Confusion counts with "journalist" (true) as the positive class.
inline EvaluationReport evaluate_predictions(const std::map<std::string, bool>& predicted,
                                             const std::map<std::string, bool>& truth) {
  std::vector<std::string> missing;
  for (const auto& [id, _] : truth) {
    if (!predicted.contains(id)) missing.push_back(id + " (no prediction)");
  }
  for (const auto& [id, _] : predicted) {
    if (!truth.contains(id)) missing.push_back(id + " (no truth label)");
  }
  if (!missing.empty()) {
    std::string msg = "evaluate_predictions: key sets differ:";
    for (const auto& m : missing) msg += " " + m;
    throw DataError(msg);
  }
  std::int64_t tp = 0, fp = 0, tn = 0, fn = 0;
  for (const auto& [id, p] : predicted) {
    const bool t = truth.at(id);
    if (p && t) ++tp;
    else if (p && !t) ++fp;
    else if (!p && !t) ++tn;
    else ++fn;
  }
  return EvaluationReport::from_counts(tp, fp, tn, fn);
}

struct LabelVerdict {
  std::string user_id;
  bool k = false;
  bool g = false;
  bool is_bot = false;
  bool journalist = false;
};

// Applies keyword matching, provider lookups and the combinator to every profile.
inline std::vector<LabelVerdict> label_profiles(const std::map<std::string, UserProfile>& profiles,
                                                const AttributeProvider& provider, const CombinatorExpr& expr,
                                                const KeywordSet& keywords, bool invert_b = false,
                                                std::vector<std::string>* warnings = nullptr) {
  std::vector<LabelVerdict> out;
  out.reserve(profiles.size());
  for (const auto& [id, prof] : profiles) {
    LabelVerdict v;
    v.user_id = id;
    v.k = keyword_match(prof, keywords);
    if (auto rec = provider.lookup(id)) {
      v.g = rec->is_journalist.value_or(false);
      v.is_bot = bot_verdict(*rec, warnings, id);
    }
    v.journalist = expr.evaluate({v.k, v.g, v.is_bot}, invert_b);
    out.push_back(v);
  }
  return out;
}

// Reads a two-column (user_id, is_journalist) label file.
inline std::map<std::string, bool> parse_label_file(std::istream& in, const std::string& source) {
  csv::Reader reader(in, source);
  auto header_row = reader.next_row();
  if (!header_row) throw DataError(source + ": empty label file (header required)");
  const csv::Header header(*header_row);
  const auto c_id = header.require("user_id", source);
  const auto c_j = header.require("is_journalist", source);
  std::map<std::string, bool> out;
  while (auto row = reader.next_row()) {
    if (row->size() == 1 && row->front().empty()) continue;
    const auto where = source + ":" + std::to_string(reader.line()) + ": ";
    if (row->size() < header_row->size()) throw DataError(where + "short row");
    out[(*row)[c_id]] = FileAttributeProvider::parse_bool((*row)[c_j], where);
  }
  return out;
}

inline std::map<std::string, bool> load_label_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open label file " + path.string());
  return parse_label_file(in, path.string());
}

}  // namespace egonet
