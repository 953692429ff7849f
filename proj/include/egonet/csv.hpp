#pragma once

#include <cstdio>
#include <istream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <unordered_map>
#include <vector>

#include "egonet/core_model.hpp"

namespace egonet::csv {

// Minimal RFC 4180 reader: quoted fields may hold commas, doubled quotes and
// newlines. Rows are returned as vectors of unquoted fields.
class Reader {
 public:
  explicit Reader(std::istream& in, std::string source = "<csv>") : in_(in), source_(std::move(source)) {}

  std::optional<std::vector<std::string>> next_row() {
    std::string line;
    if (!std::getline(in_, line)) return std::nullopt;
    ++line_no_;
    row_line_ = line_no_;
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    std::size_t i = 0;
    for (;;) {
      if (i == line.size()) {
        if (quoted) {
          std::string more;
          if (!std::getline(in_, more)) {
            throw DataError(source_ + ":" + std::to_string(row_line_) + ": unterminated quoted field");
          }
          ++line_no_;
          field.push_back('\n');
          line = std::move(more);
          i = 0;
          continue;
        }
        break;
      }
      const char c = line[i];
      if (quoted) {
        if (c == '"') {
          if (i + 1 < line.size() && line[i + 1] == '"') {
            field.push_back('"');
            ++i;
          } else {
            quoted = false;
          }
        } else {
          field.push_back(c);
        }
      } else if (c == '"') {
        quoted = true;
      } else if (c == ',') {
        fields.push_back(std::move(field));
        field.clear();
      } else if (c != '\r' || i + 1 != line.size()) {
        field.push_back(c);
      }
      ++i;
    }
    fields.push_back(std::move(field));
    return fields;
  }

  std::size_t line() const { return row_line_; }
  const std::string& source() const { return source_; }

 private:
  std::istream& in_;
  std::string source_;
  std::size_t line_no_ = 0;
  std::size_t row_line_ = 0;
};

// Column lookup over a header row.
class Header {
 public:
  Header() = default;
  explicit Header(const std::vector<std::string>& names) {
    for (std::size_t i = 0; i < names.size(); ++i) index_.emplace(names[i], i);
  }

  std::optional<std::size_t> find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t require(std::string_view name, std::string_view source) const {
    auto i = find(name);
    if (!i) throw DataError(std::string(source) + ": missing required column '" + std::string(name) + "'");
    return *i;
  }

 private:
  std::unordered_map<std::string, std::size_t> index_;
};

inline std::string quote(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

inline void write_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    out << quote(fields[i]);
  }
  out << '\n';
}

// Shortest round-trippable decimal for doubles in CSV output.
inline std::string num(double x) {
  char buf[40];
  double back = 0;
  for (int prec = 6; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, x);
    std::sscanf(buf, "%lf", &back);
    if (back == x) break;
  }
  return buf;
}

template <typename Int>
  requires std::is_integral_v<Int>
inline std::string num(Int x) {
  return std::to_string(x);
}

// Joins values with a separator, e.g. sizes "2;5;10".
template <typename Range, typename Fmt>
std::string join(const Range& r, char sep, Fmt fmt) {
  std::string out;
  bool first = true;
  for (const auto& v : r) {
    if (!first) out.push_back(sep);
    first = false;
    out += fmt(v);
  }
  return out;
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  if (s.empty()) return out;
  std::size_t start = 0;
  for (;;) {
    auto pos = s.find(sep, start);
    out.emplace_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace egonet::csv
