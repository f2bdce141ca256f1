#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "netseg/error.hpp"

namespace netseg::detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(trim(s.substr(start)));
      return out;
    }
    out.push_back(trim(s.substr(start, pos - start)));
    start = pos + 1;
  }
}

inline std::optional<std::uint64_t> to_u64(std::string_view s) {
  std::uint64_t v{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

inline std::optional<std::int64_t> to_i64(std::string_view s) {
  std::int64_t v{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

inline std::optional<double> to_f64(std::string_view s) {
  double v{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

inline std::uint64_t parse_u64(std::string_view s, std::size_t line, std::string_view what) {
  auto v = to_u64(s);
  if (!v) throw ParseError(line, "invalid " + std::string(what) + " '" + std::string(s) + "'");
  return *v;
}

inline double parse_f64(std::string_view s, std::size_t line, std::string_view what) {
  auto v = to_f64(s);
  if (!v || !std::isfinite(*v)) {
    throw ParseError(line, "invalid " + std::string(what) + " '" + std::string(s) + "'");
  }
  return *v;
}

/// Line reader that tracks 1-based line numbers and skips blank lines.
class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  bool next(std::string_view& out) {
    while (std::getline(in_, buf_)) {
      ++line_;
      out = trim(buf_);
      if (!out.empty()) return true;
    }
    return false;
  }

  std::size_t line() const { return line_; }

 private:
  std::istream& in_;
  std::string buf_;
  std::size_t line_ = 0;
};

/// Reads and checks a CSV header line.
inline void expect_header(LineReader& reader, std::string_view header) {
  std::string_view line;
  if (!reader.next(line)) throw ParseError(reader.line(), "missing header '" + std::string(header) + "'");
  std::string compact;
  for (auto field : split(line, ',')) {
    if (!compact.empty()) compact += ',';
    compact += field;
  }
  if (compact != header) {
    throw ParseError(reader.line(), "expected header '" + std::string(header) + "', got '" + std::string(line) + "'");
  }
}

/// Formats a real with 9 significant digits, the precision used for every export.
inline std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

/// Shortest text that parses back to exactly `v`.
inline std::string format_exact(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace netseg::detail
