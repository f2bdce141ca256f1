#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <vector>

#include "netseg/community.hpp"
#include "netseg/detail/text.hpp"
#include "netseg/error.hpp"

namespace netseg {

/// Writes `vertex_id,community` rows; vertex k is ids[k].
template <class Id>
void write_partition(std::ostream& os, std::span<const Id> ids, const Partition& p) {
  os << "vertex_id,community\n";
  for (std::size_t k = 0; k < ids.size(); ++k) os << ids[k].value << ',' << p.membership[k] << '\n';
}

/// A partition read back from CSV, keyed by raw vertex ids (ascending).
struct LoadedPartition {
  std::vector<std::uint64_t> ids;
  Partition partition;
};

inline LoadedPartition read_partition(std::istream& in) {
  using namespace detail;
  LineReader reader(in);
  expect_header(reader, "vertex_id,community");
  std::vector<std::pair<std::uint64_t, std::uint32_t>> rows;
  std::string_view line;
  while (reader.next(line)) {
    auto f = split(line, ',');
    if (f.size() != 2) throw ParseError(reader.line(), "expected 2 fields in partition row");
    rows.emplace_back(parse_u64(f[0], reader.line(), "vertex id"),
                      static_cast<std::uint32_t>(parse_u64(f[1], reader.line(), "community")));
  }
  std::sort(rows.begin(), rows.end());
  LoadedPartition out;
  std::vector<std::uint32_t> labels;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i > 0 && rows[i].first == rows[i - 1].first) {
      throw InputError("vertex " + std::to_string(rows[i].first) + " listed twice in partition");
    }
    out.ids.push_back(rows[i].first);
    labels.push_back(rows[i].second);
  }
  out.partition = Partition::from_labels(labels);
  return out;
}

}  // namespace netseg
