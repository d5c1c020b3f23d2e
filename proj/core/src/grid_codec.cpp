#include "macgrid/grid_codec.hpp"

#include <string>

#include "macgrid/error.hpp"

namespace macgrid {

Threshold::Threshold(double value) : value_(value) {
  if (!(value > 0.0 && value < 1.0)) {
    throw ConfigError("threshold must lie in (0, 1), got " + std::to_string(value));
  }
}

namespace {

int checked_type(const Sentence& sentence, const Entity& entity,
                 const TagAlphabet& alphabet) {
  if (auto why = entity_violation(entity, sentence.size())) {
    throw EncodingError("sentence '" + sentence.id + "': entity " + to_string(entity) +
                        ": " + *why);
  }
  auto type = alphabet.find_type(entity.type);
  if (!type) {
    throw EncodingError("sentence '" + sentence.id + "': entity " + to_string(entity) +
                        ": unknown type");
  }
  return *type;
}

}  // namespace

SegmentTagTable encode_segment_table(const Sentence& sentence,
                                     std::span<const Entity> entities,
                                     const TagAlphabet& alphabet) {
  SegmentTagTable table(sentence.size());
  for (const Entity& e : entities) {
    const int type = checked_type(sentence, e, alphabet);
    if (!e.is_discontinuous()) {
      table.add(e.segments[0].start, e.segments[0].end, {type, SegmentRole::kS});
      continue;
    }
    for (std::size_t k = 0; k < e.segments.size(); ++k) {
      const auto role = k == 0 ? SegmentRole::kB : SegmentRole::kI;
      table.add(e.segments[k].start, e.segments[k].end, {type, role});
    }
  }
  return table;
}

EdgeTagTable encode_edge_table(const Sentence& sentence, std::span<const Entity> entities,
                               const TagAlphabet& alphabet) {
  EdgeTagTable table(sentence.size());
  for (const Entity& e : entities) {
    const int type = checked_type(sentence, e, alphabet);
    for (std::size_t a = 0; a < e.segments.size(); ++a) {
      for (std::size_t b = a + 1; b < e.segments.size(); ++b) {
        const Segment& first = e.segments[a];
        const Segment& second = e.segments[b];
        table.add(first.start, second.start, {type, EdgeKind::kH2H});
        table.add(first.end, second.end, {type, EdgeKind::kT2T});
      }
    }
  }
  return table;
}

namespace {

void check_grid(const ProbGrid& grid, GridKind kind, int expected_k) {
  if (grid.kind != kind) throw ConfigError("probability grid has the wrong kind");
  if (grid.k != expected_k) {
    throw ConfigError("probability grid has " + std::to_string(grid.k) + " tags, expected " +
                      std::to_string(expected_k));
  }
  if (grid.values.size() != static_cast<std::size_t>(grid.n) * grid.n * grid.k) {
    throw ConfigError("probability grid storage does not match its shape");
  }
}

}  // namespace

SegmentTagTable threshold_segment_grid(const ProbGrid& grid, const TagAlphabet& alphabet,
                                       Threshold threshold) {
  check_grid(grid, GridKind::kSegment, alphabet.segment_size());
  SegmentTagTable table(grid.n);
  for (int i = 0; i < grid.n; ++i) {
    for (int j = i; j < grid.n; ++j) {
      for (int k = 0; k < grid.k; ++k) {
        if (grid.at(i, j, k) >= threshold.value()) table.add(i, j, alphabet.segment_tag(k));
      }
    }
  }
  return table;
}

EdgeTagTable threshold_edge_grid(const ProbGrid& grid, const TagAlphabet& alphabet,
                                 Threshold threshold) {
  check_grid(grid, GridKind::kEdge, alphabet.edge_size());
  EdgeTagTable table(grid.n);
  for (int i = 0; i < grid.n; ++i) {
    for (int j = 0; j < grid.n; ++j) {
      for (int k = 0; k < grid.k; ++k) {
        if (grid.at(i, j, k) >= threshold.value()) table.add(i, j, alphabet.edge_tag(k));
      }
    }
  }
  return table;
}

std::vector<TypedSegment> decode_segments(const SegmentTagTable& table) {
  std::vector<TypedSegment> out;
  out.reserve(table.cell_count());
  // std::map iteration over (i, j) already is segment order.
  for (const auto& [cell, tags] : table.cells()) {
    out.push_back({Segment{cell.first, cell.second}, tags});
  }
  return out;
}

}  // namespace macgrid
