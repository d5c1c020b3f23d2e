#include "macgrid/entity.hpp"

#include <algorithm>
#include <unordered_set>

#include "macgrid/error.hpp"

namespace macgrid {

void validate_sentence(const Sentence& sentence) {
  if (sentence.tokens.empty()) {
    throw InputError("sentence '" + sentence.id + "' has no tokens");
  }
  for (std::size_t i = 0; i < sentence.tokens.size(); ++i) {
    if (sentence.tokens[i].empty()) {
      throw InputError("sentence '" + sentence.id + "' has an empty token at index " +
                       std::to_string(i));
    }
  }
}

std::optional<std::string> entity_violation(const Entity& entity, int n) {
  if (entity.segments.empty()) return "entity has no segments";
  if (entity.type.empty()) return "entity has an empty type";
  for (std::size_t k = 0; k < entity.segments.size(); ++k) {
    const Segment& s = entity.segments[k];
    if (s.start < 0 || s.end < s.start || s.end >= n) {
      return "segment " + to_string(s) + " out of bounds for " + std::to_string(n) +
             " tokens";
    }
    if (k > 0 && entity.segments[k - 1].end >= s.start) {
      return "segments " + to_string(entity.segments[k - 1]) + " and " + to_string(s) +
             " are not ordered and disjoint";
    }
  }
  return std::nullopt;
}

void normalize_entities(std::vector<Entity>& entities) {
  std::sort(entities.begin(), entities.end());
  entities.erase(std::unique(entities.begin(), entities.end()), entities.end());
}

std::string to_string(const Segment& segment) {
  return "(" + std::to_string(segment.start) + "," + std::to_string(segment.end) + ")";
}

std::string to_string(const Entity& entity) {
  std::string out = entity.type + "[";
  for (std::size_t k = 0; k < entity.segments.size(); ++k) {
    if (k > 0) out += ' ';
    out += to_string(entity.segments[k]);
  }
  return out + "]";
}

std::string_view role_name(SegmentRole role) {
  switch (role) {
    case SegmentRole::kB:
      return "B";
    case SegmentRole::kI:
      return "I";
    case SegmentRole::kS:
      return "S";
  }
  return "?";
}

std::string_view edge_kind_name(EdgeKind kind) {
  return kind == EdgeKind::kH2H ? "H2H" : "T2T";
}

TagAlphabet::TagAlphabet(std::vector<std::string> types) : types_(std::move(types)) {
  if (types_.empty()) throw ConfigError("entity type inventory is empty");
  std::unordered_set<std::string> seen;
  for (const auto& t : types_) {
    if (t.empty()) throw ConfigError("entity type name is empty");
    if (!seen.insert(t).second) throw ConfigError("duplicate entity type '" + t + "'");
  }
}

std::optional<int> TagAlphabet::find_type(std::string_view name) const {
  auto it = std::find(types_.begin(), types_.end(), name);
  if (it == types_.end()) return std::nullopt;
  return static_cast<int>(it - types_.begin());
}

SegmentTag TagAlphabet::segment_tag(int index) const {
  return {index / 3, static_cast<SegmentRole>(index % 3)};
}

EdgeTag TagAlphabet::edge_tag(int index) const {
  return {index / 2, static_cast<EdgeKind>(index % 2)};
}

std::string TagAlphabet::name(SegmentTag tag) const {
  return type_name(tag.type) + "-" + std::string(role_name(tag.role));
}

std::string TagAlphabet::name(EdgeTag tag) const {
  return type_name(tag.type) + "-" + std::string(edge_kind_name(tag.kind));
}

namespace {

// Splits "TYPE-SUFFIX" at the last dash so type names may contain dashes.
std::optional<std::pair<std::string_view, std::string_view>> split_tag(
    std::string_view name) {
  auto dash = name.rfind('-');
  if (dash == std::string_view::npos || dash == 0) return std::nullopt;
  return std::pair{name.substr(0, dash), name.substr(dash + 1)};
}

}  // namespace

std::optional<SegmentTag> TagAlphabet::parse_segment_tag(std::string_view name) const {
  auto parts = split_tag(name);
  if (!parts) return std::nullopt;
  auto type = find_type(parts->first);
  if (!type) return std::nullopt;
  for (SegmentRole role : {SegmentRole::kB, SegmentRole::kI, SegmentRole::kS}) {
    if (parts->second == role_name(role)) return SegmentTag{*type, role};
  }
  return std::nullopt;
}

std::optional<EdgeTag> TagAlphabet::parse_edge_tag(std::string_view name) const {
  auto parts = split_tag(name);
  if (!parts) return std::nullopt;
  auto type = find_type(parts->first);
  if (!type) return std::nullopt;
  for (EdgeKind kind : {EdgeKind::kH2H, EdgeKind::kT2T}) {
    if (parts->second == edge_kind_name(kind)) return EdgeTag{*type, kind};
  }
  return std::nullopt;
}

void SegmentTagTable::add(int i, int j, SegmentTag tag) {
  if (i < 0 || i > j || j >= n_) {
    throw EncodingError("segment cell (" + std::to_string(i) + "," + std::to_string(j) +
                        ") outside the upper triangle of a " + std::to_string(n_) +
                        "-token table");
  }
  insert_cell(i, j, tag);
}

void EdgeTagTable::add(int i, int j, EdgeTag tag) {
  if (i > j) std::swap(i, j);
  if (i < 0 || j >= n_) {
    throw EncodingError("edge cell (" + std::to_string(i) + "," + std::to_string(j) +
                        ") out of range for a " + std::to_string(n_) + "-token table");
  }
  insert_cell(i, j, tag);
}

}  // namespace macgrid
