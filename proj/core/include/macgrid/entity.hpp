#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace macgrid {

// A tokenized sentence. Tokens are non-empty and there is at least one.
struct Sentence {
  std::string id;
  std::vector<std::string> tokens;

  int size() const { return static_cast<int>(tokens.size()); }
  friend bool operator==(const Sentence&, const Sentence&) = default;
};

// Throws InputError if the sentence is empty or holds an empty token.
void validate_sentence(const Sentence& sentence);

// Inclusive token span [start, end], 0-based.
struct Segment {
  int start = 0;
  int end = 0;

  int length() const { return end - start + 1; }
  bool contains(int token) const { return start <= token && token <= end; }
  bool overlaps(const Segment& other) const {
    return start <= other.end && other.start <= end;
  }

  // Total order by (start, end).
  friend auto operator<=>(const Segment&, const Segment&) = default;
};

// A typed mention: one segment for a continuous mention, two or more
// ordered, disjoint segments for a discontinuous one.
struct Entity {
  std::vector<Segment> segments;
  std::string type;

  bool is_discontinuous() const { return segments.size() > 1; }

  friend auto operator<=>(const Entity& a, const Entity& b) {
    if (auto c = a.segments <=> b.segments; c != 0) return c;
    return a.type <=> b.type;
  }
  friend bool operator==(const Entity&, const Entity&) = default;
};

// Checks the segment invariants against a sentence of `n` tokens:
// non-empty, each 0 <= start <= end < n, and seg[k].end < seg[k+1].start.
// Returns a description of the first violation, or nullopt when valid.
std::optional<std::string> entity_violation(const Entity& entity, int n);

// Sorts and removes duplicates.
void normalize_entities(std::vector<Entity>& entities);

std::string to_string(const Segment& segment);
std::string to_string(const Entity& entity);

enum class SegmentRole : std::uint8_t { kB = 0, kI = 1, kS = 2 };
enum class EdgeKind : std::uint8_t { kH2H = 0, kT2T = 1 };

std::string_view role_name(SegmentRole role);
std::string_view edge_kind_name(EdgeKind kind);

// Type is an index into the owning TagAlphabet's inventory.
struct SegmentTag {
  int type = 0;
  SegmentRole role = SegmentRole::kS;
  friend auto operator<=>(const SegmentTag&, const SegmentTag&) = default;
};

struct EdgeTag {
  int type = 0;
  EdgeKind kind = EdgeKind::kH2H;
  friend auto operator<=>(const EdgeTag&, const EdgeTag&) = default;
};

// The per-corpus entity type inventory plus the two tag alphabets derived
// from it. Index order is fixed: segment tags are type-major over [B, I, S],
// edge tags are type-major over [H2H, T2T].
class TagAlphabet {
 public:
  // Throws ConfigError on an empty list, an empty name, or a duplicate.
  explicit TagAlphabet(std::vector<std::string> types);

  std::span<const std::string> types() const { return types_; }
  int num_types() const { return static_cast<int>(types_.size()); }
  int segment_size() const { return 3 * num_types(); }
  int edge_size() const { return 2 * num_types(); }

  std::optional<int> find_type(std::string_view name) const;
  const std::string& type_name(int type) const { return types_.at(type); }

  int index(SegmentTag tag) const { return tag.type * 3 + static_cast<int>(tag.role); }
  int index(EdgeTag tag) const { return tag.type * 2 + static_cast<int>(tag.kind); }
  SegmentTag segment_tag(int index) const;
  EdgeTag edge_tag(int index) const;

  // "ADE-B", "POB-H2H", ...
  std::string name(SegmentTag tag) const;
  std::string name(EdgeTag tag) const;
  std::optional<SegmentTag> parse_segment_tag(std::string_view name) const;
  std::optional<EdgeTag> parse_edge_tag(std::string_view name) const;

  friend bool operator==(const TagAlphabet&, const TagAlphabet&) = default;

 private:
  std::vector<std::string> types_;
};

using Cell = std::pair<int, int>;

// Sparse grid of tag sets over token pairs. Empty cells are never stored.
// The segment table only admits i <= j; the edge table folds (j, i) into
// (i, j) on insertion, so every stored coordinate satisfies i <= j.
template <typename Tag>
class TagTable {
 public:
  using TagSet = std::set<Tag>;

  explicit TagTable(int n = 0) : n_(n) {}

  int n() const { return n_; }
  bool empty() const { return cells_.empty(); }
  std::size_t cell_count() const { return cells_.size(); }
  const std::map<Cell, TagSet>& cells() const { return cells_; }

  const TagSet* find(int i, int j) const;
  bool contains(int i, int j, Tag tag) const;

  friend bool operator==(const TagTable&, const TagTable&) = default;

 protected:
  void insert_cell(int i, int j, Tag tag) { cells_[{i, j}].insert(tag); }

  int n_;
  std::map<Cell, TagSet> cells_;
};

class SegmentTagTable : public TagTable<SegmentTag> {
 public:
  using TagTable::TagTable;

  // Throws EncodingError if the coordinate is outside the upper triangle.
  void add(int i, int j, SegmentTag tag);

  // Number of addressable coordinates: (n^2 + n) / 2.
  static std::size_t addressable_cells(int n) {
    return static_cast<std::size_t>(n) * static_cast<std::size_t>(n + 1) / 2;
  }
};

class EdgeTagTable : public TagTable<EdgeTag> {
 public:
  using TagTable::TagTable;

  // Canonicalizes to (min, max). Throws EncodingError when out of range.
  void add(int i, int j, EdgeTag tag);

  // Lookups canonicalize the coordinate the same way.
  const TagSet* find(int i, int j) const {
    return i <= j ? TagTable::find(i, j) : TagTable::find(j, i);
  }
  bool contains(int i, int j, EdgeTag tag) const {
    const TagSet* tags = find(i, j);
    return tags != nullptr && tags->contains(tag);
  }
};

template <typename Tag>
const typename TagTable<Tag>::TagSet* TagTable<Tag>::find(int i, int j) const {
  auto it = cells_.find({i, j});
  return it == cells_.end() ? nullptr : &it->second;
}

template <typename Tag>
bool TagTable<Tag>::contains(int i, int j, Tag tag) const {
  const TagSet* tags = find(i, j);
  return tags != nullptr && tags->contains(tag);
}

}  // namespace macgrid
