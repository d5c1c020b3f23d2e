#pragma once

#include <span>
#include <vector>

#include "macgrid/entity.hpp"

namespace macgrid {

// Decision threshold in the open interval (0, 1). A tag fires when its
// probability is >= the threshold.
class Threshold {
 public:
  static constexpr double kDefault = 0.5;

  // Throws ConfigError outside (0, 1).
  explicit Threshold(double value = kDefault);

  double value() const { return value_; }

 private:
  double value_;
};

enum class GridKind { kSegment, kEdge };

// Dense n x n x K probability grid produced by the scorer, row-major in
// (i, j, k).
struct ProbGrid {
  int n = 0;
  int k = 0;
  GridKind kind = GridKind::kSegment;
  std::vector<double> values;

  ProbGrid() = default;
  ProbGrid(int n, int k, GridKind kind)
      : n(n), k(k), kind(kind), values(static_cast<std::size_t>(n) * n * k, 0.0) {}

  double& at(int i, int j, int tag) { return values[offset(i, j, tag)]; }
  double at(int i, int j, int tag) const { return values[offset(i, j, tag)]; }

  std::size_t offset(int i, int j, int tag) const {
    return (static_cast<std::size_t>(i) * n + j) * k + tag;
  }
};

// A decoded segment with every tag it carries.
struct TypedSegment {
  Segment segment;
  std::set<SegmentTag> tags;

  bool has(SegmentTag tag) const { return tags.contains(tag); }
  friend bool operator==(const TypedSegment&, const TypedSegment&) = default;
};

// Gold target construction. Entities are validated against the sentence and
// the alphabet; a bad entity raises EncodingError naming it.
SegmentTagTable encode_segment_table(const Sentence& sentence,
                                     std::span<const Entity> entities,
                                     const TagAlphabet& alphabet);
EdgeTagTable encode_edge_table(const Sentence& sentence, std::span<const Entity> entities,
                               const TagAlphabet& alphabet);

// Inference-side thresholding. The segment variant only reads i <= j; the
// edge variant unions (i, j) and (j, i) into the canonical cell.
// Throws ConfigError when the grid kind or tag count does not match.
SegmentTagTable threshold_segment_grid(const ProbGrid& grid, const TagAlphabet& alphabet,
                                       Threshold threshold);
EdgeTagTable threshold_edge_grid(const ProbGrid& grid, const TagAlphabet& alphabet,
                                 Threshold threshold);

// One entry per non-empty cell, in segment order.
std::vector<TypedSegment> decode_segments(const SegmentTagTable& table);

}  // namespace macgrid
