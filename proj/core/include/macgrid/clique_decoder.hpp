#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "macgrid/entity.hpp"
#include "macgrid/grid_codec.hpp"

namespace macgrid {

// Fixed-capacity bitset over vertex indices [0, size).
class VertexSet {
 public:
  VertexSet() = default;
  explicit VertexSet(int size) : size_(size), words_((size + 63) / 64, 0) {}

  int capacity() const { return size_; }
  void insert(int v) { words_[v >> 6] |= std::uint64_t{1} << (v & 63); }
  void erase(int v) { words_[v >> 6] &= ~(std::uint64_t{1} << (v & 63)); }
  bool contains(int v) const { return (words_[v >> 6] >> (v & 63)) & 1u; }
  bool empty() const;
  int count() const;

  VertexSet operator&(const VertexSet& other) const;
  VertexSet operator-(const VertexSet& other) const;
  VertexSet operator|(const VertexSet& other) const;

  // Calls fn(v) for every member in increasing order.
  template <typename Fn>
  void for_each(Fn&& fn) const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      std::uint64_t bits = words_[w];
      while (bits != 0) {
        const int bit = __builtin_ctzll(bits);
        fn(static_cast<int>(w * 64) + bit);
        bits &= bits - 1;
      }
    }
  }

  friend bool operator==(const VertexSet&, const VertexSet&) = default;

 private:
  int size_ = 0;
  std::vector<std::uint64_t> words_;
};

// Simple undirected graph without self-loops.
class UndirectedGraph {
 public:
  explicit UndirectedGraph(int size = 0);

  int size() const { return static_cast<int>(neighbors_.size()); }
  void connect(int u, int v);
  bool adjacent(int u, int v) const { return neighbors_[u].contains(v); }
  const VertexSet& neighbors(int v) const { return neighbors_[v]; }

 private:
  std::vector<VertexSet> neighbors_;
};

// Member vertex indices, ascending.
using Clique = std::vector<int>;

enum class CliqueSearch {
  // Backtracking exactly as in the classic formulation (no pivot).
  kBasic,
  // Tomita pivoting. Same output after the final sort.
  kPivot,
};

// Every maximal clique, members ascending, cliques in lexicographic order.
// Isolated vertices come back as singleton cliques.
std::vector<Clique> maximal_cliques(const UndirectedGraph& graph,
                                    CliqueSearch search = CliqueSearch::kPivot);

// Nodes are the segments carrying a B or I tag of `type`, in segment order.
struct SegmentGraph {
  int type = 0;
  std::vector<Segment> nodes;
  UndirectedGraph graph;
};

// Links u < v iff (type, H2H) is in E(u.start, v.start) and (type, T2T) is
// in E(u.end, v.end).
SegmentGraph build_segment_graph(std::span<const TypedSegment> segments,
                                 const EdgeTagTable& edges, int type);

struct DecodeOptions {
  // Additionally require the earliest segment of a clique to carry a B tag.
  bool require_b_head = false;
  CliqueSearch search = CliqueSearch::kPivot;
};

struct DecodeDiagnostics {
  // Singleton cliques whose segment has no S tag of the graph's type.
  int dropped_fragments = 0;
  // Multi-node cliques with overlapping segments (or failing require_b_head).
  int rejected_cliques = 0;

  DecodeDiagnostics& operator+=(const DecodeDiagnostics& other) {
    dropped_fragments += other.dropped_fragments;
    rejected_cliques += other.rejected_cliques;
    return *this;
  }
  friend bool operator==(const DecodeDiagnostics&, const DecodeDiagnostics&) = default;
};

struct DecodeResult {
  std::vector<Entity> entities;  // sorted, unique
  DecodeDiagnostics diagnostics;
};

// Continuous mentions come from S tags; discontinuous ones from every
// multi-node maximal clique of the matching type's graph. `graphs` and
// `cliques` are indexed in parallel.
DecodeResult recover_entities(std::span<const TypedSegment> segments,
                              std::span<const SegmentGraph> graphs,
                              std::span<const std::vector<Clique>> cliques,
                              const TagAlphabet& alphabet,
                              const DecodeOptions& options = {});

// Full decoding of one sentence. Throws DecodingError if either table was
// built for a different sentence length.
DecodeResult decode_sentence(const Sentence& sentence, const SegmentTagTable& segments,
                             const EdgeTagTable& edges, const TagAlphabet& alphabet,
                             const DecodeOptions& options = {});

// Encodes the gold entities and decodes them again; true iff the decoded
// set equals the (deduplicated) input.
bool roundtrip_check(const Sentence& sentence, std::span<const Entity> entities,
                     const TagAlphabet& alphabet);

}  // namespace macgrid
