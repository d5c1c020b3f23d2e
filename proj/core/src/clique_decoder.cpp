#include "macgrid/clique_decoder.hpp"

#include <algorithm>
#include <bit>

#include "macgrid/error.hpp"

namespace macgrid {

bool VertexSet::empty() const {
  return std::all_of(words_.begin(), words_.end(), [](std::uint64_t w) { return w == 0; });
}

int VertexSet::count() const {
  int total = 0;
  for (std::uint64_t w : words_) total += std::popcount(w);
  return total;
}

VertexSet VertexSet::operator&(const VertexSet& other) const {
  VertexSet out(*this);
  for (std::size_t w = 0; w < words_.size(); ++w) out.words_[w] &= other.words_[w];
  return out;
}

VertexSet VertexSet::operator-(const VertexSet& other) const {
  VertexSet out(*this);
  for (std::size_t w = 0; w < words_.size(); ++w) out.words_[w] &= ~other.words_[w];
  return out;
}

VertexSet VertexSet::operator|(const VertexSet& other) const {
  VertexSet out(*this);
  for (std::size_t w = 0; w < words_.size(); ++w) out.words_[w] |= other.words_[w];
  return out;
}

UndirectedGraph::UndirectedGraph(int size) : neighbors_(size, VertexSet(size)) {}

void UndirectedGraph::connect(int u, int v) {
  if (u == v) return;
  neighbors_[u].insert(v);
  neighbors_[v].insert(u);
}

namespace {

class BronKerbosch {
 public:
  BronKerbosch(const UndirectedGraph& graph, CliqueSearch search)
      : graph_(graph), search_(search) {}

  std::vector<Clique> run() {
    VertexSet candidates(graph_.size());
    for (int v = 0; v < graph_.size(); ++v) candidates.insert(v);
    Clique current;
    expand(current, candidates, VertexSet(graph_.size()));
    for (Clique& c : cliques_) std::sort(c.begin(), c.end());
    std::sort(cliques_.begin(), cliques_.end());
    return std::move(cliques_);
  }

 private:
  // Recursion depth is bounded by the size of the largest clique.
  void expand(Clique& current, VertexSet candidates, VertexSet excluded) {
    if (candidates.empty()) {
      if (excluded.empty() && !current.empty()) cliques_.push_back(current);
      return;
    }
    VertexSet branch = candidates;
    if (search_ == CliqueSearch::kPivot) branch = candidates - graph_.neighbors(pivot(candidates, excluded));
    branch.for_each([&](int v) {
      const VertexSet& nv = graph_.neighbors(v);
      current.push_back(v);
      expand(current, candidates & nv, excluded & nv);
      current.pop_back();
      candidates.erase(v);
      excluded.insert(v);
    });
  }

  int pivot(const VertexSet& candidates, const VertexSet& excluded) const {
    int best = -1;
    int best_degree = -1;
    (candidates | excluded).for_each([&](int u) {
      const int degree = (candidates & graph_.neighbors(u)).count();
      if (degree > best_degree) {
        best = u;
        best_degree = degree;
      }
    });
    return best;
  }

  const UndirectedGraph& graph_;
  CliqueSearch search_;
  std::vector<Clique> cliques_;
};

}  // namespace

std::vector<Clique> maximal_cliques(const UndirectedGraph& graph, CliqueSearch search) {
  if (graph.size() == 0) return {};
  return BronKerbosch(graph, search).run();
}

SegmentGraph build_segment_graph(std::span<const TypedSegment> segments,
                                 const EdgeTagTable& edges, int type) {
  SegmentGraph out;
  out.type = type;
  const SegmentTag b{type, SegmentRole::kB};
  const SegmentTag i{type, SegmentRole::kI};
  for (const TypedSegment& ts : segments) {
    if (ts.has(b) || ts.has(i)) out.nodes.push_back(ts.segment);
  }
  const int m = static_cast<int>(out.nodes.size());
  out.graph = UndirectedGraph(m);
  const EdgeTag h2h{type, EdgeKind::kH2H};
  const EdgeTag t2t{type, EdgeKind::kT2T};
  for (int u = 0; u < m; ++u) {
    for (int v = u + 1; v < m; ++v) {
      const Segment& a = out.nodes[u];
      const Segment& c = out.nodes[v];
      if (edges.contains(a.start, c.start, h2h) && edges.contains(a.end, c.end, t2t)) {
        out.graph.connect(u, v);
      }
    }
  }
  return out;
}

namespace {

const TypedSegment* find_typed(std::span<const TypedSegment> segments, const Segment& s) {
  auto it = std::lower_bound(
      segments.begin(), segments.end(), s,
      [](const TypedSegment& ts, const Segment& key) { return ts.segment < key; });
  if (it == segments.end() || it->segment != s) return nullptr;
  return &*it;
}

}  // namespace

DecodeResult recover_entities(std::span<const TypedSegment> segments,
                              std::span<const SegmentGraph> graphs,
                              std::span<const std::vector<Clique>> cliques,
                              const TagAlphabet& alphabet, const DecodeOptions& options) {
  DecodeResult result;
  for (const TypedSegment& ts : segments) {
    for (const SegmentTag& tag : ts.tags) {
      if (tag.role == SegmentRole::kS) {
        result.entities.push_back({{ts.segment}, alphabet.type_name(tag.type)});
      }
    }
  }

  for (std::size_t g = 0; g < graphs.size(); ++g) {
    const SegmentGraph& graph = graphs[g];
    const SegmentTag s_tag{graph.type, SegmentRole::kS};
    const SegmentTag b_tag{graph.type, SegmentRole::kB};
    for (const Clique& clique : cliques[g]) {
      if (clique.size() == 1) {
        const TypedSegment* ts = find_typed(segments, graph.nodes[clique[0]]);
        if (ts == nullptr || !ts->has(s_tag)) ++result.diagnostics.dropped_fragments;
        continue;
      }
      Entity entity;
      entity.type = alphabet.type_name(graph.type);
      for (int v : clique) entity.segments.push_back(graph.nodes[v]);
      std::sort(entity.segments.begin(), entity.segments.end());

      bool ok = true;
      for (std::size_t k = 1; k < entity.segments.size(); ++k) {
        if (entity.segments[k - 1].end >= entity.segments[k].start) ok = false;
      }
      if (ok && options.require_b_head) {
        const TypedSegment* head = find_typed(segments, entity.segments.front());
        ok = head != nullptr && head->has(b_tag);
      }
      if (!ok) {
        ++result.diagnostics.rejected_cliques;
        continue;
      }
      result.entities.push_back(std::move(entity));
    }
  }
  normalize_entities(result.entities);
  return result;
}

DecodeResult decode_sentence(const Sentence& sentence, const SegmentTagTable& segments,
                             const EdgeTagTable& edges, const TagAlphabet& alphabet,
                             const DecodeOptions& options) {
  if (segments.n() != sentence.size() || edges.n() != sentence.size()) {
    throw DecodingError("sentence '" + sentence.id + "' has " +
                        std::to_string(sentence.size()) + " tokens but tables have n=" +
                        std::to_string(segments.n()) + "/" + std::to_string(edges.n()));
  }
  const std::vector<TypedSegment> typed = decode_segments(segments);
  std::vector<SegmentGraph> graphs;
  std::vector<std::vector<Clique>> cliques;
  graphs.reserve(alphabet.num_types());
  cliques.reserve(alphabet.num_types());
  for (int type = 0; type < alphabet.num_types(); ++type) {
    graphs.push_back(build_segment_graph(typed, edges, type));
    cliques.push_back(maximal_cliques(graphs.back().graph, options.search));
  }
  return recover_entities(typed, graphs, cliques, alphabet, options);
}

bool roundtrip_check(const Sentence& sentence, std::span<const Entity> entities,
                     const TagAlphabet& alphabet) {
  std::vector<Entity> expected(entities.begin(), entities.end());
  normalize_entities(expected);
  const DecodeResult decoded =
      decode_sentence(sentence, encode_segment_table(sentence, entities, alphabet),
                      encode_edge_table(sentence, entities, alphabet), alphabet);
  return decoded.entities == expected;
}

}  // namespace macgrid
