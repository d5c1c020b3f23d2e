#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "macgrid/entity.hpp"

namespace macgrid {

// Exact match: same type and identical segment offsets.
bool entity_match(const Entity& a, const Entity& b);

struct EvalCounts {
  long true_positives = 0;
  long predicted = 0;
  long gold = 0;

  EvalCounts& operator+=(const EvalCounts& o) {
    true_positives += o.true_positives;
    predicted += o.predicted;
    gold += o.gold;
    return *this;
  }
  friend bool operator==(const EvalCounts&, const EvalCounts&) = default;
};

// Each ratio is 0 when its denominator is 0.
struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

Prf prf(const EvalCounts& counts);

// Set semantics: both sides are deduplicated before counting.
EvalCounts score(std::span<const Entity> predicted, std::span<const Entity> gold);

enum class ScoreFilter {
  kAll,
  // Sentences whose gold holds at least one discontinuous mention.
  kDiscSentence,
  // Discontinuous mentions only, on both sides, in every sentence.
  kDiscOnly,
};

std::string_view filter_name(ScoreFilter filter);

struct FilteredScore {
  EvalCounts counts;
  Prf prf;
  // Nothing survived the filter on either side; the zeros are a convention.
  bool empty_filter = false;
};

using CorpusEntities = std::vector<std::vector<Entity>>;

// Throws EvaluationError when the two sides have different sentence counts.
FilteredScore filtered_score(std::span<const std::vector<Entity>> predicted,
                             std::span<const std::vector<Entity>> gold, ScoreFilter filter);

// Tokens strictly between consecutive segments, summed.
int interval_length(const Entity& entity);
// Tokens from the first segment's start to the last segment's end.
int span_length(const Entity& entity);

enum class OverlapPattern { kNone = 0, kLeft = 1, kRight = 2, kMultiple = 3 };

std::string_view pattern_name(OverlapPattern pattern);

// Classifies a discontinuous mention against the other mentions of its
// sentence (`mentions` may include `entity` itself; exact copies are
// skipped). The tokens `entity` shares with any other mention decide:
// nothing shared -> none; shared tokens only in the first segment -> left;
// only in the last segment -> right; anything else -> multiple.
// Throws std::invalid_argument for a continuous mention.
OverlapPattern overlap_pattern(const Entity& entity, std::span<const Entity> mentions);

extern const std::string_view kOverlapPatternRule;

// Exact-valued buckets [first, last] plus "<first" and ">=last+1".
struct BucketSpec {
  int first = 1;
  int last = 6;

  std::size_t bucket_count() const { return static_cast<std::size_t>(last - first + 3); }
  std::size_t bucket_of(int value) const;
  std::string label(std::size_t bucket) const;
};

inline constexpr BucketSpec kIntervalBuckets{1, 6};
inline constexpr BucketSpec kSpanBuckets{3, 8};

struct BreakdownRow {
  std::string label;
  EvalCounts counts;
  Prf prf;
};

struct EvalReport {
  long sentences = 0;
  FilteredScore overall;
  FilteredScore disc_sentence;
  FilteredScore disc_only;
  // Rows for none / left / right / multiple. Gold mentions are bucketed by
  // their pattern within the gold sentence; a prediction that matches a gold
  // mention shares its bucket, an unmatched one is classified within the
  // predicted sentence.
  std::array<BreakdownRow, 4> patterns;
  // Discontinuous mentions by interval length and span length.
  std::vector<BreakdownRow> interval;
  std::vector<BreakdownRow> span;
};

EvalReport full_report(std::span<const std::vector<Entity>> predicted,
                       std::span<const std::vector<Entity>> gold,
                       const BucketSpec& interval_buckets = kIntervalBuckets,
                       const BucketSpec& span_buckets = kSpanBuckets);

// Stable key layout: overall / disc_sentence / disc_only / patterns / buckets.
std::string report_to_json(const EvalReport& report);
std::string report_to_text(const EvalReport& report);

}  // namespace macgrid
