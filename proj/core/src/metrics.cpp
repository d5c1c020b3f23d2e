#include "macgrid/metrics.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "macgrid/error.hpp"

namespace macgrid {

bool entity_match(const Entity& a, const Entity& b) {
  return a.type == b.type && a.segments == b.segments;
}

Prf prf(const EvalCounts& c) {
  Prf out;
  if (c.predicted > 0) out.precision = static_cast<double>(c.true_positives) / c.predicted;
  if (c.gold > 0) out.recall = static_cast<double>(c.true_positives) / c.gold;
  if (out.precision + out.recall > 0.0) {
    out.f1 = 2.0 * out.precision * out.recall / (out.precision + out.recall);
  }
  return out;
}

namespace {

std::vector<Entity> unique_sorted(std::span<const Entity> entities) {
  std::vector<Entity> out(entities.begin(), entities.end());
  normalize_entities(out);
  return out;
}

std::vector<Entity> discontinuous_only(const std::vector<Entity>& entities) {
  std::vector<Entity> out;
  std::copy_if(entities.begin(), entities.end(), std::back_inserter(out),
               [](const Entity& e) { return e.is_discontinuous(); });
  return out;
}

void check_aligned(std::size_t predicted, std::size_t gold) {
  if (predicted != gold) {
    throw EvaluationError("prediction corpus has " + std::to_string(predicted) +
                          " sentences but gold has " + std::to_string(gold));
  }
}

}  // namespace

EvalCounts score(std::span<const Entity> predicted, std::span<const Entity> gold) {
  const auto p = unique_sorted(predicted);
  const auto g = unique_sorted(gold);
  std::vector<Entity> common;
  std::set_intersection(p.begin(), p.end(), g.begin(), g.end(), std::back_inserter(common));
  return {static_cast<long>(common.size()), static_cast<long>(p.size()),
          static_cast<long>(g.size())};
}

std::string_view filter_name(ScoreFilter filter) {
  switch (filter) {
    case ScoreFilter::kAll:
      return "overall";
    case ScoreFilter::kDiscSentence:
      return "disc_sentence";
    case ScoreFilter::kDiscOnly:
      return "disc_only";
  }
  return "?";
}

FilteredScore filtered_score(std::span<const std::vector<Entity>> predicted,
                             std::span<const std::vector<Entity>> gold, ScoreFilter filter) {
  check_aligned(predicted.size(), gold.size());
  FilteredScore out;
  for (std::size_t s = 0; s < gold.size(); ++s) {
    switch (filter) {
      case ScoreFilter::kAll:
        out.counts += score(predicted[s], gold[s]);
        break;
      case ScoreFilter::kDiscSentence:
        if (std::any_of(gold[s].begin(), gold[s].end(),
                        [](const Entity& e) { return e.is_discontinuous(); })) {
          out.counts += score(predicted[s], gold[s]);
        }
        break;
      case ScoreFilter::kDiscOnly:
        out.counts += score(discontinuous_only(predicted[s]), discontinuous_only(gold[s]));
        break;
    }
  }
  out.prf = prf(out.counts);
  out.empty_filter = out.counts.gold == 0 && out.counts.predicted == 0;
  return out;
}

int interval_length(const Entity& entity) {
  int gaps = 0;
  for (std::size_t k = 1; k < entity.segments.size(); ++k) {
    gaps += entity.segments[k].start - entity.segments[k - 1].end - 1;
  }
  return gaps;
}

int span_length(const Entity& entity) {
  return entity.segments.back().end - entity.segments.front().start + 1;
}

std::string_view pattern_name(OverlapPattern pattern) {
  switch (pattern) {
    case OverlapPattern::kNone:
      return "none";
    case OverlapPattern::kLeft:
      return "left";
    case OverlapPattern::kRight:
      return "right";
    case OverlapPattern::kMultiple:
      return "multiple";
  }
  return "?";
}

const std::string_view kOverlapPatternRule =
    "per discontinuous mention: tokens shared with any other mention of the sentence; "
    "none shared -> none; only in first segment -> left; only in last segment -> right; "
    "otherwise -> multiple";

OverlapPattern overlap_pattern(const Entity& entity, std::span<const Entity> mentions) {
  if (!entity.is_discontinuous()) {
    throw std::invalid_argument("overlap_pattern needs a discontinuous mention, got " +
                                to_string(entity));
  }
  const std::size_t last = entity.segments.size() - 1;
  bool first_shared = false;
  bool last_shared = false;
  bool inner_shared = false;
  for (const Entity& other : mentions) {
    if (other == entity) continue;
    for (std::size_t k = 0; k <= last; ++k) {
      const Segment& mine = entity.segments[k];
      const bool shared = std::any_of(other.segments.begin(), other.segments.end(),
                                      [&](const Segment& s) { return s.overlaps(mine); });
      if (!shared) continue;
      if (k == 0) {
        first_shared = true;
      } else if (k == last) {
        last_shared = true;
      } else {
        inner_shared = true;
      }
    }
  }
  if (!first_shared && !last_shared && !inner_shared) return OverlapPattern::kNone;
  if (first_shared && !last_shared && !inner_shared) return OverlapPattern::kLeft;
  if (last_shared && !first_shared && !inner_shared) return OverlapPattern::kRight;
  return OverlapPattern::kMultiple;
}

std::size_t BucketSpec::bucket_of(int value) const {
  if (value < first) return 0;
  if (value > last) return bucket_count() - 1;
  return static_cast<std::size_t>(value - first + 1);
}

std::string BucketSpec::label(std::size_t bucket) const {
  if (bucket == 0) return "<" + std::to_string(first);
  if (bucket == bucket_count() - 1) return ">=" + std::to_string(last + 1);
  return std::to_string(first + static_cast<int>(bucket) - 1);
}

namespace {

std::vector<BreakdownRow> make_rows(const BucketSpec& spec) {
  std::vector<BreakdownRow> rows(spec.bucket_count());
  for (std::size_t b = 0; b < rows.size(); ++b) rows[b].label = spec.label(b);
  return rows;
}

template <typename Container>
void finish_rows(Container& rows) {
  for (auto& row : rows) row.prf = prf(row.counts);
}

}  // namespace

EvalReport full_report(std::span<const std::vector<Entity>> predicted,
                       std::span<const std::vector<Entity>> gold,
                       const BucketSpec& interval_buckets, const BucketSpec& span_buckets) {
  check_aligned(predicted.size(), gold.size());
  EvalReport report;
  report.sentences = static_cast<long>(gold.size());
  report.overall = filtered_score(predicted, gold, ScoreFilter::kAll);
  report.disc_sentence = filtered_score(predicted, gold, ScoreFilter::kDiscSentence);
  report.disc_only = filtered_score(predicted, gold, ScoreFilter::kDiscOnly);

  for (std::size_t p = 0; p < report.patterns.size(); ++p) {
    report.patterns[p].label = std::string(pattern_name(static_cast<OverlapPattern>(p)));
  }
  report.interval = make_rows(interval_buckets);
  report.span = make_rows(span_buckets);

  auto tally = [&](const Entity& e, OverlapPattern pattern, long EvalCounts::*field) {
    report.patterns[static_cast<std::size_t>(pattern)].counts.*field += 1;
    report.interval[interval_buckets.bucket_of(interval_length(e))].counts.*field += 1;
    report.span[span_buckets.bucket_of(span_length(e))].counts.*field += 1;
  };

  for (std::size_t s = 0; s < gold.size(); ++s) {
    const auto g = unique_sorted(gold[s]);
    const auto p = unique_sorted(predicted[s]);
    std::map<Entity, OverlapPattern> gold_pattern;
    for (const Entity& e : g) {
      if (!e.is_discontinuous()) continue;
      const OverlapPattern pattern = overlap_pattern(e, g);
      gold_pattern.emplace(e, pattern);
      tally(e, pattern, &EvalCounts::gold);
    }
    for (const Entity& e : p) {
      if (!e.is_discontinuous()) continue;
      auto hit = gold_pattern.find(e);
      if (hit != gold_pattern.end()) {
        tally(e, hit->second, &EvalCounts::predicted);
        tally(e, hit->second, &EvalCounts::true_positives);
      } else {
        tally(e, overlap_pattern(e, p), &EvalCounts::predicted);
      }
    }
  }
  finish_rows(report.patterns);
  finish_rows(report.interval);
  finish_rows(report.span);
  return report;
}

}  // namespace macgrid
