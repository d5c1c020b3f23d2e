#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include "macgrid/error.hpp"
#include "macgrid/metrics.hpp"
#include "support/fixtures.hpp"

namespace macgrid {
namespace {

using testing::ent;

TEST(Score, HalfAndQuarter) {
  const std::vector<Entity> gold = {ent({{0, 0}}, "A"), ent({{2, 2}}, "A"), ent({{4, 5}}, "A"),
                                    ent({{0, 0}, {4, 4}}, "A")};
  const std::vector<Entity> pred = {ent({{0, 0}}, "A"), ent({{2, 3}}, "A")};
  const EvalCounts c = score(pred, gold);
  EXPECT_EQ(c, (EvalCounts{1, 2, 4}));
  const Prf p = prf(c);
  EXPECT_EQ(p.precision, 0.5);
  EXPECT_EQ(p.recall, 0.25);
  EXPECT_DOUBLE_EQ(p.f1, 1.0 / 3.0);
}

TEST(Score, ExactMatchNeedsTypeAndAllSegments) {
  EXPECT_TRUE(entity_match(ent({{0, 0}, {3, 3}}, "A"), ent({{0, 0}, {3, 3}}, "A")));
  EXPECT_FALSE(entity_match(ent({{0, 0}, {3, 3}}, "A"), ent({{0, 0}, {3, 3}}, "B")));
  EXPECT_FALSE(entity_match(ent({{0, 0}, {3, 3}}, "A"), ent({{0, 0}, {3, 4}}, "A")));
  EXPECT_FALSE(entity_match(ent({{0, 3}}, "A"), ent({{0, 0}, {1, 3}}, "A")));
}

TEST(Score, DuplicatesCountOnce) {
  const std::vector<Entity> pred = {ent({{1, 1}}, "A"), ent({{1, 1}}, "A")};
  EXPECT_EQ(score(pred, pred), (EvalCounts{1, 1, 1}));
}

TEST(Prf, ZeroDenominators) {
  const Prf p = prf({0, 0, 0});
  EXPECT_EQ(p.precision, 0.0);
  EXPECT_EQ(p.recall, 0.0);
  EXPECT_EQ(p.f1, 0.0);
  EXPECT_EQ(prf({0, 3, 0}).recall, 0.0);
}

TEST(Lengths, ThreeSegmentExample) {
  const Entity e = ent({{0, 0}, {3, 3}, {7, 7}}, "ADE");
  EXPECT_EQ(interval_length(e), 5);
  EXPECT_EQ(span_length(e), 8);
  EXPECT_EQ(interval_length(ent({{2, 4}}, "A")), 0);
  EXPECT_EQ(span_length(ent({{2, 4}}, "A")), 3);
}

TEST(Buckets, Labels) {
  EXPECT_EQ(kIntervalBuckets.bucket_count(), 8u);
  EXPECT_EQ(kIntervalBuckets.bucket_of(0), 0u);
  EXPECT_EQ(kIntervalBuckets.bucket_of(1), 1u);
  EXPECT_EQ(kIntervalBuckets.bucket_of(6), 6u);
  EXPECT_EQ(kIntervalBuckets.bucket_of(40), 7u);
  EXPECT_EQ(kIntervalBuckets.label(0), "<1");
  EXPECT_EQ(kIntervalBuckets.label(3), "3");
  EXPECT_EQ(kIntervalBuckets.label(7), ">=7");
  EXPECT_EQ(kSpanBuckets.label(0), "<3");
}

TEST(Patterns, RunningSentence) {
  const auto gold = testing::running_gold();
  // Every ADE mention shares "pain" at its end and a token at its start.
  for (const Entity& e : gold) {
    if (e.is_discontinuous()) {
      EXPECT_EQ(overlap_pattern(e, gold), OverlapPattern::kMultiple) << to_string(e);
    } else {
      EXPECT_THROW(overlap_pattern(e, gold), std::invalid_argument);
    }
  }
}

TEST(Patterns, EachKind) {
  const Entity a = ent({{0, 0}, {3, 3}}, "A");
  EXPECT_EQ(overlap_pattern(a, std::vector<Entity>{a}), OverlapPattern::kNone);
  EXPECT_EQ(overlap_pattern(a, std::vector<Entity>{a, ent({{0, 1}}, "A")}), OverlapPattern::kLeft);
  EXPECT_EQ(overlap_pattern(a, std::vector<Entity>{a, ent({{2, 3}}, "B")}), OverlapPattern::kRight);
  EXPECT_EQ(overlap_pattern(a, std::vector<Entity>{ent({{0, 0}}, "X"), ent({{3, 3}}, "Y")}),
            OverlapPattern::kMultiple);
  EXPECT_EQ(pattern_name(OverlapPattern::kRight), "right");
}

TEST(Filters, DiscontinuousViews) {
  const std::vector<std::vector<Entity>> gold = {
      {ent({{0, 0}, {3, 3}}, "A"), ent({{5, 5}}, "A")},
      {ent({{1, 2}}, "A")},
  };
  const std::vector<std::vector<Entity>> pred = {
      {ent({{0, 0}, {3, 3}}, "A")},
      {ent({{1, 2}}, "A"), ent({{0, 0}, {4, 4}}, "A")},
  };
  const FilteredScore all = filtered_score(pred, gold, ScoreFilter::kAll);
  EXPECT_EQ(all.counts, (EvalCounts{2, 3, 3}));
  const FilteredScore ds = filtered_score(pred, gold, ScoreFilter::kDiscSentence);
  EXPECT_EQ(ds.counts, (EvalCounts{1, 1, 2}));
  const FilteredScore d = filtered_score(pred, gold, ScoreFilter::kDiscOnly);
  EXPECT_EQ(d.counts, (EvalCounts{1, 2, 1}));
  EXPECT_FALSE(d.empty_filter);

  const std::vector<std::vector<Entity>> flat = {{ent({{1, 2}}, "A")}};
  const FilteredScore none = filtered_score(flat, flat, ScoreFilter::kDiscOnly);
  EXPECT_TRUE(none.empty_filter);
  EXPECT_EQ(none.prf.f1, 0.0);
  EXPECT_THROW(filtered_score(pred, flat, ScoreFilter::kAll), EvaluationError);
}

TEST(Report, BreakdownsAndJson) {
  const std::vector<std::vector<Entity>> gold = {testing::running_gold()};
  const EvalReport r = full_report(gold, gold);
  EXPECT_EQ(r.sentences, 1);
  EXPECT_EQ(r.overall.prf.f1, 1.0);
  EXPECT_EQ(r.disc_only.counts.gold, 3);
  EXPECT_EQ(r.patterns[1].counts.gold, 0);
  EXPECT_EQ(r.patterns[3].counts.gold, 3);
  // intervals 5, 5 and 4; spans 8, 8, 8
  EXPECT_EQ(r.interval[kIntervalBuckets.bucket_of(5)].counts.gold, 2);
  EXPECT_EQ(r.interval[kIntervalBuckets.bucket_of(4)].counts.gold, 1);
  EXPECT_EQ(r.span[kSpanBuckets.bucket_of(8)].counts.gold, 3);
  const auto j = nlohmann::json::parse(report_to_json(r));
  EXPECT_EQ(j["overall"]["f1"].get<double>(), 1.0);
  EXPECT_TRUE(j.contains("disc_sentence"));
  EXPECT_TRUE(j.contains("patterns"));
  EXPECT_EQ(report_to_json(r), report_to_json(full_report(gold, gold)));
  EXPECT_FALSE(report_to_text(r).empty());
}

TEST(Report, UnmatchedPredictionUsesItsOwnSentence) {
  const std::vector<std::vector<Entity>> gold = {{ent({{0, 0}, {3, 3}}, "A")}};
  const std::vector<std::vector<Entity>> pred = {{ent({{0, 0}, {5, 5}}, "A"), ent({{0, 1}}, "A")}};
  const EvalReport r = full_report(pred, gold);
  EXPECT_EQ(r.patterns[0].counts.gold, 1);
  EXPECT_EQ(r.patterns[1].counts.predicted, 1);
}

}  // namespace
}  // namespace macgrid
