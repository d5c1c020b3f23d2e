#include <gtest/gtest.h>

#include <random>

#include "macgrid/entity.hpp"
#include "macgrid/error.hpp"

namespace macgrid {
namespace {

TEST(SegmentOrder, StartThenEnd) {
  EXPECT_LT((Segment{0, 1}), (Segment{0, 2}));
  EXPECT_EQ((Segment{3, 3}), (Segment{3, 3}));
  EXPECT_LT((Segment{0, 7}), (Segment{5, 6}));
}

TEST(SegmentOrder, TotalOrderOnRandomTriples) {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> pos(0, 5);
  auto draw = [&] {
    int a = pos(rng), b = pos(rng);
    return Segment{std::min(a, b), std::max(a, b)};
  };
  for (int k = 0; k < 2000; ++k) {
    const Segment a = draw(), b = draw(), c = draw();
    EXPECT_TRUE(a <= a);
    if (a <= b && b <= a) {
      EXPECT_EQ(a, b);
    }
    if (a < b && b < c) {
      EXPECT_LT(a, c);
    }
    EXPECT_TRUE(a < b || b < a || a == b);
  }
}

TEST(SegmentOrder, Overlap) {
  EXPECT_TRUE((Segment{0, 2}).overlaps({2, 4}));
  EXPECT_FALSE((Segment{0, 1}).overlaps({2, 4}));
  EXPECT_EQ((Segment{5, 6}).length(), 2);
}

TEST(EntityViolation, AcceptsOrderedDisjoint) {
  EXPECT_FALSE(entity_violation({{{0, 1}, {7, 7}}, "ADE"}, 9));
  // touching segments are still disjoint
  EXPECT_FALSE(entity_violation({{{0, 1}, {2, 3}}, "ADE"}, 9));
}

TEST(EntityViolation, RejectsBadShapes) {
  EXPECT_TRUE(entity_violation({{}, "ADE"}, 9));
  EXPECT_TRUE(entity_violation({{{3, 2}}, "ADE"}, 9));
  EXPECT_TRUE(entity_violation({{{0, 9}}, "ADE"}, 9));
  EXPECT_TRUE(entity_violation({{{-1, 0}}, "ADE"}, 9));
  EXPECT_TRUE(entity_violation({{{0, 2}, {2, 3}}, "ADE"}, 9));
  EXPECT_TRUE(entity_violation({{{4, 5}, {0, 1}}, "ADE"}, 9));
}

TEST(NormalizeEntities, SortsAndDedups) {
  std::vector<Entity> e = {{{{5, 6}}, "POB"}, {{{0, 0}}, "ADE"}, {{{5, 6}}, "POB"}};
  normalize_entities(e);
  ASSERT_EQ(e.size(), 2u);
  EXPECT_EQ(e[0].segments[0], (Segment{0, 0}));
}

TEST(TagAlphabet, Sizes) {
  EXPECT_EQ(TagAlphabet({"ADE"}).segment_size(), 3);
  EXPECT_EQ(TagAlphabet({"ADE"}).edge_size(), 2);
  const TagAlphabet two({"ADE", "POB"});
  EXPECT_EQ(two.segment_size(), 6);
  EXPECT_EQ(two.edge_size(), 4);
}

TEST(TagAlphabet, RejectsBadInventories) {
  EXPECT_THROW(TagAlphabet({}), ConfigError);
  EXPECT_THROW(TagAlphabet({"ADE", "ADE"}), ConfigError);
  EXPECT_THROW(TagAlphabet({""}), ConfigError);
}

TEST(TagAlphabet, IndexOrderIsTypeMajor) {
  const TagAlphabet a({"ADE", "POB"});
  EXPECT_EQ(a.index(SegmentTag{0, SegmentRole::kB}), 0);
  EXPECT_EQ(a.index(SegmentTag{0, SegmentRole::kS}), 2);
  EXPECT_EQ(a.index(SegmentTag{1, SegmentRole::kI}), 4);
  EXPECT_EQ(a.index(EdgeTag{1, EdgeKind::kT2T}), 3);
  for (int k = 0; k < a.segment_size(); ++k) EXPECT_EQ(a.index(a.segment_tag(k)), k);
  for (int k = 0; k < a.edge_size(); ++k) EXPECT_EQ(a.index(a.edge_tag(k)), k);
}

TEST(TagAlphabet, NamesRoundTrip) {
  const TagAlphabet a({"ADE", "POB"});
  EXPECT_EQ(a.name(SegmentTag{1, SegmentRole::kS}), "POB-S");
  EXPECT_EQ(a.name(EdgeTag{0, EdgeKind::kH2H}), "ADE-H2H");
  EXPECT_EQ(a.parse_segment_tag("ADE-B"), (SegmentTag{0, SegmentRole::kB}));
  EXPECT_EQ(a.parse_edge_tag("POB-T2T"), (EdgeTag{1, EdgeKind::kT2T}));
  EXPECT_FALSE(a.parse_segment_tag("XYZ-B"));
  EXPECT_FALSE(a.parse_segment_tag("ADE-H2H"));
}

TEST(SegmentTagTable, UpperTriangleOnly) {
  SegmentTagTable t(4);
  t.add(1, 3, {0, SegmentRole::kS});
  EXPECT_THROW(t.add(3, 1, {0, SegmentRole::kS}), EncodingError);
  EXPECT_THROW(t.add(0, 4, {0, SegmentRole::kS}), EncodingError);
  EXPECT_EQ(t.cell_count(), 1u);
  EXPECT_EQ(SegmentTagTable::addressable_cells(4), 10u);
}

TEST(EdgeTagTable, CanonicalizesCoordinates) {
  EdgeTagTable t(5);
  t.add(3, 1, {0, EdgeKind::kH2H});
  EXPECT_TRUE(t.contains(1, 3, {0, EdgeKind::kH2H}));
  EXPECT_TRUE(t.contains(3, 1, {0, EdgeKind::kH2H}));
  for (const auto& [cell, tags] : t.cells()) EXPECT_LE(cell.first, cell.second);
}

TEST(Sentence, Validation) {
  EXPECT_THROW(validate_sentence({"x", {}}), InputError);
  EXPECT_THROW(validate_sentence({"x", {"a", ""}}), InputError);
  EXPECT_NO_THROW(validate_sentence({"x", {"a"}}));
}

}  // namespace
}  // namespace macgrid
