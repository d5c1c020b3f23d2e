#include <gtest/gtest.h>

#include <nlohmann/json.hpp>
#include <sstream>

#include "macgrid/checkpoint.hpp"
#include "macgrid/error.hpp"
#include "macgrid/table_records.hpp"
#include "support/fixtures.hpp"

namespace macgrid {
namespace {

Checkpoint sample() {
  ModelConfig config;
  config.dim = 4;
  config.max_length = 10;
  config.use_length_embedding = false;
  Checkpoint cp;
  cp.model = Model::initialize(config, Vocabulary({"<unk>", "x", "y"}), {"ADE", "POB"}, 5);
  cp.model.params.token_embedding(1, 2) = 1.0 / 3.0;
  cp.model.params.edge_head_bias(0) = -1e-300;
  cp.threshold = 0.3;
  cp.provenance = {{"epochs", "3"}, {"seed", "5"}};
  return cp;
}

TEST(Checkpoint, RoundTripIsExact) {
  const Checkpoint cp = sample();
  const std::string text = checkpoint_to_string(cp);
  const Checkpoint back = checkpoint_from_string(text);
  EXPECT_EQ(back.model.config.dim, 4);
  EXPECT_EQ(back.model.config.num_types, 2);
  EXPECT_EQ(back.model.config.vocab_size, 3);
  EXPECT_FALSE(back.model.config.use_length_embedding);
  EXPECT_EQ(back.model.vocab, cp.model.vocab);
  EXPECT_EQ(back.model.types, cp.model.types);
  EXPECT_EQ(back.threshold, 0.3);
  EXPECT_EQ(back.provenance, cp.provenance);
  std::vector<Mat> a, b;
  cp.model.params.for_each([&](const std::string&, const auto& t) { a.emplace_back(t); });
  back.model.params.for_each([&](const std::string&, const auto& t) { b.emplace_back(t); });
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_EQ(a[k], b[k]);
  EXPECT_EQ(checkpoint_to_string(back), text);
  EXPECT_EQ(text.back(), '\n');

  std::stringstream io;
  save_checkpoint(io, cp);
  EXPECT_EQ(io.str(), text);
  EXPECT_EQ(checkpoint_to_string(load_checkpoint(io)), text);
}

TEST(Checkpoint, Errors) {
  EXPECT_THROW(checkpoint_from_string("{"), InputError);
  EXPECT_THROW(checkpoint_from_string("{}"), InputError);
  auto doc = nlohmann::json::parse(checkpoint_to_string(sample()));
  auto bad = doc;
  bad["format"] = "other";
  EXPECT_THROW(checkpoint_from_string(bad.dump()), InputError);
  bad = doc;
  bad["version"] = 99;
  EXPECT_THROW(checkpoint_from_string(bad.dump()), InputError);
  bad = doc;
  bad["tensors"][0]["rows"] = 7;
  EXPECT_THROW(checkpoint_from_string(bad.dump()), InputError);
  bad = doc;
  bad["tensors"].erase(bad["tensors"].size() - 1);
  EXPECT_THROW(checkpoint_from_string(bad.dump()), InputError);
  bad = doc;
  bad["vocab"].push_back("extra");
  EXPECT_THROW(checkpoint_from_string(bad.dump()), InputError);
}

const TagAlphabet kTypes({"ADE", "POB"});

TEST(Records, TableRoundTrip) {
  const Sentence s = testing::running_sentence();
  const auto gold = testing::running_gold();
  TableRecord rec{s, encode_segment_table(s, gold, kTypes), encode_edge_table(s, gold, kTypes)};
  const std::string line = record_line(rec, kTypes);
  EXPECT_EQ(line.find('\n'), std::string::npos);
  const TableRecord back = parse_table_record(line, kTypes, 2);
  EXPECT_EQ(back.sentence, s);
  EXPECT_EQ(back.segments.cells(), rec.segments.cells());
  EXPECT_EQ(back.edges.cells(), rec.edges.cells());
  EXPECT_EQ(record_line(back, kTypes), line);
  const auto j = nlohmann::json::parse(line);
  EXPECT_EQ(j["n"], 9);
  EXPECT_EQ(j["segment"][0][2], "ADE-B");
}

TEST(Records, GridRoundTrip) {
  GridRecord rec{Sentence{"7", {"a", "b"}}, ProbGrid(2, 6, GridKind::kSegment),
                 ProbGrid(2, 4, GridKind::kEdge)};
  rec.segment.at(0, 1, 2) = 0.125;
  rec.edge.at(1, 0, 3) = 0.1;
  const GridRecord back = parse_grid_record(record_line(rec), kTypes, 2);
  EXPECT_EQ(back.segment.values, rec.segment.values);
  EXPECT_EQ(back.edge.values, rec.edge.values);
  EXPECT_EQ(back.sentence, rec.sentence);
}

TEST(Records, Header) {
  const RecordHeader h{RecordKind::kGrids, {"ADE", "POB"}, {{"threshold", "0.5"}}};
  const RecordHeader back = parse_header(header_line(h));
  EXPECT_EQ(back.kind, RecordKind::kGrids);
  EXPECT_EQ(back.types, h.types);
  EXPECT_EQ(back.config, h.config);
  EXPECT_THROW(parse_header("{\"format\":\"nope\",\"version\":1,\"types\":[]}", 1), ParseError);
  EXPECT_THROW(parse_header("not json", 1), ParseError);
}

TEST(Records, Errors) {
  try {
    parse_table_record("{\"id\":\"1\"", kTypes, 5);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 5u);
  }
  EXPECT_THROW(parse_table_record(
                   R"({"id":"1","n":3,"tokens":["a","b"],"segment":[],"edge":[]})", kTypes, 1),
               DecodingError);
  EXPECT_THROW(parse_table_record(
                   R"({"id":"1","n":2,"tokens":["a","b"],"segment":[[0,5,"ADE-S"]],"edge":[]})",
                   kTypes, 1),
               DecodingError);
  EXPECT_THROW(parse_table_record(
                   R"({"id":"1","n":2,"tokens":["a","b"],"segment":[[0,1,"XX-S"]],"edge":[]})",
                   kTypes, 1),
               ParseError);
}

}  // namespace
}  // namespace macgrid
