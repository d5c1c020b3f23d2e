#pragma once

#include <string>
#include <utility>
#include <vector>

#include "macgrid/grid_codec.hpp"

namespace macgrid {

// Newline-delimited JSON streams. The first line is a header naming the
// stream kind and the type inventory; every later line is one sentence.
enum class RecordKind { kTables, kGrids };

using ConfigEcho = std::vector<std::pair<std::string, std::string>>;

struct RecordHeader {
  RecordKind kind = RecordKind::kTables;
  std::vector<std::string> types;
  ConfigEcho config;
};

struct TableRecord {
  Sentence sentence;
  SegmentTagTable segments;
  EdgeTagTable edges;
};

struct GridRecord {
  Sentence sentence;
  ProbGrid segment;
  ProbGrid edge;
};

std::string header_line(const RecordHeader& header);
std::string record_line(const TableRecord& record, const TagAlphabet& alphabet);
std::string record_line(const GridRecord& record);

// `line_number` only feeds error messages. Malformed JSON or fields raise
// ParseError; a cell outside the record's own n raises DecodingError.
RecordHeader parse_header(const std::string& line, std::size_t line_number = 1);
TableRecord parse_table_record(const std::string& line, const TagAlphabet& alphabet,
                               std::size_t line_number);
GridRecord parse_grid_record(const std::string& line, const TagAlphabet& alphabet,
                             std::size_t line_number);

}  // namespace macgrid
