#include "macgrid/table_records.hpp"

#include <nlohmann/json.hpp>

#include "macgrid/error.hpp"

namespace macgrid {

namespace {

using Json = nlohmann::ordered_json;

constexpr std::string_view kTablesFormat = "macgrid-tables";
constexpr std::string_view kGridsFormat = "macgrid-grids";
constexpr int kRecordVersion = 1;

Json sentence_fields(const Sentence& s) {
  Json j;
  j["id"] = s.id;
  j["n"] = s.size();
  j["tokens"] = s.tokens;
  return j;
}

Json parse_json(const std::string& line, std::size_t line_number) {
  try {
    return Json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(line_number, std::string("invalid JSON: ") + e.what());
  }
}

// Reads id, tokens and the declared n; returns n.
int read_sentence(const Json& j, Sentence& s) {
  s.id = j.at("id").get<std::string>();
  s.tokens = j.at("tokens").get<std::vector<std::string>>();
  return j.at("n").get<int>();
}

void check_n(const Sentence& s, int n) {
  if (n != s.size()) {
    throw DecodingError("record " + s.id + " declares n=" + std::to_string(n) + " but has " +
                        std::to_string(s.size()) + " tokens");
  }
}

}  // namespace

std::string header_line(const RecordHeader& header) {
  Json j;
  j["format"] = header.kind == RecordKind::kTables ? kTablesFormat : kGridsFormat;
  j["version"] = kRecordVersion;
  j["types"] = header.types;
  Json config = Json::object();
  for (const auto& [key, value] : header.config) config[key] = value;
  j["config"] = std::move(config);
  return j.dump();
}

std::string record_line(const TableRecord& record, const TagAlphabet& alphabet) {
  Json j = sentence_fields(record.sentence);
  Json seg = Json::array();
  for (const auto& [cell, tags] : record.segments.cells()) {
    for (const auto& tag : tags) seg.push_back({cell.first, cell.second, alphabet.name(tag)});
  }
  Json edge = Json::array();
  for (const auto& [cell, tags] : record.edges.cells()) {
    for (const auto& tag : tags) edge.push_back({cell.first, cell.second, alphabet.name(tag)});
  }
  j["segment"] = std::move(seg);
  j["edge"] = std::move(edge);
  return j.dump();
}

std::string record_line(const GridRecord& record) {
  Json j = sentence_fields(record.sentence);
  j["segment_tags"] = record.segment.k;
  j["edge_tags"] = record.edge.k;
  j["segment"] = record.segment.values;
  j["edge"] = record.edge.values;
  return j.dump();
}

RecordHeader parse_header(const std::string& line, std::size_t line_number) {
  const Json j = parse_json(line, line_number);
  try {
    RecordHeader h;
    const auto format = j.at("format").get<std::string>();
    if (format == kTablesFormat) {
      h.kind = RecordKind::kTables;
    } else if (format == kGridsFormat) {
      h.kind = RecordKind::kGrids;
    } else {
      throw ParseError(line_number, "unknown record format '" + format + "'");
    }
    if (j.at("version").get<int>() != kRecordVersion) {
      throw ParseError(line_number, "unsupported record version");
    }
    h.types = j.at("types").get<std::vector<std::string>>();
    if (j.contains("config")) {
      for (const auto& [key, value] : j.at("config").items()) {
        h.config.emplace_back(key, value.get<std::string>());
      }
    }
    return h;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(line_number, std::string("bad header: ") + e.what());
  }
}

TableRecord parse_table_record(const std::string& line, const TagAlphabet& alphabet,
                               std::size_t line_number) {
  const Json j = parse_json(line, line_number);
  TableRecord r;
  std::vector<std::tuple<int, int, std::string>> seg, edge;
  int n = 0;
  try {
    n = read_sentence(j, r.sentence);
    seg = j.at("segment").get<decltype(seg)>();
    edge = j.at("edge").get<decltype(edge)>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(line_number, std::string("bad table record: ") + e.what());
  }
  check_n(r.sentence, n);
  r.segments = SegmentTagTable(n);
  r.edges = EdgeTagTable(n);
  try {
    for (const auto& [i, k, name] : seg) {
      auto tag = alphabet.parse_segment_tag(name);
      if (!tag) throw ParseError(line_number, "unknown segment tag '" + name + "'");
      r.segments.add(i, k, *tag);
    }
    for (const auto& [i, k, name] : edge) {
      auto tag = alphabet.parse_edge_tag(name);
      if (!tag) throw ParseError(line_number, "unknown edge tag '" + name + "'");
      r.edges.add(i, k, *tag);
    }
  } catch (const EncodingError& e) {
    throw DecodingError("record " + r.sentence.id + ": " + e.what());
  }
  return r;
}

GridRecord parse_grid_record(const std::string& line, const TagAlphabet& alphabet,
                             std::size_t line_number) {
  const Json j = parse_json(line, line_number);
  GridRecord r;
  int n = 0;
  std::vector<double> seg, edge;
  try {
    n = read_sentence(j, r.sentence);
    seg = j.at("segment").get<std::vector<double>>();
    edge = j.at("edge").get<std::vector<double>>();
    if (j.at("segment_tags").get<int>() != alphabet.segment_size() ||
        j.at("edge_tags").get<int>() != alphabet.edge_size()) {
      throw ParseError(line_number, "tag counts do not match the header's types");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(line_number, std::string("bad grid record: ") + e.what());
  }
  check_n(r.sentence, n);
  r.segment = ProbGrid(n, alphabet.segment_size(), GridKind::kSegment);
  r.edge = ProbGrid(n, alphabet.edge_size(), GridKind::kEdge);
  if (seg.size() != r.segment.values.size() || edge.size() != r.edge.values.size()) {
    throw DecodingError("record " + r.sentence.id + ": grid size does not match n=" +
                        std::to_string(n));
  }
  r.segment.values = std::move(seg);
  r.edge.values = std::move(edge);
  return r;
}

}  // namespace macgrid
