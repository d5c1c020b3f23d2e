#include "macgrid/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "macgrid/error.hpp"

namespace macgrid {

std::string_view split_name(Split split) {
  switch (split) {
    case Split::kTrain:
      return "train";
    case Split::kDev:
      return "dev";
    case Split::kTest:
      return "test";
    case Split::kUnspecified:
      break;
  }
  return "";
}

std::vector<std::vector<Entity>> Corpus::gold() const {
  std::vector<std::vector<Entity>> out;
  out.reserve(sentences.size());
  for (const auto& s : sentences) out.push_back(s.entities);
  return out;
}

namespace {

std::vector<std::string_view> split_on(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t begin = 0;
  while (true) {
    const std::size_t pos = text.find(sep, begin);
    if (pos == std::string_view::npos) {
      out.push_back(text.substr(begin));
      return out;
    }
    out.push_back(text.substr(begin, pos - begin));
    begin = pos + 1;
  }
}

int parse_index(std::string_view field, std::size_t line) {
  int value = 0;
  const auto* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (field.empty() || ec != std::errc() || ptr != end || value < 0) {
    throw ParseError(line, "bad token index '" + std::string(field) + "'");
  }
  return value;
}

Entity parse_annotation(std::string_view text, std::size_t line) {
  const std::size_t space = text.find(' ');
  if (space == std::string_view::npos) {
    throw ParseError(line, "annotation '" + std::string(text) + "' has no type");
  }
  Entity entity;
  entity.type = std::string(text.substr(space + 1));
  if (entity.type.empty() || entity.type.find(' ') != std::string::npos) {
    throw ParseError(line, "annotation '" + std::string(text) + "' has a malformed type");
  }
  const auto fields = split_on(text.substr(0, space), ',');
  if (fields.size() % 2 != 0) {
    throw ParseError(line, "annotation '" + std::string(text) + "' has an odd index count");
  }
  for (std::size_t k = 0; k < fields.size(); k += 2) {
    entity.segments.push_back({parse_index(fields[k], line), parse_index(fields[k + 1], line)});
  }
  return entity;
}

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  bool next(std::string& line) {
    if (!std::getline(in_, line)) return false;
    ++number_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  }
  std::size_t number() const { return number_; }

 private:
  std::istream& in_;
  std::size_t number_ = 0;
};

}  // namespace

Corpus parse_inline(std::istream& in) {
  Corpus corpus;
  LineReader reader(in);
  std::string line;
  bool declared_types = false;
  bool have_line = reader.next(line);

  while (have_line && !line.empty() && line[0] == '#') {
    if (line.rfind("#types", 0) == 0 && (line.size() == 6 || line[6] == ' ')) {
      std::istringstream fields(line.substr(6));
      std::string type;
      while (fields >> type) corpus.types.push_back(type);
      try {
        TagAlphabet check(corpus.types);
      } catch (const ConfigError& e) {
        throw ParseError(reader.number(), e.what());
      }
      declared_types = true;
    } else if (line.rfind("#split ", 0) == 0) {
      const std::string value = line.substr(7);
      if (value == "train") {
        corpus.split = Split::kTrain;
      } else if (value == "dev") {
        corpus.split = Split::kDev;
      } else if (value == "test") {
        corpus.split = Split::kTest;
      } else {
        throw ParseError(reader.number(), "unknown split '" + value + "'");
      }
    }
    have_line = reader.next(line);
  }

  std::set<std::string> seen_types;
  while (have_line) {
    const std::size_t token_line = reader.number();
    if (line.empty()) throw ParseError(token_line, "expected a token line");
    AnnotatedSentence entry;
    entry.sentence.id = std::to_string(corpus.sentences.size() + 1);
    for (std::string_view tok : split_on(line, ' ')) {
      if (tok.empty()) throw ParseError(token_line, "empty token");
      entry.sentence.tokens.emplace_back(tok);
    }

    if (!reader.next(line)) throw ParseError(token_line + 1, "missing annotation line");
    const std::size_t ann_line = reader.number();
    if (!line.empty()) {
      for (std::string_view ann : split_on(line, '|')) {
        Entity entity = parse_annotation(ann, ann_line);
        if (auto why = entity_violation(entity, entry.sentence.size())) {
          throw ParseError(ann_line, to_string(entity) + ": " + *why);
        }
        if (declared_types && std::find(corpus.types.begin(), corpus.types.end(),
                                        entity.type) == corpus.types.end()) {
          throw ParseError(ann_line, "unknown entity type '" + entity.type + "'");
        }
        seen_types.insert(entity.type);
        entry.entities.push_back(std::move(entity));
      }
    }
    normalize_entities(entry.entities);
    corpus.sentences.push_back(std::move(entry));

    have_line = reader.next(line);
    if (!have_line) break;
    if (!line.empty()) {
      throw ParseError(reader.number(), "expected a blank line between sentences");
    }
    have_line = reader.next(line);
  }

  if (!declared_types) corpus.types.assign(seen_types.begin(), seen_types.end());
  return corpus;
}

Corpus parse_inline_string(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_inline(in);
}

void write_inline(std::ostream& out, const Corpus& corpus) {
  if (!corpus.types.empty()) {
    out << "#types";
    for (const auto& t : corpus.types) out << ' ' << t;
    out << '\n';
  }
  if (corpus.split != Split::kUnspecified) out << "#split " << split_name(corpus.split) << '\n';
  for (std::size_t s = 0; s < corpus.sentences.size(); ++s) {
    if (s > 0) out << '\n';
    const auto& entry = corpus.sentences[s];
    for (std::size_t t = 0; t < entry.sentence.tokens.size(); ++t) {
      if (t > 0) out << ' ';
      out << entry.sentence.tokens[t];
    }
    out << '\n';
    std::vector<Entity> entities = entry.entities;
    normalize_entities(entities);
    for (std::size_t e = 0; e < entities.size(); ++e) {
      if (e > 0) out << '|';
      const auto& segs = entities[e].segments;
      for (std::size_t k = 0; k < segs.size(); ++k) {
        if (k > 0) out << ',';
        out << segs[k].start << ',' << segs[k].end;
      }
      out << ' ' << entities[e].type;
    }
    out << '\n';
  }
}

std::string write_inline_string(const Corpus& corpus) {
  std::ostringstream out;
  write_inline(out, corpus);
  return out.str();
}

void validate_corpus(const Corpus& corpus) {
  for (const auto& entry : corpus.sentences) {
    for (const auto& e : entry.entities) {
      if (auto why = entity_violation(e, entry.sentence.size())) {
        throw ConfigError("sentence " + entry.sentence.id + ": " + to_string(e) + ": " + *why);
      }
      if (std::find(corpus.types.begin(), corpus.types.end(), e.type) == corpus.types.end()) {
        throw ConfigError("sentence " + entry.sentence.id + ": undeclared type '" + e.type +
                          "'");
      }
    }
  }
}

CorpusStats corpus_stats(const Corpus& corpus) {
  CorpusStats stats;
  stats.sentences = static_cast<long>(corpus.sentences.size());
  for (const auto& entry : corpus.sentences) {
    stats.mentions += static_cast<long>(entry.entities.size());
    stats.discontinuous += std::count_if(entry.entities.begin(), entry.entities.end(),
                                         [](const Entity& e) { return e.is_discontinuous(); });
  }
  return stats;
}

std::string stats_to_text(const CorpusStats& stats) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "S %ld  M %ld  D %ld  P %.1f", stats.sentences, stats.mentions,
                stats.discontinuous, stats.discontinuous_percent());
  return buf;
}

std::string stats_to_json(const CorpusStats& stats) {
  nlohmann::ordered_json doc;
  doc["sentences"] = stats.sentences;
  doc["mentions"] = stats.mentions;
  doc["discontinuous"] = stats.discontinuous;
  doc["discontinuous_percent"] = stats.discontinuous_percent();
  return doc.dump(2) + "\n";
}

std::string corpus_to_json(const Corpus& corpus) {
  nlohmann::ordered_json doc;
  doc["types"] = corpus.types;
  doc["split"] = std::string(split_name(corpus.split));
  auto& sentences = doc["sentences"] = nlohmann::ordered_json::array();
  for (const auto& entry : corpus.sentences) {
    nlohmann::ordered_json s;
    s["id"] = entry.sentence.id;
    s["tokens"] = entry.sentence.tokens;
    auto& entities = s["entities"] = nlohmann::ordered_json::array();
    for (const auto& e : entry.entities) {
      nlohmann::ordered_json segs = nlohmann::ordered_json::array();
      for (const auto& seg : e.segments) segs.push_back({seg.start, seg.end});
      entities.push_back({{"type", e.type}, {"segments", std::move(segs)}});
    }
    sentences.push_back(std::move(s));
  }
  return doc.dump(2) + "\n";
}

}  // namespace macgrid
