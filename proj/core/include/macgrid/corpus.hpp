#pragma once

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "macgrid/entity.hpp"

namespace macgrid {

enum class Split { kUnspecified, kTrain, kDev, kTest };

std::string_view split_name(Split split);

struct AnnotatedSentence {
  Sentence sentence;
  std::vector<Entity> entities;  // sorted, unique

  friend bool operator==(const AnnotatedSentence&, const AnnotatedSentence&) = default;
};

struct Corpus {
  std::vector<std::string> types;
  Split split = Split::kUnspecified;
  std::vector<AnnotatedSentence> sentences;

  // Throws ConfigError when no types are declared.
  TagAlphabet alphabet() const { return TagAlphabet(types); }
  std::vector<std::vector<Entity>> gold() const;

  friend bool operator==(const Corpus&, const Corpus&) = default;
};

// Inline corpus format (see docs/formats.md):
//
//   #types ADE POB            optional, must precede the first sentence
//   #split train              optional
//   # anything else           comment, header only
//   Sever joint , shoulder and upper body pain .
//   0,0,3,3,7,7 ADE|5,6 POB
//   <blank line>
//   next sentence ...
//
// Index pairs are 0-based and inclusive. The annotation line may be empty.
// Sentence ids are the 1-based ordinal of the sentence in the stream.
// Entities are sorted and deduplicated. When no #types line is present the
// inventory is the sorted set of types seen in the data.
// Throws ParseError with the offending line number.
Corpus parse_inline(std::istream& in);
Corpus parse_inline_string(std::string_view text);

// Canonical serialization; parse_inline(write_inline(c)) == c for any
// corpus produced by parse_inline or the synthetic generator.
void write_inline(std::ostream& out, const Corpus& corpus);
std::string write_inline_string(const Corpus& corpus);

// Throws ConfigError naming the first invalid entity or undeclared type.
void validate_corpus(const Corpus& corpus);

struct CorpusStats {
  long sentences = 0;               // S
  long mentions = 0;                // M
  long discontinuous = 0;           // D
  double discontinuous_percent() const {  // P = 100 * D / M
    return mentions == 0 ? 0.0 : 100.0 * static_cast<double>(discontinuous) / mentions;
  }

  CorpusStats& operator+=(const CorpusStats& o) {
    sentences += o.sentences;
    mentions += o.mentions;
    discontinuous += o.discontinuous;
    return *this;
  }
  friend bool operator==(const CorpusStats&, const CorpusStats&) = default;
};

CorpusStats corpus_stats(const Corpus& corpus);

// "S 5340  M 4430  D 491  P 11.1"
std::string stats_to_text(const CorpusStats& stats);
std::string stats_to_json(const CorpusStats& stats);

// One JSON object per corpus: types, split, and sentences with tokens and
// entities as [[start, end], ...] lists.
std::string corpus_to_json(const Corpus& corpus);

}  // namespace macgrid
