#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>

#include "macgrid/corpus.hpp"
#include "macgrid/metrics.hpp"

namespace macgrid {

// Relative frequencies of the mention templates. Each template is a short
// token pattern built from word classes (modifier, finding, site, body,
// gap, filler) whose annotation is fixed by construction:
//
//   continuous   "mod fnd" / "fnd" as ADE, or "body" as POB
//   no_overlap   "site gap{1..3} fnd"           -> ADE [site][fnd]
//   left         "site fnd1 and fnd2"           -> ADE "site fnd1", ADE [site][fnd2]
//   right        "site1 and site2 fnd"          -> ADE [site1][fnd], ADE "site2 fnd"
//   multiple     "mod site1 and site2 fnd"      -> ADE [mod site1][fnd], ADE [mod][site2][fnd]
//                (or the three-site variant "mod site1 , site2 and site3 fnd")
struct TemplateMix {
  double continuous = 0.30;
  double no_overlap = 0.20;
  double left = 0.15;
  double right = 0.15;
  double multiple = 0.20;

  std::array<double, 5> as_array() const { return {continuous, no_overlap, left, right, multiple}; }
};

struct SynthSpec {
  int vocab_size = 50;
  int sentences = 100;
  int max_length = 20;
  int max_mentions = 4;    // per sentence
  int max_templates = 3;   // per sentence
  double empty_rate = 0.05;
  TemplateMix mix;
  std::uint64_t seed = 42;
  Split split = Split::kUnspecified;

  // Throws ConfigError (bad frequencies, sizes) or GenerationError
  // (no template with positive weight fits max_length / max_mentions).
  void validate() const;
};

// Ground truth tallied from the templates, independently of the metric code.
struct SynthTruth {
  CorpusStats stats;
  std::array<long, 4> patterns{};  // indexed by OverlapPattern
  std::map<int, long> interval;    // discontinuous mentions by interval length
  std::map<int, long> span;        // discontinuous mentions by span length
  long rejected_sentences = 0;     // draws that failed the decode roundtrip
};

struct SynthResult {
  Corpus corpus;
  SynthTruth truth;
};

// Deterministic for a fixed spec. Every sentence satisfies roundtrip_check;
// non-representable draws are regenerated. Types are {ADE, POB}.
SynthResult generate_synthetic(const SynthSpec& spec);

std::string truth_to_json(const SynthTruth& truth);

}  // namespace macgrid
