#include "macgrid/synth.hpp"

#include <algorithm>
#include <nlohmann/json.hpp>
#include <random>

#include "macgrid/clique_decoder.hpp"
#include "macgrid/error.hpp"

namespace macgrid {

namespace {

enum class WordClass { kMod, kFnd, kSite, kBody, kGap, kFill };
constexpr int kNumClasses = 6;

enum class Template { kContinuous, kNoOverlap, kLeft, kRight, kMultiple };

struct TruthMention {
  OverlapPattern pattern;
  int interval;
  int span;
};

struct Instance {
  std::vector<std::string> tokens;
  std::vector<Entity> entities;  // offsets relative to the instance start
  std::vector<TruthMention> truth;
};

class Lexicon {
 public:
  explicit Lexicon(int vocab_size) {
    const int base = (vocab_size - 2) / kNumClasses;
    const char* prefix[kNumClasses] = {"mod", "fnd", "site", "body", "gap", "w"};
    for (int c = 0; c < kNumClasses; ++c) {
      int size = base;
      if (c == static_cast<int>(WordClass::kFill)) size = vocab_size - 2 - base * (kNumClasses - 1);
      for (int w = 0; w < size; ++w) words_[c].push_back(prefix[c] + std::to_string(w));
    }
  }

  const std::string& draw(WordClass c, std::mt19937_64& rng) const {
    const auto& pool = words_[static_cast<int>(c)];
    return pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
  }

 private:
  std::array<std::vector<std::string>, kNumClasses> words_;
};

Entity ade(std::vector<Segment> segments) { return {std::move(segments), "ADE"}; }

int min_length(Template t) {
  switch (t) {
    case Template::kContinuous:
      return 1;
    case Template::kNoOverlap:
      return 3;
    case Template::kLeft:
    case Template::kRight:
      return 4;
    case Template::kMultiple:
      return 5;
  }
  return 1;
}

int min_mentions(Template t) {
  return t == Template::kContinuous || t == Template::kNoOverlap ? 1 : 2;
}

Instance instantiate(Template t, const Lexicon& lex, std::mt19937_64& rng, int max_len,
                     int max_mentions) {
  Instance inst;
  auto word = [&](WordClass c) { inst.tokens.push_back(lex.draw(c, rng)); };
  switch (t) {
    case Template::kContinuous: {
      const int variant = std::uniform_int_distribution<int>(0, 2)(rng);
      if (variant == 0) {
        word(WordClass::kFnd);
        inst.entities.push_back(ade({{0, 0}}));
      } else if (variant == 1 && max_len >= 2) {
        word(WordClass::kMod);
        word(WordClass::kFnd);
        inst.entities.push_back(ade({{0, 1}}));
      } else {
        word(WordClass::kBody);
        inst.entities.push_back({{{0, 0}}, "POB"});
      }
      break;
    }
    case Template::kNoOverlap: {
      const int gap = std::uniform_int_distribution<int>(1, std::min(3, max_len - 2))(rng);
      word(WordClass::kSite);
      for (int g = 0; g < gap; ++g) word(WordClass::kGap);
      word(WordClass::kFnd);
      inst.entities.push_back(ade({{0, 0}, {gap + 1, gap + 1}}));
      inst.truth.push_back({OverlapPattern::kNone, gap, gap + 2});
      break;
    }
    case Template::kLeft:
      word(WordClass::kSite);
      word(WordClass::kFnd);
      inst.tokens.push_back("and");
      word(WordClass::kFnd);
      inst.entities.push_back(ade({{0, 1}}));
      inst.entities.push_back(ade({{0, 0}, {3, 3}}));
      inst.truth.push_back({OverlapPattern::kLeft, 2, 4});
      break;
    case Template::kRight:
      word(WordClass::kSite);
      inst.tokens.push_back("and");
      word(WordClass::kSite);
      word(WordClass::kFnd);
      inst.entities.push_back(ade({{0, 0}, {3, 3}}));
      inst.entities.push_back(ade({{2, 3}}));
      inst.truth.push_back({OverlapPattern::kRight, 2, 4});
      break;
    case Template::kMultiple: {
      const bool three = max_len >= 7 && max_mentions >= 3 &&
                         std::uniform_int_distribution<int>(0, 1)(rng) == 1;
      word(WordClass::kMod);
      word(WordClass::kSite);
      if (three) {
        inst.tokens.push_back(",");
        word(WordClass::kSite);
      }
      inst.tokens.push_back("and");
      word(WordClass::kSite);
      word(WordClass::kFnd);
      const int last = static_cast<int>(inst.tokens.size()) - 1;
      inst.entities.push_back(ade({{0, 1}, {last, last}}));
      inst.truth.push_back({OverlapPattern::kMultiple, last - 2, last + 1});
      if (three) {
        inst.entities.push_back(ade({{0, 0}, {3, 3}, {6, 6}}));
        inst.entities.push_back(ade({{0, 0}, {5, 5}, {6, 6}}));
        inst.truth.push_back({OverlapPattern::kMultiple, 4, 7});
        inst.truth.push_back({OverlapPattern::kMultiple, 4, 7});
      } else {
        inst.entities.push_back(ade({{0, 0}, {3, 3}, {4, 4}}));
        inst.truth.push_back({OverlapPattern::kMultiple, 2, 5});
      }
      break;
    }
  }
  return inst;
}

struct Draft {
  AnnotatedSentence sentence;
  std::vector<TruthMention> truth;
};

}  // namespace

void SynthSpec::validate() const {
  if (vocab_size < 2 + kNumClasses) {
    throw ConfigError("synthetic vocabulary needs at least " + std::to_string(2 + kNumClasses) +
                      " words");
  }
  if (sentences < 0) throw ConfigError("sentence count must be non-negative");
  if (max_length < 1) throw ConfigError("max length must be at least 1");
  if (max_mentions < 1 || max_templates < 1) {
    throw ConfigError("max mentions and max templates must be at least 1");
  }
  if (!(empty_rate >= 0.0 && empty_rate <= 1.0)) throw ConfigError("empty rate must be in [0,1]");
  double total = 0.0;
  for (double f : mix.as_array()) {
    if (!(f >= 0.0)) throw ConfigError("template frequencies must be non-negative");
    total += f;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ConfigError("template frequencies must sum to 1");
  const auto weights = mix.as_array();
  bool feasible = false;
  for (int t = 0; t < 5; ++t) {
    const auto tmpl = static_cast<Template>(t);
    if (weights[t] > 0.0 && min_length(tmpl) <= max_length && min_mentions(tmpl) <= max_mentions) {
      feasible = true;
    }
  }
  if (!feasible && empty_rate < 1.0) {
    throw GenerationError("no template with positive frequency fits max_length=" +
                          std::to_string(max_length) + " and max_mentions=" +
                          std::to_string(max_mentions));
  }
}

SynthResult generate_synthetic(const SynthSpec& spec) {
  spec.validate();
  SynthResult result;
  result.corpus.types = {"ADE", "POB"};
  result.corpus.split = spec.split;
  const TagAlphabet alphabet(result.corpus.types);
  const Lexicon lexicon(spec.vocab_size);
  std::mt19937_64 rng(spec.seed);
  const auto weights = spec.mix.as_array();
  std::discrete_distribution<int> pick_template(weights.begin(), weights.end());
  std::bernoulli_distribution empty(spec.empty_rate);

  auto draw_sentence = [&]() {
    Draft draft;
    std::vector<Instance> parts;
    int length = 0;
    int mentions = 0;
    const int wanted =
        empty(rng) ? 0 : std::uniform_int_distribution<int>(1, spec.max_templates)(rng);
    for (int k = 0; k < wanted; ++k) {
      const auto tmpl = static_cast<Template>(pick_template(rng));
      const int separator = parts.empty() ? 0 : 1;
      const int room = spec.max_length - length - separator;
      if (min_length(tmpl) > room || mentions + min_mentions(tmpl) > spec.max_mentions) continue;
      Instance inst = instantiate(tmpl, lexicon, rng, room, spec.max_mentions - mentions);
      length += separator + static_cast<int>(inst.tokens.size());
      mentions += static_cast<int>(inst.entities.size());
      parts.push_back(std::move(inst));
    }

    auto& tokens = draft.sentence.sentence.tokens;
    int budget = spec.max_length - length;
    auto fillers = [&](int lo, int hi) {
      hi = std::min(hi, budget);
      if (hi < lo) return;
      const int count = std::uniform_int_distribution<int>(lo, hi)(rng);
      for (int f = 0; f < count; ++f) tokens.push_back(lexicon.draw(WordClass::kFill, rng));
      budget -= count;
    };

    if (parts.empty()) {
      fillers(1, 8);
      return draft;
    }
    fillers(0, 2);
    for (std::size_t p = 0; p < parts.size(); ++p) {
      if (p > 0) {
        tokens.push_back(lexicon.draw(WordClass::kFill, rng));
        fillers(0, 1);
      }
      const int offset = static_cast<int>(tokens.size());
      for (Entity e : parts[p].entities) {
        for (Segment& s : e.segments) {
          s.start += offset;
          s.end += offset;
        }
        draft.sentence.entities.push_back(std::move(e));
      }
      tokens.insert(tokens.end(), parts[p].tokens.begin(), parts[p].tokens.end());
      draft.truth.insert(draft.truth.end(), parts[p].truth.begin(), parts[p].truth.end());
    }
    fillers(0, 2);
    normalize_entities(draft.sentence.entities);
    return draft;
  };

  auto& truth = result.truth;
  while (static_cast<int>(result.corpus.sentences.size()) < spec.sentences) {
    Draft draft = draw_sentence();
    draft.sentence.sentence.id = std::to_string(result.corpus.sentences.size() + 1);
    if (!roundtrip_check(draft.sentence.sentence, draft.sentence.entities, alphabet)) {
      ++truth.rejected_sentences;
      continue;
    }
    truth.stats.sentences += 1;
    truth.stats.mentions += static_cast<long>(draft.sentence.entities.size());
    truth.stats.discontinuous += static_cast<long>(draft.truth.size());
    for (const TruthMention& m : draft.truth) {
      truth.patterns[static_cast<std::size_t>(m.pattern)] += 1;
      truth.interval[m.interval] += 1;
      truth.span[m.span] += 1;
    }
    result.corpus.sentences.push_back(std::move(draft.sentence));
  }
  return result;
}

std::string truth_to_json(const SynthTruth& truth) {
  nlohmann::ordered_json doc;
  doc["sentences"] = truth.stats.sentences;
  doc["mentions"] = truth.stats.mentions;
  doc["discontinuous"] = truth.stats.discontinuous;
  nlohmann::ordered_json patterns;
  for (std::size_t p = 0; p < truth.patterns.size(); ++p) {
    patterns[std::string(pattern_name(static_cast<OverlapPattern>(p)))] = truth.patterns[p];
  }
  doc["patterns"] = std::move(patterns);
  nlohmann::ordered_json interval, span;
  for (const auto& [len, count] : truth.interval) interval[std::to_string(len)] = count;
  for (const auto& [len, count] : truth.span) span[std::to_string(len)] = count;
  doc["interval"] = std::move(interval);
  doc["span"] = std::move(span);
  doc["rejected_sentences"] = truth.rejected_sentences;
  return doc.dump(2) + "\n";
}

}  // namespace macgrid
