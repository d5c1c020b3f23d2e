#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <nlohmann/json.hpp>
#include <optional>
#include <sstream>

#include "macgrid/checkpoint.hpp"
#include "macgrid/error.hpp"
#include "macgrid/parallel.hpp"
#include "settings.hpp"

namespace macgrid::cli {
namespace {

using Json = nlohmann::ordered_json;

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

// Missing required input, unreadable file: the caller got the invocation wrong.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Run {
  std::string command;
  Settings settings;

  const std::string& need(const std::string& key) const {
    if (!settings.has_value(key)) throw UsageError(command + " needs --" + key);
    return settings.get(key);
  }
  int jobs() const {
    const int j = settings.get_int("jobs");
    if (j < 1) throw ConfigError("jobs must be at least 1");
    return j;
  }
  bool json() const {
    const std::string& r = settings.get("report");
    if (r != "text" && r != "json") throw ConfigError("report must be text or json");
    return r == "json";
  }
};

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw Error("cannot write " + path);
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }
  void close() {
    stream().flush();
    if (!stream()) throw Error("write failed");
  }

 private:
  std::unique_ptr<std::ofstream> file_;
};

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open " + path);
  return in;
}

Corpus read_corpus(const std::string& path) {
  std::ifstream in = open_input(path);
  try {
    return parse_inline(in);
  } catch (const ParseError& e) {
    std::string msg = e.what();
    const std::string prefix = "line " + std::to_string(e.line()) + ": ";
    if (msg.rfind(prefix, 0) == 0) msg = msg.substr(prefix.size());
    throw Error(path + ":" + std::to_string(e.line()) + ": " + msg);
  }
}

Checkpoint read_checkpoint(const std::string& path) {
  std::ifstream in = open_input(path);
  try {
    return load_checkpoint(in);
  } catch (const InputError& e) {
    throw Error(path + ": " + e.what());
  }
}

void write_text_header(std::ostream& out, const Run& run) {
  out << "# macgrid " << run.command << '\n';
  for (const auto& [key, value] : run.settings.echo()) out << "# " << key << " = " << value << '\n';
}

Json config_json(const Run& run) {
  Json j;
  j["command"] = run.command;
  for (const auto& [key, value] : run.settings.echo()) j[key] = value;
  return j;
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// The checkpoint's tuned threshold unless the user chose one.
Threshold effective_threshold(const Run& run, const Checkpoint& cp) {
  if (run.settings.is_explicit("threshold")) return run.settings.threshold();
  return Threshold(cp.threshold);
}

void report_diagnostics(const DecodeDiagnostics& d, long record_errors) {
  std::cerr << "dropped_fragments=" << d.dropped_fragments
            << " rejected_cliques=" << d.rejected_cliques << " record_errors=" << record_errors
            << '\n';
}

// ---- encode ---------------------------------------------------------------

int cmd_encode(const Run& run) {
  const Corpus corpus = read_corpus(run.need("input"));
  Output out(run.settings.get("output"));
  out.stream() << header_line({RecordKind::kTables, corpus.types, run.settings.echo()}) << '\n';
  std::optional<TagAlphabet> alphabet;
  if (!corpus.types.empty()) alphabet.emplace(corpus.types);
  for (const auto& entry : corpus.sentences) {
    TableRecord record{entry.sentence, SegmentTagTable(entry.sentence.size()),
                       EdgeTagTable(entry.sentence.size())};
    if (alphabet) {
      record.segments = encode_segment_table(entry.sentence, entry.entities, *alphabet);
      record.edges = encode_edge_table(entry.sentence, entry.entities, *alphabet);
    }
    out.stream() << record_line(record, alphabet ? *alphabet : TagAlphabet({"_"})) << '\n';
  }
  out.close();
  return 0;
}

// ---- decode / predict -----------------------------------------------------

struct DecodedRecord {
  Sentence sentence;
  std::vector<Entity> entities;
  DecodeDiagnostics diagnostics;
  std::string error;
};

void write_predictions(const Run& run, const std::vector<std::string>& types,
                       const std::vector<DecodedRecord>& records) {
  Corpus corpus;
  corpus.types = types;
  for (const auto& r : records) corpus.sentences.push_back({r.sentence, r.entities});
  Output out(run.settings.get("output"));
  write_text_header(out.stream(), run);
  write_inline(out.stream(), corpus);
  out.close();
}

int decode_with_model(const Run& run) {
  const Checkpoint cp = read_checkpoint(run.need("model"));
  const Corpus corpus = read_corpus(run.need("input"));
  const Threshold threshold = effective_threshold(run, cp);
  const DecodeOptions options = run.settings.decode_options();
  const bool strict = run.settings.get_bool("strict");
  auto records = parallel_map(corpus.sentences.size(), run.jobs(), [&](std::size_t k) {
    DecodedRecord r;
    r.sentence = corpus.sentences[k].sentence;
    try {
      DecodeResult d = predict_entities(cp.model, r.sentence, threshold, options);
      r.entities = std::move(d.entities);
      r.diagnostics = d.diagnostics;
    } catch (const InputError& e) {
      r.error = e.what();
    }
    return r;
  });
  DecodeDiagnostics total;
  long errors = 0;
  for (const auto& r : records) {
    if (!r.error.empty()) {
      if (strict) throw Error("sentence " + r.sentence.id + ": " + r.error);
      std::cerr << "sentence " << r.sentence.id << ": " << r.error << '\n';
      ++errors;
    }
    total += r.diagnostics;
  }
  write_predictions(run, cp.model.types, records);
  report_diagnostics(total, errors);
  return 0;
}

int cmd_decode(const Run& run) {
  if (run.settings.has_value("model")) return decode_with_model(run);
  const std::string& path = run.need("input");
  std::ifstream in = open_input(path);
  std::string line;
  if (!std::getline(in, line)) throw Error(path + ": empty record stream");
  const RecordHeader header = parse_header(line, 1);
  const TagAlphabet alphabet(header.types);
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);

  std::optional<Corpus> tokens;
  if (run.settings.has_value("tokens")) {
    tokens = read_corpus(run.settings.get("tokens"));
    if (tokens->sentences.size() != lines.size()) {
      throw Error("token file has " + std::to_string(tokens->sentences.size()) +
                  " sentences but the stream has " + std::to_string(lines.size()) + " records");
    }
  }

  const Threshold threshold = run.settings.threshold();
  const DecodeOptions options = run.settings.decode_options();
  auto records = parallel_map(lines.size(), run.jobs(), [&](std::size_t k) {
    DecodedRecord r;
    const std::size_t line_number = k + 2;
    if (tokens) r.sentence = tokens->sentences[k].sentence;
    try {
      SegmentTagTable seg;
      EdgeTagTable edge;
      Sentence sentence;
      if (header.kind == RecordKind::kTables) {
        TableRecord t = parse_table_record(lines[k], alphabet, line_number);
        sentence = std::move(t.sentence);
        seg = std::move(t.segments);
        edge = std::move(t.edges);
      } else {
        GridRecord g = parse_grid_record(lines[k], alphabet, line_number);
        sentence = std::move(g.sentence);
        seg = threshold_segment_grid(g.segment, alphabet, threshold);
        edge = threshold_edge_grid(g.edge, alphabet, threshold);
      }
      if (!tokens) r.sentence = sentence;
      DecodeResult d = decode_sentence(r.sentence, seg, edge, alphabet, options);
      r.entities = std::move(d.entities);
      r.diagnostics = d.diagnostics;
    } catch (const ParseError& e) {
      r.error = path + ":" + e.what();
    } catch (const DecodingError& e) {
      r.error = path + ": line " + std::to_string(line_number) + ": " + e.what();
    }
    if (!r.error.empty() && r.sentence.tokens.empty()) r.sentence.id = std::to_string(k + 1);
    return r;
  });

  DecodeDiagnostics total;
  long errors = 0;
  for (auto& r : records) {
    if (!r.error.empty()) {
      if (run.settings.get_bool("strict")) throw Error(r.error);
      std::cerr << r.error << '\n';
      ++errors;
    }
    total += r.diagnostics;
  }
  // A record that failed before its tokens were known cannot be written back
  // as a sentence, so it is dropped from the output.
  std::erase_if(records, [](const DecodedRecord& r) { return r.sentence.tokens.empty(); });
  write_predictions(run, header.types, records);
  report_diagnostics(total, errors);
  return 0;
}

int cmd_predict(const Run& run) {
  const Checkpoint cp = read_checkpoint(run.need("model"));
  const Corpus corpus = read_corpus(run.need("input"));
  auto grids = parallel_map(corpus.sentences.size(), run.jobs(), [&](std::size_t k) {
    const Sentence& s = corpus.sentences[k].sentence;
    auto [seg, edge] = predict_grids(cp.model, s);
    return record_line(GridRecord{s, std::move(seg), std::move(edge)});
  });
  Output out(run.settings.get("output"));
  out.stream() << header_line({RecordKind::kGrids, cp.model.types, run.settings.echo()}) << '\n';
  for (const auto& line : grids) out.stream() << line << '\n';
  out.close();
  return 0;
}

// ---- train / tune ---------------------------------------------------------

int cmd_train(const Run& run) {
  const Corpus corpus = read_corpus(run.need("input"));
  const std::string& model_path = run.need("output");
  std::optional<Corpus> dev;
  if (run.settings.has_value("dev")) dev = read_corpus(run.settings.get("dev"));
  const TrainConfig config = run.settings.train_config();
  const bool json = run.json();

  if (!json) write_text_header(std::cout, run);
  const TrainResult result =
      train(corpus, dev ? &*dev : nullptr, config, [&](const EpochLog& e, const Model&) {
        if (!json) {
          std::cout << "epoch " << e.epoch << " loss " << fixed(e.loss, 6);
          if (e.dev_f1) std::cout << " dev_f1 " << fixed(*e.dev_f1, 6);
          std::cout << '\n';
        }
        return true;
      });

  Checkpoint cp{result.model, config.threshold, run.settings.echo()};
  Output out(model_path);
  save_checkpoint(out.stream(), cp);
  out.close();

  const auto& best = result.log.at(static_cast<std::size_t>(result.best_epoch - 1));
  if (json) {
    Json doc;
    doc["config"] = config_json(run);
    Json log = Json::array();
    for (const auto& e : result.log) {
      Json row;
      row["epoch"] = e.epoch;
      row["loss"] = e.loss;
      row["dev_f1"] = e.dev_f1 ? Json(*e.dev_f1) : Json(nullptr);
      log.push_back(std::move(row));
    }
    doc["log"] = std::move(log);
    doc["best_epoch"] = result.best_epoch;
    doc["dev_f1"] = best.dev_f1 ? Json(*best.dev_f1) : Json(nullptr);
    std::cout << doc.dump(2) << '\n';
  } else {
    std::cout << "best_epoch " << result.best_epoch;
    if (best.dev_f1) std::cout << " dev_f1 " << fixed(*best.dev_f1, 6);
    std::cout << '\n';
  }
  return 0;
}

int cmd_tune(const Run& run) {
  Checkpoint cp = read_checkpoint(run.need("model"));
  const Corpus dev =
      read_corpus(run.settings.has_value("dev") ? run.settings.get("dev") : run.need("input"));
  const TuneResult result = tune_threshold(cp.model, dev, run.settings.get_doubles("grid"), run.jobs());
  Output out(run.settings.get("output"));
  if (run.json()) {
    Json doc;
    doc["config"] = config_json(run);
    Json curve = Json::array();
    for (const auto& [theta, f1] : result.curve) curve.push_back({{"threshold", theta}, {"f1", f1}});
    doc["curve"] = std::move(curve);
    doc["threshold"] = result.threshold;
    out.stream() << doc.dump(2) << '\n';
  } else {
    write_text_header(out.stream(), run);
    for (const auto& [theta, f1] : result.curve) {
      out.stream() << "threshold " << fixed(theta, 2) << " f1 " << fixed(f1, 6) << '\n';
    }
    out.stream() << "best " << fixed(result.threshold, 2) << '\n';
  }
  out.close();
  if (run.settings.has_value("save")) {
    cp.threshold = result.threshold;
    Output saved(run.settings.get("save"));
    save_checkpoint(saved.stream(), cp);
    saved.close();
  }
  return 0;
}

// ---- eval / stats / synth -------------------------------------------------

int cmd_eval(const Run& run) {
  Corpus gold;
  CorpusEntities predicted;
  if (run.settings.has_value("model")) {
    const Checkpoint cp = read_checkpoint(run.settings.get("model"));
    gold = read_corpus(run.need("input"));
    predicted = predict_corpus(cp.model, gold, effective_threshold(run, cp), run.jobs(),
                               run.settings.decode_options())
                    .entities;
  } else {
    const Corpus pred = read_corpus(run.need("input"));
    gold = read_corpus(run.need("gold"));
    if (pred.sentences.size() != gold.sentences.size()) {
      throw EvaluationError("prediction file has " + std::to_string(pred.sentences.size()) +
                            " sentences, gold has " + std::to_string(gold.sentences.size()));
    }
    for (std::size_t k = 0; k < gold.sentences.size(); ++k) {
      if (pred.sentences[k].sentence.tokens != gold.sentences[k].sentence.tokens) {
        throw EvaluationError("sentence " + std::to_string(k + 1) +
                              " has different tokens in prediction and gold");
      }
    }
    predicted = pred.gold();
  }
  const EvalReport report = full_report(predicted, gold.gold());
  Output out(run.settings.get("output"));
  if (run.json()) {
    Json doc;
    doc["config"] = config_json(run);
    doc["report"] = Json::parse(report_to_json(report));
    out.stream() << doc.dump(2) << '\n';
  } else {
    write_text_header(out.stream(), run);
    out.stream() << report_to_text(report);
  }
  out.close();
  return 0;
}

int cmd_stats(const Run& run) {
  const CorpusStats stats = corpus_stats(read_corpus(run.need("input")));
  Output out(run.settings.get("output"));
  if (run.json()) {
    Json doc;
    doc["config"] = config_json(run);
    doc["stats"] = Json::parse(stats_to_json(stats));
    out.stream() << doc.dump(2) << '\n';
  } else {
    write_text_header(out.stream(), run);
    out.stream() << stats_to_text(stats) << '\n';
  }
  out.close();
  return 0;
}

int cmd_synth(const Run& run) {
  const SynthResult result = generate_synthetic(run.settings.synth_spec());
  Output out(run.settings.get("output"));
  write_text_header(out.stream(), run);
  write_inline(out.stream(), result.corpus);
  out.close();
  if (run.settings.has_value("truth")) {
    Output truth(run.settings.get("truth"));
    truth.stream() << truth_to_json(result.truth);
    truth.close();
  }
  return 0;
}

// ---- bench ----------------------------------------------------------------

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

int cmd_bench(const Run& run) {
  const Checkpoint cp = read_checkpoint(run.need("model"));
  const Corpus corpus = read_corpus(run.need("input"));
  const int repeats = run.settings.get_int("repeats");
  if (repeats < 1) throw ConfigError("repeats must be at least 1");
  const Threshold threshold = effective_threshold(run, cp);
  const DecodeOptions options = run.settings.decode_options();
  const TagAlphabet alphabet = cp.model.alphabet();
  const int jobs = run.jobs();
  const std::size_t count = corpus.sentences.size();
  using Clock = std::chrono::steady_clock;

  // Grids are produced in chunks outside the timed region so memory stays flat.
  constexpr std::size_t kChunk = 512;
  auto decode_only = [&] {
    double seconds = 0.0;
    for (std::size_t begin = 0; begin < count; begin += kChunk) {
      const std::size_t size = std::min(kChunk, count - begin);
      auto grids = parallel_map(size, jobs, [&](std::size_t k) {
        return predict_grids(cp.model, corpus.sentences[begin + k].sentence);
      });
      const auto t0 = Clock::now();
      parallel_map(size, jobs, [&](std::size_t k) {
        const Sentence& s = corpus.sentences[begin + k].sentence;
        return decode_sentence(s, threshold_segment_grid(grids[k].first, alphabet, threshold),
                               threshold_edge_grid(grids[k].second, alphabet, threshold), alphabet,
                               options)
            .entities.size();
      });
      seconds += std::chrono::duration<double>(Clock::now() - t0).count();
    }
    return seconds;
  };
  auto full = [&] {
    const auto t0 = Clock::now();
    predict_corpus(cp.model, corpus, threshold, jobs, options);
    return std::chrono::duration<double>(Clock::now() - t0).count();
  };

  auto rate = [&](double seconds) { return seconds > 0.0 ? count / seconds : 0.0; };
  std::vector<double> decode_rates, full_rates;
  decode_only();
  full();
  for (int r = 0; r < repeats; ++r) decode_rates.push_back(rate(decode_only()));
  for (int r = 0; r < repeats; ++r) full_rates.push_back(rate(full()));

  Output out(run.settings.get("output"));
  if (run.json()) {
    Json doc;
    doc["config"] = config_json(run);
    doc["sentences"] = count;
    doc["decode_only_sentences_per_second"] = median(decode_rates);
    doc["full_sentences_per_second"] = median(full_rates);
    doc["decode_only_runs"] = decode_rates;
    doc["full_runs"] = full_rates;
    out.stream() << doc.dump(2) << '\n';
  } else {
    write_text_header(out.stream(), run);
    out.stream() << "sentences " << count << '\n'
                 << "decode_only " << fixed(median(decode_rates), 1) << " sentences/s (median of "
                 << repeats << ")\n"
                 << "full " << fixed(median(full_rates), 1) << " sentences/s (median of "
                 << repeats << ")\n";
  }
  out.close();
  return 0;
}

struct Command {
  const char* name;
  const char* help;
  int (*fn)(const Run&);
};

const Command kCommands[] = {
    {"encode", "write gold tag tables as NDJSON records", cmd_encode},
    {"decode", "decode records (or a model's predictions) into an inline corpus", cmd_decode},
    {"predict", "write a model's probability grids as NDJSON records", cmd_predict},
    {"train", "train a scorer and write its checkpoint to --output", cmd_train},
    {"eval", "score predictions against gold", cmd_eval},
    {"stats", "sentence, mention and discontinuity counts", cmd_stats},
    {"tune", "pick the dev-optimal threshold", cmd_tune},
    {"synth", "generate a synthetic corpus", cmd_synth},
    {"bench", "measure decode-only and full-pipeline throughput", cmd_bench},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"macgrid: discontinuous NER as maximal clique discovery"};
  app.require_subcommand(1);
  app.fallthrough();

  std::map<std::string, std::string> flag_values;
  std::map<std::string, CLI::Option*> flags;
  for (const auto& spec : setting_specs()) {
    std::string names = "--" + spec.key;
    std::string dashed = spec.key;
    std::replace(dashed.begin(), dashed.end(), '_', '-');
    if (dashed != spec.key) names += ",--" + dashed;
    if (spec.default_value == "true" || spec.default_value == "false") {
      flags[spec.key] = app.add_flag(names + "{true}", flag_values[spec.key], spec.help);
    } else {
      flags[spec.key] = app.add_option(names, flag_values[spec.key], spec.help);
    }
  }

  std::vector<CLI::App*> subs;
  for (const auto& c : kCommands) subs.push_back(app.add_subcommand(c.name, c.help));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  Run run;
  for (std::size_t k = 0; k < subs.size(); ++k) {
    if (subs[k]->parsed()) run.command = kCommands[k].name;
  }
  try {
    if (const char* path = std::getenv("MACGRID_CONFIG"); path != nullptr && *path != '\0') {
      run.settings.load_file(path);
    }
    for (const auto& [key, option] : flags) {
      if (option->count() > 0) {
        run.settings.set(key, flag_values[key]);
      }
    }
    for (std::size_t k = 0; k < subs.size(); ++k) {
      if (run.command == kCommands[k].name) return kCommands[k].fn(run);
    }
    return kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "macgrid " << run.command << ": " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError& e) {
    std::cerr << "macgrid " << run.command << ": " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "macgrid " << run.command << ": " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace macgrid::cli

int main(int argc, char** argv) { return macgrid::cli::main(argc, argv); }
