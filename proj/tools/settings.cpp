#include "settings.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "macgrid/error.hpp"

namespace macgrid::cli {

const std::vector<SettingSpec>& setting_specs() {
  static const std::vector<SettingSpec> specs = {
      {"input", "", "input file"},
      {"output", "", "output file (stdout when empty)"},
      {"model", "", "checkpoint file"},
      {"gold", "", "gold corpus for eval"},
      {"dev", "", "dev corpus for train and tune (tune falls back to --input)"},
      {"tokens", "", "token corpus the decode records must align with"},
      {"truth", "", "synth: where to write the generator's own counts"},
      {"save", "", "tune: write the checkpoint with the chosen threshold here"},
      {"threshold", "0.5", "tag threshold in (0,1)"},
      {"seed", "42", "seed for every randomized path"},
      {"jobs", "1", "worker threads for decode/eval"},
      {"strict", "false", "abort on the first bad record"},
      {"report", "text", "report format: text or json"},
      {"search", "pivot", "clique search: pivot or basic"},
      {"require_b_head", "false", "reject cliques whose first segment lacks a B tag"},
      {"dim", "32", "model width"},
      {"max_length", "64", "longest sentence the model accepts"},
      {"lr", "0.001", "Adam learning rate"},
      {"beta1", "0.9", "Adam beta1"},
      {"beta2", "0.999", "Adam beta2"},
      {"adam_eps", "1e-08", "Adam epsilon"},
      {"epochs", "100", "training epochs"},
      {"batch", "8", "sentences per Adam step"},
      {"length_embedding", "true", "add the segment length embedding"},
      {"inner_lstm", "true", "add the inner-segment LSTM state"},
      {"grid", "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9", "threshold tuning grid"},
      {"sentences", "100", "synth: sentence count"},
      {"vocab", "50", "synth: vocabulary size"},
      {"synth_max_length", "20", "synth: longest sentence"},
      {"max_mentions", "4", "synth: mentions per sentence"},
      {"max_templates", "3", "synth: templates per sentence"},
      {"empty_rate", "0.05", "synth: share of sentences without mentions"},
      {"split", "", "synth: split label (train, dev, test)"},
      {"repeats", "3", "bench: repetitions (median reported)"},
  };
  return specs;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* what) {
  throw ConfigError("setting '" + key + "': '" + value + "' is not " + what);
}

}  // namespace

Settings::Settings() {
  for (const auto& spec : setting_specs()) values_[spec.key] = spec.default_value;
}

void Settings::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string text = trim(line);
    if (text.empty() || text[0] == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(number) + ": expected key = value");
    }
    try {
      set(trim(text.substr(0, eq)), trim(text.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError(path + ":" + std::to_string(number) + ": " + e.what());
    }
  }
}

void Settings::set(const std::string& key, const std::string& value) {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown setting '" + key + "'");
  it->second = value;
  explicit_.insert(key);
}

const std::string& Settings::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown setting '" + key + "'");
  return it->second;
}

int Settings::get_int(const std::string& key) const {
  const std::string& v = get(key);
  int out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size()) bad_value(key, v, "an integer");
  return out;
}

std::uint64_t Settings::get_u64(const std::string& key) const {
  const std::string& v = get(key);
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size()) {
    bad_value(key, v, "a non-negative integer");
  }
  return out;
}

double Settings::get_double(const std::string& key) const {
  const std::string& v = get(key);
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size()) bad_value(key, v, "a number");
  return out;
}

bool Settings::get_bool(const std::string& key) const {
  const std::string& v = get(key);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  bad_value(key, v, "a boolean");
}

std::vector<double> Settings::get_doubles(const std::string& key) const {
  std::vector<double> out;
  std::stringstream in(get(key));
  std::string field;
  while (std::getline(in, field, ',')) {
    const std::string f = trim(field);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), value);
    if (f.empty() || ec != std::errc() || ptr != f.data() + f.size()) {
      bad_value(key, get(key), "a comma-separated list of numbers");
    }
    out.push_back(value);
  }
  return out;
}

ConfigEcho Settings::echo() const {
  ConfigEcho out;
  for (const auto& spec : setting_specs()) {
    if (spec.key != "output") out.emplace_back(spec.key, get(spec.key));
  }
  return out;
}

Threshold Settings::threshold() const { return Threshold(get_double("threshold")); }

TrainConfig Settings::train_config() const {
  TrainConfig c;
  c.dim = get_int("dim");
  c.max_length = get_int("max_length");
  c.learning_rate = get_double("lr");
  c.beta1 = get_double("beta1");
  c.beta2 = get_double("beta2");
  c.adam_epsilon = get_double("adam_eps");
  c.epochs = get_int("epochs");
  c.batch_size = get_int("batch");
  c.seed = get_u64("seed");
  c.threshold = threshold().value();
  c.threshold_grid = get_doubles("grid");
  c.use_length_embedding = get_bool("length_embedding");
  c.use_inner_lstm = get_bool("inner_lstm");
  c.validate();
  return c;
}

SynthSpec Settings::synth_spec() const {
  SynthSpec s;
  s.sentences = get_int("sentences");
  s.vocab_size = get_int("vocab");
  s.max_length = get_int("synth_max_length");
  s.max_mentions = get_int("max_mentions");
  s.max_templates = get_int("max_templates");
  s.empty_rate = get_double("empty_rate");
  s.seed = get_u64("seed");
  const std::string& split = get("split");
  if (split == "train") {
    s.split = Split::kTrain;
  } else if (split == "dev") {
    s.split = Split::kDev;
  } else if (split == "test") {
    s.split = Split::kTest;
  } else if (!split.empty()) {
    bad_value("split", split, "train, dev or test");
  }
  s.validate();
  return s;
}

DecodeOptions Settings::decode_options() const {
  DecodeOptions o;
  o.require_b_head = get_bool("require_b_head");
  const std::string& search = get("search");
  if (search == "pivot") {
    o.search = CliqueSearch::kPivot;
  } else if (search == "basic") {
    o.search = CliqueSearch::kBasic;
  } else {
    bad_value("search", search, "pivot or basic");
  }
  return o;
}

}  // namespace macgrid::cli
