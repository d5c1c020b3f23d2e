#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "macgrid/clique_decoder.hpp"
#include "macgrid/synth.hpp"
#include "macgrid/table_records.hpp"
#include "macgrid/trainer.hpp"

namespace macgrid::cli {

struct SettingSpec {
  std::string key;
  std::string default_value;
  std::string help;
};

// Every recognised key, in echo order.
const std::vector<SettingSpec>& setting_specs();

// Resolved key/value configuration. Layers are applied in call order:
// defaults (constructor), then load_file, then set for each flag given.
class Settings {
 public:
  Settings();

  // "key = value" lines; blank lines and '#' comments are skipped. Unknown
  // keys and malformed lines raise ConfigError naming file and line.
  void load_file(const std::string& path);
  void set(const std::string& key, const std::string& value);

  const std::string& get(const std::string& key) const;
  bool has_value(const std::string& key) const { return !get(key).empty(); }
  // Keys given by the config file or a flag rather than left at default.
  bool is_explicit(const std::string& key) const { return explicit_.contains(key); }
  int get_int(const std::string& key) const;
  double get_double(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key) const;
  std::vector<double> get_doubles(const std::string& key) const;

  // Everything except the output path, in setting_specs() order.
  ConfigEcho echo() const;

  Threshold threshold() const;
  TrainConfig train_config() const;
  SynthSpec synth_spec() const;
  DecodeOptions decode_options() const;

 private:
  std::map<std::string, std::string> values_;
  std::set<std::string> explicit_;
};

}  // namespace macgrid::cli
