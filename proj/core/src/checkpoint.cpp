#include "macgrid/checkpoint.hpp"

#include <istream>
#include <nlohmann/json.hpp>
#include <ostream>
#include <sstream>

#include "macgrid/error.hpp"

namespace macgrid {

namespace {

using Json = nlohmann::ordered_json;

Json config_json(const ModelConfig& c) {
  Json j;
  j["dim"] = c.dim;
  j["max_length"] = c.max_length;
  j["vocab_size"] = c.vocab_size;
  j["num_types"] = c.num_types;
  j["use_length_embedding"] = c.use_length_embedding;
  j["use_inner_lstm"] = c.use_inner_lstm;
  return j;
}

}  // namespace

std::string checkpoint_to_string(const Checkpoint& cp) {
  Json doc;
  doc["format"] = kCheckpointFormat;
  doc["version"] = kCheckpointVersion;
  doc["config"] = config_json(cp.model.config);
  doc["threshold"] = cp.threshold;
  Json provenance = Json::object();
  for (const auto& [key, value] : cp.provenance) provenance[key] = value;
  doc["provenance"] = std::move(provenance);
  doc["types"] = cp.model.types;
  doc["vocab"] = cp.model.vocab.tokens();
  Json tensors = Json::array();
  cp.model.params.for_each([&](const std::string& name, const auto& t) {
    Json entry;
    entry["name"] = name;
    entry["rows"] = t.rows();
    entry["cols"] = t.cols();
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(t.size()));
    for (Eigen::Index r = 0; r < t.rows(); ++r) {
      for (Eigen::Index c = 0; c < t.cols(); ++c) values.push_back(t(r, c));
    }
    entry["values"] = std::move(values);
    tensors.push_back(std::move(entry));
  });
  doc["tensors"] = std::move(tensors);
  return doc.dump() + "\n";
}

void save_checkpoint(std::ostream& out, const Checkpoint& cp) { out << checkpoint_to_string(cp); }

Checkpoint load_checkpoint(std::istream& in) {
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("checkpoint is not valid JSON: ") + e.what());
  }
  try {
    if (doc.at("format").get<std::string>() != kCheckpointFormat) {
      throw InputError("not a macgrid checkpoint");
    }
    const int version = doc.at("version").get<int>();
    if (version != kCheckpointVersion) {
      throw InputError("unsupported checkpoint version " + std::to_string(version));
    }
    Checkpoint cp;
    const Json& c = doc.at("config");
    ModelConfig& config = cp.model.config;
    config.dim = c.at("dim").get<int>();
    config.max_length = c.at("max_length").get<int>();
    config.vocab_size = c.at("vocab_size").get<int>();
    config.num_types = c.at("num_types").get<int>();
    config.use_length_embedding = c.at("use_length_embedding").get<bool>();
    config.use_inner_lstm = c.at("use_inner_lstm").get<bool>();
    config.validate();
    cp.threshold = Threshold(doc.at("threshold").get<double>()).value();
    if (doc.contains("provenance")) {
      for (const auto& [key, value] : doc.at("provenance").items()) {
        cp.provenance.emplace_back(key, value.get<std::string>());
      }
    }
    cp.model.types = doc.at("types").get<std::vector<std::string>>();
    cp.model.vocab = Vocabulary(doc.at("vocab").get<std::vector<std::string>>());
    if (static_cast<int>(cp.model.types.size()) != config.num_types ||
        cp.model.vocab.size() != config.vocab_size) {
      throw InputError("checkpoint config disagrees with its type or vocabulary lists");
    }
    TagAlphabet check(cp.model.types);

    cp.model.params = ModelParams::zeros(config);
    const Json& tensors = doc.at("tensors");
    std::size_t k = 0;
    cp.model.params.for_each([&](const std::string& name, auto& t) {
      if (k >= tensors.size()) throw InputError("checkpoint is missing tensor " + name);
      const Json& entry = tensors[k++];
      if (entry.at("name").get<std::string>() != name) {
        throw InputError("expected tensor " + name + ", found " +
                         entry.at("name").get<std::string>());
      }
      const auto values = entry.at("values").get<std::vector<double>>();
      if (entry.at("rows").get<Eigen::Index>() != t.rows() ||
          entry.at("cols").get<Eigen::Index>() != t.cols() ||
          static_cast<Eigen::Index>(values.size()) != t.size()) {
        throw InputError("tensor " + name + " has the wrong shape");
      }
      std::size_t v = 0;
      for (Eigen::Index r = 0; r < t.rows(); ++r) {
        for (Eigen::Index col = 0; col < t.cols(); ++col) t(r, col) = values[v++];
      }
    });
    if (k != tensors.size()) throw InputError("checkpoint has unexpected extra tensors");
    if (!cp.model.params.all_finite()) throw InputError("checkpoint holds non-finite values");
    return cp;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed checkpoint: ") + e.what());
  } catch (const ConfigError& e) {
    throw InputError(std::string("malformed checkpoint: ") + e.what());
  }
}

Checkpoint checkpoint_from_string(const std::string& text) {
  std::istringstream in(text);
  return load_checkpoint(in);
}

}  // namespace macgrid
