#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "macgrid/clique_decoder.hpp"
#include "macgrid/corpus.hpp"
#include "macgrid/metrics.hpp"
#include "macgrid/scorer.hpp"

namespace macgrid {

std::vector<double> default_threshold_grid();  // 0.1, 0.2, ..., 0.9

struct TrainConfig {
  int dim = 32;
  int max_length = 64;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;
  int epochs = 100;
  int batch_size = 8;
  std::uint64_t seed = 42;
  double threshold = Threshold::kDefault;  // used for the per-epoch dev F1
  std::vector<double> threshold_grid = default_threshold_grid();
  bool use_length_embedding = true;
  bool use_inner_lstm = true;

  void validate() const;  // throws ConfigError
  ModelConfig model_config() const;
};

class Adam {
 public:
  Adam(const ModelConfig& config, const TrainConfig& train);
  void step(ModelParams& params, const ModelParams& grad);
  long steps() const { return t_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  long t_ = 0;
  ModelParams m_, v_;
};

struct EpochLog {
  int epoch = 0;  // 1-based
  double loss = 0.0;  // summed J over the training set
  std::optional<double> dev_f1;

  friend bool operator==(const EpochLog&, const EpochLog&) = default;
};

struct TrainResult {
  Model model;  // parameters of the best dev-F1 epoch (last epoch without dev)
  std::vector<EpochLog> log;
  int best_epoch = 0;
};

// Called after every epoch with the current (not best) model. Returning
// false stops training early.
using EpochCallback = std::function<bool(const EpochLog&, const Model&)>;

// Mini-batch Adam over a seeded shuffle. The vocabulary is built from
// `train`. Throws ConfigError on an empty training corpus and TrainingError
// when the loss stops being finite.
TrainResult train(const Corpus& train, const Corpus* dev, const TrainConfig& config,
                  const EpochCallback& on_epoch = {});

// J and its gradient summed over a batch of sentences.
std::pair<double, ModelParams> batch_gradient(const Model& model,
                                              std::span<const AnnotatedSentence* const> batch);

DecodeResult predict_entities(const Model& model, const Sentence& sentence, Threshold threshold,
                              const DecodeOptions& options = {});

struct CorpusPrediction {
  CorpusEntities entities;
  DecodeDiagnostics diagnostics;
};

CorpusPrediction predict_corpus(const Model& model, const Corpus& corpus, Threshold threshold,
                                int jobs = 1, const DecodeOptions& options = {});

using GridPredictor = std::function<std::pair<ProbGrid, ProbGrid>(const Sentence&)>;

struct TuneResult {
  double threshold = Threshold::kDefault;
  std::vector<std::pair<double, double>> curve;  // (theta, overall dev F1)
};

// Picks the grid value with the best overall dev F1; ties go to the smaller
// value. Throws ConfigError for an empty dev set or a bad grid.
TuneResult tune_threshold(const GridPredictor& predictor, const Corpus& dev,
                          const TagAlphabet& alphabet, const std::vector<double>& grid = default_threshold_grid(),
                          int jobs = 1);
TuneResult tune_threshold(const Model& model, const Corpus& dev,
                          const std::vector<double>& grid = default_threshold_grid(),
                          int jobs = 1);

}  // namespace macgrid
