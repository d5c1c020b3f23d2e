#include "macgrid/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "macgrid/error.hpp"
#include "macgrid/parallel.hpp"

namespace macgrid {

std::vector<double> default_threshold_grid() {
  std::vector<double> grid;
  for (int k = 1; k <= 9; ++k) grid.push_back(k / 10.0);
  return grid;
}

void TrainConfig::validate() const {
  if (dim < 2) throw ConfigError("dim must be at least 2");
  if (max_length < 1) throw ConfigError("max_length must be at least 1");
  if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw ConfigError("Adam betas must be in [0,1)");
  }
  if (!(adam_epsilon > 0.0)) throw ConfigError("Adam epsilon must be positive");
  if (epochs < 1) throw ConfigError("epochs must be at least 1");
  if (batch_size < 1) throw ConfigError("batch size must be at least 1");
  Threshold check(threshold);
  if (threshold_grid.empty()) throw ConfigError("threshold grid is empty");
  for (double t : threshold_grid) Threshold grid_check(t);
}

ModelConfig TrainConfig::model_config() const {
  ModelConfig c;
  c.dim = dim;
  c.max_length = max_length;
  c.use_length_embedding = use_length_embedding;
  c.use_inner_lstm = use_inner_lstm;
  return c;
}

Adam::Adam(const ModelConfig& config, const TrainConfig& train)
    : lr_(train.learning_rate),
      beta1_(train.beta1),
      beta2_(train.beta2),
      eps_(train.adam_epsilon),
      m_(ModelParams::zeros(config)),
      v_(ModelParams::zeros(config)) {}

void Adam::step(ModelParams& params, const ModelParams& grad) {
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  std::vector<Eigen::Map<const Eigen::ArrayXd>> g;
  std::vector<Eigen::Map<Eigen::ArrayXd>> m, v;
  grad.for_each([&](const std::string&, const auto& t) { g.emplace_back(t.data(), t.size()); });
  m_.for_each([&](const std::string&, auto& t) { m.emplace_back(t.data(), t.size()); });
  v_.for_each([&](const std::string&, auto& t) { v.emplace_back(t.data(), t.size()); });
  std::size_t k = 0;
  params.for_each([&](const std::string&, auto& t) {
    Eigen::Map<Eigen::ArrayXd> p(t.data(), t.size());
    m[k] = beta1_ * m[k] + (1.0 - beta1_) * g[k];
    v[k] = beta2_ * v[k] + (1.0 - beta2_) * g[k].square();
    p -= lr_ * (m[k] / c1) / ((v[k] / c2).sqrt() + eps_);
    ++k;
  });
}

namespace {

void add_into(ModelParams& acc, const ModelParams& g) {
  std::vector<const double*> src;
  g.for_each([&](const std::string&, const auto& t) { src.push_back(t.data()); });
  std::size_t k = 0;
  acc.for_each([&](const std::string&, auto& t) {
    Eigen::Map<Eigen::ArrayXd>(t.data(), t.size()) +=
        Eigen::Map<const Eigen::ArrayXd>(src[k++], t.size());
  });
}

void scale(ModelParams& p, double factor) {
  p.for_each([&](const std::string&, auto& t) { t *= factor; });
}

}  // namespace

std::pair<double, ModelParams> batch_gradient(const Model& model,
                                              std::span<const AnnotatedSentence* const> batch) {
  const TagAlphabet alphabet = model.alphabet();
  ModelParams total = ModelParams::zeros(model.config);
  double loss = 0.0;
  for (const AnnotatedSentence* entry : batch) {
    const ForwardTrace trace = forward(model, entry->sentence);
    const GoldTargets gold = make_targets(entry->sentence, entry->entities, alphabet);
    loss += grid_loss(trace.segment_probs, trace.edge_probs, gold).total();
    add_into(total, backward(model, trace, gold));
  }
  return {loss, std::move(total)};
}

TrainResult train(const Corpus& train_corpus, const Corpus* dev, const TrainConfig& config,
                  const EpochCallback& on_epoch) {
  config.validate();
  if (train_corpus.sentences.empty()) throw ConfigError("training corpus is empty");
  if (train_corpus.types.empty()) throw ConfigError("training corpus declares no entity types");
  validate_corpus(train_corpus);

  TrainResult result;
  Model& model = result.model;
  model = Model::initialize(config.model_config(), Vocabulary::build(train_corpus),
                            train_corpus.types, config.seed);
  for (const auto& entry : train_corpus.sentences) {
    if (entry.sentence.size() > model.config.max_length) {
      throw InputError("training sentence " + entry.sentence.id + " is longer than max_length " +
                       std::to_string(model.config.max_length));
    }
  }

  Adam adam(model.config, config);
  // Separate stream from the initializer so changing the init never
  // reshuffles batches.
  std::mt19937_64 shuffle_rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<const AnnotatedSentence*> order;
  for (const auto& entry : train_corpus.sentences) order.push_back(&entry);
  const Threshold threshold(config.threshold);

  ModelParams best = model.params;
  double best_f1 = -1.0;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    EpochLog entry;
    entry.epoch = epoch;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t stop = std::min(order.size(), start + config.batch_size);
      auto [loss, grad] = batch_gradient(
          model, std::span<const AnnotatedSentence* const>(order.data() + start, stop - start));
      if (!std::isfinite(loss) || !grad.all_finite()) {
        throw TrainingError(epoch, "loss is not finite");
      }
      entry.loss += loss;
      scale(grad, 1.0 / static_cast<double>(stop - start));
      adam.step(model.params, grad);
    }
    if (!model.params.all_finite()) throw TrainingError(epoch, "parameters are not finite");

    if (dev != nullptr && !dev->sentences.empty()) {
      const CorpusPrediction pred = predict_corpus(model, *dev, threshold);
      const CorpusEntities gold = dev->gold();
      entry.dev_f1 = filtered_score(pred.entities, gold, ScoreFilter::kAll).prf.f1;
      if (*entry.dev_f1 > best_f1) {
        best_f1 = *entry.dev_f1;
        best = model.params;
        result.best_epoch = epoch;
      }
    } else {
      best = model.params;
      result.best_epoch = epoch;
    }
    result.log.push_back(entry);
    if (on_epoch && !on_epoch(entry, model)) break;
  }
  model.params = std::move(best);
  return result;
}

DecodeResult predict_entities(const Model& model, const Sentence& sentence, Threshold threshold,
                              const DecodeOptions& options) {
  const TagAlphabet alphabet = model.alphabet();
  const auto [seg, edge] = predict_grids(model, sentence);
  return decode_sentence(sentence, threshold_segment_grid(seg, alphabet, threshold),
                         threshold_edge_grid(edge, alphabet, threshold), alphabet, options);
}

CorpusPrediction predict_corpus(const Model& model, const Corpus& corpus, Threshold threshold,
                                int jobs, const DecodeOptions& options) {
  auto results = parallel_map(corpus.sentences.size(), jobs, [&](std::size_t k) {
    return predict_entities(model, corpus.sentences[k].sentence, threshold, options);
  });
  CorpusPrediction out;
  out.entities.reserve(results.size());
  for (auto& r : results) {
    out.entities.push_back(std::move(r.entities));
    out.diagnostics += r.diagnostics;
  }
  return out;
}

TuneResult tune_threshold(const GridPredictor& predictor, const Corpus& dev,
                          const TagAlphabet& alphabet, const std::vector<double>& grid, int jobs) {
  if (dev.sentences.empty()) throw ConfigError("threshold tuning needs a non-empty dev set");
  if (grid.empty()) throw ConfigError("threshold grid is empty");
  std::vector<Threshold> candidates;
  for (double t : grid) candidates.emplace_back(t);

  auto grids = parallel_map(dev.sentences.size(), jobs,
                            [&](std::size_t k) { return predictor(dev.sentences[k].sentence); });
  const CorpusEntities gold = dev.gold();
  TuneResult result;
  double best_f1 = -1.0;
  for (const Threshold& t : candidates) {
    CorpusEntities pred;
    pred.reserve(grids.size());
    for (std::size_t k = 0; k < grids.size(); ++k) {
      const auto& sentence = dev.sentences[k].sentence;
      pred.push_back(decode_sentence(sentence, threshold_segment_grid(grids[k].first, alphabet, t),
                                     threshold_edge_grid(grids[k].second, alphabet, t), alphabet)
                         .entities);
    }
    const double f1 = filtered_score(pred, gold, ScoreFilter::kAll).prf.f1;
    result.curve.emplace_back(t.value(), f1);
    if (f1 > best_f1 || (f1 == best_f1 && t.value() < result.threshold)) {
      best_f1 = f1;
      result.threshold = t.value();
    }
  }
  return result;
}

TuneResult tune_threshold(const Model& model, const Corpus& dev, const std::vector<double>& grid,
                          int jobs) {
  return tune_threshold([&](const Sentence& s) { return predict_grids(model, s); }, dev,
                        model.alphabet(), grid, jobs);
}

}  // namespace macgrid
