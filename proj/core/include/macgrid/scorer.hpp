#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "macgrid/corpus.hpp"
#include "macgrid/entity.hpp"
#include "macgrid/grid_codec.hpp"

namespace macgrid {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Token -> id map. Id 0 is reserved for unknown tokens.
class Vocabulary {
 public:
  static constexpr std::string_view kUnknown = "<unk>";

  Vocabulary();
  explicit Vocabulary(std::vector<std::string> tokens);  // tokens[0] must be kUnknown
  static Vocabulary build(const Corpus& corpus);

  int size() const { return static_cast<int>(tokens_.size()); }
  int id(const std::string& token) const;
  const std::vector<std::string>& tokens() const { return tokens_; }

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) { return a.tokens_ == b.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
};

struct ModelConfig {
  int dim = 32;
  int max_length = 64;
  int vocab_size = 1;
  int num_types = 1;
  bool use_length_embedding = true;
  bool use_inner_lstm = true;

  void validate() const;  // throws ConfigError
  int segment_tags() const { return 3 * num_types; }
  int edge_tags() const { return 2 * num_types; }
};

// Gates are stacked [input; forget; cell; output].
struct LstmParams {
  Mat input_weight;      // 4d x d
  Mat recurrent_weight;  // 4d x d
  Vec bias;              // 4d
};

// gain = gain_weight * c + gain_bias, shift = shift_weight * c + shift_bias.
struct ClnParams {
  Mat gain_weight;   // d x d
  Vec gain_bias;     // d
  Mat shift_weight;  // d x d
  Vec shift_bias;    // d
};

struct ModelParams {
  Mat token_embedding;     // V x d, one row per vocabulary id
  Mat position_embedding;  // L x d
  LstmParams encoder_forward;
  LstmParams encoder_backward;
  Mat segment_proj_weight;  // d x d
  Vec segment_proj_bias;
  Mat edge_proj_weight;  // d x d
  Vec edge_proj_bias;
  ClnParams segment_cln;
  ClnParams edge_cln;
  LstmParams inner_lstm;
  Mat length_embedding;  // L x d, row = j - i
  Mat segment_head_weight;  // K^s x d
  Vec segment_head_bias;
  Mat edge_head_weight;  // K^e x d
  Vec edge_head_bias;

  // Same shapes, all zeros.
  static ModelParams zeros(const ModelConfig& config);
  // Weights uniform(-0.1, 0.1); biases zero except both CLN gain biases,
  // which start at 1 so the conditional normalization starts as plain LN.
  static ModelParams initialize(const ModelConfig& config, std::mt19937_64& rng);

  // Visits every tensor as fn(name, tensor) with a stable name and order.
  // Tensors are Mat& or Vec&.
  template <typename Fn>
  void for_each(Fn&& fn);
  template <typename Fn>
  void for_each(Fn&& fn) const;

  std::size_t parameter_count() const;
  bool all_finite() const;
};

// One LSTM run; column t holds step t.
struct LstmSequence {
  Mat gates;   // 4d x T, post-activation
  Mat cells;   // d x T
  Mat hidden;  // d x T
};

// Every intermediate needed for the backward pass. Per-token vectors are
// columns of d x n matrices.
struct ForwardTrace {
  int n = 0;
  std::vector<int> token_ids;
  Mat input;  // token + position embeddings
  LstmSequence encoder_forward;
  LstmSequence encoder_backward;  // in reversed time order
  Mat hidden;        // h_i = forward + backward states
  Mat segment_feat;  // projected h^s_i
  Mat edge_feat;     // projected h^e_i
  Mat segment_gain, segment_shift, segment_norm;
  Vec segment_sigma;
  Mat edge_gain, edge_shift, edge_norm;
  Vec edge_sigma;
  std::vector<LstmSequence> inner;  // inner[i] runs over tokens i..n-1
  ProbGrid segment_probs;
  ProbGrid edge_probs;
};

// Dense 0/1 targets. Segment: only i <= j is read. Edge: gold at (i, j)
// with i < j, zero below the diagonal.
struct GoldTargets {
  ProbGrid segment;
  ProbGrid edge;
};

GoldTargets make_targets(const Sentence& sentence, std::span<const Entity> entities,
                         const TagAlphabet& alphabet);

inline constexpr double kLayerNormEpsilon = 1e-5;
inline constexpr double kProbabilityClamp = 1e-7;

// (x - mean) / sqrt(var + eps).
Vec layer_norm(const Vec& x, double eps = kLayerNormEpsilon);

// gain(c) * layer_norm(x) + shift(c).
Vec cln(const Vec& condition, const Vec& x, const ClnParams& params,
        double eps = kLayerNormEpsilon);

struct Projection {
  Vec segment;
  Vec edge;
};
Projection project(const Vec& hidden, const ModelParams& params);

// A trained (or freshly initialized) scorer together with the vocabulary
// and type inventory it was built for.
struct Model {
  ModelConfig config;
  Vocabulary vocab;
  std::vector<std::string> types;
  ModelParams params;

  TagAlphabet alphabet() const { return TagAlphabet(types); }

  static Model initialize(const ModelConfig& config, Vocabulary vocab,
                          std::vector<std::string> types, std::uint64_t seed);
};

// Throws InputError for an empty sentence or one longer than max_length.
ForwardTrace forward(const Model& model, const Sentence& sentence);

// h^s_{i:j} and h^e_{i,j} read back out of a trace.
Vec segment_pair_repr(int i, int j, const ForwardTrace& trace, const Model& model);
Vec edge_pair_repr(int i, int j, const ForwardTrace& trace, const Model& model);

std::pair<ProbGrid, ProbGrid> predict_grids(const Model& model, const Sentence& sentence);

struct LossParts {
  double segment = 0.0;
  double edge = 0.0;
  double total() const { return segment + edge; }
};

// Binary cross-entropy summed over j >= i for segments and over the whole
// grid for edges, probabilities clamped to [delta, 1 - delta].
LossParts grid_loss(const ProbGrid& segment_probs, const ProbGrid& edge_probs,
                    const GoldTargets& gold, double clamp = kProbabilityClamp);

// Exact gradient of grid_loss with respect to every parameter.
ModelParams backward(const Model& model, const ForwardTrace& trace, const GoldTargets& gold);

// ---------------------------------------------------------------------------

template <typename Fn>
void ModelParams::for_each(Fn&& fn) {
  auto lstm = [&](std::string_view prefix, LstmParams& p) {
    fn(std::string(prefix) + ".input_weight", p.input_weight);
    fn(std::string(prefix) + ".recurrent_weight", p.recurrent_weight);
    fn(std::string(prefix) + ".bias", p.bias);
  };
  auto norm = [&](std::string_view prefix, ClnParams& p) {
    fn(std::string(prefix) + ".gain_weight", p.gain_weight);
    fn(std::string(prefix) + ".gain_bias", p.gain_bias);
    fn(std::string(prefix) + ".shift_weight", p.shift_weight);
    fn(std::string(prefix) + ".shift_bias", p.shift_bias);
  };
  fn(std::string("token_embedding"), token_embedding);
  fn(std::string("position_embedding"), position_embedding);
  lstm("encoder_forward", encoder_forward);
  lstm("encoder_backward", encoder_backward);
  fn(std::string("segment_proj.weight"), segment_proj_weight);
  fn(std::string("segment_proj.bias"), segment_proj_bias);
  fn(std::string("edge_proj.weight"), edge_proj_weight);
  fn(std::string("edge_proj.bias"), edge_proj_bias);
  norm("segment_cln", segment_cln);
  norm("edge_cln", edge_cln);
  lstm("inner_lstm", inner_lstm);
  fn(std::string("length_embedding"), length_embedding);
  fn(std::string("segment_head.weight"), segment_head_weight);
  fn(std::string("segment_head.bias"), segment_head_bias);
  fn(std::string("edge_head.weight"), edge_head_weight);
  fn(std::string("edge_head.bias"), edge_head_bias);
}

template <typename Fn>
void ModelParams::for_each(Fn&& fn) const {
  const_cast<ModelParams*>(this)->for_each(
      [&](const std::string& name, auto& tensor) { fn(name, std::as_const(tensor)); });
}

}  // namespace macgrid
