#include "macgrid/scorer.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "macgrid/error.hpp"

namespace macgrid {

Vocabulary::Vocabulary() : Vocabulary(std::vector<std::string>{std::string(kUnknown)}) {}

Vocabulary::Vocabulary(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  if (tokens_.empty() || tokens_[0] != kUnknown) {
    throw ConfigError("vocabulary must start with the unknown-token entry");
  }
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (!index_.emplace(tokens_[i], static_cast<int>(i)).second) {
      throw ConfigError("duplicate vocabulary entry '" + tokens_[i] + "'");
    }
  }
}

Vocabulary Vocabulary::build(const Corpus& corpus) {
  std::set<std::string> seen;
  for (const auto& entry : corpus.sentences) {
    seen.insert(entry.sentence.tokens.begin(), entry.sentence.tokens.end());
  }
  seen.erase(std::string(kUnknown));
  std::vector<std::string> tokens{std::string(kUnknown)};
  tokens.insert(tokens.end(), seen.begin(), seen.end());
  return Vocabulary(std::move(tokens));
}

int Vocabulary::id(const std::string& token) const {
  auto it = index_.find(token);
  return it == index_.end() ? 0 : it->second;
}

void ModelConfig::validate() const {
  if (dim < 2) throw ConfigError("model dimension must be at least 2");
  if (max_length < 1) throw ConfigError("max length must be at least 1");
  if (vocab_size < 1) throw ConfigError("vocabulary size must be at least 1");
  if (num_types < 1) throw ConfigError("at least one entity type is required");
}

namespace {

LstmParams lstm_zeros(int d) {
  return {Mat::Zero(4 * d, d), Mat::Zero(4 * d, d), Vec::Zero(4 * d)};
}

ClnParams cln_zeros(int d) { return {Mat::Zero(d, d), Vec::Zero(d), Mat::Zero(d, d), Vec::Zero(d)}; }

bool is_bias(std::string_view name) {
  return name.ends_with(".bias") || name.ends_with("_bias");
}

}  // namespace

ModelParams ModelParams::zeros(const ModelConfig& c) {
  const int d = c.dim;
  ModelParams p;
  p.token_embedding = Mat::Zero(c.vocab_size, d);
  p.position_embedding = Mat::Zero(c.max_length, d);
  p.encoder_forward = lstm_zeros(d);
  p.encoder_backward = lstm_zeros(d);
  p.segment_proj_weight = Mat::Zero(d, d);
  p.segment_proj_bias = Vec::Zero(d);
  p.edge_proj_weight = Mat::Zero(d, d);
  p.edge_proj_bias = Vec::Zero(d);
  p.segment_cln = cln_zeros(d);
  p.edge_cln = cln_zeros(d);
  p.inner_lstm = lstm_zeros(d);
  p.length_embedding = Mat::Zero(c.max_length, d);
  p.segment_head_weight = Mat::Zero(c.segment_tags(), d);
  p.segment_head_bias = Vec::Zero(c.segment_tags());
  p.edge_head_weight = Mat::Zero(c.edge_tags(), d);
  p.edge_head_bias = Vec::Zero(c.edge_tags());
  return p;
}

ModelParams ModelParams::initialize(const ModelConfig& config, std::mt19937_64& rng) {
  config.validate();
  ModelParams p = zeros(config);
  std::uniform_real_distribution<double> uniform(-0.1, 0.1);
  p.for_each([&](const std::string& name, auto& tensor) {
    if (is_bias(name)) return;
    for (Eigen::Index k = 0; k < tensor.size(); ++k) tensor.data()[k] = uniform(rng);
  });
  p.segment_cln.gain_bias.setOnes();
  p.edge_cln.gain_bias.setOnes();
  return p;
}

std::size_t ModelParams::parameter_count() const {
  std::size_t total = 0;
  for_each([&](const std::string&, const auto& t) { total += static_cast<std::size_t>(t.size()); });
  return total;
}

bool ModelParams::all_finite() const {
  bool ok = true;
  for_each([&](const std::string&, const auto& t) { ok = ok && t.allFinite(); });
  return ok;
}

Model Model::initialize(const ModelConfig& config, Vocabulary vocab,
                        std::vector<std::string> types, std::uint64_t seed) {
  Model model;
  model.config = config;
  model.config.vocab_size = vocab.size();
  model.config.num_types = static_cast<int>(types.size());
  model.config.validate();
  TagAlphabet check(types);
  model.vocab = std::move(vocab);
  model.types = std::move(types);
  std::mt19937_64 rng(seed);
  model.params = ModelParams::initialize(model.config, rng);
  return model;
}

GoldTargets make_targets(const Sentence& sentence, std::span<const Entity> entities,
                         const TagAlphabet& alphabet) {
  const int n = sentence.size();
  GoldTargets gold{ProbGrid(n, alphabet.segment_size(), GridKind::kSegment),
                   ProbGrid(n, alphabet.edge_size(), GridKind::kEdge)};
  const SegmentTagTable seg = encode_segment_table(sentence, entities, alphabet);
  const EdgeTagTable edge = encode_edge_table(sentence, entities, alphabet);
  for (const auto& [cell, tags] : seg.cells()) {
    for (const auto& tag : tags) gold.segment.at(cell.first, cell.second, alphabet.index(tag)) = 1.0;
  }
  for (const auto& [cell, tags] : edge.cells()) {
    for (const auto& tag : tags) gold.edge.at(cell.first, cell.second, alphabet.index(tag)) = 1.0;
  }
  return gold;
}

Vec layer_norm(const Vec& x, double eps) {
  const double mean = x.mean();
  const Vec centered = x.array() - mean;
  const double sigma = std::sqrt(centered.squaredNorm() / static_cast<double>(x.size()) + eps);
  return centered / sigma;
}

Vec cln(const Vec& condition, const Vec& x, const ClnParams& p, double eps) {
  const Vec gain = p.gain_weight * condition + p.gain_bias;
  const Vec shift = p.shift_weight * condition + p.shift_bias;
  return gain.cwiseProduct(layer_norm(x, eps)) + shift;
}

Projection project(const Vec& hidden, const ModelParams& p) {
  return {p.segment_proj_weight * hidden + p.segment_proj_bias,
          p.edge_proj_weight * hidden + p.edge_proj_bias};
}

namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// `input_proj` already holds input_weight * x_t + bias for every step.
LstmSequence lstm_forward(const LstmParams& p, const Mat& input_proj) {
  const Eigen::Index d = p.recurrent_weight.cols();
  const Eigen::Index steps = input_proj.cols();
  LstmSequence seq{Mat(4 * d, steps), Mat(d, steps), Mat(d, steps)};
  Vec h = Vec::Zero(d);
  Vec c = Vec::Zero(d);
  Vec a(4 * d);
  for (Eigen::Index t = 0; t < steps; ++t) {
    a.noalias() = input_proj.col(t);
    a.noalias() += p.recurrent_weight * h;
    auto gates = seq.gates.col(t);
    for (Eigen::Index k = 0; k < d; ++k) {
      gates(k) = sigmoid(a(k));
      gates(d + k) = sigmoid(a(d + k));
      gates(2 * d + k) = std::tanh(a(2 * d + k));
      gates(3 * d + k) = sigmoid(a(3 * d + k));
      c(k) = gates(d + k) * c(k) + gates(k) * gates(2 * d + k);
      h(k) = gates(3 * d + k) * std::tanh(c(k));
    }
    seq.cells.col(t) = c;
    seq.hidden.col(t) = h;
  }
  return seq;
}

// Gradient with respect to the gate pre-activations, one column per step.
Mat lstm_backward(const LstmParams& p, const LstmSequence& seq, const Mat& dhidden) {
  const Eigen::Index d = p.recurrent_weight.cols();
  const Eigen::Index steps = seq.hidden.cols();
  Mat da(4 * d, steps);
  Vec dh_next = Vec::Zero(d);
  Vec dc_next = Vec::Zero(d);
  for (Eigen::Index t = steps - 1; t >= 0; --t) {
    const auto gates = seq.gates.col(t);
    auto out = da.col(t);
    for (Eigen::Index k = 0; k < d; ++k) {
      const double i = gates(k), f = gates(d + k), g = gates(2 * d + k), o = gates(3 * d + k);
      const double c = seq.cells(k, t);
      const double c_prev = t > 0 ? seq.cells(k, t - 1) : 0.0;
      const double tc = std::tanh(c);
      const double dh = dhidden(k, t) + dh_next(k);
      const double dc = dc_next(k) + dh * o * (1.0 - tc * tc);
      out(k) = dc * g * i * (1.0 - i);
      out(d + k) = dc * c_prev * f * (1.0 - f);
      out(2 * d + k) = dc * i * (1.0 - g * g);
      out(3 * d + k) = dh * tc * o * (1.0 - o);
      dc_next(k) = dc * f;
    }
    dh_next.noalias() = p.recurrent_weight.transpose() * out;
  }
  return da;
}

// Adds the parameter gradients of one run and returns d(inputs).
Mat lstm_accumulate(LstmParams& grad, const LstmParams& p, const LstmSequence& seq,
                    const Mat& inputs, const Mat& da) {
  const Eigen::Index steps = seq.hidden.cols();
  grad.input_weight.noalias() += da * inputs.transpose();
  if (steps > 1) {
    grad.recurrent_weight.noalias() +=
        da.rightCols(steps - 1) * seq.hidden.leftCols(steps - 1).transpose();
  }
  grad.bias += da.rowwise().sum();
  return p.input_weight.transpose() * da;
}

struct NormResult {
  Mat gain, shift, norm;
  Vec sigma;
};

NormResult conditional_norm(const ClnParams& p, const Mat& feat) {
  NormResult r;
  r.gain = (p.gain_weight * feat).colwise() + p.gain_bias;
  r.shift = (p.shift_weight * feat).colwise() + p.shift_bias;
  const Eigen::Index d = feat.rows();
  r.norm.resize(d, feat.cols());
  r.sigma.resize(feat.cols());
  for (Eigen::Index j = 0; j < feat.cols(); ++j) {
    const double mean = feat.col(j).mean();
    const Vec centered = feat.col(j).array() - mean;
    r.sigma(j) = std::sqrt(centered.squaredNorm() / static_cast<double>(d) + kLayerNormEpsilon);
    r.norm.col(j) = centered / r.sigma(j);
  }
  return r;
}

// Representations h^s_{i:j} for j = i..n-1, one column each.
Mat segment_block(int i, const ForwardTrace& trace, const Model& model) {
  const int m = trace.n - i;
  Mat rep = (trace.segment_norm.middleCols(i, m).array().colwise() *
             trace.segment_gain.col(i).array())
                .matrix();
  rep.colwise() += trace.segment_shift.col(i);
  if (model.config.use_inner_lstm) rep += trace.inner[i].hidden;
  if (model.config.use_length_embedding) {
    rep += model.params.length_embedding.topRows(m).transpose();
  }
  return rep;
}

// Representations h^e_{i,j} for j = 0..n-1.
Mat edge_block(int i, const ForwardTrace& trace) {
  Mat rep = (trace.edge_norm.array().colwise() * trace.edge_gain.col(i).array()).matrix();
  rep.colwise() += trace.edge_shift.col(i);
  return rep;
}

}  // namespace

ForwardTrace forward(const Model& model, const Sentence& sentence) {
  const ModelParams& p = model.params;
  const int n = sentence.size();
  if (n == 0) throw InputError("sentence '" + sentence.id + "' is empty");
  if (n > model.config.max_length) {
    throw InputError("sentence '" + sentence.id + "' has " + std::to_string(n) +
                     " tokens, the model supports at most " +
                     std::to_string(model.config.max_length));
  }
  const int d = model.config.dim;

  ForwardTrace tr;
  tr.n = n;
  tr.token_ids.reserve(n);
  tr.input.resize(d, n);
  for (int t = 0; t < n; ++t) {
    const int id = model.vocab.id(sentence.tokens[t]);
    tr.token_ids.push_back(id);
    tr.input.col(t) = (p.token_embedding.row(id) + p.position_embedding.row(t)).transpose();
  }

  const Mat reversed = tr.input.rowwise().reverse();
  tr.encoder_forward = lstm_forward(
      p.encoder_forward,
      (p.encoder_forward.input_weight * tr.input).colwise() + p.encoder_forward.bias);
  tr.encoder_backward = lstm_forward(
      p.encoder_backward,
      (p.encoder_backward.input_weight * reversed).colwise() + p.encoder_backward.bias);
  tr.hidden = tr.encoder_forward.hidden + tr.encoder_backward.hidden.rowwise().reverse();

  tr.segment_feat = (p.segment_proj_weight * tr.hidden).colwise() + p.segment_proj_bias;
  tr.edge_feat = (p.edge_proj_weight * tr.hidden).colwise() + p.edge_proj_bias;

  NormResult seg = conditional_norm(p.segment_cln, tr.segment_feat);
  tr.segment_gain = std::move(seg.gain);
  tr.segment_shift = std::move(seg.shift);
  tr.segment_norm = std::move(seg.norm);
  tr.segment_sigma = std::move(seg.sigma);
  NormResult edge = conditional_norm(p.edge_cln, tr.edge_feat);
  tr.edge_gain = std::move(edge.gain);
  tr.edge_shift = std::move(edge.shift);
  tr.edge_norm = std::move(edge.norm);
  tr.edge_sigma = std::move(edge.sigma);

  if (model.config.use_inner_lstm) {
    // The input projection of token t is shared by every row that reaches it.
    const Mat inner_proj =
        (p.inner_lstm.input_weight * tr.segment_feat).colwise() + p.inner_lstm.bias;
    tr.inner.reserve(n);
    for (int i = 0; i < n; ++i) {
      tr.inner.push_back(lstm_forward(p.inner_lstm, inner_proj.middleCols(i, n - i)));
    }
  }

  const int ks = model.config.segment_tags();
  const int ke = model.config.edge_tags();
  tr.segment_probs = ProbGrid(n, ks, GridKind::kSegment);
  tr.edge_probs = ProbGrid(n, ke, GridKind::kEdge);
  for (int i = 0; i < n; ++i) {
    const Mat z = (p.segment_head_weight * segment_block(i, tr, model)).colwise() +
                  p.segment_head_bias;
    for (int c = 0; c < z.cols(); ++c) {
      for (int k = 0; k < ks; ++k) tr.segment_probs.at(i, i + c, k) = sigmoid(z(k, c));
    }
    const Mat ze = (p.edge_head_weight * edge_block(i, tr)).colwise() + p.edge_head_bias;
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < ke; ++k) tr.edge_probs.at(i, j, k) = sigmoid(ze(k, j));
    }
  }
  return tr;
}

Vec segment_pair_repr(int i, int j, const ForwardTrace& trace, const Model& model) {
  if (i < 0 || j < i || j >= trace.n) {
    throw std::invalid_argument("segment pair (" + std::to_string(i) + "," + std::to_string(j) +
                                ") requires 0 <= i <= j < n");
  }
  return segment_block(i, trace, model).col(j - i);
}

Vec edge_pair_repr(int i, int j, const ForwardTrace& trace, const Model&) {
  if (i < 0 || j < 0 || i >= trace.n || j >= trace.n) {
    throw std::invalid_argument("edge pair out of range");
  }
  return trace.edge_gain.col(i).cwiseProduct(trace.edge_norm.col(j)) + trace.edge_shift.col(i);
}

std::pair<ProbGrid, ProbGrid> predict_grids(const Model& model, const Sentence& sentence) {
  ForwardTrace tr = forward(model, sentence);
  return {std::move(tr.segment_probs), std::move(tr.edge_probs)};
}

namespace {

double bce(double p, double y, double clamp) {
  const double q = std::clamp(p, clamp, 1.0 - clamp);
  return -(y * std::log(q) + (1.0 - y) * std::log(1.0 - q));
}

// d(bce)/d(logit); zero where the clamp is active.
double bce_grad(double p, double y, double clamp) {
  if (p < clamp || p > 1.0 - clamp) return 0.0;
  return p - y;
}

void check_same_shape(const ProbGrid& a, const ProbGrid& b) {
  if (a.n != b.n || a.k != b.k) throw ConfigError("prediction and gold grids differ in shape");
}

}  // namespace

LossParts grid_loss(const ProbGrid& seg, const ProbGrid& edge, const GoldTargets& gold,
                    double clamp) {
  check_same_shape(seg, gold.segment);
  check_same_shape(edge, gold.edge);
  LossParts loss;
  for (int i = 0; i < seg.n; ++i) {
    for (int j = i; j < seg.n; ++j) {
      for (int k = 0; k < seg.k; ++k) loss.segment += bce(seg.at(i, j, k), gold.segment.at(i, j, k), clamp);
    }
  }
  for (int i = 0; i < edge.n; ++i) {
    for (int j = 0; j < edge.n; ++j) {
      for (int k = 0; k < edge.k; ++k) loss.edge += bce(edge.at(i, j, k), gold.edge.at(i, j, k), clamp);
    }
  }
  return loss;
}

ModelParams backward(const Model& model, const ForwardTrace& tr, const GoldTargets& gold) {
  const ModelParams& p = model.params;
  const int n = tr.n;
  const int d = model.config.dim;
  const int ks = model.config.segment_tags();
  const int ke = model.config.edge_tags();
  check_same_shape(tr.segment_probs, gold.segment);
  check_same_shape(tr.edge_probs, gold.edge);
  ModelParams g = ModelParams::zeros(model.config);

  Mat d_seg_feat = Mat::Zero(d, n);
  Mat d_edge_feat = Mat::Zero(d, n);
  Mat d_seg_gain = Mat::Zero(d, n), d_seg_shift = Mat::Zero(d, n), d_seg_norm = Mat::Zero(d, n);
  Mat d_edge_gain = Mat::Zero(d, n), d_edge_shift = Mat::Zero(d, n), d_edge_norm = Mat::Zero(d, n);

  // Heads and pair representations, row by row.
  for (int i = 0; i < n; ++i) {
    const int m = n - i;
    const Mat rep = segment_block(i, tr, model);
    Mat dz(ks, m);
    for (int c = 0; c < m; ++c) {
      for (int k = 0; k < ks; ++k) {
        dz(k, c) = bce_grad(tr.segment_probs.at(i, i + c, k), gold.segment.at(i, i + c, k),
                            kProbabilityClamp);
      }
    }
    g.segment_head_weight.noalias() += dz * rep.transpose();
    g.segment_head_bias += dz.rowwise().sum();
    const Mat drep = p.segment_head_weight.transpose() * dz;
    d_seg_gain.col(i) += drep.cwiseProduct(tr.segment_norm.middleCols(i, m)).rowwise().sum();
    d_seg_shift.col(i) += drep.rowwise().sum();
    d_seg_norm.middleCols(i, m) +=
        (drep.array().colwise() * tr.segment_gain.col(i).array()).matrix();
    if (model.config.use_inner_lstm) {
      const Mat da = lstm_backward(p.inner_lstm, tr.inner[i], drep);
      d_seg_feat.middleCols(i, m) += lstm_accumulate(g.inner_lstm, p.inner_lstm, tr.inner[i],
                                                     tr.segment_feat.middleCols(i, m), da);
    }
    if (model.config.use_length_embedding) g.length_embedding.topRows(m) += drep.transpose();

    const Mat erep = edge_block(i, tr);
    Mat dze(ke, n);
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < ke; ++k) {
        dze(k, j) = bce_grad(tr.edge_probs.at(i, j, k), gold.edge.at(i, j, k), kProbabilityClamp);
      }
    }
    g.edge_head_weight.noalias() += dze * erep.transpose();
    g.edge_head_bias += dze.rowwise().sum();
    const Mat derep = p.edge_head_weight.transpose() * dze;
    d_edge_gain.col(i) += derep.cwiseProduct(tr.edge_norm).rowwise().sum();
    d_edge_shift.col(i) += derep.rowwise().sum();
    d_edge_norm += (derep.array().colwise() * tr.edge_gain.col(i).array()).matrix();
  }

  // Conditional layer norm: affine maps of the condition, then the
  // normalization of the input.
  auto cln_backward = [&](ClnParams& grad, const ClnParams& params, const Mat& feat,
                          const Mat& dgain, const Mat& dshift, const Mat& dnorm, const Mat& norm,
                          const Vec& sigma, Mat& dfeat) {
    grad.gain_weight.noalias() += dgain * feat.transpose();
    grad.gain_bias += dgain.rowwise().sum();
    grad.shift_weight.noalias() += dshift * feat.transpose();
    grad.shift_bias += dshift.rowwise().sum();
    dfeat.noalias() += params.gain_weight.transpose() * dgain;
    dfeat.noalias() += params.shift_weight.transpose() * dshift;
    for (int j = 0; j < n; ++j) {
      const double mean_g = dnorm.col(j).mean();
      const double mean_gx = dnorm.col(j).dot(norm.col(j)) / static_cast<double>(d);
      dfeat.col(j) +=
          ((dnorm.col(j).array() - mean_g - norm.col(j).array() * mean_gx) / sigma(j)).matrix();
    }
  };
  cln_backward(g.segment_cln, p.segment_cln, tr.segment_feat, d_seg_gain, d_seg_shift,
               d_seg_norm, tr.segment_norm, tr.segment_sigma, d_seg_feat);
  cln_backward(g.edge_cln, p.edge_cln, tr.edge_feat, d_edge_gain, d_edge_shift, d_edge_norm,
               tr.edge_norm, tr.edge_sigma, d_edge_feat);

  g.segment_proj_weight.noalias() += d_seg_feat * tr.hidden.transpose();
  g.segment_proj_bias += d_seg_feat.rowwise().sum();
  g.edge_proj_weight.noalias() += d_edge_feat * tr.hidden.transpose();
  g.edge_proj_bias += d_edge_feat.rowwise().sum();
  const Mat d_hidden =
      p.segment_proj_weight.transpose() * d_seg_feat + p.edge_proj_weight.transpose() * d_edge_feat;

  const Mat da_fwd = lstm_backward(p.encoder_forward, tr.encoder_forward, d_hidden);
  Mat d_input =
      lstm_accumulate(g.encoder_forward, p.encoder_forward, tr.encoder_forward, tr.input, da_fwd);
  const Mat d_hidden_rev = d_hidden.rowwise().reverse();
  const Mat reversed = tr.input.rowwise().reverse();
  const Mat da_bwd = lstm_backward(p.encoder_backward, tr.encoder_backward, d_hidden_rev);
  d_input += lstm_accumulate(g.encoder_backward, p.encoder_backward, tr.encoder_backward,
                             reversed, da_bwd)
                 .rowwise()
                 .reverse();

  for (int t = 0; t < n; ++t) {
    g.token_embedding.row(tr.token_ids[t]) += d_input.col(t).transpose();
    g.position_embedding.row(t) += d_input.col(t).transpose();
  }
  return g;
}

}  // namespace macgrid
