#pragma once

// Straight-line re-implementation of the scorer used as a test oracle. Every
// pair representation is rebuilt from scratch (fresh inner LSTM run per
// (i, j)), and the scalar type is a template parameter so the same code can
// run in long double.

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "macgrid/scorer.hpp"

namespace macgrid::testing {

template <typename T>
struct RefParams {
  using M = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
  std::vector<M> tensors;  // ModelParams::for_each order; vectors are d x 1
  std::map<std::string, std::size_t> index;

  const M& operator[](const std::string& name) const { return tensors.at(index.at(name)); }
};

template <typename T>
RefParams<T> to_reference(const ModelParams& params) {
  RefParams<T> out;
  params.for_each([&](const std::string& name, const auto& t) {
    out.index[name] = out.tensors.size();
    typename RefParams<T>::M m(t.rows(), t.cols());
    for (Eigen::Index r = 0; r < t.rows(); ++r) {
      for (Eigen::Index c = 0; c < t.cols(); ++c) m(r, c) = static_cast<T>(t(r, c));
    }
    out.tensors.push_back(std::move(m));
  });
  return out;
}

template <typename T>
struct RefGrids {
  std::vector<T> segment;  // same layout as ProbGrid
  std::vector<T> edge;
};

template <typename T>
T ref_sigmoid(T z) {
  return T(1) / (T(1) + std::exp(-z));
}

template <typename T>
using RefVec = Eigen::Matrix<T, Eigen::Dynamic, 1>;

// Runs the cell over xs and returns every hidden state.
template <typename T>
std::vector<RefVec<T>> ref_lstm(const RefParams<T>& p, const std::string& prefix,
                                const std::vector<RefVec<T>>& xs) {
  const auto& wx = p[prefix + ".input_weight"];
  const auto& wh = p[prefix + ".recurrent_weight"];
  const auto& b = p[prefix + ".bias"];
  const Eigen::Index d = wh.cols();
  RefVec<T> h = RefVec<T>::Zero(d), c = RefVec<T>::Zero(d);
  std::vector<RefVec<T>> out;
  for (const auto& x : xs) {
    const RefVec<T> a = wx * x + wh * h + b.col(0);
    for (Eigen::Index k = 0; k < d; ++k) {
      const T i = ref_sigmoid(a(k)), f = ref_sigmoid(a(d + k));
      const T g = std::tanh(a(2 * d + k)), o = ref_sigmoid(a(3 * d + k));
      c(k) = f * c(k) + i * g;
      h(k) = o * std::tanh(c(k));
    }
    out.push_back(h);
  }
  return out;
}

template <typename T>
RefVec<T> ref_cln(const RefParams<T>& p, const std::string& prefix, const RefVec<T>& cond,
                  const RefVec<T>& x) {
  const RefVec<T> gain = p[prefix + ".gain_weight"] * cond + p[prefix + ".gain_bias"].col(0);
  const RefVec<T> shift = p[prefix + ".shift_weight"] * cond + p[prefix + ".shift_bias"].col(0);
  const T n = static_cast<T>(x.size());
  const T mean = x.sum() / n;
  T var = 0;
  for (Eigen::Index k = 0; k < x.size(); ++k) var += (x(k) - mean) * (x(k) - mean);
  const T sigma = std::sqrt(var / n + static_cast<T>(kLayerNormEpsilon));
  RefVec<T> out(x.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) out(k) = gain(k) * (x(k) - mean) / sigma + shift(k);
  return out;
}

template <typename T>
RefGrids<T> reference_forward(const Model& model, const RefParams<T>& p, const Sentence& s) {
  const int n = s.size();
  std::vector<RefVec<T>> x;
  for (int t = 0; t < n; ++t) {
    const int id = model.vocab.id(s.tokens[t]);
    x.push_back((p["token_embedding"].row(id) + p["position_embedding"].row(t)).transpose());
  }
  const auto fwd = ref_lstm(p, "encoder_forward", x);
  const std::vector<RefVec<T>> xr(x.rbegin(), x.rend());
  const auto bwd = ref_lstm(p, "encoder_backward", xr);
  std::vector<RefVec<T>> hs, he;
  for (int t = 0; t < n; ++t) {
    const RefVec<T> h = fwd[t] + bwd[n - 1 - t];
    hs.push_back(p["segment_proj.weight"] * h + p["segment_proj.bias"].col(0));
    he.push_back(p["edge_proj.weight"] * h + p["edge_proj.bias"].col(0));
  }
  const int ks = model.config.segment_tags(), ke = model.config.edge_tags();
  RefGrids<T> g;
  g.segment.assign(static_cast<std::size_t>(n) * n * ks, T(0));
  g.edge.assign(static_cast<std::size_t>(n) * n * ke, T(0));
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      RefVec<T> rep = ref_cln(p, "segment_cln", hs[i], hs[j]);
      if (model.config.use_inner_lstm) {
        const std::vector<RefVec<T>> span(hs.begin() + i, hs.begin() + j + 1);
        rep += ref_lstm(p, "inner_lstm", span).back();
      }
      if (model.config.use_length_embedding) rep += p["length_embedding"].row(j - i).transpose();
      const RefVec<T> z = p["segment_head.weight"] * rep + p["segment_head.bias"].col(0);
      for (int k = 0; k < ks; ++k) g.segment[(static_cast<std::size_t>(i) * n + j) * ks + k] = ref_sigmoid(z(k));
    }
    for (int j = 0; j < n; ++j) {
      const RefVec<T> rep = ref_cln(p, "edge_cln", he[i], he[j]);
      const RefVec<T> z = p["edge_head.weight"] * rep + p["edge_head.bias"].col(0);
      for (int k = 0; k < ke; ++k) g.edge[(static_cast<std::size_t>(i) * n + j) * ke + k] = ref_sigmoid(z(k));
    }
  }
  return g;
}

template <typename T>
T reference_bce(T p, double y) {
  const T lo = static_cast<T>(kProbabilityClamp);
  if (p < lo) p = lo;
  if (p > T(1) - lo) p = T(1) - lo;
  return y > 0.5 ? -std::log(p) : -std::log(T(1) - p);
}

template <typename T>
T reference_loss(const Model& model, const RefParams<T>& p, const Sentence& s,
                 const GoldTargets& gold) {
  const RefGrids<T> g = reference_forward(model, p, s);
  const int n = s.size();
  T loss = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      for (int k = 0; k < gold.segment.k; ++k) {
        loss += reference_bce(g.segment[gold.segment.offset(i, j, k)], gold.segment.at(i, j, k));
      }
    }
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < gold.edge.k; ++k) {
        loss += reference_bce(g.edge[gold.edge.offset(i, j, k)], gold.edge.at(i, j, k));
      }
    }
  }
  return loss;
}

}  // namespace macgrid::testing
