// The directional similarity network. Both input embeddings are gated by
// a sigmoid mask computed from the other word, mapped through separate
// tanh layers, multiplied elementwise and composed into a scalar score
//
//   y = S * sigmoid(slope * (out_W * hidden + out_b)),  hidden in (-1,1)^h
//
// so the score always lies strictly inside (0, S). When pair features are
// enabled the hidden layer additionally receives feature_W * x. Embeddings
// are frozen; backward() produces gradients for network weights only.
#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "sdsn/util.hpp"

namespace sdsn {

constexpr int kPairFeatureDim = 10;

// Pre-sigmoid values are clamped to this magnitude so that sigmoid stays
// strictly inside (0,1) in double precision and the score inside (0,S).
constexpr double kLogitClamp = 30.0;

inline double stable_sigmoid(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  double e = std::exp(x);
  return e / (1.0 + e);
}

struct ModelParams {
  int embed_dim = 0;
  int map_dim = 0;
  int hidden_dim = 0;
  bool pair_features = false;
  double max_score = 10.0;  // S; fixed, never trained

  Eigen::MatrixXd gate1_W, gate2_W;  // dim x dim
  Eigen::VectorXd gate1_b, gate2_b;
  Eigen::MatrixXd map1_W, map2_W;  // m x dim
  Eigen::VectorXd map1_b, map2_b;
  Eigen::MatrixXd hidden_W;   // h x m
  Eigen::MatrixXd feature_W;  // h x 10, empty unless pair_features
  Eigen::VectorXd hidden_b;
  Eigen::RowVectorXd out_W;  // 1 x h
  double out_b = 0.0;
  double out_slope = 1.0;  // sigmoid slope a
};

struct TensorView {
  const char* name;
  double* data;
  std::size_t size;
};

// Fixed-order views over every trainable tensor; generic code (optimizer,
// serialization, gradient checks) iterates these.
inline std::vector<TensorView> tensor_views(ModelParams& p) {
  std::vector<TensorView> v = {
      {"gate1_W", p.gate1_W.data(), static_cast<std::size_t>(p.gate1_W.size())},
      {"gate1_b", p.gate1_b.data(), static_cast<std::size_t>(p.gate1_b.size())},
      {"gate2_W", p.gate2_W.data(), static_cast<std::size_t>(p.gate2_W.size())},
      {"gate2_b", p.gate2_b.data(), static_cast<std::size_t>(p.gate2_b.size())},
      {"map1_W", p.map1_W.data(), static_cast<std::size_t>(p.map1_W.size())},
      {"map1_b", p.map1_b.data(), static_cast<std::size_t>(p.map1_b.size())},
      {"map2_W", p.map2_W.data(), static_cast<std::size_t>(p.map2_W.size())},
      {"map2_b", p.map2_b.data(), static_cast<std::size_t>(p.map2_b.size())},
      {"hidden_W", p.hidden_W.data(),
       static_cast<std::size_t>(p.hidden_W.size())},
      {"hidden_b", p.hidden_b.data(),
       static_cast<std::size_t>(p.hidden_b.size())},
      {"out_W", p.out_W.data(), static_cast<std::size_t>(p.out_W.size())},
      {"out_b", &p.out_b, 1},
      {"out_slope", &p.out_slope, 1},
  };
  if (p.pair_features)
    v.push_back({"feature_W", p.feature_W.data(),
                 static_cast<std::size_t>(p.feature_W.size())});
  return v;
}

// Same-shape params with every trainable entry zeroed; used for gradients
// and optimizer accumulators.
inline ModelParams zeros_like(const ModelParams& p) {
  ModelParams z;
  z.embed_dim = p.embed_dim;
  z.map_dim = p.map_dim;
  z.hidden_dim = p.hidden_dim;
  z.pair_features = p.pair_features;
  z.max_score = p.max_score;
  z.gate1_W = Eigen::MatrixXd::Zero(p.embed_dim, p.embed_dim);
  z.gate2_W = Eigen::MatrixXd::Zero(p.embed_dim, p.embed_dim);
  z.gate1_b = Eigen::VectorXd::Zero(p.embed_dim);
  z.gate2_b = Eigen::VectorXd::Zero(p.embed_dim);
  z.map1_W = Eigen::MatrixXd::Zero(p.map_dim, p.embed_dim);
  z.map2_W = Eigen::MatrixXd::Zero(p.map_dim, p.embed_dim);
  z.map1_b = Eigen::VectorXd::Zero(p.map_dim);
  z.map2_b = Eigen::VectorXd::Zero(p.map_dim);
  z.hidden_W = Eigen::MatrixXd::Zero(p.hidden_dim, p.map_dim);
  z.hidden_b = Eigen::VectorXd::Zero(p.hidden_dim);
  if (p.pair_features)
    z.feature_W = Eigen::MatrixXd::Zero(p.hidden_dim, kPairFeatureDim);
  z.out_W = Eigen::RowVectorXd::Zero(p.hidden_dim);
  z.out_b = 0.0;
  z.out_slope = 0.0;
  return z;
}

// Weight matrices ~ U(+-sqrt(6/(fan_in+fan_out))), biases zero, slope 1.
inline ModelParams init_params(int embed_dim, int map_dim, int hidden_dim,
                               bool pair_features, double max_score,
                               std::uint64_t seed) {
  if (embed_dim <= 0 || map_dim <= 0 || hidden_dim <= 0)
    throw Error("model sizes must be positive");
  if (max_score <= 0.0) throw Error("max score S must be positive");

  ModelParams p;
  p.embed_dim = embed_dim;
  p.map_dim = map_dim;
  p.hidden_dim = hidden_dim;
  p.pair_features = pair_features;
  p.max_score = max_score;

  std::mt19937_64 rng(seed);
  auto uniform_init = [&rng](Eigen::Ref<Eigen::MatrixXd> w, int fan_in,
                             int fan_out) {
    const double bound = std::sqrt(6.0 / (fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (Eigen::Index j = 0; j < w.cols(); ++j)
      for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, j) = dist(rng);
  };

  p.gate1_W.resize(embed_dim, embed_dim);
  p.gate2_W.resize(embed_dim, embed_dim);
  uniform_init(p.gate1_W, embed_dim, embed_dim);
  uniform_init(p.gate2_W, embed_dim, embed_dim);
  p.gate1_b = Eigen::VectorXd::Zero(embed_dim);
  p.gate2_b = Eigen::VectorXd::Zero(embed_dim);
  p.map1_W.resize(map_dim, embed_dim);
  p.map2_W.resize(map_dim, embed_dim);
  uniform_init(p.map1_W, embed_dim, map_dim);
  uniform_init(p.map2_W, embed_dim, map_dim);
  p.map1_b = Eigen::VectorXd::Zero(map_dim);
  p.map2_b = Eigen::VectorXd::Zero(map_dim);
  p.hidden_W.resize(hidden_dim, map_dim);
  uniform_init(p.hidden_W, map_dim, hidden_dim);
  p.hidden_b = Eigen::VectorXd::Zero(hidden_dim);
  if (pair_features) {
    p.feature_W.resize(hidden_dim, kPairFeatureDim);
    uniform_init(p.feature_W, kPairFeatureDim, hidden_dim);
  }
  p.out_W.resize(hidden_dim);
  uniform_init(p.out_W, hidden_dim, 1);
  p.out_b = 0.0;
  p.out_slope = 1.0;
  return p;
}

enum class FwdMode { train, eval };

struct ForwardTrace {
  Eigen::VectorXd in1, in2;      // embeddings as fed in (post-dropout)
  Eigen::VectorXd mask1, mask2;  // inverted-dropout masks; empty in eval
  Eigen::VectorXd gate1, gate2;
  Eigen::VectorXd gated1, gated2;
  Eigen::VectorXd map1, map2;
  Eigen::VectorXd prod;
  Eigen::VectorXd feats;  // x, size 10 when pair features are on, else 0
  Eigen::VectorXd hidden;
  double out_pre = 0.0;  // out_W * hidden + out_b
  double logit = 0.0;    // clamp(slope * out_pre)
  bool logit_clamped = false;
  double score = 0.0;  // y in (0, S)
};

namespace detail {

inline Eigen::VectorXd sigmoid_vec(const Eigen::VectorXd& v) {
  return v.unaryExpr([](double x) { return stable_sigmoid(x); });
}

inline Eigen::VectorXd dropout_mask(int n, double keep, std::mt19937_64& rng) {
  Eigen::VectorXd mask(n);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double scale = 1.0 / keep;
  for (int i = 0; i < n; ++i) mask[i] = u(rng) < keep ? scale : 0.0;
  return mask;
}

}  // namespace detail

// `feats` must be a 10-vector iff the model was built with pair features.
// Train mode applies inverted dropout with probability `dropout_keep` to
// both embeddings (independent masks, word1 first) before any other
// computation; eval mode touches no rng at all.
inline ForwardTrace forward(const ModelParams& p, const Eigen::VectorXd& w1,
                            const Eigen::VectorXd& w2,
                            const Eigen::VectorXd& feats, FwdMode mode,
                            double dropout_keep = 1.0,
                            std::mt19937_64* rng = nullptr) {
  if (w1.size() != p.embed_dim || w2.size() != p.embed_dim)
    throw Error("embedding dimension mismatch: model expects " +
                std::to_string(p.embed_dim) + ", got " +
                std::to_string(w1.size()) + "/" + std::to_string(w2.size()));
  if (p.pair_features && feats.size() != kPairFeatureDim)
    throw Error("model expects a pair-feature vector of length " +
                std::to_string(kPairFeatureDim));
  if (!p.pair_features && feats.size() != 0)
    throw Error("model was built without pair features");

  ForwardTrace t;
  if (mode == FwdMode::train && dropout_keep < 1.0) {
    if (!rng) throw Error("train-mode forward with dropout needs an rng");
    if (!(dropout_keep > 0.0)) throw Error("dropout keep must be in (0, 1]");
    t.mask1 = detail::dropout_mask(p.embed_dim, dropout_keep, *rng);
    t.mask2 = detail::dropout_mask(p.embed_dim, dropout_keep, *rng);
    t.in1 = w1.cwiseProduct(t.mask1);
    t.in2 = w2.cwiseProduct(t.mask2);
  } else {
    t.in1 = w1;
    t.in2 = w2;
  }

  t.gate1 = detail::sigmoid_vec(p.gate1_W * t.in1 + p.gate1_b);
  t.gate2 = detail::sigmoid_vec(p.gate2_W * t.in2 + p.gate2_b);
  t.gated1 = t.in1.cwiseProduct(t.gate2);  // each word masked by the other
  t.gated2 = t.in2.cwiseProduct(t.gate1);
  t.map1 = (p.map1_W * t.gated1 + p.map1_b).array().tanh();
  t.map2 = (p.map2_W * t.gated2 + p.map2_b).array().tanh();
  t.prod = t.map1.cwiseProduct(t.map2);

  Eigen::VectorXd pre_hidden = p.hidden_W * t.prod + p.hidden_b;
  if (p.pair_features) {
    t.feats = feats;
    pre_hidden += p.feature_W * t.feats;
  }
  t.hidden = pre_hidden.array().tanh();

  t.out_pre = p.out_W.dot(t.hidden) + p.out_b;
  double z = p.out_slope * t.out_pre;
  t.logit_clamped = std::abs(z) > kLogitClamp;
  t.logit = std::clamp(z, -kLogitClamp, kLogitClamp);
  t.score = p.max_score * stable_sigmoid(t.logit);
  return t;
}

inline ForwardTrace forward_eval(const ModelParams& p,
                                 const Eigen::VectorXd& w1,
                                 const Eigen::VectorXd& w2,
                                 const Eigen::VectorXd& feats =
                                     Eigen::VectorXd()) {
  return forward(p, w1, w2, feats, FwdMode::eval);
}

// Accumulates d(loss)/d(theta) into `grads` for every trainable tensor,
// given d(loss)/d(score). The trace must come from forward() under the
// same parameters. Embedding inputs receive no gradient.
inline void backward_accumulate(const ModelParams& p, const ForwardTrace& t,
                                double dldy, ModelParams& grads) {
  const double sig = t.score / p.max_score;  // sigmoid(logit)
  // Clamped logits sit on a flat of the implemented forward, so the
  // matching derivative there is zero.
  const double dz =
      t.logit_clamped ? 0.0 : dldy * p.max_score * sig * (1.0 - sig);

  grads.out_slope += dz * t.out_pre;
  const double dpre = dz * p.out_slope;
  grads.out_W.noalias() += dpre * t.hidden.transpose();
  grads.out_b += dpre;

  Eigen::VectorXd dhidden_pre =
      (p.out_W.transpose() * dpre).cwiseProduct(
          (1.0 - t.hidden.array().square()).matrix());
  grads.hidden_W.noalias() += dhidden_pre * t.prod.transpose();
  grads.hidden_b += dhidden_pre;
  if (p.pair_features)
    grads.feature_W.noalias() += dhidden_pre * t.feats.transpose();

  Eigen::VectorXd dprod = p.hidden_W.transpose() * dhidden_pre;
  Eigen::VectorXd dmap1_pre =
      dprod.cwiseProduct(t.map2).cwiseProduct(
          (1.0 - t.map1.array().square()).matrix());
  Eigen::VectorXd dmap2_pre =
      dprod.cwiseProduct(t.map1).cwiseProduct(
          (1.0 - t.map2.array().square()).matrix());
  grads.map1_W.noalias() += dmap1_pre * t.gated1.transpose();
  grads.map2_W.noalias() += dmap2_pre * t.gated2.transpose();
  grads.map1_b += dmap1_pre;
  grads.map2_b += dmap2_pre;

  Eigen::VectorXd dgated1 = p.map1_W.transpose() * dmap1_pre;
  Eigen::VectorXd dgated2 = p.map2_W.transpose() * dmap2_pre;
  // gated1 = in1 .* gate2, gated2 = in2 .* gate1
  Eigen::VectorXd dgate2 = dgated1.cwiseProduct(t.in1);
  Eigen::VectorXd dgate1 = dgated2.cwiseProduct(t.in2);
  Eigen::VectorXd dgate1_pre = dgate1.cwiseProduct(t.gate1).cwiseProduct(
      (1.0 - t.gate1.array()).matrix());
  Eigen::VectorXd dgate2_pre = dgate2.cwiseProduct(t.gate2).cwiseProduct(
      (1.0 - t.gate2.array()).matrix());
  grads.gate1_W.noalias() += dgate1_pre * t.in1.transpose();
  grads.gate2_W.noalias() += dgate2_pre * t.in2.transpose();
  grads.gate1_b += dgate1_pre;
  grads.gate2_b += dgate2_pre;
}

inline ModelParams backward(const ModelParams& p, const ForwardTrace& t,
                            double dldy) {
  ModelParams grads = zeros_like(p);
  backward_accumulate(p, t, dldy, grads);
  return grads;
}

}  // namespace sdsn
