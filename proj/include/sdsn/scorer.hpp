// A trained model plus the resources needed to score raw word pairs:
// embedding table and, when pair features are enabled, both sparse spaces.
#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sdsn/datasets.hpp"
#include "sdsn/embeddings.hpp"
#include "sdsn/model.hpp"
#include "sdsn/pair_features.hpp"
#include "sdsn/sparse_space.hpp"

namespace sdsn {

inline Eigen::VectorXd feature_vector(const SparseSpace& window_space,
                                      const SparseSpace& dependency_space,
                                      const std::string& w1,
                                      const std::string& w2) {
  PairFeatures f = pair_features(window_space, dependency_space, w1, w2);
  return Eigen::Map<const Eigen::VectorXd>(f.x.data(), kPairFeatureDim);
}

struct ScoringBundle {
  ModelParams params;
  EmbeddingTable embeddings;
  std::optional<SparseSpace> window_space;
  std::optional<SparseSpace> dependency_space;

  void check() const {
    if (params.pair_features && (!window_space || !dependency_space))
      throw Error(
          "model uses sparse pair features but the bundle is missing a "
          "window or dependency space");
    if (params.embed_dim != embeddings.dim())
      throw Error("embedding table dimension " +
                  std::to_string(embeddings.dim()) +
                  " does not match model dimension " +
                  std::to_string(params.embed_dim));
  }
};

// Eval-mode score for a word pair; absent when either word is OOV.
inline std::optional<double> score_pair(const ScoringBundle& bundle,
                                        const std::string& word1,
                                        const std::string& word2) {
  const Eigen::VectorXd* v1 = bundle.embeddings.lookup(word1);
  const Eigen::VectorXd* v2 = bundle.embeddings.lookup(word2);
  if (!v1 || !v2) return std::nullopt;
  Eigen::VectorXd x;
  if (bundle.params.pair_features)
    x = feature_vector(*bundle.window_space, *bundle.dependency_space, word1,
                       word2);
  return forward_eval(bundle.params, *v1, *v2, x).score;
}

// A dataset pair resolved against the resources once, so the training loop
// does no lookups or sparse work. `feats` is empty unless pair features
// are enabled.
struct PreparedPair {
  const Eigen::VectorXd* v1 = nullptr;
  const Eigen::VectorXd* v2 = nullptr;
  Eigen::VectorXd feats;
  double gold = 0.0;  // graded score, or 0/1 for binary tasks
};

struct PreparedSet {
  std::vector<PreparedPair> pairs;
  std::size_t skipped_oov = 0;
};

inline PreparedSet prepare_pairs(const std::vector<ScoredPair>& pairs,
                                 const EmbeddingTable& embeddings,
                                 const SparseSpace* window_space,
                                 const SparseSpace* dependency_space,
                                 bool use_pair_features) {
  PreparedSet out;
  out.pairs.reserve(pairs.size());
  for (const auto& p : pairs) {
    const Eigen::VectorXd* v1 = embeddings.lookup(p.word1);
    const Eigen::VectorXd* v2 = embeddings.lookup(p.word2);
    if (!v1 || !v2) {
      ++out.skipped_oov;
      continue;
    }
    PreparedPair prep;
    prep.v1 = v1;
    prep.v2 = v2;
    prep.gold = p.gold;
    if (use_pair_features)
      prep.feats =
          feature_vector(*window_space, *dependency_space, p.word1, p.word2);
    out.pairs.push_back(std::move(prep));
  }
  return out;
}

inline PreparedSet prepare_lexicon(const std::vector<LexiconPair>& pairs,
                                   const EmbeddingTable& embeddings,
                                   const SparseSpace* window_space,
                                   const SparseSpace* dependency_space,
                                   bool use_pair_features) {
  std::vector<ScoredPair> as_scored;
  as_scored.reserve(pairs.size());
  for (const auto& p : pairs)
    as_scored.push_back({p.word1, p.word2, p.positive ? 1.0 : 0.0});
  return prepare_pairs(as_scored, embeddings, window_space, dependency_space,
                       use_pair_features);
}

}  // namespace sdsn
