// Scored-pair datasets (graded and binary), train/dev/test splitting, and
// relation-lexicon loading with the per-word example cap.
#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <random>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "sdsn/util.hpp"

namespace sdsn {

enum class TaskKind { graded, binary };

inline const char* task_name(TaskKind t) {
  return t == TaskKind::graded ? "graded" : "binary";
}

struct ScoredPair {
  std::string word1;
  std::string word2;
  // Graded tasks: a score in [0, S]. Binary tasks: 0.0 or 1.0.
  double gold = 0.0;
};

// Tab-separated `word1 TAB word2 TAB score`; an optional first line whose
// third column is not numeric is treated as a header; columns beyond the
// third are ignored.
inline std::vector<ScoredPair> load_graded(const std::string& path,
                                           double max_score) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open dataset file: " + path);
  std::vector<ScoredPair> pairs;
  std::string line;
  std::size_t lineno = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++lineno;
    strip_cr(line);
    if (line.empty()) continue;
    auto cols = split_on(line, '\t');
    if (cols.size() < 3)
      throw Error(path + ":" + std::to_string(lineno) +
                  ": expected `word1 TAB word2 TAB score`");
    double score;
    if (!parse_double(cols[2], score)) {
      if (first) {
        first = false;
        continue;  // header
      }
      throw Error(path + ":" + std::to_string(lineno) +
                  ": non-numeric score `" + cols[2] + "`");
    }
    first = false;
    if (score < 0.0 || score > max_score)
      throw Error(path + ":" + std::to_string(lineno) + ": score " +
                  cols[2] + " outside [0, " + fmt_double(max_score) + "]");
    if (cols[0].empty() || cols[1].empty())
      throw Error(path + ":" + std::to_string(lineno) + ": empty word");
    pairs.push_back({cols[0], cols[1], score});
  }
  if (pairs.empty()) throw Error("dataset file has no pairs: " + path);
  return pairs;
}

// `word1 TAB word2 TAB {True|False}`; golds become 1.0 / 0.0.
inline std::vector<ScoredPair> load_binary(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open dataset file: " + path);
  std::vector<ScoredPair> pairs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    strip_cr(line);
    if (line.empty()) continue;
    auto cols = split_on(line, '\t');
    if (cols.size() < 3)
      throw Error(path + ":" + std::to_string(lineno) +
                  ": expected `word1 TAB word2 TAB True|False`");
    double gold;
    if (cols[2] == "True")
      gold = 1.0;
    else if (cols[2] == "False")
      gold = 0.0;
    else
      throw Error(path + ":" + std::to_string(lineno) + ": unknown label `" +
                  cols[2] + "` (expected True or False)");
    if (cols[0].empty() || cols[1].empty())
      throw Error(path + ":" + std::to_string(lineno) + ": empty word");
    pairs.push_back({cols[0], cols[1], gold});
  }
  if (pairs.empty()) throw Error("dataset file has no pairs: " + path);
  return pairs;
}

inline std::vector<ScoredPair> load_pairs(const std::string& path,
                                          TaskKind task, double max_score) {
  return task == TaskKind::graded ? load_graded(path, max_score)
                                  : load_binary(path);
}

enum class SplitKind { random, lexical };

struct SplitRatios {
  double train = 0.7;
  double dev = 0.1;
  double test = 0.2;

  void validate() const {
    if (train < 0 || dev < 0 || test < 0 ||
        std::abs(train + dev + test - 1.0) > 1e-9)
      throw Error("split ratios must be nonnegative and sum to 1");
  }
};

struct DatasetSplit {
  SplitKind kind = SplitKind::random;
  std::vector<ScoredPair> train, dev, test;
  std::size_t discarded = 0;  // cross-subset pairs dropped by lexical split
};

inline DatasetSplit make_random_split(std::vector<ScoredPair> pairs,
                                      SplitRatios ratios, std::uint64_t seed) {
  ratios.validate();
  std::mt19937_64 rng(seed);
  std::shuffle(pairs.begin(), pairs.end(), rng);
  const std::size_t n = pairs.size();
  const auto n_train = static_cast<std::size_t>(ratios.train * double(n));
  const auto n_dev = static_cast<std::size_t>(ratios.dev * double(n));
  DatasetSplit split;
  split.kind = SplitKind::random;
  split.train.assign(pairs.begin(), pairs.begin() + n_train);
  split.dev.assign(pairs.begin() + n_train, pairs.begin() + n_train + n_dev);
  split.test.assign(pairs.begin() + n_train + n_dev, pairs.end());
  if (split.train.empty() || split.dev.empty() || split.test.empty())
    throw Error("random split produced an empty subset; adjust ratios");
  return split;
}

// Partitions the vocabulary into disjoint train/dev/test word sets and
// keeps a pair only when both words fall in the same subset, so train and
// test share no words. All cross-subset pairs are discarded and counted.
inline DatasetSplit make_lexical_split(const std::vector<ScoredPair>& pairs,
                                       SplitRatios ratios,
                                       std::uint64_t seed) {
  ratios.validate();
  std::set<std::string> vocab_sorted;
  for (const auto& p : pairs) {
    vocab_sorted.insert(p.word1);
    vocab_sorted.insert(p.word2);
  }
  std::vector<std::string> vocab(vocab_sorted.begin(), vocab_sorted.end());
  std::mt19937_64 rng(seed);
  std::shuffle(vocab.begin(), vocab.end(), rng);

  const std::size_t n = vocab.size();
  const auto n_train = static_cast<std::size_t>(ratios.train * double(n));
  const auto n_dev = static_cast<std::size_t>(ratios.dev * double(n));
  std::unordered_map<std::string, int> bucket;  // 0 train, 1 dev, 2 test
  for (std::size_t i = 0; i < n; ++i)
    bucket[vocab[i]] = i < n_train ? 0 : (i < n_train + n_dev ? 1 : 2);

  DatasetSplit split;
  split.kind = SplitKind::lexical;
  for (const auto& p : pairs) {
    const int b1 = bucket[p.word1];
    const int b2 = bucket[p.word2];
    if (b1 != b2) {
      ++split.discarded;
      continue;
    }
    (b1 == 0 ? split.train : b1 == 1 ? split.dev : split.test).push_back(p);
  }
  if (split.train.empty() || split.dev.empty() || split.test.empty())
    throw Error(
        "lexical split left an empty subset after discarding cross-set "
        "pairs; try different ratios or another seed");
  return split;
}

struct LexiconPair {
  std::string word1;
  std::string word2;
  bool positive = false;
};

// `word1 TAB word2 TAB {pos|neg}`. Pairs are shuffled with `seed` and then
// kept greedily while both words have appeared in fewer than `cap` kept
// pairs, so no word dominates the pre-training signal.
inline std::vector<LexiconPair> load_lexicon(const std::string& path,
                                             std::size_t cap,
                                             std::uint64_t seed) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open lexicon file: " + path);
  std::vector<LexiconPair> all;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    strip_cr(line);
    if (line.empty()) continue;
    auto cols = split_on(line, '\t');
    if (cols.size() < 3)
      throw Error(path + ":" + std::to_string(lineno) +
                  ": expected `word1 TAB word2 TAB pos|neg`");
    LexiconPair p;
    p.word1 = cols[0];
    p.word2 = cols[1];
    if (cols[2] == "pos")
      p.positive = true;
    else if (cols[2] == "neg")
      p.positive = false;
    else
      throw Error(path + ":" + std::to_string(lineno) + ": unknown label `" +
                  cols[2] + "` (expected pos or neg)");
    if (p.word1.empty() || p.word2.empty())
      throw Error(path + ":" + std::to_string(lineno) + ": empty word");
    all.push_back(std::move(p));
  }
  std::mt19937_64 rng(seed);
  std::shuffle(all.begin(), all.end(), rng);
  std::unordered_map<std::string, std::size_t> uses;
  std::vector<LexiconPair> kept;
  for (auto& p : all) {
    if (uses[p.word1] >= cap || uses[p.word2] >= cap) continue;
    ++uses[p.word1];
    if (p.word2 != p.word1) ++uses[p.word2];
    kept.push_back(std::move(p));
  }
  return kept;
}

}  // namespace sdsn
