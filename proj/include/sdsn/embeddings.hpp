// Pre-trained word embeddings: text loader and read-only lookup table.
// Vectors are frozen inputs to the network and never receive gradients.
#pragma once

#include <Eigen/Core>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "sdsn/util.hpp"

namespace sdsn {

class EmbeddingTable {
 public:
  int dim() const { return dim_; }
  std::size_t size() const { return vocab_.size(); }
  const std::vector<std::string>& vocab() const { return vocab_; }
  std::size_t duplicates_skipped() const { return duplicates_skipped_; }

  // Returns nullptr for out-of-vocabulary words.
  const Eigen::VectorXd* lookup(const std::string& word) const {
    auto it = index_.find(word);
    return it == index_.end() ? nullptr : &vectors_[it->second];
  }

  bool contains(const std::string& word) const {
    return index_.count(word) > 0;
  }

  // First insertion wins; later duplicates are counted and dropped.
  bool insert(const std::string& word, Eigen::VectorXd vec) {
    auto [it, fresh] = index_.emplace(word, vectors_.size());
    if (!fresh) {
      ++duplicates_skipped_;
      return false;
    }
    vocab_.push_back(word);
    vectors_.push_back(std::move(vec));
    return true;
  }

  void set_dim(int d) { dim_ = d; }

 private:
  int dim_ = 0;
  std::vector<std::string> vocab_;
  std::vector<Eigen::VectorXd> vectors_;
  std::unordered_map<std::string, std::size_t> index_;
  std::size_t duplicates_skipped_ = 0;
};

// Text format: one `word v1 v2 ... vd` line per entry, optionally preceded
// by a `count dim` header (detected as a line of exactly two integer
// tokens). UTF-8, LF or CRLF. expected_dim = 0 means "infer from file".
inline EmbeddingTable load_embeddings(const std::string& path,
                                      int expected_dim = 0,
                                      bool lowercase = false,
                                      std::ostream* diag = &std::cerr) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open embeddings file: " + path);

  EmbeddingTable table;
  std::string line;
  std::size_t lineno = 0;
  bool first_content_line = true;

  while (std::getline(in, line)) {
    ++lineno;
    strip_cr(line);
    auto tokens = split_ws(line);
    if (tokens.empty()) continue;

    if (first_content_line && tokens.size() == 2 &&
        is_integer_token(tokens[0]) && is_integer_token(tokens[1])) {
      long long d;
      parse_int64(tokens[1], d);
      if (d <= 0)
        throw Error(path + ":" + std::to_string(lineno) +
                    ": header declares non-positive dimension");
      if (expected_dim > 0 && d != expected_dim)
        throw Error(path + ":" + std::to_string(lineno) +
                    ": header dimension " + std::to_string(d) +
                    " does not match expected " + std::to_string(expected_dim));
      table.set_dim(static_cast<int>(d));
      first_content_line = false;
      continue;
    }
    first_content_line = false;

    if (tokens.size() < 2)
      throw Error(path + ":" + std::to_string(lineno) +
                  ": expected `word v1 ... vd`");

    const int nvals = static_cast<int>(tokens.size()) - 1;
    if (table.dim() == 0) {
      if (expected_dim > 0 && nvals != expected_dim)
        throw Error(path + ":" + std::to_string(lineno) + ": expected " +
                    std::to_string(expected_dim) + " values, got " +
                    std::to_string(nvals));
      table.set_dim(nvals);
    } else if (nvals != table.dim()) {
      throw Error(path + ":" + std::to_string(lineno) + ": expected " +
                  std::to_string(table.dim()) + " values, got " +
                  std::to_string(nvals));
    }

    Eigen::VectorXd vec(nvals);
    for (int i = 0; i < nvals; ++i) {
      double v;
      if (!parse_double(tokens[i + 1], v))
        throw Error(path + ":" + std::to_string(lineno) +
                    ": non-numeric component `" + std::string(tokens[i + 1]) +
                    "`");
      if (!std::isfinite(v))
        throw Error(path + ":" + std::to_string(lineno) +
                    ": non-finite component");
      vec[i] = v;
    }

    std::string word(tokens[0]);
    if (lowercase) word = lower_ascii(word);
    table.insert(word, std::move(vec));
  }

  if (table.size() == 0)
    throw Error("embeddings file has no vector entries: " + path);
  if (diag && table.duplicates_skipped() > 0)
    *diag << "warning: " << table.duplicates_skipped()
          << " duplicate word(s) in " << path << " (first occurrence kept)\n";
  return table;
}

}  // namespace sdsn
