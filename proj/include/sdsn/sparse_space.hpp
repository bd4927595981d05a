// Sparse PPMI co-occurrence spaces built from tokenized text (window
// contexts) or CoNLL-style parses (dependency contexts).
//
// A space keeps, per word: the positively-weighted PPMI vector, the set of
// contexts with nonzero raw count (PPMI may zero entries but never removes
// them from the set), the raw counts themselves, and the marginal totals.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "sdsn/binio.hpp"
#include "sdsn/util.hpp"

namespace sdsn {

// weight(w,c) = max(0, log(N * n(w,c) / (n(w) * n(c))))
inline double ppmi(double joint, double word_total, double context_total,
                   double total_mass) {
  if (joint <= 0.0) return 0.0;
  double pmi = std::log(total_mass * joint / (word_total * context_total));
  return pmi > 0.0 ? pmi : 0.0;
}

struct SparseSpace {
  enum class Kind : std::uint8_t { window = 0, dependency = 1 };

  Kind kind = Kind::window;
  std::uint32_t window = 0;  // window radius; 0 for dependency spaces

  std::vector<std::string> context_names;
  std::unordered_map<std::string, std::uint32_t> context_ids;
  std::vector<std::string> words;
  std::unordered_map<std::string, std::uint32_t> word_ids;

  // All per-word arrays are indexed by word id and sorted by context id.
  std::vector<std::vector<std::pair<std::uint32_t, double>>> vectors;
  std::vector<std::vector<std::uint32_t>> context_sets;
  std::vector<std::vector<std::pair<std::uint32_t, double>>> raw_counts;
  std::vector<double> word_totals;     // n(w)
  std::vector<double> context_totals;  // n(c)
  double total_mass = 0.0;             // N

  std::size_t vocab_size() const { return words.size(); }
  std::size_t context_count() const { return context_names.size(); }

  const std::uint32_t* find_word(const std::string& w) const {
    auto it = word_ids.find(w);
    return it == word_ids.end() ? nullptr : &it->second;
  }

  bool operator==(const SparseSpace& other) const {
    return kind == other.kind && window == other.window &&
           context_names == other.context_names && words == other.words &&
           vectors == other.vectors && context_sets == other.context_sets &&
           raw_counts == other.raw_counts &&
           word_totals == other.word_totals &&
           context_totals == other.context_totals &&
           total_mass == other.total_mass;
  }
};

namespace detail {

// Accumulates raw co-occurrence counts with interned word/context ids.
class CountAccumulator {
 public:
  std::uint32_t word_id(const std::string& w) {
    auto [it, fresh] = word_ids_.emplace(w, words_.size());
    if (fresh) {
      words_.push_back(w);
      counts_.emplace_back();
    }
    return it->second;
  }

  std::uint32_t context_id(const std::string& c) {
    auto [it, fresh] = context_ids_.emplace(c, contexts_.size());
    if (fresh) contexts_.push_back(c);
    return it->second;
  }

  void add(std::uint32_t word, std::uint32_t context, double count = 1.0) {
    counts_[word][context] += count;
  }

  void add(const std::string& word, const std::string& context,
           double count = 1.0) {
    add(word_id(word), context_id(context), count);
  }

  bool empty() const {
    for (const auto& row : counts_)
      if (!row.empty()) return false;
    return true;
  }

  // PPMI-weights the accumulated counts. Contexts whose total count falls
  // below min_context_count are dropped from the space entirely before
  // marginals are computed.
  SparseSpace finalize(SparseSpace::Kind kind, std::uint32_t window,
                       double min_context_count) && {
    std::vector<double> raw_context_totals(contexts_.size(), 0.0);
    for (const auto& row : counts_)
      for (const auto& [c, n] : row) raw_context_totals[c] += n;

    // Remap surviving contexts to dense ids, preserving first-seen order.
    std::vector<std::uint32_t> remap(contexts_.size(), UINT32_MAX);
    SparseSpace space;
    space.kind = kind;
    space.window = window;
    for (std::uint32_t c = 0; c < contexts_.size(); ++c) {
      if (raw_context_totals[c] >= min_context_count) {
        remap[c] = static_cast<std::uint32_t>(space.context_names.size());
        space.context_ids.emplace(contexts_[c], remap[c]);
        space.context_names.push_back(contexts_[c]);
      }
    }
    space.context_totals.assign(space.context_names.size(), 0.0);

    for (std::uint32_t w = 0; w < words_.size(); ++w) {
      std::vector<std::pair<std::uint32_t, double>> row;
      row.reserve(counts_[w].size());
      for (const auto& [c, n] : counts_[w])
        if (remap[c] != UINT32_MAX) row.emplace_back(remap[c], n);
      if (row.empty()) continue;  // word vanished with its pruned contexts
      std::sort(row.begin(), row.end());

      std::uint32_t wid = static_cast<std::uint32_t>(space.words.size());
      space.word_ids.emplace(words_[w], wid);
      space.words.push_back(words_[w]);

      double wtotal = 0.0;
      for (const auto& [c, n] : row) {
        wtotal += n;
        space.context_totals[c] += n;
      }
      space.word_totals.push_back(wtotal);
      space.total_mass += wtotal;
      space.raw_counts.push_back(std::move(row));
    }

    space.vectors.resize(space.words.size());
    space.context_sets.resize(space.words.size());
    for (std::uint32_t w = 0; w < space.words.size(); ++w) {
      for (const auto& [c, n] : space.raw_counts[w]) {
        space.context_sets[w].push_back(c);
        double weight = ppmi(n, space.word_totals[w], space.context_totals[c],
                             space.total_mass);
        if (weight > 0.0) space.vectors[w].emplace_back(c, weight);
      }
    }
    return space;
  }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, std::uint32_t> word_ids_;
  std::vector<std::string> contexts_;
  std::unordered_map<std::string, std::uint32_t> context_ids_;
  std::vector<std::unordered_map<std::uint32_t, double>> counts_;
};

}  // namespace detail

// One whitespace-tokenized sentence per line; co-occurrence within `window`
// positions on either side, never across line boundaries.
inline SparseSpace build_window_space(std::istream& corpus,
                                      std::uint32_t window = 3,
                                      double min_context_count = 0.0) {
  if (window == 0) throw Error("window size must be positive");
  detail::CountAccumulator acc;
  std::string line;
  std::vector<std::uint32_t> sent_words;
  std::vector<std::uint32_t> sent_ctxs;
  while (std::getline(corpus, line)) {
    strip_cr(line);
    auto tokens = split_ws(line);
    if (tokens.empty()) continue;
    sent_words.clear();
    sent_ctxs.clear();
    for (auto t : tokens) {
      std::string s(t);
      sent_words.push_back(acc.word_id(s));
      sent_ctxs.push_back(acc.context_id(s));
    }
    const std::size_t n = sent_words.size();
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t hi = std::min(n - 1, i + window);
      for (std::size_t j = i + 1; j <= hi; ++j) {
        acc.add(sent_words[i], sent_ctxs[j]);
        acc.add(sent_words[j], sent_ctxs[i]);
      }
    }
  }
  if (acc.empty()) throw Error("empty corpus: no co-occurrences counted");
  return std::move(acc).finalize(SparseSpace::Kind::window, window,
                                 min_context_count);
}

inline SparseSpace build_window_space_file(const std::string& path,
                                           std::uint32_t window = 3,
                                           double min_context_count = 0.0) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open corpus file: " + path);
  try {
    return build_window_space(in, window, min_context_count);
  } catch (const Error& e) {
    throw Error(path + ": " + e.what());
  }
}

namespace detail {

constexpr const char* kInverseMark = "⁻¹";  // superscript -1

struct DepToken {
  long long id;
  std::string form;
  long long head;
  std::string deprel;
  std::size_t lineno;
};

// A token with head h under relation r contributes context "r:form(h)" to
// the dependent and "r⁻¹:form(dependent)" to the head. Root arcs (HEAD=0)
// contribute nothing.
inline void emit_sentence(CountAccumulator& acc,
                          const std::vector<DepToken>& sent,
                          const std::string& path) {
  std::unordered_map<long long, const DepToken*> by_id;
  for (const auto& t : sent) by_id.emplace(t.id, &t);
  for (const auto& t : sent) {
    if (t.head == 0) continue;
    auto it = by_id.find(t.head);
    if (it == by_id.end())
      throw Error(path + ":" + std::to_string(t.lineno) + ": HEAD " +
                  std::to_string(t.head) + " not present in sentence");
    const DepToken& head = *it->second;
    acc.add(t.form, t.deprel + ":" + head.form);
    acc.add(head.form, t.deprel + kInverseMark + ":" + t.form);
  }
}

}  // namespace detail

// CoNLL-style input: one token per row, blank line between sentences.
// Rows with >= 8 columns use the standard column order (ID FORM ... HEAD
// DEPREL at positions 1, 2, 7, 8); 4-column rows are read as
// `ID FORM HEAD DEPREL` directly. `#` comment lines and multiword/empty
// node ids (`1-2`, `1.1`) are skipped.
inline SparseSpace build_dependency_space(std::istream& corpus,
                                          const std::string& path = "<input>",
                                          double min_context_count = 0.0) {
  detail::CountAccumulator acc;
  std::vector<detail::DepToken> sent;
  std::string line;
  std::size_t lineno = 0;
  auto flush = [&] {
    if (!sent.empty()) {
      detail::emit_sentence(acc, sent, path);
      sent.clear();
    }
  };
  while (std::getline(corpus, line)) {
    ++lineno;
    strip_cr(line);
    if (line.empty()) {
      flush();
      continue;
    }
    if (line[0] == '#') continue;
    auto cols = split_ws(line);
    std::size_t id_col, form_col, head_col, rel_col;
    if (cols.size() >= 8) {
      id_col = 0, form_col = 1, head_col = 6, rel_col = 7;
    } else if (cols.size() == 4) {
      id_col = 0, form_col = 1, head_col = 2, rel_col = 3;
    } else {
      throw Error(path + ":" + std::to_string(lineno) +
                  ": expected 4 or >=8 columns, got " +
                  std::to_string(cols.size()));
    }
    if (cols[id_col].find('-') != std::string_view::npos ||
        cols[id_col].find('.') != std::string_view::npos)
      continue;  // multiword range / empty node
    detail::DepToken tok;
    if (!parse_int64(cols[id_col], tok.id))
      throw Error(path + ":" + std::to_string(lineno) + ": non-integer ID `" +
                  std::string(cols[id_col]) + "`");
    if (!parse_int64(cols[head_col], tok.head))
      throw Error(path + ":" + std::to_string(lineno) +
                  ": non-integer HEAD `" + std::string(cols[head_col]) + "`");
    tok.form = std::string(cols[form_col]);
    tok.deprel = std::string(cols[rel_col]);
    tok.lineno = lineno;
    sent.push_back(std::move(tok));
  }
  flush();
  if (acc.empty()) throw Error("empty corpus: no dependency arcs found");
  return std::move(acc).finalize(SparseSpace::Kind::dependency, 0,
                                 min_context_count);
}

inline SparseSpace build_dependency_space_file(const std::string& path,
                                               double min_context_count = 0.0) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open corpus file: " + path);
  return build_dependency_space(in, path, min_context_count);
}

// Builds a space from explicit raw counts; ids are interned in the order
// the entries mention them. Mostly a test and tooling seam.
inline SparseSpace space_from_counts(
    SparseSpace::Kind kind,
    const std::vector<std::tuple<std::string, std::string, double>>& counts,
    double min_context_count = 0.0) {
  detail::CountAccumulator acc;
  for (const auto& [w, c, n] : counts) acc.add(w, c, n);
  if (acc.empty()) throw Error("empty corpus: no co-occurrences counted");
  return std::move(acc).finalize(kind, 0, min_context_count);
}

// ---------------------------------------------------------------------------
// Space archive (versioned, bit-exact round-trip)

namespace detail {
constexpr char kSpaceMagic[8] = {'S', 'D', 'S', 'N', 'S', 'P', 'C', '\0'};
constexpr std::uint32_t kSpaceVersion = 1;
}  // namespace detail

inline void save_space(const SparseSpace& space, const std::string& path) {
  BinWriter w(path);
  write_header(w, detail::kSpaceMagic, detail::kSpaceVersion);
  w.u8(static_cast<std::uint8_t>(space.kind));
  w.u32(space.window);
  w.u64(space.context_names.size());
  for (const auto& c : space.context_names) w.str(c);
  w.u64(space.words.size());
  for (const auto& s : space.words) w.str(s);
  auto write_rows = [&](const auto& rows) {
    for (const auto& row : rows) {
      w.u64(row.size());
      for (const auto& [c, v] : row) {
        w.u32(c);
        w.f64(v);
      }
    }
  };
  write_rows(space.vectors);
  write_rows(space.raw_counts);
  for (const auto& set : space.context_sets) w.vec_u32(set);
  w.vec_f64(space.word_totals.data(), space.word_totals.size());
  w.vec_f64(space.context_totals.data(), space.context_totals.size());
  w.f64(space.total_mass);
}

inline SparseSpace load_space(const std::string& path) {
  BinReader r(path);
  r.expect_header(detail::kSpaceMagic, detail::kSpaceVersion);
  SparseSpace space;
  space.kind = static_cast<SparseSpace::Kind>(r.u8());
  space.window = r.u32();
  std::uint64_t ncontexts = r.u64();
  space.context_names.reserve(ncontexts);
  for (std::uint64_t i = 0; i < ncontexts; ++i) {
    space.context_names.push_back(r.str());
    space.context_ids.emplace(space.context_names.back(),
                              static_cast<std::uint32_t>(i));
  }
  std::uint64_t nwords = r.u64();
  space.words.reserve(nwords);
  for (std::uint64_t i = 0; i < nwords; ++i) {
    space.words.push_back(r.str());
    space.word_ids.emplace(space.words.back(), static_cast<std::uint32_t>(i));
  }
  auto read_rows = [&](auto& rows) {
    rows.resize(nwords);
    for (auto& row : rows) {
      std::uint64_t n = r.u64();
      row.resize(n);
      for (auto& [c, v] : row) {
        c = r.u32();
        v = r.f64();
      }
    }
  };
  read_rows(space.vectors);
  read_rows(space.raw_counts);
  space.context_sets.resize(nwords);
  for (auto& set : space.context_sets) set = r.vec_u32();
  space.word_totals = r.vec_f64();
  space.context_totals = r.vec_f64();
  space.total_mass = r.f64();
  if (space.word_totals.size() != nwords ||
      space.context_totals.size() != ncontexts)
    throw Error("corrupt space archive: " + path);
  return space;
}

}  // namespace sdsn
