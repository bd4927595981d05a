// Directional pair features over two sparse spaces. Five features per
// space, in fixed order:
//   [cosine, weighted-cosine(w1->w2), weighted-cosine(w2->w1),
//    shared-context-proportion(w1->w2), shared-context-proportion(w2->w1)]
// Window-space features occupy slots 0-4, dependency-space features 5-9.
// Degenerate inputs (missing word, empty vector, empty context set)
// contribute zeros; every feature lies in [0, 1].
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "sdsn/sparse_space.hpp"

namespace sdsn {

struct PairFeatures {
  std::array<double, 10> x{};
};

namespace detail {

using SparseVec = std::vector<std::pair<std::uint32_t, double>>;

inline double cosine(const SparseVec& a, const SparseVec& b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (const auto& [c, v] : a) na += v * v;
  for (const auto& [c, v] : b) nb += v * v;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (ia->first < ib->first) {
      ++ia;
    } else if (ib->first < ia->first) {
      ++ib;
    } else {
      dot += ia->second * ib->second;
      ++ia;
      ++ib;
    }
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

// Rank weights for the weighted cosine. The broader term's contexts are
// ranked by descending weight (ties by ascending context id); rank r of
// |F| contexts gets weight 1 - (r-1)/|F|. Contexts outside F weigh 0.
// Returned aligned with `broad`'s entry order.
inline std::vector<double> rank_weights(const SparseVec& broad) {
  const std::size_t n = broad.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    if (broad[i].second != broad[j].second)
      return broad[i].second > broad[j].second;
    return broad[i].first < broad[j].first;
  });
  std::vector<double> z(n);
  for (std::size_t r = 0; r < n; ++r)
    z[order[r]] = 1.0 - static_cast<double>(r) / static_cast<double>(n);
  return z;
}

// weighted-cosine(narrow -> broad): rank weights come from `broad`.
inline double weighted_cosine(const SparseVec& narrow, const SparseVec& broad) {
  if (narrow.empty() || broad.empty()) return 0.0;
  std::vector<double> z = rank_weights(broad);
  double num = 0.0, den_narrow = 0.0, den_broad = 0.0;
  for (std::size_t k = 0; k < broad.size(); ++k)
    den_broad += z[k] * broad[k].second * broad[k].second;
  auto ia = narrow.begin();
  std::size_t kb = 0;
  while (ia != narrow.end() && kb < broad.size()) {
    if (ia->first < broad[kb].first) {
      ++ia;
    } else if (broad[kb].first < ia->first) {
      ++kb;
    } else {
      num += z[kb] * ia->second * broad[kb].second;
      den_narrow += z[kb] * ia->second * ia->second;
      ++ia;
      ++kb;
    }
  }
  if (den_narrow <= 0.0 || den_broad <= 0.0) return 0.0;
  return num / (std::sqrt(den_narrow) * std::sqrt(den_broad));
}

inline std::size_t intersection_size(const std::vector<std::uint32_t>& a,
                                     const std::vector<std::uint32_t>& b) {
  std::size_t n = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++n;
      ++ia;
      ++ib;
    }
  }
  return n;
}

inline std::array<double, 5> space_features(const SparseSpace& space,
                                            const std::string& w1,
                                            const std::string& w2) {
  std::array<double, 5> f{};
  const std::uint32_t* id1 = space.find_word(w1);
  const std::uint32_t* id2 = space.find_word(w2);
  if (!id1 || !id2) return f;
  const SparseVec& v1 = space.vectors[*id1];
  const SparseVec& v2 = space.vectors[*id2];
  f[0] = cosine(v1, v2);
  f[1] = weighted_cosine(v1, v2);  // w1 -> w2: w2 is the rank source
  f[2] = weighted_cosine(v2, v1);  // w2 -> w1: w1 is the rank source
  const auto& c1 = space.context_sets[*id1];
  const auto& c2 = space.context_sets[*id2];
  const double shared = static_cast<double>(intersection_size(c1, c2));
  f[3] = c1.empty() ? 0.0 : shared / static_cast<double>(c1.size());
  f[4] = c2.empty() ? 0.0 : shared / static_cast<double>(c2.size());
  return f;
}

}  // namespace detail

inline PairFeatures pair_features(const SparseSpace& window_space,
                                  const SparseSpace& dependency_space,
                                  const std::string& w1,
                                  const std::string& w2) {
  PairFeatures out;
  auto fw = detail::space_features(window_space, w1, w2);
  auto fd = detail::space_features(dependency_space, w1, w2);
  std::copy(fw.begin(), fw.end(), out.x.begin());
  std::copy(fd.begin(), fd.end(), out.x.begin() + 5);
  return out;
}

}  // namespace sdsn
