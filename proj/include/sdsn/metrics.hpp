// Evaluation metrics: Spearman's rank correlation (average ranks for
// ties), precision/recall/F1 with dev-tuned decision threshold, and the
// report structure the harness serializes.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sdsn/util.hpp"

namespace sdsn {

// Fractional ranks (1-based); tied values share the average of their ranks.
inline std::vector<double> average_ranks(const std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 +
                       1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

inline std::optional<double> pearson(const std::vector<double>& a,
                                     const std::vector<double>& b) {
  const std::size_t n = a.size();
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= static_cast<double>(n);
  mb /= static_cast<double>(n);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return std::nullopt;
  return sab / std::sqrt(saa * sbb);
}

// nullopt when the correlation is undefined (a constant input list).
inline std::optional<double> spearman(const std::vector<double>& pred,
                                      const std::vector<double>& gold) {
  if (pred.size() != gold.size())
    throw Error("spearman: length mismatch (" + std::to_string(pred.size()) +
                " vs " + std::to_string(gold.size()) + ")");
  if (pred.size() < 2)
    throw Error("spearman: need at least 2 observations");
  return pearson(average_ranks(pred), average_ranks(gold));
}

struct BinaryMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Positive prediction means score >= threshold. Degenerate denominators
// yield 0 by convention.
inline BinaryMetrics binary_metrics_at(const std::vector<double>& scores,
                                       const std::vector<bool>& gold,
                                       double threshold) {
  if (scores.size() != gold.size())
    throw Error("binary metrics: length mismatch");
  std::size_t tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool pos = scores[i] >= threshold;
    if (pos && gold[i]) ++tp;
    if (pos && !gold[i]) ++fp;
    if (!pos && gold[i]) ++fn;
  }
  BinaryMetrics m;
  m.precision = (tp + fp) > 0 ? double(tp) / double(tp + fp) : 0.0;
  m.recall = (tp + fn) > 0 ? double(tp) / double(tp + fn) : 0.0;
  m.f1 = (m.precision + m.recall) > 0.0
             ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
             : 0.0;
  return m;
}

// Scans the lowest score plus all midpoints of adjacent distinct sorted
// scores and keeps the threshold with the best F1 (ties: lowest threshold).
inline double tune_threshold(const std::vector<double>& scores,
                             const std::vector<bool>& gold) {
  if (scores.empty()) throw Error("cannot tune a threshold on an empty set");
  std::vector<double> sorted = scores;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<double> candidates;
  candidates.push_back(sorted.front());
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i)
    candidates.push_back((sorted[i] + sorted[i + 1]) / 2.0);
  double best_t = candidates.front();
  double best_f1 = -1.0;
  for (double t : candidates) {
    const double f1 = binary_metrics_at(scores, gold, t).f1;
    if (f1 > best_f1) {
      best_f1 = f1;
      best_t = t;
    }
  }
  return best_t;
}

struct EvalReport {
  std::string task;  // "graded" | "binary"
  std::optional<double> rho;
  std::optional<double> precision, recall, f1, threshold;
  int n_scored = 0;
  int n_skipped = 0;  // pairs dropped for out-of-vocabulary words
  std::optional<std::int64_t> seed;

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["task"] = task;
    if (rho) j["rho"] = *rho;
    if (task == "graded" && !rho) j["rho"] = nullptr;
    if (precision) j["precision"] = *precision;
    if (recall) j["recall"] = *recall;
    if (f1) j["f1"] = *f1;
    if (threshold) j["threshold"] = *threshold;
    j["n_scored"] = n_scored;
    j["n_skipped"] = n_skipped;
    if (seed) j["seed"] = *seed;
    return j;
  }
};

}  // namespace sdsn
