// Training: one hinge-loss pre-training pass over lexicon pairs, then
// mini-batch MSE epochs with AdaDelta, per-epoch dev evaluation and
// patience-based early stopping on the dev metric.
#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "sdsn/adadelta.hpp"
#include "sdsn/losses.hpp"
#include "sdsn/metrics.hpp"
#include "sdsn/model.hpp"
#include "sdsn/scorer.hpp"
#include "sdsn/util.hpp"

namespace sdsn {

struct TrainConfig {
  double learning_rate = 1.0;
  double adadelta_rho = 0.95;
  double adadelta_eps = 1e-6;
  double dropout_keep = 0.5;
  double margin = 1.0;  // hinge margin R for pre-training
  int max_epochs = 300;
  int patience = 10;
  int batch_size = 32;
  double max_score = 10.0;  // S

  void validate() const {
    if (!(dropout_keep > 0.0 && dropout_keep <= 1.0))
      throw Error("dropout keep probability must be in (0, 1]");
    if (!(margin < max_score / 2.0))
      throw Error("margin R must be smaller than S/2");
    if (patience < 1) throw Error("patience must be >= 1");
    if (max_epochs < 1) throw Error("max epochs must be >= 1");
    if (batch_size < 1) throw Error("batch size must be >= 1");
    if (max_score <= 0.0) throw Error("max score S must be positive");
  }
};

struct TrainLog {
  std::vector<std::string> lines;

  void add(std::string line) { lines.push_back(std::move(line)); }

  void write(const std::string& path) const {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error("cannot write training log: " + path);
    for (const auto& l : lines) out << l << "\n";
  }
};

namespace detail {

// rng stream tags, mixed with the run seed
constexpr std::uint64_t kPretrainStream = 0x70726574;
constexpr std::uint64_t kTrainStream = 0x74726169;

inline std::vector<double> eval_scores(const ModelParams& params,
                                       const std::vector<PreparedPair>& set) {
  std::vector<double> scores;
  scores.reserve(set.size());
  for (const auto& p : set)
    scores.push_back(forward_eval(params, *p.v1, *p.v2, p.feats).score);
  return scores;
}

}  // namespace detail

// Dev metric for epoch selection: Spearman's rho for graded tasks, F1 at a
// dev-tuned threshold for binary tasks. nullopt when undefined (constant
// predictions or golds).
inline std::optional<double> dev_metric(const ModelParams& params,
                                        const std::vector<PreparedPair>& dev,
                                        TaskKind task) {
  if (dev.empty()) return std::nullopt;
  std::vector<double> scores = detail::eval_scores(params, dev);
  if (task == TaskKind::graded) {
    std::vector<double> gold;
    gold.reserve(dev.size());
    for (const auto& p : dev) gold.push_back(p.gold);
    if (scores.size() < 2) return std::nullopt;
    return spearman(scores, gold);
  }
  std::vector<bool> gold;
  gold.reserve(dev.size());
  for (const auto& p : dev) gold.push_back(p.gold > 0.5);
  const double threshold = tune_threshold(scores, gold);
  return binary_metrics_at(scores, gold, threshold).f1;
}

// One shuffled hinge-loss pass over binary lexicon pairs. Positives are
// pushed toward S, negatives toward 0, but only while they sit outside the
// margin band around the decision boundary. Dropout stays on, as in the
// main training phase.
inline void pretrain(ModelParams& params, const std::vector<PreparedPair>& lex,
                     const TrainConfig& cfg, std::uint64_t seed,
                     TrainLog* log = nullptr) {
  cfg.validate();
  if (lex.empty()) {
    if (log) log->add("pretrain skipped: no usable lexicon pairs");
    return;
  }
  std::mt19937_64 rng(derive_seed(seed, detail::kPretrainStream));
  std::vector<std::size_t> order(lex.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);

  AdaDeltaState state(params);
  ModelParams grads = zeros_like(params);
  double loss_sum = 0.0;
  std::size_t done = 0;
  while (done < order.size()) {
    const std::size_t batch_end =
        std::min(order.size(), done + static_cast<std::size_t>(cfg.batch_size));
    auto gv = tensor_views(grads);
    for (const auto& view : gv)
      std::fill(view.data, view.data + view.size, 0.0);
    for (std::size_t k = done; k < batch_end; ++k) {
      const PreparedPair& p = lex[order[k]];
      ForwardTrace trace = forward(params, *p.v1, *p.v2, p.feats,
                                   FwdMode::train, cfg.dropout_keep, &rng);
      const double target = p.gold > 0.5 ? cfg.max_score : 0.0;
      LossGrad lg = hinge_loss(trace.score, target, cfg.max_score, cfg.margin);
      loss_sum += lg.loss;
      if (lg.dldy != 0.0) backward_accumulate(params, trace, lg.dldy, grads);
    }
    adadelta_step(params, grads, state, cfg.learning_rate, cfg.adadelta_rho,
                  cfg.adadelta_eps);
    done = batch_end;
  }
  if (!std::isfinite(loss_sum))
    throw Error("non-finite loss during pre-training pass");
  if (log)
    log->add("pretrain pairs=" + std::to_string(lex.size()) + " hinge_loss=" +
             fmt_double(loss_sum / static_cast<double>(lex.size())));
}

struct TrainResult {
  ModelParams best_params;
  std::optional<double> best_dev_metric;
  int best_epoch = 0;   // 0 when no epoch ever improved
  int epochs_run = 0;
};

// Mini-batch MSE training. Returns the parameters of the epoch with the
// best dev metric. The log gets one line per epoch:
//   epoch=3 train_mse=0.123456 dev_rho=0.654321 best=1
inline TrainResult train(ModelParams params,
                         const std::vector<PreparedPair>& train_set,
                         const std::vector<PreparedPair>& dev_set,
                         TaskKind task, const TrainConfig& cfg,
                         std::uint64_t seed, TrainLog& log) {
  cfg.validate();
  if (train_set.empty()) throw Error("training set is empty");
  if (dev_set.empty()) throw Error("dev set is empty");
  for (const auto& p : train_set)
    if (p.gold < 0.0 || p.gold > cfg.max_score)
      throw Error("training gold score outside [0, S]");

  const char* metric_name = task == TaskKind::graded ? "dev_rho" : "dev_f1";
  std::mt19937_64 rng(derive_seed(seed, detail::kTrainStream));

  TrainResult result;
  result.best_params = params;
  double best = -std::numeric_limits<double>::infinity();
  int since_improvement = 0;

  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);
  AdaDeltaState state(params);
  ModelParams grads = zeros_like(params);

  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    std::size_t done = 0;
    int batch_index = 0;
    while (done < order.size()) {
      const std::size_t batch_end = std::min(
          order.size(), done + static_cast<std::size_t>(cfg.batch_size));
      auto gv = tensor_views(grads);
      for (const auto& view : gv)
        std::fill(view.data, view.data + view.size, 0.0);
      double batch_loss = 0.0;
      for (std::size_t k = done; k < batch_end; ++k) {
        const PreparedPair& p = train_set[order[k]];
        const double target =
            task == TaskKind::binary ? p.gold * cfg.max_score : p.gold;
        ForwardTrace trace = forward(params, *p.v1, *p.v2, p.feats,
                                     FwdMode::train, cfg.dropout_keep, &rng);
        LossGrad lg = mse_loss(trace.score, target);
        batch_loss += lg.loss;
        backward_accumulate(params, trace, lg.dldy, grads);
      }
      if (!std::isfinite(batch_loss))
        throw Error("non-finite loss in epoch " + std::to_string(epoch) +
                    ", batch " + std::to_string(batch_index));
      loss_sum += batch_loss;
      adadelta_step(params, grads, state, cfg.learning_rate, cfg.adadelta_rho,
                    cfg.adadelta_eps);
      done = batch_end;
      ++batch_index;
    }
    const double train_mse = loss_sum / static_cast<double>(order.size());

    std::optional<double> metric = dev_metric(params, dev_set, task);
    const bool improved = metric.has_value() && *metric > best;
    if (improved) {
      best = *metric;
      result.best_params = params;
      result.best_dev_metric = metric;
      result.best_epoch = epoch;
      since_improvement = 0;
    } else {
      ++since_improvement;
    }
    log.add("epoch=" + std::to_string(epoch) +
            " train_mse=" + fmt_double(train_mse) + " " + metric_name + "=" +
            (metric ? fmt_double(*metric) : std::string("nan")) +
            " best=" + (improved ? "1" : "0"));
    result.epochs_run = epoch;
    if (since_improvement >= cfg.patience) break;
  }
  return result;
}

struct SeedStats {
  double mean = 0.0;
  double stddev = 0.0;  // population standard deviation
};

inline SeedStats aggregate(const std::vector<double>& values) {
  SeedStats s;
  if (values.empty()) return s;
  for (double v : values) s.mean += v;
  s.mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - s.mean) * (v - s.mean);
  s.stddev = std::sqrt(var / static_cast<double>(values.size()));
  return s;
}

}  // namespace sdsn
