// End-to-end experiment runner: resources -> splits -> (pre-)training per
// seed -> test report per seed -> aggregate report. The CLI `train`
// subcommand is a thin wrapper around run_experiment; outputs land under
//   <out>/seed_<s>/{checkpoint.bin,train.log,report.json}
//   <out>/report.json
// Reruns with the same config overwrite the same bytes.
#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sdsn/checkpoint.hpp"
#include "sdsn/datasets.hpp"
#include "sdsn/embeddings.hpp"
#include "sdsn/metrics.hpp"
#include "sdsn/scorer.hpp"
#include "sdsn/sparse_space.hpp"
#include "sdsn/train.hpp"

namespace sdsn {

struct RunConfig {
  std::string embeddings_path;
  std::string window_space_path;
  std::string dependency_space_path;
  std::string data_path;    // single file, split by split_kind
  std::string splits_dir;   // pre-split train.tsv/dev.tsv/test.tsv; wins
  std::string lexicon_path;
  std::string out_dir = "runs/run";

  TaskKind task = TaskKind::graded;
  bool use_pair_features = false;  // --sdf
  bool pretrain_pass = false;      // --as
  bool lowercase = false;
  int expected_dim = 0;  // 0 = infer

  SplitKind split_kind = SplitKind::random;
  SplitRatios ratios;
  std::uint64_t split_seed = 13;

  int map_dim = 300;
  int hidden_dim = 100;
  std::size_t lexicon_cap = 10;
  std::vector<std::uint64_t> seeds = {1};

  TrainConfig train;
};

// Collects every problem instead of stopping at the first one.
inline std::vector<std::string> validate_config(const RunConfig& cfg) {
  namespace fs = std::filesystem;
  std::vector<std::string> problems;
  auto need_file = [&](const std::string& path, const char* what) {
    if (path.empty())
      problems.push_back(std::string(what) + " path is required");
    else if (!fs::exists(path))
      problems.push_back(std::string(what) + " file not found: " + path);
  };
  need_file(cfg.embeddings_path, "embeddings");
  if (cfg.splits_dir.empty()) {
    need_file(cfg.data_path, "dataset");
  } else if (!fs::is_directory(cfg.splits_dir)) {
    problems.push_back("splits dir not found: " + cfg.splits_dir);
  } else {
    for (const char* name : {"train.tsv", "dev.tsv", "test.tsv"})
      if (!fs::exists(fs::path(cfg.splits_dir) / name))
        problems.push_back("splits dir is missing " + std::string(name));
  }
  if (cfg.use_pair_features) {
    need_file(cfg.window_space_path, "window space (required by --sdf)");
    need_file(cfg.dependency_space_path,
              "dependency space (required by --sdf)");
  }
  if (cfg.pretrain_pass) need_file(cfg.lexicon_path, "lexicon (required by --as)");
  if (cfg.seeds.empty()) problems.push_back("at least one seed is required");
  if (cfg.map_dim <= 0 || cfg.hidden_dim <= 0)
    problems.push_back("layer sizes must be positive");
  try {
    cfg.train.validate();
  } catch (const Error& e) {
    problems.push_back(e.what());
  }
  try {
    cfg.ratios.validate();
  } catch (const Error& e) {
    problems.push_back(e.what());
  }
  return problems;
}

struct SeedOutcome {
  std::uint64_t seed = 0;
  EvalReport report;
  std::string checkpoint_path;
};

struct ExperimentResult {
  std::vector<SeedOutcome> seeds;
  nlohmann::json aggregate;
};

namespace detail {

inline EvalReport test_report(const ModelParams& params,
                              const PreparedSet& dev,
                              const PreparedSet& test, TaskKind task) {
  EvalReport report;
  report.task = task_name(task);
  report.n_scored = static_cast<int>(test.pairs.size());
  report.n_skipped = static_cast<int>(test.skipped_oov);
  std::vector<double> scores = eval_scores(params, test.pairs);
  if (task == TaskKind::graded) {
    std::vector<double> gold;
    for (const auto& p : test.pairs) gold.push_back(p.gold);
    if (scores.size() >= 2) report.rho = spearman(scores, gold);
  } else {
    std::vector<double> dev_scores = eval_scores(params, dev.pairs);
    std::vector<bool> dev_gold, test_gold;
    for (const auto& p : dev.pairs) dev_gold.push_back(p.gold > 0.5);
    for (const auto& p : test.pairs) test_gold.push_back(p.gold > 0.5);
    const double threshold = tune_threshold(dev_scores, dev_gold);
    BinaryMetrics m = binary_metrics_at(scores, test_gold, threshold);
    report.precision = m.precision;
    report.recall = m.recall;
    report.f1 = m.f1;
    report.threshold = threshold;
  }
  return report;
}

inline void write_json(const nlohmann::json& j, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write report: " + path);
  out << j.dump(2) << "\n";
}

}  // namespace detail

inline ExperimentResult run_experiment(const RunConfig& cfg,
                                       std::ostream& diag = std::cerr) {
  namespace fs = std::filesystem;
  auto problems = validate_config(cfg);
  if (!problems.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& p : problems) msg += "\n  - " + p;
    throw Error(msg);
  }

  EmbeddingTable embeddings = load_embeddings(
      cfg.embeddings_path, cfg.expected_dim, cfg.lowercase, &diag);
  diag << "loaded " << embeddings.size() << " embeddings (dim "
       << embeddings.dim() << ")\n";

  std::optional<SparseSpace> window_space, dependency_space;
  if (cfg.use_pair_features) {
    window_space = load_space(cfg.window_space_path);
    dependency_space = load_space(cfg.dependency_space_path);
    diag << "loaded spaces: window " << window_space->vocab_size()
         << " words, dependency " << dependency_space->vocab_size()
         << " words\n";
  }

  DatasetSplit split;
  if (!cfg.splits_dir.empty()) {
    fs::path dir(cfg.splits_dir);
    split.train = load_pairs((dir / "train.tsv").string(), cfg.task,
                             cfg.train.max_score);
    split.dev =
        load_pairs((dir / "dev.tsv").string(), cfg.task, cfg.train.max_score);
    split.test =
        load_pairs((dir / "test.tsv").string(), cfg.task, cfg.train.max_score);
  } else {
    auto pairs = load_pairs(cfg.data_path, cfg.task, cfg.train.max_score);
    split = cfg.split_kind == SplitKind::lexical
                ? make_lexical_split(pairs, cfg.ratios, cfg.split_seed)
                : make_random_split(std::move(pairs), cfg.ratios,
                                    cfg.split_seed);
    if (split.discarded > 0)
      diag << "lexical split discarded " << split.discarded
           << " cross-subset pairs\n";
  }
  diag << "pairs: train " << split.train.size() << ", dev "
       << split.dev.size() << ", test " << split.test.size() << "\n";

  const SparseSpace* wsp = window_space ? &*window_space : nullptr;
  const SparseSpace* dsp = dependency_space ? &*dependency_space : nullptr;
  PreparedSet train_set = prepare_pairs(split.train, embeddings, wsp, dsp,
                                        cfg.use_pair_features);
  PreparedSet dev_set =
      prepare_pairs(split.dev, embeddings, wsp, dsp, cfg.use_pair_features);
  PreparedSet test_set =
      prepare_pairs(split.test, embeddings, wsp, dsp, cfg.use_pair_features);
  if (train_set.skipped_oov + dev_set.skipped_oov + test_set.skipped_oov > 0)
    diag << "skipped OOV pairs: train " << train_set.skipped_oov << ", dev "
         << dev_set.skipped_oov << ", test " << test_set.skipped_oov << "\n";

  std::vector<std::pair<std::string, FileFingerprint>> inputs;
  inputs.emplace_back("embeddings", fingerprint_file(cfg.embeddings_path));
  if (cfg.use_pair_features) {
    inputs.emplace_back("window_space",
                        fingerprint_file(cfg.window_space_path));
    inputs.emplace_back("dependency_space",
                        fingerprint_file(cfg.dependency_space_path));
  }

  ExperimentResult result;
  std::vector<double> primary;
  std::vector<double> precisions, recalls, f1s;

  for (std::uint64_t seed : cfg.seeds) {
    fs::path seed_dir = fs::path(cfg.out_dir) / ("seed_" + std::to_string(seed));
    fs::create_directories(seed_dir);

    ModelParams params =
        init_params(embeddings.dim(), cfg.map_dim, cfg.hidden_dim,
                    cfg.use_pair_features, cfg.train.max_score, seed);
    TrainLog log;

    if (cfg.pretrain_pass) {
      auto lexicon = load_lexicon(cfg.lexicon_path, cfg.lexicon_cap, seed);
      PreparedSet lex = prepare_lexicon(lexicon, embeddings, wsp, dsp,
                                        cfg.use_pair_features);
      log.add("lexicon kept=" + std::to_string(lexicon.size()) +
              " usable=" + std::to_string(lex.pairs.size()) +
              " skipped_oov=" + std::to_string(lex.skipped_oov));
      pretrain(params, lex.pairs, cfg.train, seed, &log);
    }

    TrainResult trained = train(std::move(params), train_set.pairs,
                                dev_set.pairs, cfg.task, cfg.train, seed, log);
    log.add("best_epoch=" + std::to_string(trained.best_epoch) +
            " epochs_run=" + std::to_string(trained.epochs_run));

    SeedOutcome outcome;
    outcome.seed = seed;
    outcome.report =
        detail::test_report(trained.best_params, dev_set, test_set, cfg.task);
    outcome.report.seed = static_cast<std::int64_t>(seed);
    outcome.checkpoint_path = (seed_dir / "checkpoint.bin").string();

    save_checkpoint({trained.best_params, inputs}, outcome.checkpoint_path);
    log.write((seed_dir / "train.log").string());
    detail::write_json(outcome.report.to_json(),
                       (seed_dir / "report.json").string());

    if (cfg.task == TaskKind::graded) {
      if (outcome.report.rho) primary.push_back(*outcome.report.rho);
    } else {
      primary.push_back(*outcome.report.f1);
      precisions.push_back(*outcome.report.precision);
      recalls.push_back(*outcome.report.recall);
      f1s.push_back(*outcome.report.f1);
    }
    diag << "seed " << seed << ": test "
         << (cfg.task == TaskKind::graded ? "rho" : "f1") << " = "
         << (outcome.report.rho
                 ? fmt_double(*outcome.report.rho)
                 : (outcome.report.f1 ? fmt_double(*outcome.report.f1)
                                      : std::string("nan")))
         << "\n";
    result.seeds.push_back(std::move(outcome));
  }

  nlohmann::json agg;
  agg["task"] = task_name(cfg.task);
  agg["metric"] = cfg.task == TaskKind::graded ? "rho" : "f1";
  agg["n_seeds"] = cfg.seeds.size();
  SeedStats stats = aggregate(primary);
  agg["mean"] = stats.mean;
  agg["std"] = stats.stddev;
  if (cfg.task == TaskKind::binary) {
    agg["precision_mean"] = aggregate(precisions).mean;
    agg["recall_mean"] = aggregate(recalls).mean;
  }
  agg["per_seed"] = nlohmann::json::array();
  for (const auto& s : result.seeds)
    agg["per_seed"].push_back(s.report.to_json());
  result.aggregate = agg;

  fs::create_directories(cfg.out_dir);
  detail::write_json(agg, (fs::path(cfg.out_dir) / "report.json").string());
  return result;
}

}  // namespace sdsn
