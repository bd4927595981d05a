// sdsn: build sparse spaces, train, evaluate and score word pairs with a
// supervised directional similarity network.
#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "sdsn/sdsn.hpp"

namespace {

// Seed lists accept comma-separated entries and `a..b` ranges: "1,2,8..10".
std::vector<std::uint64_t> parse_seed_spec(const std::string& spec) {
  std::vector<std::uint64_t> seeds;
  for (const auto& part : sdsn::split_on(spec, ',')) {
    if (part.empty()) continue;
    auto dots = part.find("..");
    long long lo, hi;
    if (dots == std::string::npos) {
      if (!sdsn::parse_int64(part, lo) || lo < 0)
        throw sdsn::Error("bad seed `" + part + "` in `" + spec + "`");
      hi = lo;
    } else {
      if (!sdsn::parse_int64(part.substr(0, dots), lo) ||
          !sdsn::parse_int64(part.substr(dots + 2), hi) || lo < 0 || hi < lo)
        throw sdsn::Error("bad seed range `" + part + "` in `" + spec + "`");
    }
    for (long long s = lo; s <= hi; ++s)
      seeds.push_back(static_cast<std::uint64_t>(s));
  }
  if (seeds.empty()) throw sdsn::Error("empty seed list: `" + spec + "`");
  return seeds;
}

// Flat `key = value` config file; every key names a long option of the
// subcommand. Keys already given on the command line keep their
// command-line value. `#` starts a comment; values may be quoted.
void apply_config_file(CLI::App* sub, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw sdsn::Error("cannot open config file: " + path);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    sdsn::strip_cr(line);
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto trim = [](std::string s) {
      auto b = s.find_first_not_of(" \t");
      auto e = s.find_last_not_of(" \t");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    if (trim(line).empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw sdsn::Error(path + ":" + std::to_string(lineno) +
                        ": expected `key = value`");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && ((value.front() == '"' && value.back() == '"') ||
                              (value.front() == '\'' && value.back() == '\'')))
      value = value.substr(1, value.size() - 2);
    CLI::Option* op = sub->get_option_no_throw("--" + key);
    if (!op)
      throw sdsn::Error(path + ":" + std::to_string(lineno) +
                        ": unknown config key `" + key + "`");
    if (op->count() > 0) continue;  // command-line flag wins
    op->add_result(value);
    op->run_callback();
  }
}

struct LoadedBundle {
  sdsn::ScoringBundle bundle;
  int warnings = 0;
};

// Reassembles a scoring bundle around a checkpoint. Paths left empty fall
// back to the paths recorded at train time. Fingerprint drift produces a
// warning, or an error under --strict.
LoadedBundle load_bundle(const std::string& checkpoint_path,
                         std::string embeddings_path,
                         std::string window_space_path,
                         std::string dep_space_path, bool lowercase,
                         bool strict) {
  sdsn::Checkpoint ckpt = sdsn::load_checkpoint(checkpoint_path);
  auto recorded = [&](const std::string& role) -> const sdsn::FileFingerprint* {
    for (const auto& [r, fp] : ckpt.inputs)
      if (r == role) return &fp;
    return nullptr;
  };
  auto resolve = [&](std::string given, const char* role) {
    if (!given.empty()) return given;
    const sdsn::FileFingerprint* fp = recorded(role);
    if (fp && !fp->path.empty()) return fp->path;
    throw sdsn::Error(std::string("no ") + role +
                      " path given and none recorded in the checkpoint");
  };

  LoadedBundle out;
  embeddings_path = resolve(embeddings_path, "embeddings");
  auto check = [&](const char* role, const std::string& path) {
    const sdsn::FileFingerprint* fp = recorded(role);
    if (!fp) return;
    sdsn::FileFingerprint now = sdsn::fingerprint_file(path);
    if (now.hash != fp->hash || now.bytes != fp->bytes) {
      std::string msg = std::string(role) + " file " + path +
                        " does not match the fingerprint recorded at train "
                        "time";
      if (strict) throw sdsn::Error(msg);
      std::cerr << "warning: " << msg << "\n";
      ++out.warnings;
    }
  };

  check("embeddings", embeddings_path);
  out.bundle.embeddings = sdsn::load_embeddings(
      embeddings_path, ckpt.params.embed_dim, lowercase);
  if (ckpt.params.pair_features) {
    window_space_path = resolve(window_space_path, "window_space");
    dep_space_path = resolve(dep_space_path, "dependency_space");
    check("window_space", window_space_path);
    check("dependency_space", dep_space_path);
    out.bundle.window_space = sdsn::load_space(window_space_path);
    out.bundle.dependency_space = sdsn::load_space(dep_space_path);
  }
  out.bundle.params = std::move(ckpt.params);
  out.bundle.check();
  return out;
}

int cmd_build_space(const std::string& corpus, const std::string& kind,
                    unsigned window, double min_count,
                    const std::string& out_path) {
  sdsn::SparseSpace space;
  if (kind == "window")
    space = sdsn::build_window_space_file(corpus, window, min_count);
  else if (kind == "dependency")
    space = sdsn::build_dependency_space_file(corpus, min_count);
  else
    throw sdsn::Error("unknown space kind `" + kind +
                      "` (expected window or dependency)");
  sdsn::save_space(space, out_path);
  std::cout << "kind=" << kind << " words=" << space.vocab_size()
            << " contexts=" << space.context_count()
            << " total_mass=" << sdsn::fmt_double(space.total_mass) << "\n";
  return 0;
}

int cmd_eval(const LoadedBundle& loaded, const std::string& data_path,
             const std::string& task_str, const std::string& dev_path,
             std::optional<double> fixed_threshold,
             const std::string& out_path) {
  const sdsn::ScoringBundle& bundle = loaded.bundle;
  sdsn::TaskKind task =
      task_str == "binary" ? sdsn::TaskKind::binary : sdsn::TaskKind::graded;
  const double S = bundle.params.max_score;

  auto pairs = sdsn::load_pairs(data_path, task, S);
  sdsn::EvalReport report;
  report.task = sdsn::task_name(task);

  std::vector<double> scores;
  std::vector<double> gold;
  for (const auto& p : pairs) {
    auto s = sdsn::score_pair(bundle, p.word1, p.word2);
    if (!s) {
      ++report.n_skipped;
      continue;
    }
    scores.push_back(*s);
    gold.push_back(p.gold);
    ++report.n_scored;
  }

  if (task == sdsn::TaskKind::graded) {
    if (scores.size() >= 2) report.rho = sdsn::spearman(scores, gold);
  } else {
    double threshold;
    if (fixed_threshold) {
      threshold = *fixed_threshold;
    } else if (!dev_path.empty()) {
      auto dev_pairs = sdsn::load_binary(dev_path);
      std::vector<double> dev_scores;
      std::vector<bool> dev_gold;
      for (const auto& p : dev_pairs) {
        auto s = sdsn::score_pair(bundle, p.word1, p.word2);
        if (!s) continue;
        dev_scores.push_back(*s);
        dev_gold.push_back(p.gold > 0.5);
      }
      if (dev_scores.empty())
        throw sdsn::Error("no scorable dev pairs for threshold tuning");
      threshold = sdsn::tune_threshold(dev_scores, dev_gold);
    } else {
      threshold = S / 2.0;  // documented default without a dev set
    }
    std::vector<bool> gold_bits;
    for (double g : gold) gold_bits.push_back(g > 0.5);
    sdsn::BinaryMetrics m =
        sdsn::binary_metrics_at(scores, gold_bits, threshold);
    report.precision = m.precision;
    report.recall = m.recall;
    report.f1 = m.f1;
    report.threshold = threshold;
  }

  std::cout << report.to_json().dump(2) << "\n";
  if (!out_path.empty()) {
    std::ofstream out(out_path, std::ios::trunc);
    if (!out) throw sdsn::Error("cannot write report: " + out_path);
    out << report.to_json().dump(2) << "\n";
  }
  return 0;
}

int cmd_score(const LoadedBundle& loaded, const std::string& pairs_path) {
  std::istream* in = &std::cin;
  std::ifstream file;
  if (!pairs_path.empty()) {
    file.open(pairs_path);
    if (!file) throw sdsn::Error("cannot open pairs file: " + pairs_path);
    in = &file;
  }
  std::string line;
  while (std::getline(*in, line)) {
    sdsn::strip_cr(line);
    if (line.empty()) continue;
    auto cols = sdsn::split_on(line, '\t');
    if (cols.size() < 2) {
      std::cout << line << "\tNA\tmalformed-line\n";
      continue;
    }
    auto s = sdsn::score_pair(loaded.bundle, cols[0], cols[1]);
    if (s)
      std::cout << cols[0] << "\t" << cols[1] << "\t"
                << sdsn::fmt_double(*s, "%.6f") << "\n";
    else
      std::cout << cols[0] << "\t" << cols[1] << "\tNA\toov\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "supervised directional similarity network for scoring graded "
      "lexical entailment between word pairs"};
  app.require_subcommand(1);

  // ---- build-space ----
  auto* build = app.add_subcommand(
      "build-space", "Build a sparse PPMI space from a corpus");
  std::string bs_corpus, bs_kind, bs_out;
  unsigned bs_window = 3;
  double bs_min_count = 0.0;
  build->add_option("--corpus", bs_corpus, "Corpus file")->required();
  build->add_option("--kind", bs_kind, "window | dependency")->required();
  build->add_option("--window", bs_window, "Window radius (window kind)")
      ->default_val(3);
  build->add_option("--min-count", bs_min_count,
                    "Drop contexts with total count below this");
  build->add_option("--out", bs_out, "Output archive path")->required();

  // ---- train ----
  auto* tr = app.add_subcommand("train",
                                "Train models and write checkpoints, logs "
                                "and reports");
  std::string tr_config;
  tr->add_option("--config", tr_config,
                 "Flat key=value config file; command-line flags override "
                 "config values");
  sdsn::RunConfig rc;
  std::string tr_seeds = "1..10";
  std::string tr_task = "graded";
  std::string tr_split = "random";
  std::string tr_ratios = "0.7,0.1,0.2";
  tr->add_option("--embeddings", rc.embeddings_path, "Embedding text file");
  tr->add_option("--data", rc.data_path, "Dataset TSV to split");
  tr->add_option("--splits-dir", rc.splits_dir,
                 "Directory with train.tsv/dev.tsv/test.tsv (overrides "
                 "--data/--split)");
  tr->add_option("--task", tr_task, "graded | binary")->default_val("graded");
  tr->add_option("--split", tr_split, "random | lexical")
      ->default_val("random");
  tr->add_option("--split-ratios", tr_ratios, "train,dev,test fractions")
      ->default_val("0.7,0.1,0.2");
  tr->add_option("--split-seed", rc.split_seed,
                 "Seed for the data split (shared across run seeds)")
      ->default_val(13);
  tr->add_flag("--sdf", rc.use_pair_features,
               "Use sparse distributional pair features (needs both spaces)");
  tr->add_option("--window-space", rc.window_space_path,
                 "Window space archive");
  tr->add_option("--dep-space", rc.dependency_space_path,
                 "Dependency space archive");
  tr->add_flag("--as", rc.pretrain_pass,
               "Hinge-loss pre-training pass over --lexicon before training");
  tr->add_option("--lexicon", rc.lexicon_path,
                 "Relation lexicon (word1 TAB word2 TAB pos|neg)");
  tr->add_option("--lexicon-cap", rc.lexicon_cap,
                 "Max kept lexicon pairs per word")
      ->default_val(10);
  tr->add_flag("--lowercase", rc.lowercase,
               "Lowercase embedding vocabulary and queries");
  tr->add_option("--expected-dim", rc.expected_dim,
                 "Require this embedding dimension (0 = infer)");
  tr->add_option("--map-dim", rc.map_dim, "Mapping layer size")
      ->default_val(300);
  tr->add_option("--hidden-dim", rc.hidden_dim, "Hidden layer size")
      ->default_val(100);
  tr->add_option("--max-score", rc.train.max_score,
                 "Maximum dataset score S")
      ->default_val(10.0);
  tr->add_option("--lr", rc.train.learning_rate, "AdaDelta learning rate")
      ->default_val(1.0);
  tr->add_option("--rho", rc.train.adadelta_rho, "AdaDelta decay")
      ->default_val(0.95);
  tr->add_option("--eps", rc.train.adadelta_eps, "AdaDelta epsilon")
      ->default_val(1e-6);
  tr->add_option("--dropout-keep", rc.train.dropout_keep,
                 "Embedding dropout keep probability")
      ->default_val(0.5);
  tr->add_option("--margin", rc.train.margin, "Pre-training hinge margin R")
      ->default_val(1.0);
  tr->add_option("--max-epochs", rc.train.max_epochs, "Epoch budget")
      ->default_val(300);
  tr->add_option("--patience", rc.train.patience,
                 "Epochs without dev improvement before stopping")
      ->default_val(10);
  tr->add_option("--batch-size", rc.train.batch_size, "Mini-batch size")
      ->default_val(32);
  tr->add_option("--seeds", tr_seeds, "Run seeds, e.g. `1..10` or `3,5,7`")
      ->default_val("1..10");
  tr->add_option("--out", rc.out_dir, "Output directory")
      ->default_val("runs/run");

  // ---- eval ----
  auto* ev = app.add_subcommand("eval", "Evaluate a checkpoint on a dataset");
  std::string ev_ckpt, ev_emb, ev_wspace, ev_dspace, ev_data, ev_dev, ev_out;
  std::string ev_task = "graded";
  bool ev_strict = false, ev_lower = false;
  double ev_threshold_val = -1.0;
  ev->add_option("--checkpoint", ev_ckpt, "Model checkpoint")->required();
  ev->add_option("--data", ev_data, "Dataset TSV")->required();
  ev->add_option("--task", ev_task, "graded | binary")->default_val("graded");
  ev->add_option("--embeddings", ev_emb,
                 "Embedding file (default: path recorded in checkpoint)");
  ev->add_option("--window-space", ev_wspace, "Window space archive");
  ev->add_option("--dep-space", ev_dspace, "Dependency space archive");
  ev->add_option("--dev", ev_dev,
                 "Dev set for binary threshold tuning (default: S/2)");
  auto* thr_opt = ev->add_option("--threshold", ev_threshold_val,
                                 "Fixed binary decision threshold");
  ev->add_option("--out", ev_out, "Also write the report to this file");
  ev->add_flag("--strict", ev_strict,
               "Treat input fingerprint mismatches as errors");
  ev->add_flag("--lowercase", ev_lower, "Lowercase embedding vocabulary");

  // ---- score ----
  auto* sc = app.add_subcommand("score",
                                "Score word pairs (stdin or --pairs), one "
                                "`word1 TAB word2` per line");
  std::string sc_ckpt, sc_emb, sc_wspace, sc_dspace, sc_pairs;
  bool sc_strict = false, sc_lower = false;
  sc->add_option("--checkpoint", sc_ckpt, "Model checkpoint")->required();
  sc->add_option("--embeddings", sc_emb,
                 "Embedding file (default: path recorded in checkpoint)");
  sc->add_option("--window-space", sc_wspace, "Window space archive");
  sc->add_option("--dep-space", sc_dspace, "Dependency space archive");
  sc->add_option("--pairs", sc_pairs, "Pairs file (default: stdin)");
  sc->add_flag("--strict", sc_strict,
               "Treat input fingerprint mismatches as errors");
  sc->add_flag("--lowercase", sc_lower, "Lowercase embedding vocabulary");

  CLI11_PARSE(app, argc, argv);

  try {
    if (build->parsed())
      return cmd_build_space(bs_corpus, bs_kind, bs_window, bs_min_count,
                             bs_out);

    if (tr->parsed()) {
      if (!tr_config.empty()) apply_config_file(tr, tr_config);
      rc.task = tr_task == "binary" ? sdsn::TaskKind::binary
                                    : sdsn::TaskKind::graded;
      if (tr_task != "graded" && tr_task != "binary")
        throw sdsn::Error("unknown task `" + tr_task + "`");
      rc.split_kind = tr_split == "lexical" ? sdsn::SplitKind::lexical
                                            : sdsn::SplitKind::random;
      if (tr_split != "random" && tr_split != "lexical")
        throw sdsn::Error("unknown split kind `" + tr_split + "`");
      auto parts = sdsn::split_on(tr_ratios, ',');
      if (parts.size() != 3 || !sdsn::parse_double(parts[0], rc.ratios.train) ||
          !sdsn::parse_double(parts[1], rc.ratios.dev) ||
          !sdsn::parse_double(parts[2], rc.ratios.test))
        throw sdsn::Error("bad --split-ratios `" + tr_ratios + "`");
      rc.seeds = parse_seed_spec(tr_seeds);

      auto problems = sdsn::validate_config(rc);
      if (!problems.empty()) {
        std::cerr << "error: invalid configuration:\n";
        for (const auto& p : problems) std::cerr << "  - " << p << "\n";
        return 1;
      }
      std::filesystem::create_directories(rc.out_dir);
      {
        std::ofstream cfg_out(
            (std::filesystem::path(rc.out_dir) / "config_used.ini").string(),
            std::ios::trunc);
        cfg_out << tr->config_to_str(true, false);
      }
      sdsn::ExperimentResult result = sdsn::run_experiment(rc, std::cerr);
      std::cout << result.aggregate.dump(2) << "\n";
      return 0;
    }

    if (ev->parsed()) {
      if (ev_task != "graded" && ev_task != "binary")
        throw sdsn::Error("unknown task `" + ev_task + "`");
      LoadedBundle loaded = load_bundle(ev_ckpt, ev_emb, ev_wspace, ev_dspace,
                                        ev_lower, ev_strict);
      std::optional<double> fixed;
      if (thr_opt->count() > 0) fixed = ev_threshold_val;
      return cmd_eval(loaded, ev_data, ev_task, ev_dev, fixed, ev_out);
    }

    if (sc->parsed()) {
      LoadedBundle loaded = load_bundle(sc_ckpt, sc_emb, sc_wspace, sc_dspace,
                                        sc_lower, sc_strict);
      return cmd_score(loaded, sc_pairs);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
