#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <fstream>
#include <json.hpp>

#include "test_util.hpp"

using testutil::TempDir;
using testutil::read_file;
using testutil::write_file;

namespace {

struct CmdResult {
  int exit_code;
  std::string out;
};

// Runs the built binary with stdout captured to a file; stderr is left
// alone unless the command string redirects it.
CmdResult run_cli(const TempDir& dir, const std::string& args,
                  const std::string& stdin_file = "") {
  static int counter = 0;
  std::string out_file = dir.file("cmd_out_" + std::to_string(counter++));
  std::string cmd = std::string(SDSN_CLI_PATH) + " " + args;
  if (!stdin_file.empty()) cmd += " < " + stdin_file;
  cmd += " > " + out_file + " 2>/dev/null";
  int rc = std::system(cmd.c_str());
  return {rc == -1 ? -1 : WEXITSTATUS(rc), read_file(out_file)};
}

// Shared miniature workspace: embeddings, corpora, datasets, lexicon.
void write_fixtures(const TempDir& dir) {
  std::mt19937_64 rng(4242);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::ostringstream emb, data, corpus, dep, lex, bindata;
  std::vector<std::string> words;
  for (int i = 0; i < 24; ++i) words.push_back("w" + std::to_string(i));
  for (const auto& w : words) {
    emb << w;
    for (int j = 0; j < 4; ++j) emb << " " << u(rng);
    emb << "\n";
  }
  for (int i = 0; i < 60; ++i) {
    const auto& a = words[rng() % words.size()];
    const auto& b = words[rng() % words.size()];
    data << a << "\t" << b << "\t" << (rng() % 101) / 10.0 << "\n";
    bindata << a << "\t" << b << "\t" << (rng() % 2 ? "True" : "False")
            << "\n";
  }
  for (int i = 0; i < 80; ++i) {
    for (int j = 0; j < 6; ++j) corpus << words[rng() % words.size()] << " ";
    corpus << "\n";
  }
  for (int i = 0; i < 40; ++i) {
    dep << "1\t" << words[rng() % words.size()] << "\t2\tnsubj\n"
        << "2\t" << words[rng() % words.size()] << "\t0\troot\n\n";
  }
  for (int i = 0; i < 30; ++i)
    lex << words[rng() % words.size()] << "\t" << words[rng() % words.size()]
        << "\t" << (rng() % 2 ? "pos" : "neg") << "\n";
  write_file(dir.file("emb.txt"), emb.str());
  write_file(dir.file("data.tsv"), data.str());
  write_file(dir.file("bindata.tsv"), bindata.str());
  write_file(dir.file("corpus.txt"), corpus.str());
  write_file(dir.file("dep.conll"), dep.str());
  write_file(dir.file("lex.tsv"), lex.str());
}

const char* kSmallModel =
    " --map-dim 5 --hidden-dim 3 --max-epochs 4 --patience 3 --batch-size 8";

}  // namespace

TEST_CASE("build-space writes archives train can consume", "[cli]") {
  TempDir dir;
  write_fixtures(dir);
  CmdResult wsp = run_cli(dir, "build-space --corpus " + dir.file("corpus.txt") +
                                   " --kind window --out " + dir.file("w.bin"));
  REQUIRE(wsp.exit_code == 0);
  REQUIRE(wsp.out.find("words=") != std::string::npos);
  CmdResult dsp = run_cli(dir, "build-space --corpus " + dir.file("dep.conll") +
                                   " --kind dependency --out " +
                                   dir.file("d.bin"));
  REQUIRE(dsp.exit_code == 0);

  CmdResult train = run_cli(
      dir, "train --embeddings " + dir.file("emb.txt") + " --data " +
               dir.file("data.tsv") + " --seeds 1 --sdf --window-space " +
               dir.file("w.bin") + " --dep-space " + dir.file("d.bin") +
               " --as --lexicon " + dir.file("lex.tsv") + kSmallModel +
               " --out " + dir.file("sdf_run"));
  REQUIRE(train.exit_code == 0);
  REQUIRE(std::filesystem::exists(dir.file("sdf_run/seed_1/checkpoint.bin")));
}

TEST_CASE("dependency parsing of plain text fails loudly", "[cli]") {
  TempDir dir;
  write_fixtures(dir);
  CmdResult r = run_cli(dir, "build-space --corpus " + dir.file("corpus.txt") +
                                 " --kind dependency --out " +
                                 dir.file("x.bin"));
  REQUIRE(r.exit_code != 0);
}

TEST_CASE("train produces checkpoints, logs and reports per seed", "[cli]") {
  TempDir dir;
  write_fixtures(dir);
  CmdResult r = run_cli(dir, "train --embeddings " + dir.file("emb.txt") +
                                 " --data " + dir.file("data.tsv") +
                                 " --seeds 1,2" + kSmallModel + " --out " +
                                 dir.file("run"));
  REQUIRE(r.exit_code == 0);
  auto agg = nlohmann::json::parse(r.out);
  REQUIRE(agg["task"] == "graded");
  REQUIRE(agg["n_seeds"] == 2);
  REQUIRE(agg.contains("mean"));
  REQUIRE(agg.contains("std"));
  REQUIRE(agg["per_seed"].size() == 2);
  for (const char* f :
       {"seed_1/checkpoint.bin", "seed_1/train.log", "seed_1/report.json",
        "seed_2/checkpoint.bin", "report.json", "config_used.ini"})
    REQUIRE(std::filesystem::exists(dir.file(std::string("run/") + f)));
  // log lines are epoch records plus the trailing best-epoch summary
  std::string log = read_file(dir.file("run/seed_1/train.log"));
  REQUIRE(log.find("epoch=1 train_mse=") != std::string::npos);
  REQUIRE(log.find("dev_rho=") != std::string::npos);
}

TEST_CASE("sdf without spaces is a validation error listing problems",
          "[cli]") {
  TempDir dir;
  write_fixtures(dir);
  std::string err_file = dir.file("err.txt");
  std::string cmd = std::string(SDSN_CLI_PATH) + " train --embeddings " +
                    dir.file("emb.txt") + " --data " + dir.file("data.tsv") +
                    " --seeds 1 --sdf 2> " + err_file + " >/dev/null";
  int rc = std::system(cmd.c_str());
  REQUIRE(WEXITSTATUS(rc) != 0);
  std::string err = read_file(err_file);
  REQUIRE(err.find("window space") != std::string::npos);
  REQUIRE(err.find("dependency space") != std::string::npos);
}

TEST_CASE("eval reports rho for graded and P/R/F1 for binary", "[cli]") {
  TempDir dir;
  write_fixtures(dir);
  REQUIRE(run_cli(dir, "train --embeddings " + dir.file("emb.txt") +
                           " --data " + dir.file("data.tsv") + " --seeds 1" +
                           kSmallModel + " --out " + dir.file("run"))
              .exit_code == 0);
  const std::string ckpt = dir.file("run/seed_1/checkpoint.bin");

  CmdResult graded = run_cli(dir, "eval --checkpoint " + ckpt + " --data " +
                                      dir.file("data.tsv") +
                                      " --task graded --out " +
                                      dir.file("report_out.json"));
  REQUIRE(graded.exit_code == 0);
  auto jg = nlohmann::json::parse(graded.out);
  REQUIRE(jg.contains("rho"));
  REQUIRE(jg["n_scored"] == 60);
  REQUIRE(std::filesystem::exists(dir.file("report_out.json")));

  CmdResult binary = run_cli(dir, "eval --checkpoint " + ckpt + " --data " +
                                      dir.file("bindata.tsv") +
                                      " --task binary");
  REQUIRE(binary.exit_code == 0);
  auto jb = nlohmann::json::parse(binary.out);
  for (const char* k : {"precision", "recall", "f1", "threshold"})
    REQUIRE(jb.contains(k));
  REQUIRE(jb["threshold"] == 5.0);  // S/2 default without a dev set

  CmdResult missing = run_cli(dir, "eval --checkpoint " + dir.file("no.bin") +
                                       " --data " + dir.file("data.tsv"));
  REQUIRE(missing.exit_code != 0);
}

TEST_CASE("score emits TSV with NA rows for OOV pairs", "[cli]") {
  TempDir dir;
  write_fixtures(dir);
  REQUIRE(run_cli(dir, "train --embeddings " + dir.file("emb.txt") +
                           " --data " + dir.file("data.tsv") + " --seeds 1" +
                           kSmallModel + " --out " + dir.file("run"))
              .exit_code == 0);
  write_file(dir.file("pairs.tsv"), "w1\tw2\nw3\tunseen\n");
  CmdResult r = run_cli(dir,
                        "score --checkpoint " +
                            dir.file("run/seed_1/checkpoint.bin") + " --pairs " +
                            dir.file("pairs.tsv"));
  REQUIRE(r.exit_code == 0);
  auto lines = sdsn::split_on(r.out, '\n');
  REQUIRE(lines[0].substr(0, 6) == "w1\tw2\t");
  double score = std::stod(lines[0].substr(6));
  REQUIRE(score > 0.0);
  REQUIRE(score < 10.0);
  REQUIRE(lines[1] == "w3\tunseen\tNA\toov");

  write_file(dir.file("empty.txt"), "");
  CmdResult empty = run_cli(dir,
                            "score --checkpoint " +
                                dir.file("run/seed_1/checkpoint.bin"),
                            dir.file("empty.txt"));
  REQUIRE(empty.exit_code == 0);
  REQUIRE(empty.out.empty());
}

TEST_CASE("config file keys are overridden by flags", "[cli]") {
  TempDir dir;
  write_fixtures(dir);
  write_file(dir.file("run.ini"),
             "embeddings = " + dir.file("emb.txt") + "\n" +
                 "data = " + dir.file("data.tsv") + "\n" +
                 "# comment line\n"
                 "seeds = 4\n"
                 "batch-size = 16\n"
                 "map-dim = 5\nhidden-dim = 3\nmax-epochs = 3\npatience = 2\n" +
                 "out = " + dir.file("cfg_run") + "\n");
  CmdResult r = run_cli(dir, "train --config " + dir.file("run.ini") +
                                 " --batch-size 2");
  REQUIRE(r.exit_code == 0);
  std::string used = read_file(dir.file("cfg_run/config_used.ini"));
  REQUIRE(used.find("batch-size=2") != std::string::npos);  // flag wins
  REQUIRE(used.find("seeds=4") != std::string::npos);       // config applies
  auto agg = nlohmann::json::parse(r.out);
  REQUIRE(agg["per_seed"][0]["seed"] == 4);

  CmdResult bad = run_cli(dir, "train --config " + dir.file("missing.ini"));
  REQUIRE(bad.exit_code != 0);
  write_file(dir.file("badkey.ini"), "no-such-key = 1\n");
  CmdResult badkey = run_cli(dir, "train --config " + dir.file("badkey.ini"));
  REQUIRE(badkey.exit_code != 0);
}

TEST_CASE("reruns with one config are byte-identical", "[cli]") {
  TempDir dir;
  write_fixtures(dir);
  const std::string base = "train --embeddings " + dir.file("emb.txt") +
                           " --data " + dir.file("data.tsv") +
                           " --seeds 2 --split lexical" + kSmallModel;
  CmdResult a = run_cli(dir, base + " --out " + dir.file("run_a"));
  CmdResult b = run_cli(dir, base + " --out " + dir.file("run_b"));
  REQUIRE(a.exit_code == 0);
  REQUIRE(b.exit_code == 0);
  REQUIRE(a.out == b.out);
  for (const char* f : {"seed_2/checkpoint.bin", "seed_2/train.log",
                        "seed_2/report.json", "report.json"})
    REQUIRE(read_file(dir.file(std::string("run_a/") + f)) ==
            read_file(dir.file(std::string("run_b/") + f)));
}

TEST_CASE("fingerprint drift warns by default and errors under --strict",
          "[cli]") {
  TempDir dir;
  write_fixtures(dir);
  REQUIRE(run_cli(dir, "train --embeddings " + dir.file("emb.txt") +
                           " --data " + dir.file("data.tsv") + " --seeds 1" +
                           kSmallModel + " --out " + dir.file("run"))
              .exit_code == 0);
  // change the embedding file contents (same shape, new values)
  std::string emb = read_file(dir.file("emb.txt"));
  emb.replace(emb.find("0."), 2, "1.");
  write_file(dir.file("emb.txt"), emb);

  const std::string ckpt = dir.file("run/seed_1/checkpoint.bin");
  CmdResult warn = run_cli(dir, "eval --checkpoint " + ckpt + " --data " +
                                    dir.file("data.tsv"));
  REQUIRE(warn.exit_code == 0);
  CmdResult strict = run_cli(dir, "eval --checkpoint " + ckpt + " --data " +
                                      dir.file("data.tsv") + " --strict");
  REQUIRE(strict.exit_code != 0);
}
