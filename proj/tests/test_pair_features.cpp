#include <catch_amalgamated.hpp>

#include <random>

#include "sdsn/pair_features.hpp"
#include "test_util.hpp"

using namespace sdsn;
using Catch::Matchers::WithinAbs;

namespace {

// Two small spaces with hand-checkable PPMI weights.
//
// Window-kind fixture (N=26, word totals p=6 q=10 r=10, context totals
// c1=7 c2=5 c3=2 c4=2 c5=10):
//   p: c1->4, c2->2            ppmi: c1 log(104/42), c2 log(52/30)
//   q: c1->3, c2->3, c3->2, c4->2
//                              ppmi: c1 log(78/70), c2 log(78/50),
//                                    c3 log(2.6), c4 log(2.6)
//   r: c5->10
SparseSpace window_fixture() {
  return space_from_counts(SparseSpace::Kind::window,
                           {{"p", "c1", 4},
                            {"p", "c2", 2},
                            {"q", "c1", 3},
                            {"q", "c2", 3},
                            {"q", "c3", 2},
                            {"q", "c4", 2},
                            {"r", "c5", 10}});
}

// Dependency-kind fixture (N=16): PPMI drops p/d1 and s/d3 (negative PMI),
// so context sets are strict supersets of the vector supports.
SparseSpace dependency_fixture() {
  return space_from_counts(SparseSpace::Kind::dependency,
                           {{"p", "d1", 1},
                            {"p", "d2", 2},
                            {"p", "d3", 3},
                            {"q", "d1", 2},
                            {"q", "d2", 2},
                            {"s", "d3", 1},
                            {"s", "d4", 5}});
}

SparseSpace random_space(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> nwords(2, 6), nctx(2, 8), count(1, 6);
  std::vector<std::tuple<std::string, std::string, double>> counts;
  int W = nwords(rng), C = nctx(rng);
  for (int w = 0; w < W; ++w)
    for (int c = 0; c < C; ++c)
      if (rng() % 3 != 0)
        counts.emplace_back("w" + std::to_string(w), "c" + std::to_string(c),
                            double(count(rng)));
  if (counts.empty()) counts.emplace_back("w0", "c0", 2.0);
  return space_from_counts(SparseSpace::Kind::window, counts);
}

}  // namespace

TEST_CASE("identical words give cosine and proportions of one",
          "[features]") {
  SparseSpace w = window_fixture();
  SparseSpace d = dependency_fixture();
  PairFeatures f = pair_features(w, d, "p", "p");
  REQUIRE_THAT(f.x[0], WithinAbs(1.0, 1e-12));
  REQUIRE_THAT(f.x[1], WithinAbs(1.0, 1e-12));
  REQUIRE_THAT(f.x[2], WithinAbs(1.0, 1e-12));
  REQUIRE(f.x[3] == 1.0);
  REQUIRE(f.x[4] == 1.0);
}

TEST_CASE("disjoint context sets give all-zero features", "[features]") {
  SparseSpace w = window_fixture();
  SparseSpace d = dependency_fixture();
  // p and r share nothing in the window fixture; p and s share only d3,
  // which PPMI zeroed for s, so cosines vanish but proportions do not.
  PairFeatures f = pair_features(w, d, "p", "r");
  for (int i = 0; i < 5; ++i) REQUIRE(f.x[i] == 0.0);
}

TEST_CASE("missing word zeroes all five of that space's features",
          "[features]") {
  SparseSpace w = window_fixture();
  SparseSpace d = dependency_fixture();
  PairFeatures f = pair_features(w, d, "p", "s");  // s only in dependency
  for (int i = 0; i < 5; ++i) REQUIRE(f.x[i] == 0.0);
  REQUIRE(f.x[8] > 0.0);  // shared d3 via context sets
}

TEST_CASE("features match hand-computed values on the fixture",
          "[features]") {
  // Frozen from a spreadsheet-style recomputation of the documented
  // formulas on the two fixtures above.
  SparseSpace w = window_fixture();
  SparseSpace d = dependency_fixture();
  PairFeatures f = pair_features(w, d, "p", "q");
  const double expected[10] = {
      0.22651009397943225,   // window cosine
      0.18854907766072287,   // window weighted cosine p->q
      0.67182172306151011,   // window weighted cosine q->p
      1.0,                   // |Cp ^ Cq| / |Cp| = 2/2
      0.5,                   // |Cp ^ Cq| / |Cq| = 2/4
      0.22123141034895269,   // dependency cosine
      0.44700523909825152,   // dependency weighted cosine p->q
      0.28159946304328265,   // dependency weighted cosine q->p
      2.0 / 3.0,             // |Cp ^ Cq| / |Cp| (d1 counted, weightless)
      1.0,                   // |Cp ^ Cq| / |Cq|
  };
  for (int i = 0; i < 10; ++i) REQUIRE_THAT(f.x[i], WithinAbs(expected[i], 1e-12));
}

TEST_CASE("swapping the pair swaps the directional features", "[features]") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 40; ++trial) {
    SparseSpace w = random_space(rng);
    SparseSpace d = random_space(rng);
    std::string a = "w0", b = "w" + std::to_string(rng() % 4);
    PairFeatures fab = pair_features(w, d, a, b);
    PairFeatures fba = pair_features(w, d, b, a);
    for (int base : {0, 5}) {
      REQUIRE(fab.x[base + 0] == fba.x[base + 0]);  // cosine symmetric
      REQUIRE(fab.x[base + 1] == fba.x[base + 2]);
      REQUIRE(fab.x[base + 2] == fba.x[base + 1]);
      REQUIRE(fab.x[base + 3] == fba.x[base + 4]);
      REQUIRE(fab.x[base + 4] == fba.x[base + 3]);
    }
  }
}

TEST_CASE("all ten features stay inside the unit interval", "[features]") {
  std::mt19937_64 rng(123);
  for (int trial = 0; trial < 60; ++trial) {
    SparseSpace w = random_space(rng);
    SparseSpace d = random_space(rng);
    std::string a = "w" + std::to_string(rng() % 6);
    std::string b = "w" + std::to_string(rng() % 6);
    PairFeatures f = pair_features(w, d, a, b);
    for (double v : f.x) {
      REQUIRE(v >= 0.0);
      REQUIRE(v <= 1.0 + 1e-12);
    }
  }
}
