#include <doctest.h>

#include "oracles.hpp"
#include "vrank/error.hpp"
#include "vrank/cot.hpp"

using namespace vrank;

namespace {

ScoredCluster ok_cluster(std::vector<int> members, std::vector<std::string> records, int score) {
  return {{std::move(members), {TraceStatus::ok, std::move(records)}, false}, Score(score)};
}

// Three clusters that all differ on case 1.
std::vector<ScoredCluster> three_way() {
  return {ok_cluster({0, 1, 2}, {"VRANK 0 a=0 y=0", "VRANK 1 a=1 y=1"}, 3),
          ok_cluster({3, 4}, {"VRANK 0 a=0 y=0", "VRANK 1 a=1 y=2"}, 2),
          ok_cluster({5}, {"VRANK 0 a=0 y=0", "VRANK 1 a=1 y=3"}, 1)};
}

// Returns `backing` predictions of y=value and the rest of y=f.
PredictionSource fixed(int backing, std::string value) {
  return [=](int, int x) {
    std::vector<ReferencePrediction> out;
    for (int i = 0; i < x; ++i)
      out.push_back({i, std::map<std::string, std::string>{{"y", i < backing ? value : "f"}}, "", ""});
    return out;
  };
}

CotParams params(int x, int th, int depth) {
  CotParams p;
  p.x = x;
  p.th = th;
  p.depth = depth;
  return p;
}

}  // namespace

TEST_CASE("required matches equal the ceiling of th% of x") {
  for (int x = 1; x <= 20; ++x) {
    for (int th = 1; th <= 100; ++th) {
      const int r = required_matches(x, th);
      // smallest count with count / x >= th / 100
      int expected = 0;
      while (expected * 100 < th * x) ++expected;
      REQUIRE(r == expected);
      int strictly = 0;
      while (strictly * 100 <= th * x) ++strictly;
      REQUIRE(required_matches(x, th, true) == strictly);
    }
  }
  CHECK(required_matches(5, 80) == 4);
  CHECK(required_matches(5, 100) == 5);
  CHECK(required_matches(3, 50) == 2);
}

TEST_CASE("prediction matching uses every printed output") {
  const std::vector<std::string> outs = {"y", "z"};
  CHECK(prediction_matches({{"y", "0x1F"}, {"z", "0"}}, "VRANK 0 a=3 y=1f z=0", outs));
  CHECK_FALSE(prediction_matches({{"y", "1f"}}, "VRANK 0 a=3 y=1f z=0", outs));
  CHECK_FALSE(prediction_matches({{"y", "1e"}, {"z", "0"}}, "VRANK 0 a=3 y=1f z=0", outs));
  CHECK(prediction_matches({{"y", "5'b11111"}, {"extra", "9"}}, "VRANK 0 y=1f", outs));
  CHECK_FALSE(prediction_matches({{"a", "3"}}, "VRANK 0 a=3", outs));
}

TEST_CASE("distinguishing case is the first differing record") {
  const auto c = three_way();
  CHECK(find_distinguishing_case(c[0].cluster, c[1].cluster) == 1);
  CHECK_THROWS_AS(find_distinguishing_case(c[0].cluster, c[0].cluster), Error);
  Cluster failed{{9}, failed_trace(TraceStatus::timeout), true};
  CHECK_THROWS_AS(find_distinguishing_case(c[0].cluster, failed), Error);
}

TEST_CASE("depth 1 never consults the predictor") {
  bool called = false;
  const auto r = resolve(three_way(), {"y"}, params(5, 80, 1), [&](int, int) {
    called = true;
    return std::vector<ReferencePrediction>{};
  });
  CHECK_FALSE(called);
  CHECK(r.order == std::vector<int>{0, 1, 2});
  CHECK(r.decisions.empty());
}

TEST_CASE("swap happens exactly at the threshold") {
  const auto kept = resolve(three_way(), {"y"}, params(5, 80, 2), fixed(3, "2"));
  CHECK(kept.order == std::vector<int>{0, 1, 2});
  REQUIRE(kept.decisions.size() == 1);
  CHECK(kept.decisions[0].case_index == 1);
  CHECK(kept.decisions[0].match_count == 3);
  CHECK(kept.decisions[0].required == 4);
  CHECK_FALSE(kept.decisions[0].swap);

  const auto swapped = resolve(three_way(), {"y"}, params(5, 80, 2), fixed(4, "2"));
  CHECK(swapped.order == std::vector<int>{1, 0, 2});
  CHECK(swapped.decisions[0].swap);
}

TEST_CASE("cascade compares the current top with each deeper cluster") {
  // every prediction says y=3: cluster 2 wins its comparison, cluster 1 does not
  const auto r = resolve(three_way(), {"y"}, params(3, 100, 3), fixed(3, "3"));
  REQUIRE(r.decisions.size() == 2);
  CHECK_FALSE(r.decisions[0].swap);
  CHECK(r.decisions[1].incumbent == 0);
  CHECK(r.decisions[1].challenger == 2);
  CHECK(r.decisions[1].swap);
  CHECK(r.order == std::vector<int>{2, 1, 0});

  // y=2 everywhere: cluster 1 takes the top, then defends it against cluster 2
  const auto r2 = resolve(three_way(), {"y"}, params(3, 100, 3), fixed(3, "2"));
  CHECK(r2.order == std::vector<int>{1, 0, 2});
  CHECK(r2.decisions[1].incumbent == 1);
}

TEST_CASE("failed or indistinguishable challengers are skipped with a note") {
  auto c = three_way();
  c[1] = {{{3}, failed_trace(TraceStatus::compile_error), true}, Score(0)};
  const auto r = resolve(c, {"y"}, params(2, 50, 2), fixed(2, "2"));
  CHECK(r.order == std::vector<int>{0, 1, 2});
  REQUIRE(r.decisions.size() == 1);
  CHECK_FALSE(r.decisions[0].case_index);
  CHECK(r.decisions[0].note.find("skipped") == 0);
}

TEST_CASE("predictor failures count as no support") {
  const auto r = resolve(three_way(), {"y"}, params(2, 50, 2), [](int, int) -> std::vector<ReferencePrediction> {
    throw Error(Errc::provider_unreachable, "down");
  });
  CHECK(r.order == std::vector<int>{0, 1, 2});
  CHECK(r.decisions[0].match_count == 0);
  CHECK(r.decisions[0].note.find("down") != std::string::npos);
}

TEST_CASE("invalid arbitration parameters are rejected") {
  CHECK_THROWS_AS(resolve(three_way(), {"y"}, params(0, 80, 2), fixed(0, "0")), Error);
  CHECK_THROWS_AS(resolve(three_way(), {"y"}, params(5, 0, 2), fixed(0, "0")), Error);
  CHECK_THROWS_AS(resolve(three_way(), {"y"}, params(5, 101, 2), fixed(0, "0")), Error);
  CHECK_THROWS_AS(resolve(three_way(), {"y"}, params(5, 80, 0), fixed(0, "0")), Error);
}

TEST_CASE("property: raising th never creates a swap") {
  testing::Rng rng(99);
  for (int iter = 0; iter < 400; ++iter) {
    const int x = testing::uniform(rng, 1, 8);
    const int backing = testing::uniform(rng, 0, x);
    const int lo = testing::uniform(rng, 1, 100);
    const int hi = testing::uniform(rng, lo, 100);
    const bool swap_hi = resolve(three_way(), {"y"}, params(x, hi, 2), fixed(backing, "2")).decisions[0].swap;
    const bool swap_lo = resolve(three_way(), {"y"}, params(x, lo, 2), fixed(backing, "2")).decisions[0].swap;
    REQUIRE((!swap_hi || swap_lo));
  }
}

TEST_CASE("property: arbitration permutes positions and never touches clusters") {
  testing::Rng rng(100);
  for (int iter = 0; iter < 200; ++iter) {
    const auto ranked = three_way();
    const int depth = testing::uniform(rng, 1, 5);
    const auto r = resolve(ranked, {"y"}, params(3, 60, depth), fixed(testing::uniform(rng, 0, 3), std::to_string(testing::uniform(rng, 1, 3))));
    auto sorted = r.order;
    std::sort(sorted.begin(), sorted.end());
    REQUIRE(sorted == std::vector<int>{0, 1, 2});
    REQUIRE(static_cast<int>(r.decisions.size()) == std::min(depth, 3) - 1);
    REQUIRE(ranked == three_way());
  }
}
