#include <catch2/catch_amalgamated.hpp>

#include "fixtures.hpp"
#include "musecsp/muse_graph.hpp"
#include "musecsp/random.hpp"

using namespace musecsp;

namespace {

std::vector<Segment> segs(std::initializer_list<std::vector<NodeId>> sets) {
  std::vector<Segment> out;
  for (auto s : sets) {
    std::sort(s.begin(), s.end());
    out.push_back({s});
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("chain: one segment, complete pair set", "[graph]") {
  auto m = build_chain(CspInstance(3, 2));
  CHECK(enumerate_segments(m) == segs({{0, 1, 2}}));
  CHECK(m.csp().arcs().size() == 6);
  CHECK(m.csp().is_complete());
  CHECK(m.prev_edge(0) == std::vector<NodeId>{kStart});
  CHECK(m.next_edge(2) == std::vector<NodeId>{kEnd});
  CHECK(m.next_edge(0) == std::vector<NodeId>{1});
}

TEST_CASE("shortcut DAG has two segments and shares every pair", "[graph]") {
  auto m = fixtures::Shortcut::make();
  CHECK(enumerate_segments(m) == segs({{0, 1, 2}, {0, 2}}));
  CHECK(m.share_segment(1, 2));
  CHECK(m.share_segment(0, 1));
  CHECK(m.prev_edge(2) == std::vector<NodeId>{0, 1});
}

TEST_CASE("parallel nodes never share a segment", "[graph]") {
  // start -> {A, B} -> end
  auto m = build_muse(CspInstance(2, 1), {}, {0, 1}, {0, 1});
  CHECK_FALSE(m.share_segment(0, 1));
  CHECK(enumerate_segments(m) == segs({{0}, {1}}));
}

TEST_CASE("maximal sharing of {1,2} and {2,3} creates spurious segments", "[graph]") {
  // 1 -> 2 -> 3 with start at 1 and 2, end at 2 and 3.
  auto m = build_muse(CspInstance(3, 1), {{0, 1}, {1, 2}}, {0, 1}, {1, 2});
  auto all = enumerate_segments(m);
  CHECK(std::find(all.begin(), all.end(), Segment{{0, 1, 2}}) != all.end());
  CHECK(std::find(all.begin(), all.end(), Segment{{1}}) != all.end());
}

TEST_CASE("build_muse rejects malformed graphs", "[graph][error]") {
  CHECK_THROWS_AS(build_muse(CspInstance(2, 1), {{0, 1}, {1, 0}}, {0}, {1}), GraphError);
  // node 2 is not reachable from start
  CHECK_THROWS_AS(build_muse(CspInstance(3, 1), {{0, 1}, {2, 1}}, {0}, {1}), GraphError);
  // node 1 cannot reach end
  CHECK_THROWS_AS(build_muse(CspInstance(3, 1), {{0, 1}, {0, 2}}, {0}, {2}), GraphError);
  CHECK_THROWS_AS(build_muse(CspInstance(2, 1), {{0, 5}}, {0}, {1}), GraphError);
  CHECK_THROWS_AS(build_muse(CspInstance(2, 1), {{0, 1}}, {}, {1}), GraphError);
}

TEST_CASE("pair set equals co-membership in enumerated segments", "[graph][property]") {
  Rng rng(4242);
  for (int trial = 0; trial < 400; ++trial) {
    const int n = uniform_int(rng, 1, 8);
    auto dag = random_dag(rng, n, std::uniform_real_distribution<double>(0.1, 0.7)(rng));
    auto m = build_muse(CspInstance(n, 1), dag.edges, dag.starts, dag.ends);
    auto all = enumerate_segments(m);
    for (NodeId i = 0; i < n; ++i) {
      for (NodeId j = 0; j < n; ++j) {
        bool together = false;
        for (const auto& s : all) together = together || (i != j && s.contains(i) && s.contains(j));
        REQUIRE(m.share_segment(i, j) == together);
        REQUIRE(m.share_segment(i, j) == m.share_segment(j, i));
      }
    }
    for (const auto& s : all) REQUIRE(m.is_segment(s));
  }
}

TEST_CASE("is_segment recognizes paths only", "[graph]") {
  auto m = fixtures::Shortcut::make();
  CHECK(m.is_segment({{0, 2}}));
  CHECK(m.is_segment({{0, 1, 2}}));
  CHECK_FALSE(m.is_segment({{0, 1}}));
  CHECK_FALSE(m.is_segment({{}}));
  CHECK_FALSE(m.is_segment({{7}}));
}
