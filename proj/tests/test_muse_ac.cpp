#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <sstream>

#include "fixtures.hpp"
#include "musecsp/muse_ac.hpp"
#include "musecsp/random.hpp"

using namespace musecsp;

namespace {

using Members = std::vector<NodeId>;

Members sorted(Members v) {
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

TEST_CASE("initial support sets on the shortcut DAG", "[muse_ac][init]") {
  using F = fixtures::Shortcut;
  auto m = F::make();
  auto st = initialize_support(m, {});
  // Members are the far node x of (i,x); (i,j) itself encodes the direct edge.
  CHECK(sorted(st.prev_support(F::n1, F::n2, F::a)) == Members{F::n2});
  CHECK(sorted(st.next_support(F::n1, F::n2, F::a)) == Members{F::n3});
  CHECK(sorted(st.prev_support(F::n1, F::n3, F::a)) == Members{F::n2, F::n3});
  CHECK(sorted(st.next_support(F::n1, F::n3, F::a)) == Members{kEnd});
  CHECK(sorted(st.prev_support(F::n1, F::n2, F::b)) == Members{F::n2});
  CHECK(sorted(st.next_support(F::n1, F::n2, F::b)) == Members{F::n3});
  CHECK(sorted(st.prev_support(F::n1, F::n3, F::b)) == Members{F::n2, F::n3});
  CHECK(sorted(st.next_support(F::n1, F::n3, F::b)) == Members{kEnd});
  CHECK(sorted(st.prev_support(F::n2, F::n1, F::c)) == Members{kStart});
  CHECK(sorted(st.next_support(F::n2, F::n1, F::c)) == Members{F::n1, F::n3});
  CHECK(sorted(st.prev_support(F::n2, F::n3, F::c)) == Members{F::n1, F::n3});
  CHECK(sorted(st.next_support(F::n2, F::n3, F::c)) == Members{kEnd});
  CHECK(sorted(st.prev_support(F::n3, F::n1, F::d)) == Members{kStart});
  CHECK(sorted(st.next_support(F::n3, F::n1, F::d)) == Members{F::n1, F::n2});
  CHECK(sorted(st.prev_support(F::n3, F::n2, F::d)) == Members{F::n1});
  CHECK(sorted(st.next_support(F::n3, F::n2, F::d)) == Members{F::n2});

  CHECK(st.local_prev(F::n1, F::a) == Members{kStart});
  CHECK(sorted(st.local_next(F::n1, F::a)) == Members{F::n2, F::n3});
  CHECK(st.local_prev(F::n1, F::b) == Members{kStart});
  CHECK(sorted(st.local_next(F::n1, F::b)) == Members{F::n2, F::n3});
  CHECK(st.local_prev(F::n2, F::c) == Members{F::n1});
  CHECK(st.local_next(F::n2, F::c) == Members{F::n3});
  CHECK(sorted(st.local_prev(F::n3, F::d)) == Members{F::n1, F::n2});
  CHECK(st.local_next(F::n3, F::d) == Members{kEnd});

  CHECK(st.counter(F::n1, F::n3, F::a) == 1);
  CHECK(st.counter(F::n3, F::n1, F::d) == 2);
  CHECK(st.queue_empty());
}

TEST_CASE("losing the arc shared by every segment eliminates the label", "[muse_ac][trace]") {
  using F = fixtures::Shortcut;
  auto m = F::make();
  std::ostringstream trace;
  auto st = initialize_support(m, {QueueOrder::fifo, &trace});
  std::array seeds{ArcLabel{F::n1, F::n3, F::a}};
  propagate_from(m, st, seeds);

  CHECK_FALSE(m.csp().domain(F::n1).contains(F::a));
  CHECK(m.csp().domain(F::n1).contains(F::b));
  CHECK(st.local_next(F::n1, F::a).empty());
  CHECK(st.next_support(F::n1, F::n2, F::a).empty());
  CHECK(st.local_prev(F::n1, F::a) == Members{kStart});
  CHECK(trace.str() == "POP (0,2) 0\nPOP (0,1) 0\nDEL 0 0\n");
}

TEST_CASE("losing an arc of one segment keeps the label alive", "[muse_ac][trace]") {
  using F = fixtures::Shortcut;
  auto m = F::make();
  auto st = initialize_support(m, {});
  std::array seeds{ArcLabel{F::n1, F::n2, F::a}};
  propagate_from(m, st, seeds);

  CHECK(m.csp().domain(F::n1).contains(F::a));
  CHECK(st.prev_support(F::n1, F::n3, F::a) == Members{F::n3});
  CHECK(st.local_next(F::n1, F::a) == Members{F::n3});
}

TEST_CASE("propagate_from: empty seeds are a no-op, bad seeds throw", "[muse_ac]") {
  using F = fixtures::Shortcut;
  auto m = F::make();
  auto st = initialize_support(m, {});
  auto before = m.csp();
  propagate_from(m, st, {});
  CHECK(m.csp() == before);
  CHECK(st.stats().pops == 0);

  std::array bad_pair{ArcLabel{F::n1, F::n1, F::a}};
  CHECK_THROWS_AS(propagate_from(m, st, bad_pair), Error);
  std::array bad_label{ArcLabel{F::n1, F::n2, 42}};
  CHECK_THROWS_AS(propagate_from(m, st, bad_label), Error);
}

TEST_CASE("a label unsupported on every branch goes, and takes its partner", "[muse_ac]") {
  using F = fixtures::DeadBranches;
  auto [out, st] = muse_ac1(F::make());
  CHECK(out.csp().domain(F::n2).labels() == std::vector<LabelId>{F::d});
  CHECK(out.csp().domain(F::n1).labels() == std::vector<LabelId>{F::b});
  CHECK(same_domains(out.csp(), oracle_muse_arc_fixpoint(F::make()).csp()));
}

TEST_CASE("support from different segments is enough for MUSE arc consistency", "[muse_ac]") {
  using F = fixtures::CrossedBranches;
  auto in = F::make();
  auto [out, st] = muse_ac1(in);
  CHECK(same_domains(out.csp(), in.csp()));
  CHECK(same_domains(oracle_muse_arc_fixpoint(in).csp(), in.csp()));
}

TEST_CASE("single segment: MUSE AC-1 equals AC-4", "[muse_ac][chain]") {
  Rng rng(31337);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = uniform_int(rng, 1, 7);
    const int l = uniform_int(rng, 1, 4);
    CspInstance csp = random_csp(rng, n, l, 1.0, std::uniform_real_distribution<double>(0.1, 0.9)(rng));
    auto chain = build_chain(csp);
    auto [out, st] = muse_ac1(chain);
    INFO("trial " << trial);
    REQUIRE(same_domains(out.csp(), ac4(chain.csp())));
  }
}

namespace {

bool subset_domains(const CspInstance& small, const CspInstance& big) {
  for (NodeId i = 0; i < small.num_nodes(); ++i) {
    for (LabelId a : small.domain(i).labels()) {
      if (!big.domain(i).contains(a)) return false;
    }
  }
  return true;
}

}  // namespace

// The label-level fixpoint keeps b in L_j as support for i even after
// [(j,i),b] has been popped; MUSE AC-1 does not. So the algorithm sits between
// the segment-relative fixpoint and the label-level one, and usually equals the
// latter.
TEST_CASE("MUSE AC-1 lies between the two enumeration fixpoints", "[muse_ac][oracle]") {
  Rng rng(8086);
  const std::array ps{0.2, 0.5, 0.8};
  int changed = 0;
  int equal_label_level = 0;
  const int trials = 600;
  for (int trial = 0; trial < trials; ++trial) {
    const double p = ps[trial % 3];
    auto m = random_muse(rng, uniform_int(rng, 1, 6), uniform_int(rng, 1, 4), 4, p);
    auto fast = muse_ac1(m);
    auto label_level = oracle_muse_arc_fixpoint(m);
    auto segment_level = oracle_segment_support_fixpoint(m);
    INFO("trial " << trial);
    REQUIRE(subset_domains(fast.instance.csp(), label_level.csp()));
    REQUIRE(subset_domains(segment_level.csp(), fast.instance.csp()));
    if (same_domains(fast.instance.csp(), label_level.csp())) ++equal_label_level;
    if (!same_domains(m.csp(), label_level.csp())) ++changed;
  }
  CHECK(changed > 50);
  CHECK(equal_label_level >= trials * 9 / 10);
}

TEST_CASE("pair-level pruning: a support withdrawn for one pair stays withdrawn", "[muse_ac]") {
  // 3 -> 1 -> 4 and 3 -> 2. Label 2 at node 3 has no partner at 4, so it is
  // dead in the only segment that contains 1; 1's label 1 relied on it.
  CspInstance csp(5, 3);
  auto only = [&](NodeId i, std::vector<LabelId> keep) {
    for (LabelId a = 0; a < 3; ++a) {
      if (std::find(keep.begin(), keep.end(), a) == keep.end()) csp.domain(i).erase(a);
    }
  };
  only(2, {0, 2});
  only(4, {1, 2});
  auto m = build_muse(csp, {{1, 4}, {3, 1}, {3, 2}}, {0, 3}, {0, 2, 4});
  auto& c = m.csp();
  for (auto [i, a, j, b] : std::vector<std::array<int, 4>>{
           {1, 0, 3, 2}, {1, 1, 3, 0}, {1, 1, 3, 1}, {1, 0, 4, 1}, {1, 1, 4, 2}, {2, 0, 3, 0}, {2, 0, 3, 1},
           {2, 0, 3, 2}, {2, 2, 3, 1}, {3, 0, 4, 1}, {3, 0, 4, 2}, {3, 1, 4, 2}, {3, 2, 4, 1}, {3, 2, 4, 2}}) {
    c.set_r2(i, a, j, b, false);
  }
  auto [out, st] = muse_ac1(m);
  CHECK_FALSE(out.csp().domain(1).contains(1));
  CHECK(oracle_muse_arc_fixpoint(m).csp().domain(1).contains(1));
  CHECK_FALSE(oracle_segment_support_fixpoint(m).csp().domain(1).contains(1));
  CHECK(same_domains(out.csp(), oracle_segment_support_fixpoint(m).csp()));
}

TEST_CASE("a start node with a predecessor does not pin support for later nodes", "[muse_ac]") {
  // 1 -> 0 -> 2 with starts {0, 1}. Segments that begin at 0 never contain 1.
  CspInstance csp(3, 2);
  auto m = build_muse(csp, {{1, 0}, {0, 2}}, {0, 1}, {2});
  auto st = initialize_support(m, {});
  CHECK(st.prev_support(1, 0, 0) == Members{0});
  CHECK(sorted(st.prev_support(2, 0, 0)) == Members{kStart, 1});
}

TEST_CASE("MUSE AC-1 properties", "[muse_ac][property]") {
  Rng rng(55);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = uniform_int(rng, 2, 7);
    auto m = random_muse(rng, n, uniform_int(rng, 1, 4), 6, 0.5);
    auto fifo = muse_ac1(m, {QueueOrder::fifo});
    auto lifo = muse_ac1(m, {QueueOrder::lifo});
    REQUIRE(same_domains(fifo.instance.csp(), lifo.instance.csp()));
    // idempotent
    auto again = muse_ac1(fifo.instance);
    REQUIRE(same_domains(again.instance.csp(), fifo.instance.csp()));
    // never stricter than per-segment arc consistency
    for (const auto& seg : enumerate_segments(m)) {
      CspInstance sub = m.csp();
      sub.clear_arcs();
      for (NodeId i : seg.nodes) {
        for (NodeId j : seg.nodes) {
          if (i < j) sub.set_arc(i, j, true);
        }
      }
      for (NodeId i = 0; i < n; ++i) {
        if (!seg.contains(i)) sub.domain(i).clear();
      }
      auto seg_ac = ac4(sub);
      for (NodeId i : seg.nodes) {
        for (LabelId a : seg_ac.domain(i).labels()) REQUIRE(fifo.instance.csp().domain(i).contains(a));
      }
    }
    // fixpoint support invariant
    const auto& out = fifo.instance.csp();
    const auto& st = fifo.state;
    for (NodeId i = 0; i < n; ++i) {
      for (LabelId a : out.domain(i).labels()) {
        for (NodeId j : out.neighbors(i)) {
          if (st.marked(i, j, a)) continue;
          REQUIRE(st.counter(i, j, a) >= 1);
          REQUIRE_FALSE(st.prev_support(i, j, a).empty());
          REQUIRE_FALSE(st.next_support(i, j, a).empty());
        }
      }
    }
  }
}

TEST_CASE("MUSE AC-1 operation counts stay within the cubic bound", "[muse_ac][complexity]") {
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = uniform_int(rng, 2, 7);
    const int l = uniform_int(rng, 1, 4);
    auto m = random_muse(rng, n, l, 8, 0.3);
    auto [out, st] = muse_ac1(m);
    const long long n2l2 = 1LL * n * n * l * l;
    const long long n3l = 1LL * n * n * n * l;
    REQUIRE(st.stats().counter_decrements <= n2l2);
    REQUIRE(st.stats().support_removals <= 2 * n3l);
  }
}
