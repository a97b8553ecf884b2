#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <sstream>

#include "fixtures.hpp"
#include "musecsp/muse_pc.hpp"
#include "musecsp/random.hpp"

using namespace musecsp;

namespace {

// Every entry the algorithm falsified on a shared pair is also falsified by
// `ref`.
bool falsified_subset(const MuseInstance& alg, const MuseInstance& ref) {
  const auto& c = alg.csp();
  for (NodeId i = 0; i < c.num_nodes(); ++i) {
    for (NodeId j : c.neighbors(i)) {
      for (LabelId a : c.domain(i).labels()) {
        for (LabelId b : c.domain(j).labels()) {
          if (!c.r2(i, a, j, b) && ref.csp().r2(i, a, j, b)) return false;
        }
      }
    }
  }
  return true;
}

bool r2_symmetric(const CspInstance& c) {
  for (NodeId i = 0; i < c.num_nodes(); ++i) {
    for (NodeId j = 0; j < c.num_nodes(); ++j) {
      for (LabelId a = 0; a < c.num_labels(); ++a) {
        for (LabelId b = 0; b < c.num_labels(); ++b) {
          if (c.r2(i, a, j, b) != c.r2(j, b, i, a)) return false;
        }
      }
    }
  }
  return true;
}

}  // namespace

TEST_CASE("path consistency plus arc consistency removes the crossed labels", "[muse_pc]") {
  using F = fixtures::CrossedBranches;
  auto ac_only = muse_ac1(F::make()).instance;
  auto pc = muse_pc1(ac_only);
  CHECK_FALSE(pc.instance.csp().r2(F::n1, F::a, F::n2, F::c));
  CHECK_FALSE(pc.instance.csp().r2(F::n2, F::c, F::n1, F::a));
  CHECK(same_domains(pc.instance.csp(), ac_only.csp()));

  auto again = muse_ac1(pc.instance).instance;
  CHECK(again.csp().domain(F::n1).labels() == std::vector<LabelId>{F::b});
  CHECK(again.csp().domain(F::n2).labels() == std::vector<LabelId>{F::d});

  auto fix = muse_ac_pc_fixpoint(F::make());
  CHECK(same_domains(fix.csp(), again.csp()));
}

TEST_CASE("fully permissive chain: nothing falsified", "[muse_pc]") {
  auto m = build_chain(CspInstance(3, 3));
  auto [out, st] = muse_pc1(m);
  CHECK(st.stats().falsified == 0);
  CHECK(same_relation(out, m));
  CHECK(same_relation(muse_ac_pc_fixpoint(m), m));
}

TEST_CASE("two-node instances are never changed", "[muse_pc]") {
  Rng rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    CspInstance csp = random_csp(rng, 2, uniform_int(rng, 1, 4), 1.0, 0.4);
    auto m = build_chain(csp);
    REQUIRE(same_relation(muse_pc1(m).instance, m));
    REQUIRE(same_relation(oracle_muse_path_fixpoint(m), m));
  }
}

TEST_CASE("trace lines for a single unsupported triple", "[muse_pc][trace]") {
  // chain 0 -> 1 -> 2, one label each; R2(0,0,1,0) holds but 2 cannot join it.
  CspInstance csp(3, 1);
  csp.set_r2(0, 0, 2, 0, false);
  auto m = build_chain(csp);
  std::ostringstream trace;
  auto [out, st] = muse_pc1(m, {QueueOrder::fifo, &trace});
  CHECK_FALSE(out.csp().r2(0, 0, 1, 0));
  CHECK_FALSE(out.csp().r2(1, 0, 2, 0));
  CHECK(trace.str() ==
        "POP (0,1) 2 0 0\n"
        "POP (1,0) 2 0 0\n"
        "FALSIFY 1 0 0 0\n"
        "POP (1,2) 0 0 0\n"
        "FALSIFY 1 0 2 0\n"
        "POP (2,1) 0 0 0\n");
}

TEST_CASE("single segment: MUSE PC-1 equals plain path consistency", "[muse_pc][chain]") {
  Rng rng(777);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = uniform_int(rng, 3, 6);
    CspInstance csp = random_csp(rng, n, uniform_int(rng, 1, 3), 1.0, std::uniform_real_distribution<double>(0.4, 0.95)(rng));
    auto m = build_chain(csp);
    auto [out, st] = muse_pc1(m);
    auto expect = oracle_path_fixpoint(m.csp());
    MuseInstance ref = m;
    ref.csp() = expect;
    INFO("trial " << trial);
    REQUIRE(same_relation(out, ref));
  }
}

TEST_CASE("MUSE PC-1 against the segment-enumeration fixpoint", "[muse_pc][oracle]") {
  Rng rng(2718);
  const std::array ps{0.3, 0.5, 0.7, 0.9};
  int equal = 0;
  int falsified_somewhere = 0;
  const int trials = 400;
  for (int trial = 0; trial < trials; ++trial) {
    auto m = random_muse(rng, uniform_int(rng, 2, 5), uniform_int(rng, 1, 3), 6, ps[trial % 4]);
    auto [out, st] = muse_pc1(m);
    auto ref = oracle_muse_path_fixpoint(m);
    INFO("trial " << trial);
    // never falsifies what the definition keeps
    REQUIRE(falsified_subset(out, ref));
    REQUIRE(r2_symmetric(out.csp()));
    REQUIRE(st.stats().min_counter >= 0);
    REQUIRE(same_domains(out.csp(), m.csp()));
    if (same_relation(out, ref)) ++equal;
    if (!same_relation(ref, m)) ++falsified_somewhere;
  }
  CHECK(falsified_somewhere > 40);
  CHECK(equal >= trials * 99 / 100);
}

TEST_CASE("MUSE PC-1 properties: order, idempotence, composition order", "[muse_pc][property]") {
  Rng rng(4040);
  for (int trial = 0; trial < 200; ++trial) {
    auto m = random_muse(rng, uniform_int(rng, 2, 5), uniform_int(rng, 1, 3), 6, 0.6);
    auto fifo = muse_pc1(m, {QueueOrder::fifo});
    auto lifo = muse_pc1(m, {QueueOrder::lifo});
    REQUIRE(same_relation(fifo.instance, lifo.instance));
    REQUIRE(same_relation(muse_pc1(fifo.instance).instance, fifo.instance));

    auto ac_first = muse_ac_pc_fixpoint(m);
    auto pc_first = muse_ac_pc_fixpoint(m, QueueOrder::fifo, true);
    REQUIRE(same_relation(ac_first, pc_first));
    REQUIRE(same_relation(muse_ac_pc_fixpoint(m, QueueOrder::lifo), ac_first));
  }
}

TEST_CASE("MUSE PC-1 operation counts stay within the stated bound", "[muse_pc][complexity]") {
  Rng rng(9);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = uniform_int(rng, 3, 8);
    const int l = uniform_int(rng, 1, 3);
    auto m = random_muse(rng, n, l, 12, 0.5);
    auto [out, st] = muse_pc1(m);
    const long long n3l3 = 1LL * n * n * n * l * l * l;
    const long long n4l2 = 1LL * n * n * n * n * l * l;
    REQUIRE(st.stats().counter_decrements <= 2 * n3l3);
    REQUIRE(st.stats().support_removals <= 2 * n4l2);
  }
}
