#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "musecsp/csp.hpp"
#include "musecsp/muse_ac.hpp"
#include "musecsp/muse_graph.hpp"
#include "musecsp/muse_pc.hpp"
#include "musecsp/random.hpp"

namespace musecsp {

inline bool domains_within(const CspInstance& small, const CspInstance& big) {
  for (NodeId i = 0; i < small.num_nodes(); ++i) {
    for (LabelId a : small.domain(i).labels()) {
      if (!big.domain(i).contains(a)) return false;
    }
  }
  return true;
}

/// Every live entry falsified in `alg` on a shared pair is falsified in `ref`.
inline bool falsified_within(const MuseInstance& alg, const MuseInstance& ref) {
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

/// Whether an edge at node i (into or out of it) lies on no segment that also
/// holds j, although both ends share segments with j. The support-set
/// initialization tests (x, j) in E per node, so it still offers such an edge
/// as a way to extend the pair (i,j).
inline bool has_edge_pairwise_gap(const MuseInstance& m, NodeId i, NodeId j) {
  const auto segments = enumerate_segments(m);
  for (auto [u, v] : m.edges()) {
    if (u != i && v != i) continue;
    if (u == j || v == j || !m.share_segment(u, j) || !m.share_segment(v, j)) continue;
    bool together = false;
    for (const Segment& s : segments) {
      if (!s.contains(j)) continue;
      const auto o = m.path_order(s);
      for (std::size_t x = 0; x + 1 < o.size() && !together; ++x) together = o[x] == u && o[x + 1] == v;
      if (together) break;
    }
    if (!together) return true;
  }
  return false;
}

/// Every live entry kept by `alg` but falsified by `ref` sits on a pair with an
/// edge-pairwise gap.
inline bool divergence_is_edge_pairwise(const MuseInstance& alg, const MuseInstance& ref, const MuseInstance& orig) {
  const auto& c = alg.csp();
  for (NodeId i = 0; i < c.num_nodes(); ++i) {
    for (NodeId j : c.neighbors(i)) {
      if (j < i) continue;
      bool diverges = false;
      for (LabelId a : c.domain(i).labels()) {
        for (LabelId b : c.domain(j).labels()) diverges = diverges || (c.r2(i, a, j, b) && !ref.csp().r2(i, a, j, b));
      }
      if (diverges && !has_edge_pairwise_gap(orig, i, j) && !has_edge_pairwise_gap(orig, j, i)) return false;
    }
  }
  return true;
}

struct AcOracleReport {
  int trials = 0;
  int equal = 0;
  int changed = 0;            // instances where the definition removes something
  int segment_relative = 0;   // pruned more, all of it also pruned segment by segment
  int edge_pairwise = 0;      // pruned less, and each such node has an edge gap
  int unclassified = 0;
  std::uint64_t first_mismatch_seed = 0;
};

/// muse_ac1 against the label-level enumeration fixpoint. Instance k is drawn
/// from its own stream seed + k: n <= 6, l <= 4, <= 4 segments,
/// p in {0.2, 0.5, 0.8}.
inline AcOracleReport ac_oracle_suite(std::uint64_t seed, int count) {
  const std::array ps{0.2, 0.5, 0.8};
  AcOracleReport r;
  for (int k = 0; k < count; ++k) {
    Rng rng(seed + static_cast<std::uint64_t>(k));
    auto m = random_muse(rng, uniform_int(rng, 1, 6), uniform_int(rng, 1, 4), 4, ps[static_cast<std::size_t>(k) % 3]);
    const auto fast = muse_ac1(m).instance;
    const auto ref = oracle_muse_arc_fixpoint(m);
    ++r.trials;
    if (!same_domains(ref.csp(), m.csp())) ++r.changed;
    if (same_domains(fast.csp(), ref.csp())) {
      ++r.equal;
      continue;
    }
    if (r.first_mismatch_seed == 0) r.first_mismatch_seed = seed + static_cast<std::uint64_t>(k);
    const bool weaker = !domains_within(fast.csp(), ref.csp());
    const bool stronger = !domains_within(ref.csp(), fast.csp());
    bool weaker_named = !weaker;
    if (weaker) {
      weaker_named = true;
      for (NodeId i = 0; i < m.num_nodes() && weaker_named; ++i) {
        bool extra = false;
        for (LabelId a : fast.csp().domain(i).labels()) extra = extra || !ref.csp().domain(i).contains(a);
        if (!extra) continue;
        bool gap = false;
        for (NodeId j = 0; j < m.num_nodes() && !gap; ++j) gap = m.share_segment(i, j) && has_edge_pairwise_gap(m, i, j);
        weaker_named = gap;
      }
    }
    const bool stronger_named = !stronger || domains_within(oracle_segment_support_fixpoint(m).csp(), fast.csp());
    if (weaker_named && stronger_named) {
      if (stronger) ++r.segment_relative;
      if (weaker) ++r.edge_pairwise;
    } else {
      ++r.unclassified;
    }
  }
  return r;
}

struct PcOracleReport {
  int trials = 0;
  int equal = 0;
  int changed = 0;
  int edge_pairwise = 0;     // kept more, each such pair has an edge gap
  int segment_relative = 0;  // falsified more, all of it also falsified segment by segment
  int unclassified = 0;
  std::uint64_t first_segment_relative_seed = 0;
  std::uint64_t first_unclassified_seed = 0;
  bool pass() const { return trials > 0 && segment_relative == 0 && unclassified == 0; }
};

/// muse_pc1 against the segment-enumeration fixpoint of path consistency:
/// n <= 5, l <= 3. Only the pairwise-support divergence is tolerated.
inline PcOracleReport pc_oracle_suite(std::uint64_t seed, int count) {
  const std::array ps{0.3, 0.5, 0.7, 0.9};
  PcOracleReport r;
  for (int k = 0; k < count; ++k) {
    const std::uint64_t s = seed + static_cast<std::uint64_t>(k);
    Rng rng(s);
    auto m = random_muse(rng, uniform_int(rng, 2, 5), uniform_int(rng, 1, 3), 6, ps[static_cast<std::size_t>(k) % 4]);
    const auto fast = muse_pc1(m).instance;
    const auto ref = oracle_muse_path_fixpoint(m);
    ++r.trials;
    if (!same_relation(ref, m)) ++r.changed;
    if (same_relation(fast, ref)) {
      ++r.equal;
      continue;
    }
    const bool weaker = !falsified_within(ref, fast);
    const bool stronger = !falsified_within(fast, ref);
    const bool weaker_named = !weaker || divergence_is_edge_pairwise(fast, ref, m);
    const bool stronger_named = !stronger || falsified_within(fast, oracle_segment_path_fixpoint(m));
    if (weaker_named && stronger_named) {
      if (weaker) ++r.edge_pairwise;
      if (stronger) {
        if (r.segment_relative == 0) r.first_segment_relative_seed = s;
        ++r.segment_relative;
      }
    } else {
      if (r.unclassified == 0) r.first_unclassified_seed = s;
      ++r.unclassified;
    }
  }
  return r;
}

struct CountReport {
  int trials = 0;
  int equal = 0;
  bool all() const { return trials > 0 && equal == trials; }
};

/// Single-segment instances: muse_ac1 against ac4 on the same CSP.
inline CountReport chain_suite(std::uint64_t seed, int count) {
  CountReport r;
  for (int k = 0; k < count; ++k) {
    Rng rng(seed + static_cast<std::uint64_t>(k));
    const int n = uniform_int(rng, 1, 8);
    auto csp = random_csp(rng, n, uniform_int(rng, 1, 5), 1.0, 0.15 + 0.8 * std::uniform_real_distribution<double>()(rng));
    const auto plain = ac4(csp);
    const auto muse = muse_ac1(build_chain(csp)).instance;
    ++r.trials;
    if (same_domains(plain, muse.csp())) ++r.equal;
  }
  return r;
}

/// FIFO against LIFO worklists for muse_ac1 (AC suite distribution) and
/// muse_pc1 (PC suite distribution).
inline CountReport order_suite(std::uint64_t seed, int ac_count, int pc_count) {
  CountReport r;
  const std::array ac_ps{0.2, 0.5, 0.8};
  for (int k = 0; k < ac_count; ++k) {
    Rng rng(seed + static_cast<std::uint64_t>(k));
    auto m = random_muse(rng, uniform_int(rng, 1, 6), uniform_int(rng, 1, 4), 4, ac_ps[static_cast<std::size_t>(k) % 3]);
    ++r.trials;
    if (same_domains(muse_ac1(m, {QueueOrder::fifo}).instance.csp(), muse_ac1(m, {QueueOrder::lifo}).instance.csp())) {
      ++r.equal;
    }
  }
  const std::array pc_ps{0.3, 0.5, 0.7, 0.9};
  for (int k = 0; k < pc_count; ++k) {
    Rng rng(seed + static_cast<std::uint64_t>(k));
    auto m = random_muse(rng, uniform_int(rng, 2, 5), uniform_int(rng, 1, 3), 6, pc_ps[static_cast<std::size_t>(k) % 4]);
    ++r.trials;
    if (same_relation(muse_pc1(m, {QueueOrder::fifo}).instance, muse_pc1(m, {QueueOrder::lifo}).instance)) ++r.equal;
  }
  return r;
}

}  // namespace musecsp
