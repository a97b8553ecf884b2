#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "musecsp/csp.hpp"
#include "musecsp/muse_graph.hpp"

namespace musecsp {

/// The library's only generator: 64-bit Mersenne Twister, seeded explicitly.
using Rng = std::mt19937_64;

inline bool coin(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

inline int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

/// Fills r2 on every arc with independent Bernoulli(p) entries (symmetric).
inline void randomize_r2(CspInstance& csp, Rng& rng, double p) {
  for (auto [i, j] : csp.arcs()) {
    if (i > j) continue;
    for (LabelId a = 0; a < csp.num_labels(); ++a) {
      for (LabelId b = 0; b < csp.num_labels(); ++b) csp.set_r2(i, a, j, b, coin(rng, p));
    }
  }
}

/// Random CSP with arc density `density` and permitted-pair probability `p`.
/// Domains are random nonempty subsets of the label set.
inline CspInstance random_csp(Rng& rng, int n, int l, double density, double p) {
  CspInstance csp(n, l);
  csp.clear_arcs();
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = i + 1; j < n; ++j) {
      if (coin(rng, density)) csp.set_arc(i, j, true);
    }
  }
  for (NodeId i = 0; i < n; ++i) {
    for (LabelId a = 0; a < l; ++a) {
      if (coin(rng, 0.2)) csp.domain(i).erase(a);
    }
    if (csp.domain(i).empty()) csp.domain(i).insert(uniform_int(rng, 0, l - 1));
  }
  randomize_r2(csp, rng, p);
  return csp;
}

/// DAG over nodes 0..n-1 with random forward edges. Every node lies on a
/// start-to-end path: sources are starts, sinks are ends, plus a few extra
/// starts/ends sprinkled in.
struct RandomDag {
  std::vector<Edge> edges;
  std::vector<NodeId> starts;
  std::vector<NodeId> ends;
};

inline RandomDag random_dag(Rng& rng, int n, double edge_p) {
  RandomDag dag;
  std::vector<NodeId> perm(static_cast<std::size_t>(n));
  for (NodeId i = 0; i < n; ++i) perm[i] = i;
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<int> indeg(static_cast<std::size_t>(n), 0), outdeg(static_cast<std::size_t>(n), 0);
  for (int x = 0; x < n; ++x) {
    for (int y = x + 1; y < n; ++y) {
      if (coin(rng, edge_p)) {
        dag.edges.emplace_back(perm[x], perm[y]);
        ++outdeg[perm[x]];
        ++indeg[perm[y]];
      }
    }
  }
  for (NodeId i = 0; i < n; ++i) {
    if (indeg[i] == 0 || coin(rng, 0.1)) dag.starts.push_back(i);
    if (outdeg[i] == 0 || coin(rng, 0.1)) dag.ends.push_back(i);
  }
  return dag;
}

/// Random MUSE instance with at most `max_segments` segments (rejection
/// sampling on the DAG), l labels and permitted-pair probability p.
inline MuseInstance random_muse(Rng& rng, int n, int l, int max_segments, double p) {
  for (;;) {
    RandomDag dag = random_dag(rng, n, 0.45);
    CspInstance csp(n, l);
    MuseInstance m = build_muse(std::move(csp), dag.edges, dag.starts, dag.ends);
    if (static_cast<int>(enumerate_segments(m).size()) > max_segments) continue;
    CspInstance& c = m.csp();
    for (NodeId i = 0; i < n; ++i) {
      for (LabelId a = 0; a < l; ++a) {
        if (coin(rng, 0.15)) c.domain(i).erase(a);
      }
      if (c.domain(i).empty()) c.domain(i).insert(uniform_int(rng, 0, l - 1));
    }
    randomize_r2(c, rng, p);
    return m;
  }
}

}  // namespace musecsp
