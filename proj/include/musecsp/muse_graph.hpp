#pragma once

#include <algorithm>
#include <compare>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "musecsp/csp.hpp"
#include "musecsp/error.hpp"

namespace musecsp {

/// Sentinels standing for the dummy start and end nodes of the segment DAG.
inline constexpr NodeId kStart = -1;
inline constexpr NodeId kEnd = -2;

using Edge = std::pair<NodeId, NodeId>;

/// Node set of one start-to-end path, ascending.
struct Segment {
  std::vector<NodeId> nodes;

  bool contains(NodeId i) const { return std::binary_search(nodes.begin(), nodes.end(), i); }
  auto operator<=>(const Segment&) const = default;
};

/// A MUSE CSP: a CSP whose variables are arranged in a DAG; every
/// start-to-end path is one segment. The CSP arc set is the set of pairs that
/// share a segment.
class MuseInstance {
 public:
  MuseInstance() = default;

  const CspInstance& csp() const { return csp_; }
  CspInstance& csp() { return csp_; }

  int num_nodes() const { return csp_.num_nodes(); }
  int num_labels() const { return csp_.num_labels(); }

  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<NodeId>& starts() const { return starts_; }
  const std::vector<NodeId>& ends() const { return ends_; }

  /// Real successors / predecessors.
  const std::vector<NodeId>& successors(NodeId i) const { return succ_[static_cast<std::size_t>(i)]; }
  const std::vector<NodeId>& predecessors(NodeId i) const { return pred_[static_cast<std::size_t>(i)]; }

  /// Prev-Edge_i as predecessor ids, kStart for the dummy start edge.
  const std::vector<NodeId>& prev_edge(NodeId i) const { return prev_edge_[static_cast<std::size_t>(i)]; }
  /// Next-Edge_i as successor ids, kEnd for the dummy end edge.
  const std::vector<NodeId>& next_edge(NodeId i) const { return next_edge_[static_cast<std::size_t>(i)]; }

  bool has_edge(NodeId i, NodeId j) const {
    if (i == kStart) return is_start(j);
    if (j == kEnd) return is_end(i);
    if (i < 0 || j < 0) return false;
    const auto& s = succ_[static_cast<std::size_t>(i)];
    return std::binary_search(s.begin(), s.end(), j);
  }

  bool is_start(NodeId i) const { return std::binary_search(starts_.begin(), starts_.end(), i); }
  bool is_end(NodeId i) const { return std::binary_search(ends_.begin(), ends_.end(), i); }

  /// Directed path from i to j (reflexive).
  bool reaches(NodeId i, NodeId j) const {
    return reach_[static_cast<std::size_t>(i) * static_cast<std::size_t>(num_nodes()) + static_cast<std::size_t>(j)] != 0;
  }

  /// (i,j) share at least one segment.
  bool share_segment(NodeId i, NodeId j) const { return i != j && csp_.has_arc(i, j); }

  const std::vector<NodeId>& topological_order() const { return topo_; }
  int topological_rank(NodeId i) const { return rank_[static_cast<std::size_t>(i)]; }

  /// True when the node set is exactly the node set of some start-to-end path.
  bool is_segment(const Segment& seg) const {
    if (seg.nodes.empty()) return false;
    auto order = path_order(seg);
    if (order.empty()) return false;
    if (!is_start(order.front()) || !is_end(order.back())) return false;
    for (std::size_t k = 1; k < order.size(); ++k) {
      if (!has_edge(order[k - 1], order[k])) return false;
    }
    return true;
  }

  /// Segment nodes sorted by DAG topological rank; empty if an id is invalid.
  std::vector<NodeId> path_order(const Segment& seg) const {
    std::vector<NodeId> order = seg.nodes;
    for (NodeId i : order) {
      if (i < 0 || i >= num_nodes()) return {};
    }
    std::sort(order.begin(), order.end(),
              [this](NodeId x, NodeId y) { return topological_rank(x) < topological_rank(y); });
    return order;
  }

  friend MuseInstance build_muse(CspInstance csp, std::vector<Edge> edges, std::vector<NodeId> starts,
                                 std::vector<NodeId> ends);

 private:
  CspInstance csp_;
  std::vector<Edge> edges_;
  std::vector<NodeId> starts_;
  std::vector<NodeId> ends_;
  std::vector<std::vector<NodeId>> succ_;
  std::vector<std::vector<NodeId>> pred_;
  std::vector<std::vector<NodeId>> prev_edge_;
  std::vector<std::vector<NodeId>> next_edge_;
  std::vector<NodeId> topo_;
  std::vector<int> rank_;
  std::vector<char> reach_;
};

namespace detail {

inline void sort_unique(std::vector<NodeId>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace detail

/// Builds the DAG view and replaces the CSP arc set by the pairs that share a
/// segment. Throws GraphError on cycles, bad ids or nodes off every path.
inline MuseInstance build_muse(CspInstance csp, std::vector<Edge> edges, std::vector<NodeId> starts,
                               std::vector<NodeId> ends) {
  const int n = csp.num_nodes();
  auto check_id = [n](NodeId i, const char* what) {
    if (i < 0 || i >= n) throw GraphError(std::string(what) + " references unknown node " + std::to_string(i));
  };
  if (n > 0 && (starts.empty() || ends.empty())) throw GraphError("segment DAG needs start and end nodes");
  for (auto [i, j] : edges) {
    check_id(i, "EDGE");
    check_id(j, "EDGE");
    if (i == j) throw GraphError("self edge on node " + std::to_string(i));
  }
  for (NodeId i : starts) check_id(i, "START");
  for (NodeId i : ends) check_id(i, "END");

  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  detail::sort_unique(starts);
  detail::sort_unique(ends);

  MuseInstance m;
  m.succ_.assign(static_cast<std::size_t>(n), {});
  m.pred_.assign(static_cast<std::size_t>(n), {});
  for (auto [i, j] : edges) {
    m.succ_[i].push_back(j);
    m.pred_[j].push_back(i);
  }
  for (auto& s : m.succ_) detail::sort_unique(s);
  for (auto& p : m.pred_) detail::sort_unique(p);

  // Kahn's algorithm; leftovers mean a cycle.
  std::vector<int> indegree(static_cast<std::size_t>(n), 0);
  for (NodeId i = 0; i < n; ++i) indegree[i] = static_cast<int>(m.pred_[i].size());
  std::vector<NodeId> ready;
  for (NodeId i = n - 1; i >= 0; --i) {
    if (indegree[i] == 0) ready.push_back(i);
  }
  while (!ready.empty()) {
    NodeId i = ready.back();
    ready.pop_back();
    m.topo_.push_back(i);
    for (auto it = m.succ_[i].rbegin(); it != m.succ_[i].rend(); ++it) {
      if (--indegree[*it] == 0) ready.push_back(*it);
    }
  }
  if (static_cast<int>(m.topo_.size()) != n) throw GraphError("segment graph contains a cycle");
  m.rank_.assign(static_cast<std::size_t>(n), 0);
  for (int r = 0; r < n; ++r) m.rank_[m.topo_[r]] = r;

  // Forward reachability (reflexive) in reverse topological order.
  std::vector<std::vector<char>> reach(static_cast<std::size_t>(n), std::vector<char>(static_cast<std::size_t>(n), 0));
  for (auto it = m.topo_.rbegin(); it != m.topo_.rend(); ++it) {
    NodeId i = *it;
    reach[i][i] = 1;
    for (NodeId j : m.succ_[i]) {
      for (NodeId k = 0; k < n; ++k) reach[i][k] |= reach[j][k];
    }
  }

  std::vector<char> from_start(static_cast<std::size_t>(n), 0);
  std::vector<char> to_end(static_cast<std::size_t>(n), 0);
  for (NodeId s : starts) {
    for (NodeId k = 0; k < n; ++k) from_start[k] |= reach[s][k];
  }
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId e : ends) to_end[i] |= reach[i][e];
  }
  for (NodeId i = 0; i < n; ++i) {
    if (!from_start[i]) throw GraphError("node " + std::to_string(i) + " is unreachable from start");
    if (!to_end[i]) throw GraphError("node " + std::to_string(i) + " cannot reach end");
  }

  // Every node lies on a start-to-end path, so comparability under
  // reachability is exactly co-membership in a segment.
  csp.clear_arcs();
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = i + 1; j < n; ++j) {
      if (reach[i][j] || reach[j][i]) csp.set_arc(i, j, true);
    }
  }

  m.reach_.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0);
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = 0; j < n; ++j) m.reach_[static_cast<std::size_t>(i) * n + j] = reach[i][j];
  }

  m.prev_edge_.assign(static_cast<std::size_t>(n), {});
  m.next_edge_.assign(static_cast<std::size_t>(n), {});
  for (NodeId i = 0; i < n; ++i) {
    m.prev_edge_[i] = m.pred_[i];
    m.next_edge_[i] = m.succ_[i];
  }
  for (NodeId s : starts) m.prev_edge_[s].insert(m.prev_edge_[s].begin(), kStart);
  for (NodeId e : ends) m.next_edge_[e].push_back(kEnd);

  m.csp_ = std::move(csp);
  m.edges_ = std::move(edges);
  m.starts_ = std::move(starts);
  m.ends_ = std::move(ends);
  return m;
}

/// A single-segment instance: the chain 0 -> 1 -> ... -> n-1.
inline MuseInstance build_chain(CspInstance csp) {
  std::vector<Edge> edges;
  for (NodeId i = 0; i + 1 < csp.num_nodes(); ++i) edges.emplace_back(i, i + 1);
  const int n = csp.num_nodes();
  if (n == 0) return build_muse(std::move(csp), {}, {}, {});
  return build_muse(std::move(csp), std::move(edges), {0}, {n - 1});
}

/// Every distinct segment (as a node set). Exponential; intended for small DAGs.
inline std::vector<Segment> enumerate_segments(const MuseInstance& m) {
  std::set<Segment> found;
  std::vector<NodeId> path;
  auto dfs = [&](auto&& self, NodeId i) -> void {
    path.push_back(i);
    if (m.is_end(i)) {
      Segment seg{path};
      std::sort(seg.nodes.begin(), seg.nodes.end());
      found.insert(std::move(seg));
    }
    for (NodeId j : m.successors(i)) self(self, j);
    path.pop_back();
  };
  for (NodeId s : m.starts()) dfs(dfs, s);
  return {found.begin(), found.end()};
}

}  // namespace musecsp
