#pragma once

#include <algorithm>
#include <optional>
#include <ostream>
#include <set>
#include <utility>
#include <vector>

#include "musecsp/csp.hpp"
#include "musecsp/error.hpp"
#include "musecsp/muse_ac.hpp"
#include "musecsp/muse_graph.hpp"

namespace musecsp {

/// A labeling of one segment. `binding` is sorted by node id.
struct Assignment {
  Segment segment;
  std::vector<std::pair<NodeId, LabelId>> binding;

  std::optional<LabelId> label_of(NodeId i) const {
    auto it = std::lower_bound(binding.begin(), binding.end(), std::pair<NodeId, LabelId>{i, -1});
    if (it == binding.end() || it->first != i) return std::nullopt;
    return it->second;
  }

  auto operator<=>(const Assignment&) const = default;
};

inline std::ostream& operator<<(std::ostream& os, const Assignment& a) {
  for (auto [i, l] : a.binding) os << i << '=' << l << '\n';
  return os;
}

struct SearchStats {
  long long nodes = 0;  // partial assignments extended
  long long solutions = 0;
};

struct SearchOptions {
  /// Use the MUSE AC-1 support sets to skip labels that cannot lie on the
  /// current path. Requires a SupportState.
  bool guided = true;
  /// Run ac4 on the segment before searching it (extract_one only).
  bool segment_ac = false;
  SearchStats* stats = nullptr;
};

/// True iff `a` labels a start-to-end path of `m` with admissible labels.
inline bool verify_solution(const MuseInstance& m, const Assignment& a) {
  if (!m.is_segment(a.segment)) return false;
  if (a.binding.size() != a.segment.nodes.size()) return false;
  const CspInstance& csp = m.csp();
  for (std::size_t x = 0; x < a.binding.size(); ++x) {
    auto [i, l] = a.binding[x];
    if (i != a.segment.nodes[x]) return false;
    if (l < 0 || l >= csp.num_labels()) return false;
    if (!csp.domain(i).contains(l) || !csp.r1(i, l)) return false;
  }
  for (std::size_t x = 0; x < a.binding.size(); ++x) {
    for (std::size_t y = x + 1; y < a.binding.size(); ++y) {
      if (!csp.r2(a.binding[x].first, a.binding[x].second, a.binding[y].first, a.binding[y].second)) return false;
    }
  }
  return true;
}

namespace detail {

inline bool member(const std::vector<NodeId>& set, NodeId x) { return std::find(set.begin(), set.end(), x) != set.end(); }

/// Depth-first extension along DAG paths. `path` / `labels` hold the current
/// partial path in order.
class PathSearch {
 public:
  PathSearch(const MuseInstance& m, const SupportState* st, const SearchOptions& opts)
      : m_(m), csp_(m.csp()), st_(opts.guided ? st : nullptr), stats_(opts.stats) {
    if (opts.guided && st == nullptr) throw Error("guided search needs a support state");
  }

  /// Can c at node C follow the current path (whose last node is P)?
  bool admissible(NodeId C, LabelId c) const {
    if (!csp_.r1(C, c)) return false;
    for (std::size_t x = 0; x < path_.size(); ++x) {
      if (!csp_.r2(path_[x], labels_[x], C, c)) return false;
    }
    if (st_ == nullptr) return true;
    if (path_.empty()) return member(st_->local_prev(C, c), kStart);
    const NodeId P = path_.back();
    const LabelId p = labels_.back();
    if (!member(st_->local_next(P, p), C) || !member(st_->local_prev(C, c), P)) return false;
    for (std::size_t x = 0; x < path_.size(); ++x) {
      const NodeId X = path_[x];
      const LabelId xl = labels_[x];
      if (st_->marked(X, C, xl) || st_->marked(C, X, c)) return false;
      if (X != P && !member(st_->next_support(X, P, xl), C)) return false;
    }
    return true;
  }

  /// Can the current path stop here?
  bool can_end() const {
    if (path_.empty() || !m_.is_end(path_.back())) return false;
    if (st_ == nullptr) return true;
    const NodeId P = path_.back();
    if (!member(st_->local_next(P, labels_.back()), kEnd)) return false;
    for (std::size_t x = 0; x + 1 < path_.size(); ++x) {
      if (!member(st_->next_support(path_[x], P, labels_[x]), kEnd)) return false;
    }
    return true;
  }

  /// With the rest of the path known: c must reach the next node, and the
  /// node after it through Next-Support.
  bool lookahead(const std::vector<NodeId>& order, std::size_t pos, LabelId c) const {
    if (st_ == nullptr) return true;
    const NodeId C = order[pos];
    const NodeId D = pos + 1 < order.size() ? order[pos + 1] : kEnd;
    if (!member(st_->local_next(C, c), D)) return false;
    if (D == kEnd) return true;
    const NodeId G = pos + 2 < order.size() ? order[pos + 2] : kEnd;
    return member(st_->next_support(C, D, c), G);
  }

  void push(NodeId i, LabelId a) {
    path_.push_back(i);
    labels_.push_back(a);
    if (stats_) ++stats_->nodes;
  }
  void pop() {
    path_.pop_back();
    labels_.pop_back();
  }

  Assignment current() const {
    Assignment out;
    for (std::size_t x = 0; x < path_.size(); ++x) out.binding.emplace_back(path_[x], labels_[x]);
    std::sort(out.binding.begin(), out.binding.end());
    for (auto [i, l] : out.binding) out.segment.nodes.push_back(i);
    return out;
  }

  /// Fixed node sequence; returns true when `visit` asks to stop.
  template <class Visit>
  bool along(const std::vector<NodeId>& order, std::size_t pos, Visit& visit) {
    if (pos == order.size()) {
      if (!can_end()) return false;
      if (stats_) ++stats_->solutions;
      return visit(current());
    }
    const NodeId C = order[pos];
    for (LabelId c : csp_.domain(C).labels()) {
      if (!admissible(C, c) || !lookahead(order, pos, c)) continue;
      push(C, c);
      const bool stop = along(order, pos + 1, visit);
      pop();
      if (stop) return true;
    }
    return false;
  }

  /// Every path continuing from the current one.
  template <class Visit>
  bool anywhere(Visit& visit) {
    if (can_end()) {
      if (stats_) ++stats_->solutions;
      if (visit(current())) return true;
    }
    const std::vector<NodeId>& next = path_.empty() ? m_.starts() : m_.successors(path_.back());
    for (NodeId C : next) {
      for (LabelId c : csp_.domain(C).labels()) {
        if (!admissible(C, c)) continue;
        push(C, c);
        const bool stop = anywhere(visit);
        pop();
        if (stop) return true;
      }
    }
    return false;
  }

 private:
  const MuseInstance& m_;
  const CspInstance& csp_;
  const SupportState* st_;
  SearchStats* stats_;
  std::vector<NodeId> path_;
  std::vector<LabelId> labels_;
};

}  // namespace detail

/// Lexicographically least segment by node ids.
inline Segment default_segment(const MuseInstance& m) {
  auto all = enumerate_segments(m);
  if (all.empty()) throw GraphError("instance has no segments");
  return all.front();
}

/// Depth-first search for one solution of `segment`, variables in path order,
/// values in domain order.
inline std::optional<Assignment> extract_one(const MuseInstance& m, const SupportState* state, const Segment& segment,
                                             const SearchOptions& opts = {}) {
  if (!m.is_segment(segment)) throw GraphError("not a segment of this instance");
  const std::vector<NodeId> order = m.path_order(segment);

  const MuseInstance* target = &m;
  MuseInstance restricted;
  if (opts.segment_ac) {
    restricted = m;
    CspInstance& c = restricted.csp();
    c.clear_arcs();
    for (std::size_t x = 0; x < order.size(); ++x) {
      for (std::size_t y = x + 1; y < order.size(); ++y) c.set_arc(order[x], order[y], true);
    }
    for (NodeId i = 0; i < c.num_nodes(); ++i) {
      if (!segment.contains(i)) c.domain(i).clear();
    }
    CspInstance reduced = ac4(c);
    for (NodeId i : order) c.domain(i) = reduced.domain(i);
    target = &restricted;
  }

  detail::PathSearch search(*target, state, opts);
  std::optional<Assignment> found;
  auto visit = [&found](Assignment a) {
    found = std::move(a);
    return true;
  };
  search.along(order, 0, visit);
  if (found) {
    found->segment = segment;
    if (!verify_solution(m, *found)) throw Error("search produced an invalid assignment");
  }
  return found;
}

/// First solution over any segment, exploring paths from the starts.
inline std::optional<Assignment> extract_first(const MuseInstance& m, const SupportState* state,
                                               const SearchOptions& opts = {}) {
  detail::PathSearch search(m, state, opts);
  std::optional<Assignment> found;
  auto visit = [&found](Assignment a) {
    found = std::move(a);
    return true;
  };
  search.anywhere(visit);
  if (found && !verify_solution(m, *found)) throw Error("search produced an invalid assignment");
  return found;
}

/// Every solution of every segment, sorted and deduplicated.
inline std::vector<Assignment> extract_all(const MuseInstance& m, const SupportState* state,
                                           const SearchOptions& opts = {}) {
  detail::PathSearch search(m, state, opts);
  std::set<Assignment> found;
  auto visit = [&](Assignment a) {
    if (!verify_solution(m, a)) throw Error("search produced an invalid assignment");
    found.insert(std::move(a));
    return false;
  };
  search.anywhere(visit);
  return {found.begin(), found.end()};
}

/// Brute force over enumerate_segments x label tuples. Test oracle.
inline std::vector<Assignment> oracle_all_solutions(const MuseInstance& m) {
  std::vector<Assignment> out;
  for (const Segment& seg : enumerate_segments(m)) {
    Assignment a;
    a.segment = seg;
    a.binding.resize(seg.nodes.size());
    std::vector<std::vector<LabelId>> doms;
    for (std::size_t x = 0; x < seg.nodes.size(); ++x) {
      a.binding[x].first = seg.nodes[x];
      doms.push_back(m.csp().domain(seg.nodes[x]).labels());
    }
    std::vector<std::size_t> pick(seg.nodes.size(), 0);
    bool any_empty = std::any_of(doms.begin(), doms.end(), [](const auto& d) { return d.empty(); });
    while (!any_empty) {
      for (std::size_t x = 0; x < pick.size(); ++x) a.binding[x].second = doms[x][pick[x]];
      if (verify_solution(m, a)) out.push_back(a);
      std::size_t x = 0;
      while (x < pick.size() && ++pick[x] == doms[x].size()) pick[x++] = 0;
      if (x == pick.size()) break;
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace musecsp
