#pragma once

#include <algorithm>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "musecsp/csp.hpp"
#include "musecsp/muse_graph.hpp"

namespace musecsp {

/// [(i,j), a]: label a of node i considered against the pair (i,j).
struct ArcLabel {
  NodeId i = 0;
  NodeId j = 0;
  LabelId a = 0;

  friend bool operator==(const ArcLabel&, const ArcLabel&) = default;
};

/// Elementary-step counters for the MUSE AC-1 complexity checks.
struct MuseAcStats {
  long long counter_decrements = 0;
  long long support_removals = 0;  // Prev-/Next-Support element deletions
  long long local_removals = 0;    // Local-Prev/Next-Support element deletions
  long long pops = 0;
  long long label_removals = 0;
};

struct MuseAcOptions {
  QueueOrder order = QueueOrder::fifo;
  std::ostream* trace = nullptr;  // "POP (i,j) a" / "DEL i a" lines
};

/// MUSE AC-1 bookkeeping. Support-set members are stored as the far node x of
/// the pair (i,x); kStart/kEnd are the dummy members. Following the
/// initialization, the member (i,j) of Prev-Support[(i,j),a] stands for a
/// direct edge i -> j (and likewise for Next-Support with j -> i). The dummy
/// start member is kept only when j precedes i (a segment beginning at j can
/// still contain i), the dummy end only when i precedes j.
class SupportState {
 public:
  SupportState() = default;
  SupportState(int num_nodes, int num_labels, QueueOrder order)
      : n_(num_nodes),
        l_(num_labels),
        counter_(size3(), 0),
        s_(size3()),
        marked_(size3(), 0),
        prev_support_(size3()),
        next_support_(size3()),
        local_prev_(static_cast<std::size_t>(num_nodes) * num_labels),
        local_next_(static_cast<std::size_t>(num_nodes) * num_labels),
        worklist_(order) {}

  int num_nodes() const { return n_; }
  int num_labels() const { return l_; }

  int counter(NodeId i, NodeId j, LabelId a) const { return counter_[idx(i, j, a)]; }
  /// Labels b of j supported by a in L_i.
  const std::vector<LabelId>& supports(NodeId i, NodeId j, LabelId a) const { return s_[idx(i, j, a)]; }
  bool marked(NodeId i, NodeId j, LabelId a) const { return marked_[idx(i, j, a)] != 0; }
  const std::vector<NodeId>& prev_support(NodeId i, NodeId j, LabelId a) const { return prev_support_[idx(i, j, a)]; }
  const std::vector<NodeId>& next_support(NodeId i, NodeId j, LabelId a) const { return next_support_[idx(i, j, a)]; }
  const std::vector<NodeId>& local_prev(NodeId i, LabelId a) const { return local_prev_[idx2(i, a)]; }
  const std::vector<NodeId>& local_next(NodeId i, LabelId a) const { return local_next_[idx2(i, a)]; }

  const MuseAcStats& stats() const { return stats_; }
  bool queue_empty() const { return worklist_.empty(); }

  friend SupportState initialize_support(MuseInstance& m, const MuseAcOptions& opts);
  friend void propagate(MuseInstance& m, SupportState& st);
  friend void propagate_from(MuseInstance& m, SupportState& st, std::span<const ArcLabel> seeds);

 private:
  std::size_t size3() const { return static_cast<std::size_t>(n_) * n_ * l_; }
  std::size_t idx(NodeId i, NodeId j, LabelId a) const {
    return (static_cast<std::size_t>(i) * n_ + j) * l_ + a;
  }
  std::size_t idx2(NodeId i, LabelId a) const { return static_cast<std::size_t>(i) * l_ + a; }

  static bool erase_member(std::vector<NodeId>& set, NodeId x) {
    auto it = std::find(set.begin(), set.end(), x);
    if (it == set.end()) return false;
    set.erase(it);
    return true;
  }

  void enqueue(NodeId i, NodeId j, LabelId a) {
    marked_[idx(i, j, a)] = 1;
    worklist_.push({i, j, a});
  }

  void update_support_sets(MuseInstance& m, const ArcLabel& item);

  int n_ = 0;
  int l_ = 0;
  std::vector<int> counter_;
  std::vector<std::vector<LabelId>> s_;
  std::vector<char> marked_;
  std::vector<std::vector<NodeId>> prev_support_;
  std::vector<std::vector<NodeId>> next_support_;
  std::vector<std::vector<NodeId>> local_prev_;
  std::vector<std::vector<NodeId>> local_next_;
  Worklist<ArcLabel> worklist_;
  MuseAcStats stats_;
  std::ostream* trace_ = nullptr;
};

/// Builds counters, S, M, the worklist and all four support-set families.
/// Pairs whose counter starts at zero are queued but not yet propagated.
inline SupportState initialize_support(MuseInstance& m, const MuseAcOptions& opts) {
  const CspInstance& csp = m.csp();
  const int n = csp.num_nodes();
  SupportState st(n, csp.num_labels(), opts.order);
  st.trace_ = opts.trace;

  for (NodeId i = 0; i < n; ++i) {
    for (LabelId a : csp.domain(i).labels()) {
      auto& lp = st.local_prev_[st.idx2(i, a)];
      auto& ln = st.local_next_[st.idx2(i, a)];
      for (NodeId x : m.prev_edge(i)) lp.push_back(x);
      for (NodeId x : m.next_edge(i)) ln.push_back(x);
    }
  }

  for (NodeId i = 0; i < n; ++i) {
    const auto dom_i = csp.domain(i).labels();
    for (NodeId j : csp.neighbors(i)) {
      const auto dom_j = csp.domain(j).labels();
      for (LabelId a : dom_i) {
        int total = 0;
        for (LabelId b : dom_j) {
          if (csp.r2(i, a, j, b)) {
            ++total;
            st.s_[st.idx(j, i, b)].push_back(a);
          }
        }
        if (total == 0) st.enqueue(i, j, a);
        st.counter_[st.idx(i, j, a)] = total;

        auto& ps = st.prev_support_[st.idx(i, j, a)];
        for (NodeId x : m.prev_edge(j)) {
          if (x == kStart) {
            if (m.reaches(j, i)) ps.push_back(kStart);
          } else if (x == i) {
            ps.push_back(j);
          } else if (csp.has_arc(i, x)) {
            ps.push_back(x);
          }
        }
        auto& ns = st.next_support_[st.idx(i, j, a)];
        for (NodeId x : m.next_edge(j)) {
          if (x == kEnd) {
            if (m.reaches(i, j)) ns.push_back(kEnd);
          } else if (x == i) {
            ns.push_back(j);
          } else if (csp.has_arc(i, x)) {
            ns.push_back(x);
          }
        }
      }
    }
  }
  return st;
}

inline void SupportState::update_support_sets(MuseInstance& m, const ArcLabel& item) {
  const auto [i, j, a] = item;
  auto trigger = [this](NodeId ti, NodeId tx, LabelId ta) {
    if (!marked_[idx(ti, tx, ta)]) enqueue(ti, tx, ta);
  };
  auto remove_label = [&]() {
    if (m.csp().domain(i).erase(a)) {
      ++stats_.label_removals;
      if (trace_) *trace_ << "DEL " << i << ' ' << a << '\n';
    }
  };

  auto& prev = prev_support_[idx(i, j, a)];
  for (NodeId x : std::vector<NodeId>(prev)) {
    if (x == j || x == kStart) continue;
    erase_member(prev, x);
    auto& other = next_support_[idx(i, x, a)];
    erase_member(other, j);
    stats_.support_removals += 2;
    if (other.empty()) trigger(i, x, a);
  }

  auto& next = next_support_[idx(i, j, a)];
  for (NodeId x : std::vector<NodeId>(next)) {
    if (x == j || x == kEnd) continue;
    erase_member(next, x);
    auto& other = prev_support_[idx(i, x, a)];
    erase_member(other, j);
    stats_.support_removals += 2;
    if (other.empty()) trigger(i, x, a);
  }

  auto& lprev = local_prev_[idx2(i, a)];
  auto& lnext = local_next_[idx2(i, a)];
  if (m.has_edge(j, i) && erase_member(lprev, j)) ++stats_.local_removals;
  if (lprev.empty()) {
    remove_label();
    for (NodeId x : std::vector<NodeId>(lnext)) {
      if (x == j || x == kEnd) continue;
      erase_member(lnext, x);
      ++stats_.local_removals;
      trigger(i, x, a);
    }
  }

  if (m.has_edge(i, j) && erase_member(lnext, j)) ++stats_.local_removals;
  if (lnext.empty()) {
    remove_label();
    for (NodeId x : std::vector<NodeId>(lprev)) {
      if (x == j || x == kStart) continue;
      erase_member(lprev, x);
      ++stats_.local_removals;
      trigger(i, x, a);
    }
  }
}

/// Runs the worklist to its fixpoint.
inline void propagate(MuseInstance& m, SupportState& st) {
  while (!st.worklist_.empty()) {
    const ArcLabel item = st.worklist_.pop();
    ++st.stats_.pops;
    const auto [i, j, a] = item;
    if (st.trace_) *st.trace_ << "POP (" << i << ',' << j << ") " << a << '\n';
    for (LabelId b : st.s_[st.idx(i, j, a)]) {
      int& c = st.counter_[st.idx(j, i, b)];
      --c;
      ++st.stats_.counter_decrements;
      if (c == 0 && !st.marked_[st.idx(j, i, b)]) st.enqueue(j, i, b);
    }
    st.update_support_sets(m, item);
  }
}

/// Marks and enqueues the given [(i,j),a] items, then propagates.
/// Seeds already marked are skipped.
inline void propagate_from(MuseInstance& m, SupportState& st, std::span<const ArcLabel> seeds) {
  for (const auto& s : seeds) {
    if (s.i < 0 || s.i >= st.n_ || s.j < 0 || s.j >= st.n_ || !m.share_segment(s.i, s.j)) {
      throw Error("seed references unknown pair (" + std::to_string(s.i) + "," + std::to_string(s.j) + ")");
    }
    if (s.a < 0 || s.a >= st.l_) throw Error("seed references unknown label " + std::to_string(s.a));
  }
  for (const auto& s : seeds) {
    if (!st.marked_[st.idx(s.i, s.j, s.a)]) st.enqueue(s.i, s.j, s.a);
  }
  propagate(m, st);
}

struct MuseAcResult {
  MuseInstance instance;
  SupportState state;
};

/// MUSE AC-1: prunes every label that lacks arc support in all segments
/// containing its node. Expects node consistency to have been applied.
inline MuseAcResult muse_ac1(MuseInstance m, const MuseAcOptions& opts = {}) {
  SupportState st = initialize_support(m, opts);
  propagate(m, st);
  return {std::move(m), std::move(st)};
}

/// Naive fixpoint of MUSE arc consistency over explicitly enumerated segments.
/// Test oracle.
inline MuseInstance oracle_muse_arc_fixpoint(MuseInstance m) {
  const auto segments = enumerate_segments(m);
  CspInstance& csp = m.csp();
  auto supported_in = [&csp](const Segment& seg, NodeId i, LabelId a) {
    for (NodeId j : seg.nodes) {
      if (j == i) continue;
      bool found = false;
      for (LabelId b : csp.domain(j).labels()) {
        if (csp.r2(i, a, j, b)) {
          found = true;
          break;
        }
      }
      if (!found) return false;
    }
    return true;
  };
  bool changed = true;
  while (changed) {
    changed = false;
    for (NodeId i = 0; i < csp.num_nodes(); ++i) {
      for (LabelId a : csp.domain(i).labels()) {
        bool ok = false;
        for (const auto& seg : segments) {
          if (seg.contains(i) && supported_in(seg, i, a)) {
            ok = true;
            break;
          }
        }
        if (!ok) {
          csp.domain(i).erase(a);
          changed = true;
        }
      }
    }
  }
  return m;
}

/// Segment-relative fixpoint over enumerated segments: a keeps segment σ only
/// if every other node j of σ has a compatible b that itself survives in some
/// segment containing both i and j. Test oracle; it is what the pair-level
/// bookkeeping of MUSE AC-1 approximates, and it can prune more than the
/// label-level fixpoint above.
inline MuseInstance oracle_segment_support_fixpoint(MuseInstance m) {
  const auto segments = enumerate_segments(m);
  CspInstance& csp = m.csp();
  const int n = csp.num_nodes();
  const int l = csp.num_labels();
  const int ns = static_cast<int>(segments.size());
  auto id = [n, l](int s, NodeId i, LabelId a) {
    return (static_cast<std::size_t>(s) * n + i) * l + a;
  };
  std::vector<char> ok(static_cast<std::size_t>(ns) * n * l, 0);
  for (int s = 0; s < ns; ++s) {
    for (NodeId i : segments[s].nodes) {
      for (LabelId a : csp.domain(i).labels()) ok[id(s, i, a)] = 1;
    }
  }
  auto alive_with = [&](NodeId i, NodeId j, LabelId b) {
    for (int t = 0; t < ns; ++t) {
      if (ok[id(t, j, b)] && segments[t].contains(i)) return true;
    }
    return false;
  };
  bool changed = true;
  while (changed) {
    changed = false;
    for (int s = 0; s < ns; ++s) {
      for (NodeId i : segments[s].nodes) {
        for (LabelId a = 0; a < l; ++a) {
          if (!ok[id(s, i, a)]) continue;
          for (NodeId j : segments[s].nodes) {
            if (j == i) continue;
            bool found = false;
            for (LabelId b = 0; b < l && !found; ++b) found = csp.r2(i, a, j, b) && alive_with(i, j, b);
            if (!found) {
              ok[id(s, i, a)] = 0;
              changed = true;
              break;
            }
          }
        }
      }
    }
  }
  for (NodeId i = 0; i < n; ++i) {
    for (LabelId a : csp.domain(i).labels()) {
      bool any = false;
      for (int s = 0; s < ns && !any; ++s) any = ok[id(s, i, a)] != 0;
      if (!any) csp.domain(i).erase(a);
    }
  }
  return m;
}

}  // namespace musecsp
