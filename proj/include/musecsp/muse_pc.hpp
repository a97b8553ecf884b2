#pragma once

#include <algorithm>
#include <ostream>
#include <vector>

#include "musecsp/csp.hpp"
#include "musecsp/muse_ac.hpp"
#include "musecsp/muse_graph.hpp"

namespace musecsp {

/// [(i,j), k, a, b]: R2(i,a,j,b) considered for segments containing i, j, k.
struct PathItem {
  NodeId i = 0;
  NodeId j = 0;
  NodeId k = 0;
  LabelId a = 0;
  LabelId b = 0;

  friend bool operator==(const PathItem&, const PathItem&) = default;
};

struct MusePcStats {
  long long counter_decrements = 0;
  long long support_removals = 0;
  long long local_removals = 0;
  long long pops = 0;
  long long falsified = 0;  // symmetric pairs set to 0
  int min_counter = 0;      // lowest counter value ever observed
};

struct MusePcOptions {
  QueueOrder order = QueueOrder::fifo;
  std::ostream* trace = nullptr;  // "POP (i,j) k a b" / "FALSIFY i a j b" lines
  bool dedup = true;              // false: decrement on every S hit, as printed
};

/// MUSE PC-1 bookkeeping, dense over ((i,j),k,a,b). Only quintuples with
/// a in L_i, b in L_j, R2(i,a,j,b) initially true and (i,k),(j,k) in E exist.
/// Support members are stored as the far node x of (i,x); in
/// Prev-/Next-Support[(i,j),k,a,b] the member k stands for the edge between i
/// and k, the member j for the edge between j and k.
class PathSupportState {
 public:
  PathSupportState() = default;
  PathSupportState(int num_nodes, int num_labels, QueueOrder order)
      : n_(num_nodes),
        l_(num_labels),
        exists_(size5(), 0),
        counter_(size5(), 0),
        s_(size5()),
        marked_(size5(), 0),
        withdrawn_(size5() * static_cast<std::size_t>(num_labels), 0),
        prev_support_(size5()),
        next_support_(size5()),
        local_prev_(size4()),
        local_next_(size4()),
        worklist_(order) {}

  int num_nodes() const { return n_; }
  int num_labels() const { return l_; }

  bool exists(NodeId i, NodeId j, NodeId k, LabelId a, LabelId b) const { return exists_[idx(i, j, k, a, b)] != 0; }
  int counter(NodeId i, NodeId j, NodeId k, LabelId a, LabelId b) const { return counter_[idx(i, j, k, a, b)]; }
  bool marked(NodeId i, NodeId j, NodeId k, LabelId a, LabelId b) const { return marked_[idx(i, j, k, a, b)] != 0; }
  /// (j,b) pairs encoded as j * num_labels + b.
  const std::vector<int>& supports(NodeId i, NodeId j, NodeId k, LabelId a, LabelId b) const {
    return s_[idx(i, j, k, a, b)];
  }
  const std::vector<NodeId>& prev_support(NodeId i, NodeId j, NodeId k, LabelId a, LabelId b) const {
    return prev_support_[idx(i, j, k, a, b)];
  }
  const std::vector<NodeId>& next_support(NodeId i, NodeId j, NodeId k, LabelId a, LabelId b) const {
    return next_support_[idx(i, j, k, a, b)];
  }
  const std::vector<NodeId>& local_prev(NodeId i, NodeId j, LabelId a, LabelId b) const {
    return local_prev_[idx4(i, j, a, b)];
  }
  const std::vector<NodeId>& local_next(NodeId i, NodeId j, LabelId a, LabelId b) const {
    return local_next_[idx4(i, j, a, b)];
  }

  const MusePcStats& stats() const { return stats_; }
  bool queue_empty() const { return worklist_.empty(); }

  friend PathSupportState initialize_path_support(MuseInstance& m, const MusePcOptions& opts);
  friend void propagate_paths(MuseInstance& m, PathSupportState& st);

 private:
  std::size_t size4() const { return static_cast<std::size_t>(n_) * n_ * l_ * l_; }
  std::size_t size5() const { return size4() * static_cast<std::size_t>(n_); }
  std::size_t idx4(NodeId i, NodeId j, LabelId a, LabelId b) const {
    return ((static_cast<std::size_t>(i) * n_ + j) * l_ + a) * l_ + b;
  }
  std::size_t idx(NodeId i, NodeId j, NodeId k, LabelId a, LabelId b) const {
    return (((static_cast<std::size_t>(i) * n_ + j) * n_ + k) * l_ + a) * l_ + b;
  }

  // Enqueues [(i,j),x,a,b] and [(j,i),x,b,a] unless already marked.
  void enqueue_pair(NodeId i, NodeId j, NodeId x, LabelId a, LabelId b) {
    if (marked_[idx(i, j, x, a, b)]) return;
    marked_[idx(i, j, x, a, b)] = 1;
    worklist_.push({i, j, x, a, b});
    if (!marked_[idx(j, i, x, b, a)]) {
      marked_[idx(j, i, x, b, a)] = 1;
      worklist_.push({j, i, x, b, a});
    }
  }

  void falsify(MuseInstance& m, NodeId i, LabelId a, NodeId j, LabelId b) {
    if (!m.csp().r2(i, a, j, b)) return;
    m.csp().set_r2(i, a, j, b, false);
    ++stats_.falsified;
    if (trace_) *trace_ << "FALSIFY " << i << ' ' << a << ' ' << j << ' ' << b << '\n';
  }

  void update_support_sets(MuseInstance& m, const PathItem& item);

  int n_ = 0;
  int l_ = 0;
  std::vector<char> exists_;
  std::vector<int> counter_;
  std::vector<std::vector<int>> s_;
  std::vector<char> marked_;
  std::vector<char> withdrawn_;  // (counter, supporting label) already decremented
  std::vector<std::vector<NodeId>> prev_support_;
  std::vector<std::vector<NodeId>> next_support_;
  std::vector<std::vector<NodeId>> local_prev_;
  std::vector<std::vector<NodeId>> local_next_;
  Worklist<PathItem> worklist_;
  MusePcStats stats_;
  MusePcOptions options_;
  std::ostream* trace_ = nullptr;
};

inline PathSupportState initialize_path_support(MuseInstance& m, const MusePcOptions& opts) {
  const CspInstance& csp = m.csp();
  const int n = csp.num_nodes();
  PathSupportState st(n, csp.num_labels(), opts.order);
  st.trace_ = opts.trace;
  st.options_ = opts;

  auto in_e = [&m](NodeId x, NodeId y) { return m.share_segment(x, y); };
  std::vector<std::vector<LabelId>> dom(static_cast<std::size_t>(n));
  for (NodeId i = 0; i < n; ++i) dom[i] = csp.domain(i).labels();

  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j : csp.neighbors(i)) {
      for (LabelId a : dom[i]) {
        for (LabelId b : dom[j]) {
          if (!csp.r2(i, a, j, b)) continue;
          for (NodeId k = 0; k < n; ++k) {
            if (k == i || k == j || !in_e(i, k) || !in_e(j, k)) continue;
            const std::size_t q = st.idx(i, j, k, a, b);
            st.exists_[q] = 1;
            int total = 0;
            for (LabelId c : dom[k]) {
              if (csp.r2(i, a, k, c) && csp.r2(k, c, j, b)) {
                ++total;
                st.s_[st.idx(i, k, j, a, c)].push_back(j * st.l_ + b);
              }
            }
            if (total == 0) {
              st.marked_[q] = 1;
              st.worklist_.push({i, j, k, a, b});
            }
            st.counter_[q] = total;

            auto& ps = st.prev_support_[q];
            for (NodeId x : m.prev_edge(k)) {
              if (x == kStart) {
                if (m.reaches(k, i) && m.reaches(k, j)) ps.push_back(kStart);
              } else if (x == i) {
                ps.push_back(k);
              } else if (x == j || (in_e(i, x) && in_e(j, x))) {
                ps.push_back(x);
              }
            }
            auto& ns = st.next_support_[q];
            for (NodeId x : m.next_edge(k)) {
              if (x == kEnd) {
                if (m.reaches(i, k) && m.reaches(j, k)) ns.push_back(kEnd);
              } else if (x == i) {
                ns.push_back(k);
              } else if (x == j || (in_e(i, x) && in_e(j, x))) {
                ns.push_back(x);
              }
            }
          }

          auto& lp = st.local_prev_[st.idx4(i, j, a, b)];
          for (NodeId x : m.prev_edge(i)) {
            if (x == kStart) {
              if (m.reaches(i, j)) lp.push_back(kStart);
            } else if (x == j || in_e(j, x)) {
              lp.push_back(x);
            }
          }
          auto& ln = st.local_next_[st.idx4(i, j, a, b)];
          for (NodeId x : m.next_edge(i)) {
            if (x == kEnd) {
              if (m.reaches(j, i)) ln.push_back(kEnd);
            } else if (x == j || in_e(j, x)) {
              ln.push_back(x);
            }
          }
        }
      }
    }
  }
  return st;
}

inline void PathSupportState::update_support_sets(MuseInstance& m, const PathItem& item) {
  const auto [i, j, k, a, b] = item;
  auto erase_member = [](std::vector<NodeId>& set, NodeId x) {
    auto it = std::find(set.begin(), set.end(), x);
    if (it == set.end()) return false;
    set.erase(it);
    return true;
  };

  auto& prev = prev_support_[idx(i, j, k, a, b)];
  for (NodeId x : std::vector<NodeId>(prev)) {
    if (x == j || x == k || x == kStart) continue;
    erase_member(prev, x);
    auto& other = next_support_[idx(i, j, x, a, b)];
    erase_member(other, k);
    stats_.support_removals += 2;
    if (other.empty()) enqueue_pair(i, j, x, a, b);
  }

  auto& next = next_support_[idx(i, j, k, a, b)];
  for (NodeId x : std::vector<NodeId>(next)) {
    if (x == j || x == k || x == kEnd) continue;
    erase_member(next, x);
    auto& other = prev_support_[idx(i, j, x, a, b)];
    erase_member(other, k);
    stats_.support_removals += 2;
    if (other.empty()) enqueue_pair(i, j, x, a, b);
  }

  auto& lprev = local_prev_[idx4(i, j, a, b)];
  auto& lnext = local_next_[idx4(i, j, a, b)];
  if (m.has_edge(k, i) && erase_member(lprev, k)) ++stats_.local_removals;
  if (lprev.empty()) {
    falsify(m, i, a, j, b);
    for (NodeId x : std::vector<NodeId>(lnext)) {
      if (x == j || x == k || x == kEnd) continue;
      erase_member(lnext, x);
      ++stats_.local_removals;
      enqueue_pair(i, j, x, a, b);
    }
  }

  if (m.has_edge(i, k) && erase_member(lnext, k)) ++stats_.local_removals;
  if (lnext.empty()) {
    falsify(m, i, a, j, b);
    for (NodeId x : std::vector<NodeId>(lprev)) {
      if (x == j || x == k || x == kStart) continue;
      erase_member(lprev, x);
      ++stats_.local_removals;
      enqueue_pair(i, j, x, a, b);
    }
  }
}

inline void propagate_paths(MuseInstance& m, PathSupportState& st) {
  const int l = st.l_;
  while (!st.worklist_.empty()) {
    const PathItem item = st.worklist_.pop();
    ++st.stats_.pops;
    const auto [i, j, k, a, b] = item;
    if (st.trace_) *st.trace_ << "POP (" << i << ',' << j << ") " << k << ' ' << a << ' ' << b << '\n';
    for (int code : st.s_[st.idx(i, j, k, a, b)]) {
      const LabelId c = code % l;
      const std::size_t fq = st.idx(i, k, j, a, c);
      const std::size_t bq = st.idx(k, i, j, c, a);
      // b can lose its support role through either R2(i,a,j,b) or R2(k,c,j,b);
      // count it once.
      if (st.options_.dedup) {
        char& fw = st.withdrawn_[fq * l + b];
        char& bw = st.withdrawn_[bq * l + b];
        if (!fw) {
          fw = 1;
          --st.counter_[fq];
          ++st.stats_.counter_decrements;
        }
        if (!bw) {
          bw = 1;
          --st.counter_[bq];
          ++st.stats_.counter_decrements;
        }
      } else {
        --st.counter_[fq];
        --st.counter_[bq];
        st.stats_.counter_decrements += 2;
      }
      st.stats_.min_counter = std::min({st.stats_.min_counter, st.counter_[fq], st.counter_[bq]});
      if (st.counter_[fq] == 0 && !st.marked_[fq]) st.enqueue_pair(i, k, j, a, c);
    }
    st.update_support_sets(m, item);
  }
}

struct MusePcResult {
  MuseInstance instance;
  PathSupportState state;
};

/// MUSE PC-1: falsifies R2 entries that lack path support in every segment
/// containing both nodes. Domains are left alone.
inline MusePcResult muse_pc1(MuseInstance m, const MusePcOptions& opts = {}) {
  PathSupportState st = initialize_path_support(m, opts);
  propagate_paths(m, st);
  return {std::move(m), std::move(st)};
}

/// R2 restricted to current domains on pairs that share a segment.
inline bool same_relation(const MuseInstance& x, const MuseInstance& y) {
  const CspInstance& cx = x.csp();
  const CspInstance& cy = y.csp();
  if (cx.num_nodes() != cy.num_nodes() || cx.num_labels() != cy.num_labels()) return false;
  if (!same_domains(cx, cy)) return false;
  for (NodeId i = 0; i < cx.num_nodes(); ++i) {
    for (NodeId j : cx.neighbors(i)) {
      for (LabelId a : cx.domain(i).labels()) {
        for (LabelId b : cx.domain(j).labels()) {
          if (cx.r2(i, a, j, b) != cy.r2(i, a, j, b)) return false;
        }
      }
    }
  }
  return true;
}

/// Naive fixpoint of MUSE path consistency over enumerated segments: R2(i,a,j,b)
/// survives if some segment containing i and j gives every third node k of that
/// segment a label c with R2(i,a,k,c) and R2(k,c,j,b). Test oracle.
inline MuseInstance oracle_muse_path_fixpoint(MuseInstance m) {
  const auto segments = enumerate_segments(m);
  CspInstance& csp = m.csp();
  const int n = csp.num_nodes();
  std::vector<std::vector<LabelId>> dom(static_cast<std::size_t>(n));
  for (NodeId i = 0; i < n; ++i) dom[i] = csp.domain(i).labels();

  auto supported_in = [&](const Segment& seg, NodeId i, LabelId a, NodeId j, LabelId b) {
    for (NodeId k : seg.nodes) {
      if (k == i || k == j) continue;
      bool found = false;
      for (LabelId c : dom[k]) {
        if (csp.r2(i, a, k, c) && csp.r2(k, c, j, b)) {
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
    for (NodeId i = 0; i < n; ++i) {
      for (NodeId j : csp.neighbors(i)) {
        if (j < i) continue;
        for (LabelId a : dom[i]) {
          for (LabelId b : dom[j]) {
            if (!csp.r2(i, a, j, b)) continue;
            bool ok = false;
            for (const auto& seg : segments) {
              if (seg.contains(i) && seg.contains(j) && supported_in(seg, i, a, j, b)) {
                ok = true;
                break;
              }
            }
            if (!ok) {
              csp.set_r2(i, a, j, b, false);
              changed = true;
            }
          }
        }
      }
    }
  }
  return m;
}

/// Segment-relative fixpoint: R2(i,a,j,b) keeps segment σ only if every third
/// node k of σ has a c whose entries R2(i,a,k,c) and R2(k,c,j,b) each survive
/// in some segment holding i, j and k. Test oracle; it can falsify more than
/// the fixpoint above, which reads the relation globally.
inline MuseInstance oracle_segment_path_fixpoint(MuseInstance m) {
  const auto segments = enumerate_segments(m);
  CspInstance& csp = m.csp();
  const int n = csp.num_nodes();
  const int l = csp.num_labels();
  const int ns = static_cast<int>(segments.size());
  auto id = [n, l](int s, NodeId i, LabelId a, NodeId j, LabelId b) {
    return (((static_cast<std::size_t>(s) * n + i) * l + a) * n + j) * l + b;
  };
  std::vector<char> ok(static_cast<std::size_t>(ns) * n * l * n * l, 0);
  for (int s = 0; s < ns; ++s) {
    for (NodeId i : segments[s].nodes) {
      for (NodeId j : segments[s].nodes) {
        if (i == j) continue;
        for (LabelId a : csp.domain(i).labels()) {
          for (LabelId b : csp.domain(j).labels()) ok[id(s, i, a, j, b)] = csp.r2(i, a, j, b);
        }
      }
    }
  }
  auto alive_with = [&](NodeId i, LabelId a, NodeId j, LabelId b, NodeId k) {
    for (int t = 0; t < ns; ++t) {
      if (ok[id(t, i, a, j, b)] && segments[t].contains(k)) return true;
    }
    return false;
  };
  bool changed = true;
  while (changed) {
    changed = false;
    for (int s = 0; s < ns; ++s) {
      for (NodeId i : segments[s].nodes) {
        for (NodeId j : segments[s].nodes) {
          if (j <= i) continue;
          for (LabelId a : csp.domain(i).labels()) {
            for (LabelId b : csp.domain(j).labels()) {
              if (!ok[id(s, i, a, j, b)]) continue;
              for (NodeId k : segments[s].nodes) {
                if (k == i || k == j) continue;
                bool found = false;
                for (LabelId c : csp.domain(k).labels()) {
                  if (alive_with(i, a, k, c, j) && alive_with(k, c, j, b, i)) {
                    found = true;
                    break;
                  }
                }
                if (!found) {
                  ok[id(s, i, a, j, b)] = 0;
                  ok[id(s, j, b, i, a)] = 0;
                  changed = true;
                  break;
                }
              }
            }
          }
        }
      }
    }
  }
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j : csp.neighbors(i)) {
      if (j < i) continue;
      for (LabelId a : csp.domain(i).labels()) {
        for (LabelId b : csp.domain(j).labels()) {
          bool any = false;
          for (int s = 0; s < ns && !any; ++s) any = ok[id(s, i, a, j, b)] != 0;
          if (!any) csp.set_r2(i, a, j, b, false);
        }
      }
    }
  }
  return m;
}

/// Path consistency of a plain CSP over all node triples (complete-graph
/// convention), as a naive fixpoint. Test oracle for the single-segment case.
inline CspInstance oracle_path_fixpoint(CspInstance csp) {
  const int n = csp.num_nodes();
  bool changed = true;
  while (changed) {
    changed = false;
    for (NodeId i = 0; i < n; ++i) {
      for (NodeId j = i + 1; j < n; ++j) {
        if (!csp.has_arc(i, j)) continue;
        for (LabelId a : csp.domain(i).labels()) {
          for (LabelId b : csp.domain(j).labels()) {
            if (!csp.r2(i, a, j, b)) continue;
            for (NodeId k = 0; k < n; ++k) {
              if (k == i || k == j || !csp.has_arc(i, k) || !csp.has_arc(j, k)) continue;
              bool found = false;
              for (LabelId c : csp.domain(k).labels()) {
                if (csp.r2(i, a, k, c) && csp.r2(k, c, j, b)) {
                  found = true;
                  break;
                }
              }
              if (!found) {
                csp.set_r2(i, a, j, b, false);
                changed = true;
                break;
              }
            }
          }
        }
      }
    }
  }
  return csp;
}

/// Alternates MUSE AC-1 and MUSE PC-1 until neither changes domains or R2.
/// AC runs first unless pc_first is set.
inline MuseInstance muse_ac_pc_fixpoint(MuseInstance m, QueueOrder order = QueueOrder::fifo, bool pc_first = false) {
  if (pc_first) m = muse_pc1(std::move(m), {order}).instance;
  for (;;) {
    MuseInstance before = m;
    m = muse_ac1(std::move(m), {order}).instance;
    m = muse_pc1(std::move(m), {order}).instance;
    if (same_relation(before, m)) return m;
  }
}

}  // namespace musecsp
