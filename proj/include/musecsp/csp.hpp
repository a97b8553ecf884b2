#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <utility>
#include <vector>

#include "musecsp/error.hpp"

namespace musecsp {

using NodeId = int;
using LabelId = int;

/// Discipline of the propagation worklist. The fixpoint does not depend on it;
/// tests run both to check that.
enum class QueueOrder { fifo, lifo };

/// A FIFO/LIFO queue selected at runtime.
template <typename T>
class Worklist {
 public:
  explicit Worklist(QueueOrder order = QueueOrder::fifo) : order_(order) {}

  void push(const T& item) { items_.push_back(item); }
  bool empty() const { return items_.empty(); }
  std::size_t size() const { return items_.size(); }

  T pop() {
    T item;
    if (order_ == QueueOrder::fifo) {
      item = items_.front();
      items_.pop_front();
    } else {
      item = items_.back();
      items_.pop_back();
    }
    return item;
  }

 private:
  QueueOrder order_;
  std::deque<T> items_;
};

/// Subset of the global label set {0..l-1}. Iteration follows insertion order.
class Domain {
 public:
  Domain() = default;
  explicit Domain(int num_labels) : member_(static_cast<std::size_t>(num_labels), 0) {}

  static Domain full(int num_labels) {
    Domain d(num_labels);
    for (LabelId a = 0; a < num_labels; ++a) d.insert(a);
    return d;
  }

  bool contains(LabelId a) const {
    return a >= 0 && a < static_cast<LabelId>(member_.size()) && member_[a];
  }

  void insert(LabelId a) {
    if (contains(a)) return;
    if (a < 0 || a >= static_cast<LabelId>(member_.size())) {
      throw Error("label " + std::to_string(a) + " outside the label set");
    }
    member_[a] = 1;
    if (std::find(order_.begin(), order_.end(), a) == order_.end()) order_.push_back(a);
    ++size_;
  }

  bool erase(LabelId a) {
    if (!contains(a)) return false;
    member_[a] = 0;
    --size_;
    return true;
  }

  void clear() {
    std::fill(member_.begin(), member_.end(), 0);
    order_.clear();
    size_ = 0;
  }

  int size() const { return size_; }
  bool empty() const { return size_ == 0; }
  int capacity() const { return static_cast<int>(member_.size()); }

  /// Current members in insertion order.
  std::vector<LabelId> labels() const {
    std::vector<LabelId> out;
    out.reserve(static_cast<std::size_t>(size_));
    for (LabelId a : order_) {
      if (member_[a]) out.push_back(a);
    }
    return out;
  }

  /// Set equality; insertion order is ignored.
  friend bool operator==(const Domain& x, const Domain& y) { return x.member_ == y.member_; }

 private:
  std::vector<char> member_;
  std::vector<LabelId> order_;
  int size_ = 0;
};

/// Finite-domain binary CSP: nodes 0..n-1, labels 0..l-1, unary table r1,
/// symmetric binary table r2 and a symmetric arc set without self loops.
class CspInstance {
 public:
  CspInstance() = default;

  /// Full domains, all-true r1/r2, complete arc set.
  CspInstance(int num_nodes, int num_labels)
      : n_(num_nodes),
        l_(num_labels),
        domains_(static_cast<std::size_t>(num_nodes), Domain::full(num_labels)),
        r1_(static_cast<std::size_t>(num_nodes) * num_labels, 1),
        r2_(static_cast<std::size_t>(num_nodes) * num_labels * num_nodes * num_labels, 1),
        arc_(static_cast<std::size_t>(num_nodes) * num_nodes, 0),
        neighbors_(static_cast<std::size_t>(num_nodes)) {
    if (num_nodes < 0 || num_labels < 0) throw Error("negative instance size");
    for (NodeId i = 0; i < n_; ++i) {
      for (NodeId j = 0; j < n_; ++j) {
        if (i != j) {
          arc_[index(i, j)] = 1;
          neighbors_[i].push_back(j);
        }
      }
    }
  }

  int num_nodes() const { return n_; }
  int num_labels() const { return l_; }

  Domain& domain(NodeId i) { return domains_.at(static_cast<std::size_t>(i)); }
  const Domain& domain(NodeId i) const { return domains_.at(static_cast<std::size_t>(i)); }

  bool r1(NodeId i, LabelId a) const { return r1_[static_cast<std::size_t>(i) * l_ + a] != 0; }
  void set_r1(NodeId i, LabelId a, bool v) { r1_[static_cast<std::size_t>(i) * l_ + a] = v; }

  bool r2(NodeId i, LabelId a, NodeId j, LabelId b) const { return r2_[r2_index(i, a, j, b)] != 0; }

  /// Writes both orientations.
  void set_r2(NodeId i, LabelId a, NodeId j, LabelId b, bool v) {
    r2_[r2_index(i, a, j, b)] = v;
    r2_[r2_index(j, b, i, a)] = v;
  }

  bool has_arc(NodeId i, NodeId j) const { return arc_[index(i, j)] != 0; }

  void set_arc(NodeId i, NodeId j, bool v) {
    if (i == j) {
      if (v) throw Error("self arc (" + std::to_string(i) + "," + std::to_string(i) + ")");
      return;
    }
    if (has_arc(i, j) == v) return;
    arc_[index(i, j)] = v;
    arc_[index(j, i)] = v;
    update_neighbors(i, j, v);
    update_neighbors(j, i, v);
  }

  void clear_arcs() {
    std::fill(arc_.begin(), arc_.end(), 0);
    for (auto& nb : neighbors_) nb.clear();
  }

  /// Nodes j with (i,j) an arc, ascending.
  const std::vector<NodeId>& neighbors(NodeId i) const { return neighbors_.at(static_cast<std::size_t>(i)); }

  /// Ordered arc list (both orientations), lexicographic.
  std::vector<std::pair<NodeId, NodeId>> arcs() const {
    std::vector<std::pair<NodeId, NodeId>> out;
    for (NodeId i = 0; i < n_; ++i) {
      for (NodeId j : neighbors_[i]) out.emplace_back(i, j);
    }
    return out;
  }

  bool is_complete() const {
    for (NodeId i = 0; i < n_; ++i) {
      if (static_cast<int>(neighbors_[i].size()) != n_ - 1) return false;
    }
    return true;
  }

  int total_domain_size() const {
    int total = 0;
    for (const auto& d : domains_) total += d.size();
    return total;
  }

  friend bool operator==(const CspInstance& x, const CspInstance& y) {
    return x.n_ == y.n_ && x.l_ == y.l_ && x.domains_ == y.domains_ && x.r1_ == y.r1_ &&
           x.r2_ == y.r2_ && x.arc_ == y.arc_;
  }

 private:
  std::size_t index(NodeId i, NodeId j) const {
    return static_cast<std::size_t>(i) * n_ + static_cast<std::size_t>(j);
  }

  std::size_t r2_index(NodeId i, LabelId a, NodeId j, LabelId b) const {
    return ((static_cast<std::size_t>(i) * l_ + a) * n_ + j) * l_ + b;
  }

  void update_neighbors(NodeId i, NodeId j, bool add) {
    auto& nb = neighbors_[i];
    auto it = std::lower_bound(nb.begin(), nb.end(), j);
    if (add) {
      nb.insert(it, j);
    } else if (it != nb.end() && *it == j) {
      nb.erase(it);
    }
  }

  int n_ = 0;
  int l_ = 0;
  std::vector<Domain> domains_;
  std::vector<std::uint8_t> r1_;
  std::vector<std::uint8_t> r2_;
  std::vector<std::uint8_t> arc_;
  std::vector<std::vector<NodeId>> neighbors_;
};

/// True when at least one domain is empty.
inline bool is_wiped_out(const CspInstance& csp) {
  for (NodeId i = 0; i < csp.num_nodes(); ++i) {
    if (csp.domain(i).empty()) return true;
  }
  return false;
}

/// True when every domain is empty.
inline bool is_totally_wiped_out(const CspInstance& csp) { return csp.total_domain_size() == 0; }

/// One pass of L_i := L_i ∩ {a | r1(i,a)}.
inline CspInstance enforce_node_consistency(CspInstance csp) {
  for (NodeId i = 0; i < csp.num_nodes(); ++i) {
    for (LabelId a : csp.domain(i).labels()) {
      if (!csp.r1(i, a)) csp.domain(i).erase(a);
    }
  }
  return csp;
}

/// Counts of elementary AC-4 steps, for complexity checks.
struct Ac4Stats {
  long long counter_decrements = 0;
  long long pops = 0;
  long long removals = 0;
};

/// AC-4 arc consistency. Expects a node-consistent instance.
inline CspInstance ac4(CspInstance csp, QueueOrder order = QueueOrder::fifo, Ac4Stats* stats = nullptr) {
  const int n = csp.num_nodes();
  const int l = csp.num_labels();
  auto pair_label = [n, l](NodeId i, NodeId j, LabelId a) {
    return (static_cast<std::size_t>(i) * n + j) * l + a;
  };
  auto node_label = [l](NodeId i, LabelId a) { return static_cast<std::size_t>(i) * l + a; };

  std::vector<int> counter(static_cast<std::size_t>(n) * n * l, 0);
  std::vector<std::vector<std::pair<NodeId, LabelId>>> supported(static_cast<std::size_t>(n) * l);
  std::vector<char> removed(static_cast<std::size_t>(n) * l, 0);
  Worklist<std::pair<NodeId, LabelId>> list(order);
  Ac4Stats local;

  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j : csp.neighbors(i)) {
      const auto dom_j = csp.domain(j).labels();
      for (LabelId a : csp.domain(i).labels()) {
        int total = 0;
        for (LabelId b : dom_j) {
          if (csp.r2(i, a, j, b)) {
            ++total;
            supported[node_label(j, b)].emplace_back(i, a);
          }
        }
        if (total == 0 && !removed[node_label(i, a)]) {
          csp.domain(i).erase(a);
          list.push({i, a});
          removed[node_label(i, a)] = 1;
          ++local.removals;
        }
        counter[pair_label(i, j, a)] = total;
      }
    }
  }

  while (!list.empty()) {
    auto [i, a] = list.pop();
    ++local.pops;
    for (auto [j, b] : supported[node_label(i, a)]) {
      auto& c = counter[pair_label(j, i, b)];
      --c;
      ++local.counter_decrements;
      if (c == 0 && !removed[node_label(j, b)]) {
        csp.domain(j).erase(b);
        list.push({j, b});
        removed[node_label(j, b)] = 1;
        ++local.removals;
      }
    }
  }
  if (stats) *stats = local;
  return csp;
}

/// Naive fixpoint of the arc-consistency definition: delete any label lacking
/// support on some arc until nothing changes. Test oracle; cubic-ish and slow.
inline CspInstance oracle_arc_fixpoint(CspInstance csp) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (NodeId i = 0; i < csp.num_nodes(); ++i) {
      for (LabelId a : csp.domain(i).labels()) {
        for (NodeId j : csp.neighbors(i)) {
          bool supported = false;
          for (LabelId b : csp.domain(j).labels()) {
            if (csp.r2(i, a, j, b)) {
              supported = true;
              break;
            }
          }
          if (!supported) {
            csp.domain(i).erase(a);
            changed = true;
            break;
          }
        }
      }
    }
  }
  return csp;
}

/// Domains of two instances, compared as sets.
inline bool same_domains(const CspInstance& x, const CspInstance& y) {
  if (x.num_nodes() != y.num_nodes()) return false;
  for (NodeId i = 0; i < x.num_nodes(); ++i) {
    if (!(x.domain(i) == y.domain(i))) return false;
  }
  return true;
}

}  // namespace musecsp
