#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "musecsp/csp.hpp"
#include "musecsp/error.hpp"
#include "musecsp/muse_graph.hpp"

namespace musecsp {

/// A CSP whose nodes carry names; nodes with equal names in different CSPs
/// are candidates for sharing.
struct NamedCsp {
  CspInstance csp;
  std::vector<std::string> names;  // per node id
};

struct MergeViolation {
  std::string name;
  int condition = 0;  // 1 domains, 2 unary, 3 binary
  std::string detail;
};

struct MergeCompatibility {
  std::vector<MergeViolation> violations;
  bool ok() const { return violations.empty(); }
};

namespace detail {

inline std::map<std::string, NodeId> name_index(const NamedCsp& c) {
  if (static_cast<int>(c.names.size()) != c.csp.num_nodes()) throw Error("name list does not match node count");
  std::map<std::string, NodeId> out;
  for (NodeId i = 0; i < c.csp.num_nodes(); ++i) {
    const std::string& nm = c.names[static_cast<std::size_t>(i)];
    if (nm.empty() || nm.find('\'') != std::string::npos) throw Error("bad node name '" + nm + "'");
    if (!out.emplace(nm, i).second) throw Error("duplicate node name '" + nm + "'");
  }
  return out;
}

}  // namespace detail

/// Checks that every shared name has the same domain, unary and binary
/// constraints in each CSP that contains it.
inline MergeCompatibility check_mergeable(const std::vector<NamedCsp>& csps) {
  MergeCompatibility out;
  std::vector<std::map<std::string, NodeId>> idx;
  for (const auto& c : csps) idx.push_back(detail::name_index(c));
  for (std::size_t x = 0; x < csps.size(); ++x) {
    for (std::size_t y = x + 1; y < csps.size(); ++y) {
      const CspInstance& cx = csps[x].csp;
      const CspInstance& cy = csps[y].csp;
      const std::string pair = " (csp " + std::to_string(x) + " vs " + std::to_string(y) + ")";
      for (const auto& [name, kx] : idx[x]) {
        auto it = idx[y].find(name);
        if (it == idx[y].end()) continue;
        const NodeId ky = it->second;
        const auto dom = cx.domain(kx).labels();
        if (dom != cy.domain(ky).labels()) {
          out.violations.push_back({name, 1, "domains differ" + pair});
          continue;
        }
        for (LabelId a : dom) {
          if (cx.r1(kx, a) != cy.r1(ky, a)) {
            out.violations.push_back({name, 2, "R1 differs on label " + std::to_string(a) + pair});
            break;
          }
        }
        for (const auto& [other, ix] : idx[x]) {
          if (other == name) continue;
          auto jt = idx[y].find(other);
          if (jt == idx[y].end()) continue;
          const NodeId iy = jt->second;
          bool differs = false;
          for (LabelId a : dom) {
            for (LabelId b : cx.domain(ix).labels()) {
              if (b >= cy.num_labels() || cx.r2(kx, a, ix, b) != cy.r2(ky, a, iy, b)) differs = true;
            }
          }
          if (differs) out.violations.push_back({name, 3, "R2 with '" + other + "' differs" + pair});
        }
      }
    }
  }
  return out;
}

/// Node name inside CREATE-DAG: an original name (by ordinal) plus a number
/// of apostrophes. Ordinals -1 / -2 are start / end.
struct DagName {
  int base = 0;
  int primes = 0;
  auto operator<=>(const DagName&) const = default;
};

inline constexpr int kStartName = -1;
inline constexpr int kEndName = -2;

struct CombineStats {
  long long order_steps = 0;
  long long dag_steps = 0;
  bool fallback = false;  // post-check failed, trie used instead
};

/// Orders the node lists so that frequent names come first, recursively per
/// group of segments sharing a prefix. Segments must already carry start
/// first and end last.
class SigmaOrder {
 public:
  SigmaOrder(const std::vector<std::vector<int>>& sigma, CombineStats* stats) : stats_(stats) {
    for (const auto& s : sigma) {
      std::set<int> seen(s.begin(), s.end());
      for (int x : seen) ++count_[x];
      for (int x : s) first_.emplace(x, static_cast<int>(first_.size()));
    }
  }

  /// i > j in the total order: start largest, end smallest, then more
  /// occurrences, then lower ordinal.
  bool greater(int i, int j) const {
    if (i == j) return false;
    if (i == kStartName || j == kEndName) return true;
    if (j == kStartName || i == kEndName) return false;
    const int ci = count_.at(i), cj = count_.at(j);
    if (ci != cj) return ci > cj;
    return first_.at(i) < first_.at(j);
  }

  void run(std::vector<std::vector<int>*> z, int j) {
    std::set<int> u;
    while (!z.empty()) {
      std::set<int> r;
      for (auto* s : z) {
        r.insert(s->begin(), s->end());
        step(s->size());
      }
      int i = pick(r, u, j, true);
      if (i == kStartName) i = pick(r, u, j, false);
      std::vector<std::vector<int>*> s_set, rest;
      for (auto* s : z) {
        step(1);
        (std::find(s->begin(), s->end(), i) != s->end() ? s_set : rest).push_back(s);
      }
      z = std::move(rest);
      if (i != kEndName) {
        for (auto* s : s_set) {
          put_after(*s, i, j);
          u.insert(s->begin(), s->end());
          step(s->size());
        }
        run(s_set, i);
      }
    }
  }

 private:
  // largest x < j in r (minus u when `fresh`); kStartName when none
  int pick(const std::set<int>& r, const std::set<int>& u, int j, bool fresh) {
    int best = kStartName;
    for (int x : r) {
      step(1);
      if (fresh && u.count(x)) continue;
      if (!greater(j, x)) continue;
      if (best == kStartName || greater(x, best)) best = x;
    }
    return best;
  }

  void put_after(std::vector<int>& s, int i, int j) {
    step(s.size());
    s.erase(std::find(s.begin(), s.end(), i));
    s.insert(std::find(s.begin(), s.end(), j) + 1, i);
  }

  void step(std::size_t k) {
    if (stats_) stats_->order_steps += static_cast<long long>(k);
  }

  std::map<int, int> count_;
  std::map<int, int> first_;  // ordinal: first appearance over all segments
  CombineStats* stats_;
};

/// Reorders each node list (given without start/end) for merging.
inline std::vector<std::vector<int>> order_sigma(std::vector<std::vector<int>> sigma, CombineStats* stats = nullptr) {
  for (auto& s : sigma) {
    s.insert(s.begin(), kStartName);
    s.push_back(kEndName);
  }
  SigmaOrder order(sigma, stats);
  std::vector<std::vector<int>*> z;
  for (auto& s : sigma) z.push_back(&s);
  order.run(z, kStartName);
  for (auto& s : sigma) s = std::vector<int>(s.begin() + 1, s.end() - 1);
  return sigma;
}

/// DAG over renamed nodes. Node v stands for original name `names[v].base`.
struct NamedDag {
  std::vector<DagName> names;
  std::vector<Edge> edges;
  std::vector<NodeId> starts;
  std::vector<NodeId> ends;
};

namespace detail {

struct DagBuilder {
  std::map<DagName, std::set<DagName>> next;  // N with next-sets
  std::set<std::pair<DagName, DagName>> g;

  NamedDag finish() const {
    NamedDag out;
    std::map<DagName, NodeId> id;
    for (const auto& [nm, nx] : next) {
      if (nm.base < 0) continue;
      id[nm] = static_cast<NodeId>(out.names.size());
      out.names.push_back(nm);
    }
    for (const auto& [a, b] : g) {
      if (a.base == kStartName && b.base >= 0) {
        out.starts.push_back(id.at(b));
      } else if (b.base == kEndName && a.base >= 0) {
        out.ends.push_back(id.at(a));
      } else if (a.base >= 0 && b.base >= 0) {
        out.edges.emplace_back(id.at(a), id.at(b));
      }
    }
    return out;
  }
};

/// The family of original-name sets of start-to-end paths, or nullopt when
/// the graph is not a DAG.
inline std::optional<std::set<std::set<int>>> path_family(const NamedDag& d) {
  std::vector<std::vector<NodeId>> succ(d.names.size());
  std::vector<int> indeg(d.names.size(), 0);
  for (auto [a, b] : d.edges) {
    succ[static_cast<std::size_t>(a)].push_back(b);
    ++indeg[static_cast<std::size_t>(b)];
  }
  std::vector<NodeId> stack;
  std::size_t seen = 0;
  for (std::size_t v = 0; v < indeg.size(); ++v) {
    if (indeg[v] == 0) stack.push_back(static_cast<NodeId>(v));
  }
  while (!stack.empty()) {
    NodeId v = stack.back();
    stack.pop_back();
    ++seen;
    for (NodeId w : succ[static_cast<std::size_t>(v)]) {
      if (--indeg[static_cast<std::size_t>(w)] == 0) stack.push_back(w);
    }
  }
  if (seen != d.names.size()) return std::nullopt;

  std::set<NodeId> ends(d.ends.begin(), d.ends.end());
  std::set<std::set<int>> out;
  std::vector<int> path;
  std::function<void(NodeId)> walk = [&](NodeId v) {
    path.push_back(d.names[static_cast<std::size_t>(v)].base);
    if (ends.count(v)) out.insert(std::set<int>(path.begin(), path.end()));
    for (NodeId w : succ[static_cast<std::size_t>(v)]) walk(w);
    path.pop_back();
  };
  for (NodeId s : d.starts) walk(s);
  return out;
}

/// One node per distinct prefix; exact by construction.
inline NamedDag trie_dag(const std::vector<std::vector<int>>& sigma) {
  NamedDag out;
  std::map<std::vector<int>, NodeId> node;
  std::map<int, int> clones;
  std::set<Edge> edges;
  std::set<NodeId> starts, ends;
  for (const auto& s : sigma) {
    std::vector<int> prefix;
    NodeId prev = -1;
    for (int x : s) {
      prefix.push_back(x);
      auto [it, fresh] = node.emplace(prefix, static_cast<NodeId>(out.names.size()));
      if (fresh) out.names.push_back({x, clones[x]++});
      if (prev < 0) {
        starts.insert(it->second);
      } else {
        edges.emplace(prev, it->second);
      }
      prev = it->second;
    }
    ends.insert(prev);
  }
  out.edges.assign(edges.begin(), edges.end());
  out.starts.assign(starts.begin(), starts.end());
  out.ends.assign(ends.begin(), ends.end());
  return out;
}

}  // namespace detail

/// Builds a DAG whose start-to-end paths are exactly the given node lists
/// (as sets). Names are ordinals >= 0; each list must be nonempty and
/// duplicate-free.
inline NamedDag create_dag(const std::vector<std::vector<int>>& input, CombineStats* stats = nullptr) {
  for (const auto& s : input) {
    if (s.empty()) throw Error("empty segment");
    if (std::set<int>(s.begin(), s.end()).size() != s.size()) throw Error("segment repeats a node name");
    for (int x : s) {
      if (x < 0) throw Error("negative node ordinal");
    }
  }
  auto step = [stats](std::size_t k) {
    if (stats) stats->dag_steps += static_cast<long long>(k);
  };

  std::vector<std::vector<DagName>> sigma;
  for (const auto& s : order_sigma(input, stats)) {
    std::vector<DagName> row{{kStartName, 0}};
    for (int x : s) row.push_back({x, 0});
    row.push_back({kEndName, 0});
    sigma.push_back(std::move(row));
  }

  detail::DagBuilder b;
  b.next[{kStartName, 0}];
  std::size_t longest = 0;
  for (const auto& s : sigma) longest = std::max(longest, s.size());

  for (std::size_t pos = 1; pos < longest; ++pos) {
    std::vector<char> alive(sigma.size(), 1);
    for (std::size_t x = 0; x < sigma.size(); ++x) {
      step(1);
      if (!alive[x] || sigma[x].size() <= pos) continue;
      const DagName prev = sigma[x][pos - 1];
      const DagName cur = sigma[x][pos];
      if (cur.base == kEndName) {
        b.next[cur];
        b.g.emplace(prev, cur);
        alive[x] = 0;
        continue;
      }
      std::vector<std::size_t> same;
      std::set<DagName> next_set;
      for (std::size_t y = 0; y < sigma.size(); ++y) {
        step(1);
        if (!alive[y] || sigma[y].size() <= pos) continue;
        if (sigma[y][pos - 1] == prev && sigma[y][pos] == cur) {
          same.push_back(y);
          next_set.insert(sigma[y][pos + 1]);
          alive[y] = 0;
        }
      }
      auto found = b.next.find(cur);
      if (found == b.next.end()) {
        b.next[cur] = next_set;
        b.g.emplace(prev, cur);
      } else if (found->second == next_set) {
        b.g.emplace(prev, cur);
      } else {
        DagName clone{cur.base, cur.primes + 1};
        auto it = b.next.find(clone);
        while (it != b.next.end() && it->second != next_set) {
          step(1);
          ++clone.primes;
          it = b.next.find(clone);
        }
        b.next[clone] = next_set;
        auto& pn = b.next[prev];
        if (pn.erase(cur)) pn.insert(clone);
        b.g.emplace(prev, clone);
        for (std::size_t y : same) sigma[y][pos] = clone;
      }
    }
  }

  NamedDag out = b.finish();
  std::set<std::set<int>> want;
  for (const auto& s : input) want.insert(std::set<int>(s.begin(), s.end()));
  auto got = detail::path_family(out);
  if (!got || *got != want) {
    if (stats) stats->fallback = true;
    out = detail::trie_dag(order_sigma(input));
  }
  return out;
}

/// Display name: original plus one apostrophe per clone level.
inline std::string dag_node_name(const std::vector<std::string>& originals, DagName n) {
  return originals.at(static_cast<std::size_t>(n.base)) + std::string(static_cast<std::size_t>(n.primes), '\'');
}

struct CombinedInstance {
  MuseInstance muse;
  std::vector<std::string> names;  // per MUSE node, with apostrophes
};

/// Merges named CSPs into one MUSE instance. Throws Error when the family is
/// not mergeable or label counts differ.
inline CombinedInstance combine_csps(const std::vector<NamedCsp>& csps, CombineStats* stats = nullptr) {
  if (csps.empty()) throw Error("nothing to combine");
  auto compat = check_mergeable(csps);
  if (!compat.ok()) {
    const auto& v = compat.violations.front();
    throw Error("node '" + v.name + "' violates merge condition " + std::to_string(v.condition) + ": " + v.detail);
  }
  const int l = csps.front().csp.num_labels();
  std::map<std::string, int> ordinal;
  std::vector<std::string> originals;
  std::vector<std::vector<int>> sigma;
  // where each name lives: (csp, node)
  std::vector<std::pair<std::size_t, NodeId>> home;
  for (std::size_t x = 0; x < csps.size(); ++x) {
    if (csps[x].csp.num_labels() != l) throw Error("label counts differ between CSPs");
    std::vector<int> row;
    for (NodeId i = 0; i < csps[x].csp.num_nodes(); ++i) {
      const std::string& nm = csps[x].names[static_cast<std::size_t>(i)];
      auto [it, fresh] = ordinal.emplace(nm, static_cast<int>(originals.size()));
      if (fresh) {
        originals.push_back(nm);
        home.emplace_back(x, i);
      }
      row.push_back(it->second);
    }
    sigma.push_back(std::move(row));
  }
  std::vector<std::map<std::string, NodeId>> idx;
  for (const auto& c : csps) idx.push_back(detail::name_index(c));

  NamedDag dag = create_dag(sigma, stats);
  const int n = static_cast<int>(dag.names.size());
  CspInstance csp(n, l);
  CombinedInstance out;
  for (NodeId v = 0; v < n; ++v) {
    const DagName dn = dag.names[static_cast<std::size_t>(v)];
    out.names.push_back(dag_node_name(originals, dn));
    auto [cx, ci] = home[static_cast<std::size_t>(dn.base)];
    const CspInstance& src = csps[cx].csp;
    csp.domain(v) = src.domain(ci);
    for (LabelId a = 0; a < l; ++a) csp.set_r1(v, a, src.r1(ci, a));
  }
  for (NodeId v = 0; v < n; ++v) {
    for (NodeId w = v + 1; w < n; ++w) {
      const std::string& nv = originals[static_cast<std::size_t>(dag.names[static_cast<std::size_t>(v)].base)];
      const std::string& nw = originals[static_cast<std::size_t>(dag.names[static_cast<std::size_t>(w)].base)];
      if (nv == nw) continue;
      for (std::size_t x = 0; x < csps.size(); ++x) {
        auto iv = idx[x].find(nv);
        auto iw = idx[x].find(nw);
        if (iv == idx[x].end() || iw == idx[x].end()) continue;
        for (LabelId a = 0; a < l; ++a) {
          for (LabelId b = 0; b < l; ++b) csp.set_r2(v, a, w, b, csps[x].csp.r2(iv->second, a, iw->second, b));
        }
        break;
      }
    }
  }
  out.muse = build_muse(std::move(csp), dag.edges, dag.starts, dag.ends);
  return out;
}

}  // namespace musecsp
