#pragma once

#include <algorithm>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "musecsp/cdg/grammar.hpp"
#include "musecsp/cdg/word_graph.hpp"
#include "musecsp/csp.hpp"
#include "musecsp/muse_ac.hpp"
#include "musecsp/muse_graph.hpp"
#include "musecsp/search.hpp"

namespace musecsp::cdg {

/// Role value <label, modifiee>.
struct RoleValue {
  int label = 0;  // index into Grammar::labels()
  std::optional<Interval> mod;
};

/// A word graph compiled against a grammar: one MUSE node per (word, role),
/// one MUSE label per role value.
struct CdgNetwork {
  WordGraph words;
  Grammar grammar;
  MuseInstance muse;
  std::vector<std::pair<int, int>> role_of;  // node -> (word, role)
  std::vector<RoleValue> values;             // label id -> role value

  NodeId node(int word, int role) const { return static_cast<NodeId>(word * grammar.degree() + role); }

  std::string value_name(LabelId a) const {
    const RoleValue& v = values.at(static_cast<std::size_t>(a));
    std::ostringstream os;
    os << grammar.labels()[static_cast<std::size_t>(v.label)] << '-';
    if (v.mod) {
      os << *v.mod;
    } else {
      os << "nil";
    }
    return os.str();
  }

  /// Label id of a role value; -1 when the network has no such value.
  LabelId value_id(const std::string& label, std::optional<Interval> mod) const {
    for (std::size_t a = 0; a < values.size(); ++a) {
      if (grammar.labels()[static_cast<std::size_t>(values[a].label)] == label && values[a].mod == mod) {
        return static_cast<LabelId>(a);
      }
    }
    return -1;
  }
};

/// Compiles the network: domains of all role values whose modifiee is nil or
/// a word sharing a sentence hypothesis, unary constraints into R1, binary
/// constraints (both variable orders) into R2. Values failing R1 get no R2
/// support, and a modifiee that overlaps the other word without matching it
/// cannot share a hypothesis with that word.
inline CdgNetwork build_network(const WordGraph& wg, const Grammar& g) {
  const MuseInstance skel = wg.skeleton();
  CdgNetwork net;
  net.words = wg;
  net.grammar = g;
  const int nw = wg.size();
  const int p = g.degree();

  std::set<Interval> spans;
  for (const Word& w : wg.words) spans.insert(w.span);
  for (int lab = 0; lab < static_cast<int>(g.labels().size()); ++lab) {
    net.values.push_back({lab, std::nullopt});
    for (Interval s : spans) net.values.push_back({lab, s});
  }
  const int l = static_cast<int>(net.values.size());
  const int n = nw * p;

  std::vector<RoleView> base(static_cast<std::size_t>(n));
  for (int w = 0; w < nw; ++w) {
    const Word& word = wg.words[static_cast<std::size_t>(w)];
    const int cat = g.symbol(word.cat);
    if (cat < 0 || std::find(g.categories().begin(), g.categories().end(), word.cat) == g.categories().end()) {
      throw GrammarError("word " + word.id + " has category '" + word.cat + "' unknown to the grammar");
    }
    for (int r = 0; r < p; ++r) {
      net.role_of.emplace_back(w, r);
      RoleView& v = base[static_cast<std::size_t>(net.node(w, r))];
      v.pos = word.span;
      v.cat = cat;
      v.rid = g.symbol(g.roles()[static_cast<std::size_t>(r)]);
    }
  }
  auto view = [&](NodeId i, LabelId a) {
    RoleView v = base[static_cast<std::size_t>(i)];
    const RoleValue& rv = net.values[static_cast<std::size_t>(a)];
    v.lab = g.symbol(g.labels()[static_cast<std::size_t>(rv.label)]);
    v.mod = rv.mod;
    return v;
  };

  CspInstance csp(n, l);
  for (NodeId i = 0; i < n; ++i) {
    const int w = net.role_of[static_cast<std::size_t>(i)].first;
    const Interval own = wg.words[static_cast<std::size_t>(w)].span;
    std::set<Interval> reachable;
    for (int u = 0; u < nw; ++u) {
      if (u != w && (skel.reaches(u, w) || skel.reaches(w, u))) reachable.insert(wg.words[static_cast<std::size_t>(u)].span);
    }
    reachable.erase(own);
    Domain& d = csp.domain(i);
    d.clear();
    for (LabelId a = 0; a < l; ++a) {
      const auto& mod = net.values[static_cast<std::size_t>(a)].mod;
      if (!mod || reachable.count(*mod)) d.insert(a);
    }
    for (LabelId a : d.labels()) {
      const RoleView v = view(i, a);
      bool ok = true;
      for (const Formula& f : g.constraints()) {
        if (f.arity() == 1 && !f.holds(v)) {
          ok = false;
          break;
        }
      }
      csp.set_r1(i, a, ok);
    }
  }

  std::vector<Edge> edges;
  std::vector<NodeId> starts, ends;
  for (int w = 0; w < nw; ++w) {
    for (int r = 0; r + 1 < p; ++r) edges.emplace_back(net.node(w, r), net.node(w, r + 1));
  }
  for (auto [u, v] : wg.edges) edges.emplace_back(net.node(u, p - 1), net.node(v, 0));
  for (NodeId s : wg.starts) starts.push_back(net.node(s, 0));
  for (NodeId e : wg.ends) ends.push_back(net.node(e, p - 1));
  net.muse = build_muse(std::move(csp), std::move(edges), std::move(starts), std::move(ends));

  CspInstance& c = net.muse.csp();
  std::vector<const Formula*> binary;
  for (const Formula& f : g.constraints()) {
    if (f.arity() == 2) binary.push_back(&f);
  }
  auto segment_clash = [](const std::optional<Interval>& mod, Interval other) {
    return mod && *mod != other && interval_compare(*mod, other) == Cmp::incomparable;
  };
  for (NodeId i = 0; i < n; ++i) {
    const auto di = c.domain(i).labels();
    for (NodeId j : c.neighbors(i)) {
      if (j < i) continue;
      const auto dj = c.domain(j).labels();
      for (LabelId a : di) {
        const RoleView va = view(i, a);
        const bool ra = c.r1(i, a);
        for (LabelId b : dj) {
          bool ok = ra && c.r1(j, b);
          if (ok) {
            const RoleView vb = view(j, b);
            ok = !segment_clash(va.mod, vb.pos) && !segment_clash(vb.mod, va.pos);
            for (std::size_t k = 0; ok && k < binary.size(); ++k) ok = binary[k]->holds(va, &vb) && binary[k]->holds(vb, &va);
          }
          if (!ok) c.set_r2(i, a, j, b, false);
        }
      }
    }
  }
  return net;
}

/// Words of a solution in sentence order, each with its role labels.
struct ParsedWord {
  int word = 0;
  std::vector<LabelId> roles;
};

inline std::vector<ParsedWord> parsed_words(const CdgNetwork& net, const Assignment& a) {
  std::vector<ParsedWord> out;
  for (auto [i, lab] : a.binding) {
    auto [w, r] = net.role_of[static_cast<std::size_t>(i)];
    if (out.empty() || out.back().word != w) out.push_back({w, std::vector<LabelId>(static_cast<std::size_t>(net.grammar.degree()), -1)});
    out.back().roles[static_cast<std::size_t>(r)] = lab;
  }
  std::stable_sort(out.begin(), out.end(), [&net](const ParsedWord& x, const ParsedWord& y) {
    return net.words.words[static_cast<std::size_t>(x.word)].span < net.words.words[static_cast<std::size_t>(y.word)].span;
  });
  return out;
}

/// Every modifiee names a word of the same hypothesis.
inline bool modifiees_present(const CdgNetwork& net, const Assignment& a) {
  std::set<Interval> present;
  for (auto [i, lab] : a.binding) present.insert(net.words.words[static_cast<std::size_t>(net.role_of[static_cast<std::size_t>(i)].first)].span);
  for (auto [i, lab] : a.binding) {
    const auto& mod = net.values[static_cast<std::size_t>(lab)].mod;
    if (mod && !present.count(*mod)) return false;
  }
  return true;
}

/// Category string of the hypothesis a solution covers.
inline std::string category_string(const CdgNetwork& net, const Assignment& a) {
  std::string out;
  for (const ParsedWord& pw : parsed_words(net, a)) {
    if (!out.empty()) out += ' ';
    out += net.words.words[static_cast<std::size_t>(pw.word)].cat;
  }
  return out;
}

/// Lines `pos=(b,e) form cat role=label-modifiee`, one per word.
inline void write_parse(std::ostream& os, const CdgNetwork& net, const Assignment& a) {
  for (const ParsedWord& pw : parsed_words(net, a)) {
    const Word& w = net.words.words[static_cast<std::size_t>(pw.word)];
    os << "pos=" << w.span << ' ' << w.form << ' ' << w.cat;
    for (std::size_t r = 0; r < pw.roles.size(); ++r) {
      os << ' ' << net.grammar.roles()[r] << '=' << net.value_name(pw.roles[r]);
    }
    os << '\n';
  }
}

struct ParseOptions {
  QueueOrder order = QueueOrder::fifo;
  bool consistency = true;  // false: raw backtracking over the compiled network
  SearchStats* stats = nullptr;
};

struct ParseResult {
  CdgNetwork network;
  MuseInstance pruned;  // after node consistency and MUSE AC-1
  std::vector<Assignment> parses;
};

/// build_network, node consistency, MUSE AC-1, then every parse.
inline ParseResult parse(const WordGraph& wg, const Grammar& g, const ParseOptions& opts = {}) {
  ParseResult out;
  out.network = build_network(wg, g);
  std::vector<Assignment> found;
  if (opts.consistency) {
    MuseInstance m = out.network.muse;
    m.csp() = enforce_node_consistency(m.csp());
    auto [pruned, st] = muse_ac1(std::move(m), {opts.order});
    out.pruned = std::move(pruned);
    found = extract_all(out.pruned, &st, {true, false, opts.stats});
  } else {
    out.pruned = out.network.muse;
    found = extract_all(out.pruned, nullptr, {false, false, opts.stats});
  }
  for (auto& a : found) {
    if (modifiees_present(out.network, a)) out.parses.push_back(std::move(a));
  }
  return out;
}

}  // namespace musecsp::cdg
