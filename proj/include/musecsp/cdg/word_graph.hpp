#pragma once

#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "musecsp/error.hpp"
#include "musecsp/muse_graph.hpp"

namespace musecsp::cdg {

/// Word position (b,e), b < e.
struct Interval {
  int b = 0;
  int e = 0;
  auto operator<=>(const Interval&) const = default;
};

inline std::ostream& operator<<(std::ostream& os, Interval p) { return os << '(' << p.b << ',' << p.e << ')'; }

enum class Cmp { lt, gt, eq, incomparable };

/// Identical intervals are equal, abutting or disjoint ones ordered,
/// overlapping ones and anything involving nil incomparable.
inline Cmp interval_compare(std::optional<Interval> p, std::optional<Interval> q) {
  if (!p || !q) return Cmp::incomparable;
  if (*p == *q) return Cmp::eq;
  if (p->e <= q->b) return Cmp::lt;
  if (q->e <= p->b) return Cmp::gt;
  return Cmp::incomparable;
}

struct Word {
  std::string id;
  std::string form;
  std::string cat;
  Interval span;
};

/// DAG of word candidates; each start-to-end path is one sentence hypothesis.
struct WordGraph {
  std::vector<Word> words;
  std::vector<Edge> edges;
  std::vector<NodeId> starts;
  std::vector<NodeId> ends;

  int size() const { return static_cast<int>(words.size()); }

  /// Bare MUSE structure over the words; throws GraphError when the graph is
  /// not a proper segment DAG or intervals do not line up.
  MuseInstance skeleton() const {
    for (const Word& w : words) {
      if (w.span.b >= w.span.e) throw GraphError("word " + w.id + " has an empty interval");
    }
    for (auto [u, v] : edges) {
      if (u < 0 || v < 0 || u >= size() || v >= size()) throw GraphError("edge references an unknown word");
      if (words[static_cast<std::size_t>(u)].span.e != words[static_cast<std::size_t>(v)].span.b) {
        throw GraphError("edge " + words[static_cast<std::size_t>(u)].id + " -> " +
                         words[static_cast<std::size_t>(v)].id + " does not abut");
      }
    }
    return build_muse(CspInstance(size(), 1), edges, starts, ends);
  }
};

/// One hypothesis: words in order with intervals (k, k+1).
inline WordGraph sentence(const std::vector<std::pair<std::string, std::string>>& form_cat) {
  WordGraph g;
  for (std::size_t k = 0; k < form_cat.size(); ++k) {
    const int pos = static_cast<int>(k) + 1;
    g.words.push_back({"w" + std::to_string(pos), form_cat[k].first, form_cat[k].second, {pos, pos + 1}});
    if (k > 0) g.edges.emplace_back(static_cast<NodeId>(k - 1), static_cast<NodeId>(k));
  }
  if (!form_cat.empty()) {
    g.starts = {0};
    g.ends = {static_cast<NodeId>(form_cat.size() - 1)};
  }
  return g;
}

/// Every string of `length` over `cats`: one word per category at each
/// position (k, k+1), full edges between neighbouring positions.
inline WordGraph full_lattice(int length, const std::vector<std::string>& cats = {"a", "b", "c"}) {
  if (length < 1 || cats.empty()) throw Error("lattice needs length >= 1 and a category");
  WordGraph g;
  const int w = static_cast<int>(cats.size());
  for (int pos = 1; pos <= length; ++pos) {
    for (const auto& c : cats) g.words.push_back({c + std::to_string(pos), c, c, {pos, pos + 1}});
  }
  for (int pos = 1; pos < length; ++pos) {
    for (int x = 0; x < w; ++x) {
      for (int y = 0; y < w; ++y) g.edges.emplace_back((pos - 1) * w + x, pos * w + y);
    }
  }
  for (int x = 0; x < w; ++x) {
    g.starts.push_back(x);
    g.ends.push_back((length - 1) * w + x);
  }
  return g;
}

/// Reads `WORD id form cat b e`, `WEDGE id id`, `WSTART id`, `WEND id`;
/// `#` comments.
inline WordGraph read_word_graph(std::istream& in) {
  WordGraph g;
  std::map<std::string, NodeId> ids;
  std::string raw;
  int number = 0;
  auto lookup = [&](const std::string& id, int col) {
    auto it = ids.find(id);
    if (it == ids.end()) throw ParseError(number, col, "unknown word '" + id + "'");
    return it->second;
  };
  while (std::getline(in, raw)) {
    ++number;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::istringstream line(raw);
    std::vector<std::pair<std::string, int>> tok;  // token, column
    std::string t;
    while (true) {
      line >> std::ws;
      const auto at = line.tellg();
      if (!(line >> t)) break;
      tok.emplace_back(t, static_cast<int>(at) + 1);
    }
    if (tok.empty()) continue;
    const std::string& kw = tok[0].first;
    auto want = [&](std::size_t k) {
      if (tok.size() != k) throw ParseError(number, tok[0].second, kw + " expects " + std::to_string(k - 1) + " fields");
    };
    auto integer = [&](std::size_t k) {
      try {
        std::size_t used = 0;
        int v = std::stoi(tok[k].first, &used);
        if (used == tok[k].first.size()) return v;
      } catch (const std::exception&) {
      }
      throw ParseError(number, tok[k].second, "expected an integer, got '" + tok[k].first + "'");
    };
    if (kw == "WORD") {
      want(6);
      const NodeId id = g.size();
      if (!ids.emplace(tok[1].first, id).second) throw ParseError(number, tok[1].second, "duplicate word id");
      Interval span{integer(4), integer(5)};
      if (span.b >= span.e) throw ParseError(number, tok[4].second, "interval needs b < e");
      g.words.push_back({tok[1].first, tok[2].first, tok[3].first, span});
    } else if (kw == "WEDGE") {
      want(3);
      g.edges.emplace_back(lookup(tok[1].first, tok[1].second), lookup(tok[2].first, tok[2].second));
    } else if (kw == "WSTART" || kw == "WEND") {
      want(2);
      (kw == "WSTART" ? g.starts : g.ends).push_back(lookup(tok[1].first, tok[1].second));
    } else {
      throw ParseError(number, tok[0].second, "unknown keyword '" + kw + "'");
    }
  }
  return g;
}

inline void write_word_graph(std::ostream& os, const WordGraph& g) {
  for (const Word& w : g.words) os << "WORD " << w.id << ' ' << w.form << ' ' << w.cat << ' ' << w.span.b << ' ' << w.span.e << '\n';
  auto id = [&g](NodeId v) { return g.words[static_cast<std::size_t>(v)].id; };
  for (auto [u, v] : g.edges) os << "WEDGE " << id(u) << ' ' << id(v) << '\n';
  for (NodeId s : g.starts) os << "WSTART " << id(s) << '\n';
  for (NodeId e : g.ends) os << "WEND " << id(e) << '\n';
}

}  // namespace musecsp::cdg
