#pragma once

#include <cctype>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "musecsp/csp.hpp"
#include "musecsp/error.hpp"
#include "musecsp/muse_graph.hpp"

namespace musecsp {

/// Contents of an instance file. The DAG part is optional; without it the
/// file describes a plain CSP.
struct InstanceFile {
  CspInstance csp;
  std::vector<Edge> edges;
  std::vector<NodeId> starts;
  std::vector<NodeId> ends;

  bool has_dag() const { return !edges.empty() || !starts.empty() || !ends.empty(); }

  /// The described MUSE instance; a plain CSP becomes one segment.
  MuseInstance to_muse() const { return has_dag() ? build_muse(csp, edges, starts, ends) : build_chain(csp); }
};

namespace detail {

class LineReader {
 public:
  LineReader(const std::string& line, int number) : in_(line), number_(number), line_(line) {}

  std::string word() {
    skip();
    std::string out;
    while (pos() < line_.size() && !std::isspace(static_cast<unsigned char>(line_[pos()])) && line_[pos()] != ':') {
      out.push_back(static_cast<char>(in_.get()));
    }
    if (out.empty()) fail("expected a value");
    return out;
  }

  int integer(int lo, int hi, const char* what) {
    skip();
    const int col = column();
    std::string w = word();
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(w, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != w.size() || w.empty()) throw ParseError(number_, col, std::string("expected ") + what + ", got '" + w + "'");
    if (v < lo || v > hi) throw ParseError(number_, col, std::string(what) + " " + w + " out of range");
    return v;
  }

  void colon() {
    skip();
    if (pos() >= line_.size() || line_[pos()] != ':') fail("expected ':'");
    in_.get();
  }

  bool at_end() {
    skip();
    return pos() >= line_.size();
  }

  void end() {
    if (!at_end()) fail("unexpected trailing text");
  }

  [[noreturn]] void fail(const std::string& what) { throw ParseError(number_, column(), what); }

  int column() { return static_cast<int>(pos()) + 1; }

 private:
  std::size_t pos() {
    auto p = in_.tellg();
    return p < 0 ? line_.size() : static_cast<std::size_t>(p);
  }
  void skip() {
    while (pos() < line_.size() && std::isspace(static_cast<unsigned char>(line_[pos()]))) in_.get();
  }

  std::istringstream in_;
  int number_;
  std::string line_;
};

}  // namespace detail

/// Reads the line-oriented instance format:
///   NODES n / LABELS l / DOMAIN i: a b ... / R1 i a: 0|1 / R2 i a j b: 0|1
///   EDGE i j / START i / END i
/// `#` starts a comment. NODES and LABELS come first. Unlisted domains are
/// full, unlisted R1 / R2 entries are 1.
inline InstanceFile read_instance(std::istream& in) {
  InstanceFile out;
  std::optional<int> n, l;
  std::vector<char> domain_given;
  std::string raw;
  int number = 0;
  while (std::getline(in, raw)) {
    ++number;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    detail::LineReader r(raw, number);
    if (r.at_end()) continue;
    const int kw_col = r.column();
    const std::string kw = r.word();
    if (kw == "NODES" || kw == "LABELS") {
      if ((kw == "NODES" && n) || (kw == "LABELS" && l)) r.fail(kw + " given twice");
      (kw == "NODES" ? n : l) = r.integer(0, 1 << 16, "count");
      r.end();
      if (n && l) {
        out.csp = CspInstance(*n, *l);
        domain_given.assign(static_cast<std::size_t>(*n), 0);
      }
      continue;
    }
    if (!n || !l) throw ParseError(number, kw_col, kw + " before NODES and LABELS");
    const int nmax = *n - 1, lmax = *l - 1;
    if (kw == "DOMAIN") {
      const NodeId i = r.integer(0, nmax, "node");
      r.colon();
      Domain& d = out.csp.domain(i);
      if (!domain_given[static_cast<std::size_t>(i)]) d.clear();
      domain_given[static_cast<std::size_t>(i)] = 1;
      while (!r.at_end()) d.insert(r.integer(0, lmax, "label"));
    } else if (kw == "R1") {
      const NodeId i = r.integer(0, nmax, "node");
      const LabelId a = r.integer(0, lmax, "label");
      r.colon();
      out.csp.set_r1(i, a, r.integer(0, 1, "0 or 1") != 0);
      r.end();
    } else if (kw == "R2") {
      const NodeId i = r.integer(0, nmax, "node");
      const LabelId a = r.integer(0, lmax, "label");
      const NodeId j = r.integer(0, nmax, "node");
      const LabelId b = r.integer(0, lmax, "label");
      r.colon();
      const int v = r.integer(0, 1, "0 or 1");
      if (i == j) r.fail("R2 on a single node");
      out.csp.set_r2(i, a, j, b, v != 0);
      r.end();
    } else if (kw == "EDGE") {
      const NodeId i = r.integer(0, nmax, "node");
      const NodeId j = r.integer(0, nmax, "node");
      out.edges.emplace_back(i, j);
      r.end();
    } else if (kw == "START" || kw == "END") {
      (kw == "START" ? out.starts : out.ends).push_back(r.integer(0, nmax, "node"));
      r.end();
    } else {
      throw ParseError(number, kw_col, "unknown keyword '" + kw + "'");
    }
  }
  if (!n || !l) throw ParseError(number + 1, 0, "missing NODES or LABELS");
  return out;
}

inline InstanceFile read_instance_string(const std::string& text) {
  std::istringstream in(text);
  return read_instance(in);
}

/// Canonical form: every domain listed, only false R1 entries, false R2
/// entries once per unordered pair (on arcs only when a DAG is given).
inline void write_instance(std::ostream& os, const CspInstance& csp, const std::vector<Edge>& edges = {},
                           const std::vector<NodeId>& starts = {}, const std::vector<NodeId>& ends = {}) {
  const int n = csp.num_nodes(), l = csp.num_labels();
  os << "NODES " << n << "\nLABELS " << l << '\n';
  for (NodeId i = 0; i < n; ++i) {
    os << "DOMAIN " << i << ':';
    for (LabelId a = 0; a < l; ++a) {
      if (csp.domain(i).contains(a)) os << ' ' << a;
    }
    os << '\n';
  }
  for (NodeId i = 0; i < n; ++i) {
    for (LabelId a = 0; a < l; ++a) {
      if (!csp.r1(i, a)) os << "R1 " << i << ' ' << a << ": 0\n";
    }
  }
  const bool dag = !edges.empty() || !starts.empty();
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = i + 1; j < n; ++j) {
      if (dag && !csp.has_arc(i, j)) continue;
      for (LabelId a = 0; a < l; ++a) {
        for (LabelId b = 0; b < l; ++b) {
          if (!csp.r2(i, a, j, b)) os << "R2 " << i << ' ' << a << ' ' << j << ' ' << b << ": 0\n";
        }
      }
    }
  }
  for (auto [i, j] : edges) os << "EDGE " << i << ' ' << j << '\n';
  for (NodeId s : starts) os << "START " << s << '\n';
  for (NodeId e : ends) os << "END " << e << '\n';
}

inline void write_instance(std::ostream& os, const MuseInstance& m) {
  write_instance(os, m.csp(), m.edges(), m.starts(), m.ends());
}

inline std::string instance_to_string(const MuseInstance& m) {
  std::ostringstream os;
  write_instance(os, m);
  return os.str();
}

/// `node=label` lines for the labels still in each domain.
inline void write_domains(std::ostream& os, const CspInstance& csp) {
  for (NodeId i = 0; i < csp.num_nodes(); ++i) {
    os << i << ':';
    for (LabelId a : csp.domain(i).labels()) os << ' ' << a;
    os << '\n';
  }
}

}  // namespace musecsp
