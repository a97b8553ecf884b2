#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "musecsp/cdg/parser.hpp"
#include "musecsp/csp.hpp"
#include "musecsp/muse_ac.hpp"
#include "musecsp/muse_graph.hpp"
#include "musecsp/random.hpp"
#include "musecsp/search.hpp"

namespace musecsp {

enum class Topology { tree, lattice };

struct TopologySpec {
  Topology kind = Topology::tree;
  int branching = 2;
  int path_length = 4;
  int labels = 3;
  double p = 0.5;
  int instances = 6;
  std::uint64_t seed = 1;

  void validate() const {
    if (branching < 1) throw Error("branching must be >= 1");
    if (path_length < 1) throw Error("path length must be >= 1");
    if (labels < 1) throw Error("need at least one label");
    if (p < 0.0 || p > 1.0) throw Error("p must lie in [0,1]");
    if (instances < 1) throw Error("need at least one instance");
  }
};

inline std::string topology_name(Topology t) { return t == Topology::tree ? "tree" : "lattice"; }

inline Topology parse_topology(const std::string& s) {
  if (s == "tree") return Topology::tree;
  if (s == "lattice") return Topology::lattice;
  throw Error("unknown topology '" + s + "'");
}

/// Bare DAG of the topology: a complete tree of depth `path_length` (root is
/// the only start, leaves are ends), or `path_length` layers of `branching`
/// nodes with every edge between neighbouring layers.
inline MuseInstance topology_skeleton(const TopologySpec& spec) {
  spec.validate();
  std::vector<Edge> edges;
  std::vector<NodeId> starts, ends;
  int n = 0;
  if (spec.kind == Topology::tree) {
    std::vector<NodeId> level{0};
    n = 1;
    starts.push_back(0);
    for (int d = 1; d < spec.path_length; ++d) {
      std::vector<NodeId> next;
      for (NodeId u : level) {
        for (int k = 0; k < spec.branching; ++k) {
          edges.emplace_back(u, n);
          next.push_back(n++);
        }
      }
      level = std::move(next);
    }
    ends = level;
  } else {
    const int b = spec.branching;
    n = spec.path_length * b;
    for (int layer = 0; layer + 1 < spec.path_length; ++layer) {
      for (int x = 0; x < b; ++x) {
        for (int y = 0; y < b; ++y) edges.emplace_back(layer * b + x, (layer + 1) * b + y);
      }
    }
    for (int x = 0; x < b; ++x) {
      starts.push_back(x);
      ends.push_back((spec.path_length - 1) * b + x);
    }
  }
  return build_muse(CspInstance(n, spec.labels), std::move(edges), std::move(starts), std::move(ends));
}

/// Random instance over the topology: full domains, r2 independently true
/// with probability p on pairs sharing a segment. Each pair has one relation,
/// so lattice paths through the pair share it.
inline MuseInstance gen_random(const TopologySpec& spec, Rng& rng) {
  MuseInstance m = topology_skeleton(spec);
  randomize_r2(m.csp(), rng, spec.p);
  return m;
}

inline MuseInstance gen_random(const TopologySpec& spec) {
  Rng rng(spec.seed);
  return gen_random(spec, rng);
}

struct ProfileRow {
  double p = 0;
  double after = 0;     // labels left by MUSE AC-1
  double solution = 0;  // labels used by some solution
  double csp_ac = 0;    // labels kept by AC-4 on at least one segment
  double unused = 0;    // after - csp_ac
};

struct InstanceProfile {
  int total = 0;
  int after = 0;
  int solution = 0;
  int csp_ac = 0;
};

/// Union over segments of the labels AC-4 keeps on that segment alone.
inline CspInstance segmentwise_ac(const MuseInstance& m) {
  CspInstance keep = m.csp();
  for (NodeId i = 0; i < keep.num_nodes(); ++i) keep.domain(i).clear();
  for (const Segment& seg : enumerate_segments(m)) {
    CspInstance c = m.csp();
    c.clear_arcs();
    for (std::size_t x = 0; x < seg.nodes.size(); ++x) {
      for (std::size_t y = x + 1; y < seg.nodes.size(); ++y) c.set_arc(seg.nodes[x], seg.nodes[y], true);
    }
    c = ac4(std::move(c));
    for (NodeId i : seg.nodes) {
      for (LabelId a : c.domain(i).labels()) keep.domain(i).insert(a);
    }
  }
  return keep;
}

inline InstanceProfile profile_instance(const MuseInstance& m) {
  InstanceProfile out;
  out.total = m.csp().total_domain_size();
  auto [pruned, st] = muse_ac1(m);
  out.after = pruned.csp().total_domain_size();

  CspInstance used(m.num_nodes(), m.num_labels());
  for (NodeId i = 0; i < used.num_nodes(); ++i) used.domain(i).clear();
  for (const Assignment& a : extract_all(pruned, &st)) {
    for (auto [i, lab] : a.binding) used.domain(i).insert(lab);
  }
  out.solution = used.total_domain_size();
  out.csp_ac = segmentwise_ac(m).total_domain_size();
  return out;
}

/// p = 0.05, 0.10, ..., 0.95.
inline std::vector<double> default_p_sweep() {
  std::vector<double> ps;
  for (int k = 1; k <= 19; ++k) ps.push_back(k * 0.05);
  return ps;
}

/// Mean profile per p. Instance k at sweep index s uses the stream seeded
/// with seed + 1000 * s + k, so rows do not depend on each other.
inline std::vector<ProfileRow> run_profile(TopologySpec spec, const std::vector<double>& ps) {
  std::vector<ProfileRow> rows;
  for (std::size_t s = 0; s < ps.size(); ++s) {
    spec.p = ps[s];
    spec.validate();
    ProfileRow row;
    row.p = ps[s];
    for (int k = 0; k < spec.instances; ++k) {
      Rng rng(spec.seed + 1000 * s + static_cast<std::uint64_t>(k));
      const InstanceProfile ip = profile_instance(gen_random(spec, rng));
      row.after += ip.after;
      row.solution += ip.solution;
      row.csp_ac += ip.csp_ac;
    }
    row.after /= spec.instances;
    row.solution /= spec.instances;
    row.csp_ac /= spec.instances;
    row.unused = row.after - row.csp_ac;
    rows.push_back(row);
  }
  std::stable_sort(rows.begin(), rows.end(), [](const ProfileRow& x, const ProfileRow& y) { return x.p < y.p; });
  return rows;
}

inline void write_profile_csv(std::ostream& os, const TopologySpec& spec, const std::vector<ProfileRow>& rows) {
  os << "# topology=" << topology_name(spec.kind) << " branching=" << spec.branching
     << " path_length=" << spec.path_length << " labels=" << spec.labels << " instances=" << spec.instances
     << " rng=mt19937_64 seed=" << spec.seed << '\n';
  os << "p,after,solution,csp_ac,unused\n";
  for (const ProfileRow& r : rows) {
    os << r.p << ',' << r.after << ',' << r.solution << ',' << r.csp_ac << ',' << r.unused << '\n';
  }
}

enum class Language { abc, ww };

inline Language parse_language(const std::string& s) {
  if (s == "abc") return Language::abc;
  if (s == "ww") return Language::ww;
  throw Error("unknown language '" + s + "'");
}

/// Lattice length for size n: 3n for abc, 2n (|w| = n) for ww.
inline int lattice_length(Language lang, int n) { return lang == Language::abc ? 3 * n : 2 * n; }

struct TimingRow {
  int n = 0;
  double t_raw = 0;
  double t_muse = 0;
  std::size_t parses = 0;
};

inline double median_seconds(int reps, const std::function<void()>& f) {
  std::vector<double> t;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    t.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  std::sort(t.begin(), t.end());
  return t[t.size() / 2];
}

/// Both timings include building the network from the grammar. t_raw
/// extracts every parse by plain backtracking; t_muse runs node consistency
/// and MUSE AC-1 first and searches with the support sets.
inline std::vector<TimingRow> run_timing(Language lang, int n_lo, int n_hi, int reps = 5) {
  if (n_lo < 1 || n_hi < n_lo) throw Error("bad size range");
  const cdg::Grammar g = cdg::builtin_grammar(lang == Language::abc ? "g2" : "g3");
  std::vector<TimingRow> rows;
  for (int n = n_lo; n <= n_hi; ++n) {
    const cdg::WordGraph wg = cdg::full_lattice(lattice_length(lang, n));
    TimingRow row;
    row.n = n;
    row.t_raw = median_seconds(reps, [&] { cdg::parse(wg, g, {QueueOrder::fifo, false}); });
    row.t_muse = median_seconds(reps, [&] { row.parses = cdg::parse(wg, g).parses.size(); });
    rows.push_back(row);
  }
  return rows;
}

inline void write_timing_csv(std::ostream& os, Language lang, const std::vector<TimingRow>& rows) {
  os << "# language=" << (lang == Language::abc ? "abc" : "ww") << " median wall-clock seconds\n";
  os << "n,t_raw,t_muse\n";
  for (const TimingRow& r : rows) os << r.n << ',' << r.t_raw << ',' << r.t_muse << '\n';
}

}  // namespace musecsp
