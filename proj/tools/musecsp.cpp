#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "musecsp/cdg/parser.hpp"
#include "musecsp/checks.hpp"
#include "musecsp/combine.hpp"
#include "musecsp/experiment.hpp"
#include "musecsp/io.hpp"
#include "musecsp/muse_ac.hpp"
#include "musecsp/muse_pc.hpp"
#include "musecsp/search.hpp"

using namespace musecsp;

namespace {

constexpr int kOk = 0;
constexpr int kWipeOut = 1;
constexpr int kInputError = 2;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

MuseInstance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  try {
    return read_instance(in).to_muse();
  } catch (const ParseError& e) {
    throw Error(path + ": " + e.what());
  }
}

QueueOrder queue_order(const std::string& s) {
  if (s == "fifo") return QueueOrder::fifo;
  if (s == "lifo") return QueueOrder::lifo;
  throw Error("unknown worklist order '" + s + "'");
}

void write_domains_csv(std::ostream& os, const CspInstance& csp) {
  os << "node,label\n";
  for (NodeId i = 0; i < csp.num_nodes(); ++i) {
    for (LabelId a : csp.domain(i).labels()) os << i << ',' << a << '\n';
  }
}

void write_solutions(std::ostream& os, const MuseInstance& m, const std::vector<Assignment>& all, bool csv) {
  if (csv) {
    os << "solution,node,label\n";
    for (std::size_t k = 0; k < all.size(); ++k) {
      for (auto [i, a] : all[k].binding) os << k << ',' << i << ',' << a << '\n';
    }
    return;
  }
  for (std::size_t k = 0; k < all.size(); ++k) {
    if (k) os << '\n';
    os << "segment:";
    for (NodeId v : m.path_order(all[k].segment)) os << ' ' << v;
    os << '\n' << all[k];
  }
}

cdg::Grammar load_grammar(const std::string& which) {
  if (which == "g1" || which == "g2" || which == "g2-displayed" || which == "g3") return cdg::builtin_grammar(which);
  return cdg::Grammar::parse(slurp(which));
}

// "the:det dog:noun eats:verb"
cdg::WordGraph sentence_from(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::pair<std::string, std::string>> words;
  std::string tok;
  while (in >> tok) {
    const auto colon = tok.rfind(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == tok.size()) {
      throw Error("sentence words are form:category, got '" + tok + "'");
    }
    words.emplace_back(tok.substr(0, colon), tok.substr(colon + 1));
  }
  if (words.empty()) throw Error("empty sentence");
  return cdg::sentence(words);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) {
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

struct Common {
  std::uint64_t seed = 1;
  std::string format = "text";
  bool trace = false;
  bool csv() const { return format == "csv"; }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MUSE CSP toolkit: arc and path consistency over segment DAGs, CDG parsing, experiments"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--seed", common.seed, "random seed");
  app.add_option("--format", common.format, "output format")->check(CLI::IsMember({"text", "csv"}));
  app.add_flag("--trace", common.trace, "print worklist activity to stderr");

  // gen
  auto* gen = app.add_subcommand("gen", "random tree or lattice instance");
  TopologySpec spec;
  std::string topology = "tree";
  gen->add_option("--topology", topology)->check(CLI::IsMember({"tree", "lattice"}));
  gen->add_option("--branching", spec.branching);
  gen->add_option("--path-length", spec.path_length);
  gen->add_option("--labels", spec.labels);
  gen->add_option("-p,--probability", spec.p, "probability that an R2 entry is 1");

  // ac
  auto* ac = app.add_subcommand("ac", "node consistency plus MUSE AC-1; prints the surviving domains");
  std::string file;
  std::string order = "fifo";
  bool require_solution = false;
  ac->add_option("file", file)->required();
  ac->add_option("--order", order)->check(CLI::IsMember({"fifo", "lifo"}));
  ac->add_flag("--require-solution", require_solution, "exit 1 when every label is eliminated");

  // pc
  auto* pc = app.add_subcommand("pc", "MUSE PC-1; prints the instance with the reduced relation");
  bool with_ac = false;
  pc->add_option("file", file)->required();
  pc->add_option("--order", order)->check(CLI::IsMember({"fifo", "lifo"}));
  pc->add_flag("--with-ac", with_ac, "alternate with MUSE AC-1 to a joint fixpoint");

  // solve
  auto* solve = app.add_subcommand("solve", "MUSE AC-1 then solution extraction");
  bool all = false, unguided = false;
  std::string segment;
  solve->add_option("file", file)->required();
  solve->add_flag("--all", all, "every solution of every segment");
  solve->add_option("--segment", segment, "comma-separated nodes of one segment");
  solve->add_flag("--unguided", unguided, "plain backtracking without consistency preprocessing");

  // parse
  auto* parse = app.add_subcommand("parse", "CDG parsing of a sentence, word graph or full lattice");
  std::string grammar = "g1", sentence, word_graph, cats = "a,b,c";
  int lattice = 0;
  bool no_consistency = false, strings_only = false;
  parse->add_option("--grammar", grammar, "g1, g2, g2-displayed, g3 or a grammar file");
  auto* src_s = parse->add_option("--sentence", sentence, "words as form:category");
  auto* src_w = parse->add_option("--word-graph", word_graph, "word graph file");
  auto* src_l = parse->add_option("--lattice", lattice, "full lattice of this length");
  src_s->excludes(src_w)->excludes(src_l);
  src_w->excludes(src_l);
  parse->add_option("--categories", cats, "lattice categories, comma-separated");
  parse->add_flag("--no-consistency", no_consistency, "skip node consistency and MUSE AC-1");
  parse->add_flag("--strings", strings_only, "print only the distinct category strings");

  // combine
  auto* combine = app.add_subcommand("combine", "merge CSP files into one MUSE instance");
  std::vector<std::string> files;
  std::vector<std::string> shares;
  combine->add_option("files", files)->required();
  combine->add_option("--share", shares, "NAME=FILE_INDEX:NODE, gives that node a shared name (repeatable)");

  // profile
  auto* profile = app.add_subcommand("profile", "label-survival profile over p (CSV)");
  profile->add_option("--topology", topology)->check(CLI::IsMember({"tree", "lattice"}));
  profile->add_option("--branching", spec.branching);
  profile->add_option("--path-length", spec.path_length);
  profile->add_option("--labels", spec.labels);
  profile->add_option("--instances", spec.instances);

  // timing
  auto* timing = app.add_subcommand("timing", "raw versus MUSE AC-1 parse times (CSV)");
  std::string language = "abc";
  int n_from = 1, n_to = 5, reps = 5;
  timing->add_option("--language", language)->check(CLI::IsMember({"abc", "ww"}));
  timing->add_option("--from", n_from);
  timing->add_option("--to", n_to);
  timing->add_option("--reps", reps);

  // oracle-check
  auto* oracle = app.add_subcommand("oracle-check", "compare the algorithms with enumeration oracles");
  std::string suite = "all";
  int count = 500;
  oracle->add_option("--suite", suite)->check(CLI::IsMember({"ac", "pc", "chain", "order", "all"}));
  oracle->add_option("--count", count);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  std::ostream& out = std::cout;
  std::ostream* trace = common.trace ? &std::cerr : nullptr;
  try {
    if (*gen) {
      spec.kind = parse_topology(topology);
      spec.seed = common.seed;
      write_instance(out, gen_random(spec));
      return kOk;
    }

    if (*ac) {
      MuseInstance m = load_instance(file);
      m.csp() = enforce_node_consistency(m.csp());
      auto [pruned, st] = muse_ac1(std::move(m), {queue_order(order), trace});
      if (common.csv()) {
        write_domains_csv(out, pruned.csp());
      } else {
        write_domains(out, pruned.csp());
      }
      if (require_solution && is_totally_wiped_out(pruned.csp())) return kWipeOut;
      return kOk;
    }

    if (*pc) {
      MuseInstance m = load_instance(file);
      if (with_ac) {
        m = muse_ac_pc_fixpoint(std::move(m), queue_order(order));
      } else {
        m = muse_pc1(std::move(m), {queue_order(order), trace}).instance;
      }
      write_instance(out, m);
      return kOk;
    }

    if (*solve) {
      MuseInstance m = load_instance(file);
      m.csp() = enforce_node_consistency(m.csp());
      std::vector<Assignment> found;
      MuseInstance target = m;
      SupportState st;
      const SupportState* state = nullptr;
      if (!unguided) {
        auto r = muse_ac1(std::move(m), {QueueOrder::fifo, trace});
        target = std::move(r.instance);
        st = std::move(r.state);
        state = &st;
      }
      const SearchOptions opts{!unguided, false, nullptr};
      if (!segment.empty()) {
        Segment seg;
        for (const auto& t : split(segment, ',')) seg.nodes.push_back(std::stoi(t));
        std::sort(seg.nodes.begin(), seg.nodes.end());
        if (all) {
          for (auto& a : extract_all(target, state, opts)) {
            if (a.segment == seg) found.push_back(std::move(a));
          }
        } else if (auto a = extract_one(target, state, seg, opts)) {
          found.push_back(std::move(*a));
        }
      } else if (all) {
        found = extract_all(target, state, opts);
      } else if (auto a = extract_first(target, state, opts)) {
        found.push_back(std::move(*a));
      }
      write_solutions(out, target, found, common.csv());
      return found.empty() ? kWipeOut : kOk;
    }

    if (*parse) {
      const cdg::Grammar g = load_grammar(grammar);
      cdg::WordGraph wg;
      if (!sentence.empty()) {
        wg = sentence_from(sentence);
      } else if (!word_graph.empty()) {
        std::ifstream in(word_graph);
        if (!in) throw Error("cannot open " + word_graph);
        wg = cdg::read_word_graph(in);
      } else if (lattice > 0) {
        wg = cdg::full_lattice(lattice, split(cats, ','));
      } else {
        throw Error("parse needs --sentence, --word-graph or --lattice");
      }
      const auto r = cdg::parse(wg, g, {QueueOrder::fifo, !no_consistency, nullptr});
      if (strings_only) {
        std::set<std::string> strings;
        for (const auto& a : r.parses) strings.insert(cdg::category_string(r.network, a));
        for (const auto& s : strings) out << s << '\n';
      } else if (common.csv()) {
        out << "parse,position,form,category,role,label,modifiee\n";
        for (std::size_t k = 0; k < r.parses.size(); ++k) {
          for (const auto& pw : cdg::parsed_words(r.network, r.parses[k])) {
            const cdg::Word& w = r.network.words.words[static_cast<std::size_t>(pw.word)];
            for (std::size_t role = 0; role < pw.roles.size(); ++role) {
              const cdg::RoleValue& v = r.network.values[static_cast<std::size_t>(pw.roles[role])];
              out << k << ",\"" << w.span << "\"," << w.form << ',' << w.cat << ',' << g.roles()[role] << ','
                  << g.labels()[static_cast<std::size_t>(v.label)] << ',';
              if (v.mod) {
                out << '"' << *v.mod << '"';
              } else {
                out << "nil";
              }
              out << '\n';
            }
          }
        }
      } else {
        for (std::size_t k = 0; k < r.parses.size(); ++k) {
          if (k) out << '\n';
          cdg::write_parse(out, r.network, r.parses[k]);
        }
      }
      if (trace) {
        *trace << "role values after consistency: " << r.pruned.csp().total_domain_size() << " of "
               << r.network.muse.csp().total_domain_size() << '\n';
      }
      return r.parses.empty() ? kWipeOut : kOk;
    }

    if (*combine) {
      std::vector<NamedCsp> csps;
      for (std::size_t f = 0; f < files.size(); ++f) {
        NamedCsp c{load_instance(files[f]).csp(), {}};
        for (NodeId i = 0; i < c.csp.num_nodes(); ++i) c.names.push_back(std::to_string(f) + "." + std::to_string(i));
        csps.push_back(std::move(c));
      }
      for (const auto& s : shares) {
        const auto eq = s.find('=');
        const auto colon = s.find(':', eq == std::string::npos ? 0 : eq);
        if (eq == std::string::npos || colon == std::string::npos) throw Error("--share expects NAME=FILE:NODE, got " + s);
        const std::size_t f = std::stoul(s.substr(eq + 1, colon - eq - 1));
        const int node = std::stoi(s.substr(colon + 1));
        if (f >= csps.size() || node < 0 || node >= csps[f].csp.num_nodes()) throw Error("--share out of range: " + s);
        csps[f].names[static_cast<std::size_t>(node)] = s.substr(0, eq);
      }
      const auto report = check_mergeable(csps);
      if (!report.ok()) {
        for (const auto& v : report.violations) {
          std::cerr << "cannot share " << v.name << " (condition " << v.condition << "): " << v.detail << '\n';
        }
        return kInputError;
      }
      CombineStats cs;
      const CombinedInstance merged = combine_csps(csps, &cs);
      for (std::size_t i = 0; i < merged.names.size(); ++i) out << "# node " << i << " = " << merged.names[i] << '\n';
      if (cs.fallback) out << "# built as a prefix trie\n";
      write_instance(out, merged.muse);
      return kOk;
    }

    if (*profile) {
      spec.kind = parse_topology(topology);
      spec.seed = common.seed;
      write_profile_csv(out, spec, run_profile(spec, default_p_sweep()));
      return kOk;
    }

    if (*timing) {
      const Language lang = parse_language(language);
      write_timing_csv(out, lang, run_timing(lang, n_from, n_to, reps));
      return kOk;
    }

    if (*oracle) {
      const bool every = suite == "all";
      if (every || suite == "ac") {
        const auto r = ac_oracle_suite(common.seed, count);
        out << "ac: " << r.equal << '/' << r.trials << " equal to the label-level fixpoint; segment-relative "
            << r.segment_relative << ", edge-pairwise " << r.edge_pairwise << ", unclassified " << r.unclassified
            << '\n';
      }
      if (every || suite == "pc") {
        const auto r = pc_oracle_suite(common.seed, count);
        out << "pc: " << r.equal << '/' << r.trials << " equal to the enumeration fixpoint; edge-pairwise "
            << r.edge_pairwise << ", segment-relative " << r.segment_relative << ", unclassified " << r.unclassified
            << '\n';
      }
      if (every || suite == "chain") {
        const auto r = chain_suite(common.seed, count);
        out << "chain: " << r.equal << '/' << r.trials << " equal to AC-4\n";
      }
      if (every || suite == "order") {
        const auto r = order_suite(common.seed, count, count);
        out << "order: " << r.equal << '/' << r.trials << " FIFO = LIFO\n";
      }
      return kOk;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  }
  return kOk;
}
