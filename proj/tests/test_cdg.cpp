#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <sstream>

#include "musecsp/cdg/parser.hpp"
#include "musecsp/cdg/sexpr.hpp"

using namespace musecsp;
using namespace musecsp::cdg;

namespace {

std::set<std::string> strings_of(const ParseResult& r) {
  std::set<std::string> out;
  for (const auto& a : r.parses) out.insert(category_string(r.network, a));
  return out;
}

std::string rendered(const ParseResult& r, std::size_t k) {
  std::ostringstream os;
  write_parse(os, r.network, r.parses.at(k));
  return os.str();
}

}  // namespace

TEST_CASE("interval comparison", "[cdg]") {
  const Interval p{1, 2}, q{2, 3}, wide{1, 3};
  CHECK(interval_compare(p, p) == Cmp::eq);
  CHECK(interval_compare(p, q) == Cmp::lt);
  CHECK(interval_compare(q, p) == Cmp::gt);
  CHECK(interval_compare(Interval{1, 2}, Interval{4, 6}) == Cmp::lt);
  CHECK(interval_compare(wide, q) == Cmp::incomparable);
  CHECK(interval_compare(wide, p) == Cmp::incomparable);
  CHECK(interval_compare(std::nullopt, p) == Cmp::incomparable);
  CHECK(interval_compare(std::nullopt, std::nullopt) == Cmp::incomparable);
}

TEST_CASE("s-expressions keep positions and reject imbalance", "[cdg]") {
  auto forms = read_sexprs("; comment\n(a (b c)) d\n");
  REQUIRE(forms.size() == 2);
  CHECK(forms[0].line == 2);
  CHECK(forms[0].items[1].items[1].atom == "c");
  CHECK(forms[1].column == 11);
  std::ostringstream os;
  os << forms[0];
  CHECK(os.str() == "(a (b c))");
  CHECK_THROWS_AS(read_sexprs("(a"), ParseError);
  CHECK_THROWS_AS(read_sexprs("a)"), ParseError);
}

TEST_CASE("grammar shapes", "[cdg]") {
  auto g1 = builtin_grammar("g1");
  CHECK(g1.categories() == std::vector<std::string>{"det", "noun", "verb"});
  CHECK(g1.count(1) == 3);
  CHECK(g1.count(2) == 1);
  auto g2 = builtin_grammar("g2");
  CHECK(g2.degree() == 1);
  CHECK(g2.labels() == std::vector<std::string>{"a", "b", "c"});
  CHECK(g2.count(1) == 3);
  CHECK(g2.count(2) == 8);
  CHECK(builtin_grammar("g2-displayed").count(2) == 5);
  auto g3 = builtin_grammar("g3");
  CHECK(g3.labels() == std::vector<std::string>{"w1", "w2"});
  CHECK(g3.count(1) == 2);
  CHECK(g3.count(2) == 6);
  CHECK_THROWS_AS(builtin_grammar("g9"), GrammarError);
}

TEST_CASE("grammar errors", "[cdg]") {
  const std::string head = "(categories a) (roles r) (labels l)\n";
  CHECK_THROWS_AS(Grammar::parse(head + "(if (= (frob x) l) (= (lab x) l))"), GrammarError);
  CHECK_THROWS_AS(Grammar::parse(head + "(if (= (lab z) l) (= (lab x) l))"), GrammarError);
  CHECK_THROWS_AS(Grammar::parse(head + "(if (= (lab x) zzz) (= (lab x) l))"), GrammarError);
  CHECK_THROWS_AS(Grammar::parse(head + "(if (= (lab x) l)"), ParseError);
  CHECK_NOTHROW(Grammar::parse(head + "(if (= (cat (pos x)) a) (= (lab x) l))"));
}

TEST_CASE("the dog eats", "[cdg]") {
  auto r = parse(sentence({{"the", "det"}, {"dog", "noun"}, {"eats", "verb"}}), builtin_grammar("g1"));
  REQUIRE(r.parses.size() == 1);
  CHECK(rendered(r, 0) ==
        "pos=(1,2) the det governor=det-(2,3)\n"
        "pos=(2,3) dog noun governor=subj-(3,4)\n"
        "pos=(3,4) eats verb governor=root-nil\n");
  // MUSE AC-1 alone already settles the chain
  CHECK(r.pruned.csp().total_domain_size() == 3);
}

TEST_CASE("chain networks agree with plain arc consistency", "[cdg]") {
  auto g = builtin_grammar("g1");
  auto net = build_network(sentence({{"the", "det"}, {"dog", "noun"}, {"eats", "verb"}}), g);
  auto plain = ac4(enforce_node_consistency(net.muse.csp()));
  auto r = parse(net.words, g);
  CHECK(same_domains(plain, r.pruned.csp()));
}

TEST_CASE("a word with no constraints keeps every nil value", "[cdg]") {
  auto g = Grammar::parse("(categories a) (roles r s) (labels l m)");
  auto net = build_network(sentence({{"x", "a"}}), g);
  REQUIRE(net.muse.csp().num_nodes() == 2);
  for (NodeId i = 0; i < 2; ++i) {
    const auto labels = net.muse.csp().domain(i).labels();
    REQUIRE(labels.size() == 2);
    for (LabelId a : labels) CHECK_FALSE(net.values[static_cast<std::size_t>(a)].mod);
  }
  auto r = parse(net.words, g);
  CHECK(r.parses.size() == 4);
}

TEST_CASE("modifiees overlapping another word clash", "[cdg]") {
  // two readings of (1,3): one long word, or two short ones
  WordGraph wg;
  wg.words = {{"ab", "ab", "a", {1, 3}}, {"a", "a", "a", {1, 2}}, {"b", "b", "a", {2, 3}}, {"z", "z", "a", {3, 4}}};
  wg.edges = {{0, 3}, {1, 2}, {2, 3}};
  wg.starts = {0, 1};
  wg.ends = {3};
  auto g = Grammar::parse("(categories a) (roles r) (labels l)");
  auto net = build_network(wg, g);
  const auto& c = net.muse.csp();
  // z pointing at (1,2) cannot coexist with the long word ab
  const LabelId to_short = net.value_id("l", Interval{1, 2});
  const LabelId nil = net.value_id("l", std::nullopt);
  REQUIRE(to_short >= 0);
  CHECK_FALSE(c.r2(3, to_short, 0, nil));
  CHECK(c.r2(3, to_short, 2, nil));
  // ab and a never share a hypothesis, so neither may point at the other
  CHECK_FALSE(c.domain(0).contains(net.value_id("l", Interval{1, 2})));
  CHECK_FALSE(c.domain(1).contains(net.value_id("l", Interval{1, 3})));
  auto r = parse(wg, g);
  for (const auto& a : r.parses) CHECK(verify_solution(r.pruned, a));
  CHECK(strings_of(r) == std::set<std::string>{"a a", "a a a"});
}

TEST_CASE("G2 accepts exactly a^n b^n c^n", "[cdg][g2]") {
  auto g = builtin_grammar("g2");
  for (int n = 1; n <= 3; ++n) {
    auto r = parse(full_lattice(3 * n), g);
    REQUIRE(r.parses.size() == 1);
    CHECK(category_string(r.network, r.parses[0]) ==
          [n] {
            std::string s;
            for (char ch : {'a', 'b', 'c'}) {
              for (int k = 0; k < n; ++k) s += s.empty() ? std::string(1, ch) : std::string(" ") + ch;
            }
            return s;
          }());
  }
  for (int len : {1, 2, 4, 5}) {
    auto r = parse(full_lattice(len), g);
    CHECK(r.parses.empty());
    CHECK(is_totally_wiped_out(r.pruned.csp()));
  }
}

TEST_CASE("G2 on nine positions reverses each block", "[cdg][g2]") {
  auto r = parse(full_lattice(9), builtin_grammar("g2"));
  REQUIRE(r.parses.size() == 1);
  CHECK(rendered(r, 0) ==
        "pos=(1,2) a a governor=a-(9,10)\n"
        "pos=(2,3) a a governor=a-(8,9)\n"
        "pos=(3,4) a a governor=a-(7,8)\n"
        "pos=(4,5) b b governor=b-(3,4)\n"
        "pos=(5,6) b b governor=b-(2,3)\n"
        "pos=(6,7) b b governor=b-(1,2)\n"
        "pos=(7,8) c c governor=c-(6,7)\n"
        "pos=(8,9) c c governor=c-(5,6)\n"
        "pos=(9,10) c c governor=c-(4,5)\n");
}

TEST_CASE("the displayed G2 constraints alone over-generate", "[cdg][g2]") {
  auto r = parse(full_lattice(4), builtin_grammar("g2-displayed"));
  CHECK(r.parses.size() == 7);
}

TEST_CASE("G3 accepts ww", "[cdg][g3]") {
  auto g = builtin_grammar("g3");
  int expected = 1;
  for (int len = 2; len <= 8; len += 2) {
    expected *= 3;
    auto r = parse(full_lattice(len), g);
    auto s = strings_of(r);
    CHECK(static_cast<int>(s.size()) == expected);
    for (const auto& str : s) CHECK(str.substr(0, str.size() / 2) == str.substr(str.size() / 2 + 1));
  }
  for (int len : {1, 3, 5, 7}) {
    auto r = parse(full_lattice(len), g);
    CHECK(is_totally_wiped_out(r.pruned.csp()));
  }
}

TEST_CASE("unconstrained search finds the same parses", "[cdg]") {
  auto g = builtin_grammar("g2");
  auto guided = parse(full_lattice(6), g);
  auto raw = parse(full_lattice(6), g, {QueueOrder::fifo, false});
  REQUIRE(raw.parses.size() == guided.parses.size());
  CHECK(raw.parses[0] == guided.parses[0]);
}

TEST_CASE("word graph files", "[cdg]") {
  auto wg = full_lattice(2);
  std::ostringstream os;
  write_word_graph(os, wg);
  std::istringstream in(os.str());
  auto back = read_word_graph(in);
  CHECK(back.size() == wg.size());
  CHECK(back.edges == wg.edges);
  CHECK(back.starts == wg.starts);
  CHECK(back.ends == wg.ends);

  auto line_of = [](const std::string& text) {
    std::istringstream s(text);
    try {
      read_word_graph(s);
    } catch (const ParseError& e) {
      return e.line();
    }
    return 0;
  };
  CHECK(line_of("WORD w x a 1 2\nWEDGE w v\n") == 2);
  CHECK(line_of("WORD w x a 2 2\n") == 1);
  CHECK(line_of("WORD w x a 1\n") == 1);
  CHECK(line_of("WORD w x a 1 2\nWORD w y a 2 3\n") == 2);
  CHECK(line_of("# c\nBOGUS\n") == 2);

  std::istringstream gap("WORD u x a 1 2\nWORD v y a 3 4\nWEDGE u v\nWSTART u\nWEND v\n");
  CHECK_THROWS_AS(read_word_graph(gap).skeleton(), GraphError);
  CHECK_THROWS_AS(build_network(sentence({{"x", "q"}}), builtin_grammar("g2")), GrammarError);
}
