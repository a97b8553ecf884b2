#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "musecsp/cdg/sexpr.hpp"
#include "musecsp/cdg/word_graph.hpp"
#include "musecsp/error.hpp"

namespace musecsp::cdg {

/// What a formula sees of one role value.
struct RoleView {
  Interval pos;
  int cat = -1;  // symbol ids
  int rid = -1;
  int lab = -1;
  std::optional<Interval> mod;
};

struct Value {
  enum Kind { nil, symbol, interval, boolean } kind = nil;
  int sym = -1;
  Interval iv;
  bool b = false;
};

inline bool values_equal(const Value& p, const Value& q) {
  if (p.kind != q.kind) return false;
  switch (p.kind) {
    case Value::nil:
      return true;
    case Value::symbol:
      return p.sym == q.sym;
    case Value::interval:
      return p.iv == q.iv;
    case Value::boolean:
      return p.b == q.b;
  }
  return false;
}

/// One `(if antecedent consequent)` compiled to a flat tree.
class Formula {
 public:
  enum class Op { pos, rid, lab, mod, cat, constant, nil, eq, lt, gt, and_, or_, not_ };

  int arity() const { return arity_; }
  const SExpr& source() const { return source_; }

  /// True unless the antecedent holds and the consequent fails.
  bool holds(const RoleView& x, const RoleView* y = nullptr) const {
    const RoleView* vars[2] = {&x, y};
    return !truth(antecedent_, vars) || truth(consequent_, vars);
  }

 private:
  struct Node {
    Op op;
    int var = 0;  // 0 = x, 1 = y
    int sym = -1;
    std::vector<int> kids;
  };

  bool truth(int k, const RoleView* const* v) const {
    const Node& n = nodes_[static_cast<std::size_t>(k)];
    switch (n.op) {
      case Op::eq:
        return values_equal(value(n.kids[0], v), value(n.kids[1], v));
      case Op::lt:
      case Op::gt: {
        Value p = value(n.kids[0], v), q = value(n.kids[1], v);
        if (p.kind != Value::interval || q.kind != Value::interval) return false;
        return interval_compare(p.iv, q.iv) == (n.op == Op::lt ? Cmp::lt : Cmp::gt);
      }
      case Op::and_:
        for (int c : n.kids) {
          if (!truth(c, v)) return false;
        }
        return true;
      case Op::or_:
        for (int c : n.kids) {
          if (truth(c, v)) return true;
        }
        return false;
      case Op::not_:
        return !truth(n.kids[0], v);
      default:
        return false;
    }
  }

  Value value(int k, const RoleView* const* v) const {
    const Node& n = nodes_[static_cast<std::size_t>(k)];
    Value out;
    switch (n.op) {
      case Op::pos:
        out.kind = Value::interval;
        out.iv = v[n.var]->pos;
        break;
      case Op::mod:
        if (v[n.var]->mod) {
          out.kind = Value::interval;
          out.iv = *v[n.var]->mod;
        }
        break;
      case Op::rid:
      case Op::lab:
      case Op::cat:
        out.kind = Value::symbol;
        out.sym = n.op == Op::rid ? v[n.var]->rid : n.op == Op::lab ? v[n.var]->lab : v[n.var]->cat;
        break;
      case Op::constant:
        out.kind = Value::symbol;
        out.sym = n.sym;
        break;
      default:
        break;
    }
    return out;
  }

  friend class Grammar;
  SExpr source_;
  std::vector<Node> nodes_;
  int antecedent_ = -1;
  int consequent_ = -1;
  int arity_ = 1;
};

/// A CDG grammar: categories, roles, labels and constraints.
class Grammar {
 public:
  const std::vector<std::string>& categories() const { return categories_; }
  const std::vector<std::string>& roles() const { return roles_; }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<Formula>& constraints() const { return constraints_; }
  int degree() const { return static_cast<int>(roles_.size()); }

  int count(int arity) const {
    int k = 0;
    for (const auto& f : constraints_) k += f.arity() == arity;
    return k;
  }

  /// Symbol id of a name, -1 when unknown.
  int symbol(const std::string& name) const {
    auto it = symbols_.find(name);
    return it == symbols_.end() ? -1 : it->second;
  }
  const std::string& symbol_name(int id) const { return names_.at(static_cast<std::size_t>(id)); }

  /// Grammar text: `(categories ...)`, `(roles ...)`, `(labels ...)` and any
  /// number of `(if antecedent consequent)` forms.
  static Grammar parse(const std::string& text) {
    Grammar g;
    std::vector<const SExpr*> formulas;
    const auto forms = read_sexprs(text);
    for (const SExpr& f : forms) {
      if (f.is_atom() || f.items.empty() || !f.items[0].is_atom()) throw ParseError(f.line, f.column, "expected a form");
      const std::string& head = f.items[0].atom;
      std::vector<std::string>* dest = head == "categories" ? &g.categories_
                                       : head == "roles"    ? &g.roles_
                                       : head == "labels"   ? &g.labels_
                                                            : nullptr;
      if (dest) {
        for (std::size_t k = 1; k < f.items.size(); ++k) {
          if (!f.items[k].is_atom()) throw ParseError(f.items[k].line, f.items[k].column, "expected a name");
          dest->push_back(f.items[k].atom);
          g.intern(f.items[k].atom);
        }
      } else if (head == "if") {
        formulas.push_back(&f);
      } else {
        throw ParseError(f.line, f.column, "unknown form '" + head + "'");
      }
    }
    if (g.roles_.empty() || g.labels_.empty()) throw GrammarError("grammar needs roles and labels");
    g.intern("nil");
    for (const SExpr* f : formulas) g.constraints_.push_back(g.compile(*f));
    return g;
  }

 private:
  int intern(const std::string& s) {
    auto [it, fresh] = symbols_.emplace(s, static_cast<int>(names_.size()));
    if (fresh) names_.push_back(s);
    return it->second;
  }

  [[noreturn]] static void bad(const SExpr& e, const std::string& what) {
    throw GrammarError("line " + std::to_string(e.line) + ", column " + std::to_string(e.column) + ": " + what);
  }

  Formula compile(const SExpr& f) const {
    if (f.items.size() != 3) bad(f, "if takes an antecedent and a consequent");
    Formula out;
    out.source_ = f;
    std::vector<char> used(2, 0);
    out.antecedent_ = compile_bool(f.items[1], out, used);
    out.consequent_ = compile_bool(f.items[2], out, used);
    if (used[1] && !used[0]) {
      // a one-variable formula written over y
      for (auto& n : out.nodes_) n.var = 0;
      used = {1, 0};
    }
    out.arity_ = used[1] ? 2 : 1;
    return out;
  }

  int add(Formula& f, Formula::Node n) const {
    f.nodes_.push_back(std::move(n));
    return static_cast<int>(f.nodes_.size()) - 1;
  }

  int compile_bool(const SExpr& e, Formula& f, std::vector<char>& used) const {
    if (e.is_atom() || e.items.empty() || !e.items[0].is_atom()) bad(e, "expected a predicate or connective");
    const std::string& h = e.items[0].atom;
    using Op = Formula::Op;
    if (h == "=" || h == "<" || h == ">") {
      if (e.items.size() != 3) bad(e, "predicate " + h + " takes two arguments");
      const int p = compile_value(e.items[1], f, used);
      const int q = compile_value(e.items[2], f, used);
      return add(f, {h == "=" ? Op::eq : h == "<" ? Op::lt : Op::gt, 0, -1, {p, q}});
    }
    if (h == "and" || h == "or") {
      if (e.items.size() < 2) bad(e, h + " needs arguments");
      Formula::Node n{h == "and" ? Op::and_ : Op::or_, 0, -1, {}};
      for (std::size_t k = 1; k < e.items.size(); ++k) n.kids.push_back(compile_bool(e.items[k], f, used));
      return add(f, std::move(n));
    }
    if (h == "not") {
      if (e.items.size() != 2) bad(e, "not takes one argument");
      const int c = compile_bool(e.items[1], f, used);
      return add(f, {Op::not_, 0, -1, {c}});
    }
    bad(e, "unknown predicate or connective '" + h + "'");
  }

  int variable(const SExpr& e, std::vector<char>& used) const {
    if (!e.is_atom()) bad(e, "expected a variable");
    if (e.atom == "x" || e.atom == "y") {
      const int v = e.atom == "x" ? 0 : 1;
      used[static_cast<std::size_t>(v)] = 1;
      return v;
    }
    bad(e, "unknown variable '" + e.atom + "' (arity above 2 is not supported)");
  }

  int compile_value(const SExpr& e, Formula& f, std::vector<char>& used) const {
    using Op = Formula::Op;
    if (e.is_atom()) {
      if (e.atom == "nil") return add(f, {Op::nil, 0, -1, {}});
      if (e.atom == "x" || e.atom == "y") bad(e, "a variable must be wrapped in a function");
      const int s = symbol(e.atom);
      if (s < 0) bad(e, "unknown constant '" + e.atom + "'");
      return add(f, {Op::constant, 0, s, {}});
    }
    if (e.items.size() != 2 || !e.items[0].is_atom()) bad(e, "expected a function call");
    const std::string& fn = e.items[0].atom;
    const SExpr& arg = e.items[1];
    if (fn == "cat" && arg.is_list()) {
      // (cat (pos v)) is the category of v's word
      if (arg.items.size() == 2 && arg.items[0].is_atom() && arg.items[0].atom == "pos") {
        return add(f, {Op::cat, variable(arg.items[1], used), -1, {}});
      }
      bad(arg, "cat takes a variable or (pos variable)");
    }
    const int v = variable(arg, used);
    if (fn == "pos") return add(f, {Op::pos, v, -1, {}});
    if (fn == "rid") return add(f, {Op::rid, v, -1, {}});
    if (fn == "lab") return add(f, {Op::lab, v, -1, {}});
    if (fn == "mod") return add(f, {Op::mod, v, -1, {}});
    if (fn == "cat") return add(f, {Op::cat, v, -1, {}});
    bad(e, "unknown function '" + fn + "'");
  }

  std::vector<std::string> categories_, roles_, labels_;
  std::vector<Formula> constraints_;
  std::map<std::string, int> symbols_;
  std::vector<std::string> names_;
};

namespace grammars {

inline constexpr const char* g1 = R"(
(categories det noun verb)
(roles governor)
(labels det root subj)

; unary
(if (= (cat x) det)
    (and (= (lab x) det)
         (< (pos x) (mod x))))
(if (= (cat x) noun)
    (and (= (lab x) subj)
         (< (pos x) (mod x))))
(if (= (cat x) verb)
    (and (= (lab x) root)
         (= (mod x) nil)))

; binary
(if (and (= (lab x) det)
         (= (mod x) (pos y)))
    (= (cat y) noun))
)";

inline constexpr const char* g2_unary_and_displayed = R"(
(categories a b c)
(roles governor)
(labels a b c)

; 3 unary constraints
(if (and (= (cat x) a)
         (= (rid x) governor))
    (and (= (lab x) a)
         (> (mod x) (pos x))))
(if (and (= (cat x) b)
         (= (rid x) governor))
    (and (= (lab x) b)
         (< (mod x) (pos x))))
(if (and (= (cat x) c)
         (= (rid x) governor))
    (and (= (lab x) c)
         (< (mod x) (pos x))))

; binary constraints
(if (and (= (lab x) a)
         (or (= (lab y) b)
             (= (lab y) c)))
    (< (pos x) (pos y)))
(if (and (= (lab x) b)
         (= (lab y) a)
         (> (pos x) (pos y)))
    (< (mod x) (mod y)))
(if (and (= (lab x) a)
         (= (mod x) (pos y))
         (= (rid y) governor))
    (= (lab y) c))
(if (and (= (lab x) b)
         (= (mod x) (pos y))
         (= (rid y) governor))
    (= (lab y) a))
(if (and (= (lab x) c)
         (= (mod x) (pos y))
         (= (rid y) governor))
    (= (lab y) b))
)";

// same-label pairs modify in reverse order
inline constexpr const char* g2_ordering = R"(
(if (and (= (lab x) a)
         (= (lab y) a)
         (< (pos x) (pos y)))
    (> (mod x) (mod y)))
(if (and (= (lab x) b)
         (= (lab y) b)
         (< (pos x) (pos y)))
    (> (mod x) (mod y)))
(if (and (= (lab x) c)
         (= (lab y) c)
         (< (pos x) (pos y)))
    (> (mod x) (mod y)))
)";

inline constexpr const char* g3 = R"(
(categories a b c)
(roles governor)
(labels w1 w2)

; 2 unary constraints
(if (= (lab x) w1)
    (< (pos x) (mod x)))
(if (= (lab x) w2)
    (> (pos x) (mod x)))

; 6 binary constraints
(if (and (= (lab x) w1)
         (= (lab y) w2))
    (< (pos x) (pos y)))
(if (and (= (lab x) w1)
         (= (lab y) w2))
    (> (mod x) (mod y)))
(if (and (= (lab x) w1)
         (= (lab y) w1)
         (> (pos x) (pos y)))
    (> (mod x) (mod y)))
(if (and (= (lab x) w2)
         (= (lab y) w2)
         (> (pos x) (pos y)))
    (< (mod x) (mod y)))
(if (and (= (lab x) w1)
         (= (mod x) (pos y)))
    (and (= (lab y) w2)
         (= (cat x) (cat y))))
(if (and (= (lab x) w2)
         (= (mod x) (pos y)))
    (= (lab y) w1))
)";

}  // namespace grammars

/// Built-in grammars: "g1", "g2", "g2-displayed" (without the three ordering
/// constraints), "g3".
inline Grammar builtin_grammar(const std::string& which) {
  if (which == "g1") return Grammar::parse(grammars::g1);
  if (which == "g2") return Grammar::parse(std::string(grammars::g2_unary_and_displayed) + grammars::g2_ordering);
  if (which == "g2-displayed") return Grammar::parse(grammars::g2_unary_and_displayed);
  if (which == "g3") return Grammar::parse(grammars::g3);
  throw GrammarError("unknown built-in grammar '" + which + "'");
}

}  // namespace musecsp::cdg
