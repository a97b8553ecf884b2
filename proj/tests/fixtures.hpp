#pragma once

#include "musecsp/csp.hpp"
#include "musecsp/muse_graph.hpp"

namespace fixtures {

using namespace musecsp;

// Three nodes n1 -> n2 -> n3 plus the shortcut n1 -> n3; segments {n1,n2,n3}
// and {n1,n3}. Labels: a,b on n1, c on n2, d on n3; every pair permitted.
struct Shortcut {
  static constexpr NodeId n1 = 0, n2 = 1, n3 = 2;
  static constexpr LabelId a = 0, b = 1, c = 2, d = 3;

  static MuseInstance make() {
    CspInstance csp(3, 4);
    csp.domain(n1).clear();
    csp.domain(n1).insert(a);
    csp.domain(n1).insert(b);
    csp.domain(n2).clear();
    csp.domain(n2).insert(c);
    csp.domain(n3).clear();
    csp.domain(n3).insert(d);
    return build_muse(std::move(csp), {{n1, n2}, {n1, n3}, {n2, n3}}, {n1}, {n3});
  }
};

// start -> n1 -> n2 -> {n3 | n4} -> end. Label c on n2 is supported by n1
// but by neither branch; once c goes, a on n1 loses its only partner.
struct DeadBranches {
  static constexpr NodeId n1 = 0, n2 = 1, n3 = 2, n4 = 3;
  static constexpr LabelId a = 0, b = 1, c = 2, d = 3, e = 4, f = 5;

  static MuseInstance make() {
    CspInstance csp(4, 6);
    auto only = [&csp](NodeId i, std::initializer_list<LabelId> ls) {
      csp.domain(i).clear();
      for (LabelId x : ls) csp.domain(i).insert(x);
    };
    only(n1, {a, b});
    only(n2, {c, d});
    only(n3, {e});
    only(n4, {f});
    csp.set_r2(n1, a, n2, d, false);
    csp.set_r2(n1, b, n2, c, false);
    csp.set_r2(n2, c, n3, e, false);
    csp.set_r2(n2, c, n4, f, false);
    return build_muse(std::move(csp), {{n1, n2}, {n2, n3}, {n2, n4}}, {n1}, {n3, n4});
  }
};

// start -> n1 -> n2 -> {n3 | n4} -> end, where a~c holds but a and c each
// fail in a different branch: arc consistent in the MUSE sense, yet neither
// label appears in any solution. Path consistency exposes the bad pair a~c.
struct CrossedBranches {
  static constexpr NodeId n1 = 0, n2 = 1, n3 = 2, n4 = 3;
  static constexpr LabelId a = 0, b = 1, c = 2, d = 3, e = 4, f = 5;

  static MuseInstance make() {
    CspInstance csp(4, 6);
    auto only = [&csp](NodeId i, std::initializer_list<LabelId> ls) {
      csp.domain(i).clear();
      for (LabelId x : ls) csp.domain(i).insert(x);
    };
    only(n1, {a, b});
    only(n2, {c, d});
    only(n3, {e});
    only(n4, {f});
    csp.set_r2(n1, a, n2, d, false);
    csp.set_r2(n1, b, n2, c, false);
    csp.set_r2(n1, a, n3, e, false);
    csp.set_r2(n2, c, n4, f, false);
    return build_muse(std::move(csp), {{n1, n2}, {n2, n3}, {n2, n4}}, {n1}, {n3, n4});
  }
};

// A -> B -> {C | E}, C -> {D | F}; segments {A,B,C,D}, {A,B,C,F}, {A,B,E}.
// b1 only works with E, b2 only with F, b3 is the label for {A,B,C,D}.
struct GuidedSearch {
  static constexpr NodeId A = 0, B = 1, C = 2, D = 3, E = 4, F = 5;
  static constexpr LabelId a1 = 0, b1 = 1, b2 = 2, b3 = 3, c1 = 4, d1 = 5, e1 = 6, f1 = 7;

  static MuseInstance make() {
    CspInstance csp(6, 8);
    auto only = [&csp](NodeId i, std::initializer_list<LabelId> ls) {
      csp.domain(i).clear();
      for (LabelId x : ls) csp.domain(i).insert(x);
    };
    only(A, {a1});
    only(B, {b1, b2, b3});
    only(C, {c1});
    only(D, {d1});
    only(E, {e1});
    only(F, {f1});
    csp.set_r2(B, b1, C, c1, false);
    csp.set_r2(B, b2, D, d1, false);
    csp.set_r2(B, b3, F, f1, false);
    return build_muse(std::move(csp), {{A, B}, {B, C}, {B, E}, {C, D}, {C, F}}, {A}, {D, E, F});
  }
};

}  // namespace fixtures
