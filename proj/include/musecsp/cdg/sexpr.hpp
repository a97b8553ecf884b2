#pragma once

#include <cctype>
#include <ostream>
#include <string>
#include <vector>

#include "musecsp/error.hpp"

namespace musecsp::cdg {

/// Atom or list, with the source position of its first character.
struct SExpr {
  std::string atom;  // empty for lists
  std::vector<SExpr> items;
  int line = 0;
  int column = 0;

  bool is_atom() const { return !atom.empty(); }
  bool is_list() const { return atom.empty(); }
};

inline std::ostream& operator<<(std::ostream& os, const SExpr& e) {
  if (e.is_atom()) return os << e.atom;
  os << '(';
  for (std::size_t k = 0; k < e.items.size(); ++k) os << (k ? " " : "") << e.items[k];
  return os << ')';
}

/// Reads every top-level form. `;` comments run to end of line.
inline std::vector<SExpr> read_sexprs(const std::string& text) {
  std::size_t p = 0;
  int line = 1, col = 1;
  auto advance = [&] {
    if (text[p] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    ++p;
  };
  auto skip = [&] {
    while (p < text.size()) {
      if (text[p] == ';') {
        while (p < text.size() && text[p] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(text[p]))) {
        advance();
      } else {
        break;
      }
    }
  };

  std::vector<SExpr> top;
  std::vector<SExpr> open;
  for (skip(); p < text.size(); skip()) {
    const char c = text[p];
    if (c == '(') {
      SExpr list;
      list.line = line;
      list.column = col;
      open.push_back(std::move(list));
      advance();
    } else if (c == ')') {
      if (open.empty()) throw ParseError(line, col, "unbalanced ')'");
      SExpr done = std::move(open.back());
      open.pop_back();
      advance();
      (open.empty() ? top : open.back().items).push_back(std::move(done));
    } else {
      SExpr a;
      a.line = line;
      a.column = col;
      while (p < text.size() && text[p] != '(' && text[p] != ')' && text[p] != ';' &&
             !std::isspace(static_cast<unsigned char>(text[p]))) {
        a.atom.push_back(text[p]);
        advance();
      }
      (open.empty() ? top : open.back().items).push_back(std::move(a));
    }
  }
  if (!open.empty()) throw ParseError(open.back().line, open.back().column, "unclosed '('");
  return top;
}

}  // namespace musecsp::cdg
