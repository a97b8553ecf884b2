#pragma once

#include <stdexcept>
#include <string>

namespace musecsp {

// Base for everything the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed segment DAG: cycles, dangling nodes, bad ids.
class GraphError : public Error {
 public:
  using Error::Error;
};

// Text-format parse failure; carries the 1-based line (and column when known).
class ParseError : public Error {
 public:
  ParseError(int line, int column, const std::string& what)
      : Error(format(line, column, what)), line_(line), column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  static std::string format(int line, int column, const std::string& what) {
    std::string out = "line " + std::to_string(line);
    if (column > 0) out += ", column " + std::to_string(column);
    return out + ": " + what;
  }

  int line_;
  int column_;
};

// Grammar definition or formula is unusable (unknown function, arity > 2, ...).
class GrammarError : public Error {
 public:
  using Error::Error;
};

}  // namespace musecsp
