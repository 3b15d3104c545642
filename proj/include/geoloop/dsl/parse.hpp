#pragma once

#include <stdexcept>
#include <string>

#include "geoloop/dsl/ast.hpp"

namespace geoloop::dsl {

enum class ParseErrorKind {
  SyntaxError,
  UndefinedIdentifier,
  DuplicateIdentifier,
  MissingAsk,
};

class ParseError : public std::runtime_error {
 public:
  ParseError(ParseErrorKind kind, int line, int col, std::string detail)
      : std::runtime_error(format(kind, line, col, detail)),
        kind(kind),
        line(line),
        col(col),
        detail(std::move(detail)) {}

  ParseErrorKind kind;
  int line;  // 1-based; 0 when not tied to a line (MissingAsk)
  int col;   // 1-based
  std::string detail;  // offending identifier or "expected ..." note

 private:
  static std::string format(ParseErrorKind kind, int line, int col,
                            const std::string& detail);
};

// Parses the line-oriented construction language. `#` starts a comment,
// blank lines are ignored. Throws ParseError on any malformed input.
ConstructionProgram parse(const std::string& source);

}  // namespace geoloop::dsl
