#ifndef COWS_PARSER_HPP
#define COWS_PARSER_HPP

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cows/ast.hpp"

namespace cows {

/// Positioned syntax or validation error. Lines and columns are 1-based.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string message, int line, int column,
             std::vector<std::string> expected = {});

  int line() const { return line_; }
  int column() const { return column_; }
  const std::vector<std::string>& expected() const { return expected_; }

 private:
  int line_, column_;
  std::vector<std::string> expected_;
};

/// Parses a model in the listing dialect:
///   let f(x,y) = body ... in main end
/// with invoke `p.o!<e1,...>`, receive `p.o?<p1,...>.cont`, delimitation
/// `[x]` / `[x#]`, replication `*P`, parallel `|`, receive-guarded choice
/// `+`, protection `{| P |}`, kill `kill(k)` and `//` line comments.
/// Throws ParseError on malformed input; never crashes on arbitrary bytes.
Model parseModel(std::string_view source);

/// Parses a single term with the given variable scope (used by tests and
/// generated-term round-trips). Same error behaviour as parseModel.
TermPtr parseTerm(std::string_view source);

}  // namespace cows

#endif
