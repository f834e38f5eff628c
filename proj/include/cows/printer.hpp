#ifndef COWS_PRINTER_HPP
#define COWS_PRINTER_HPP

#include <string>

#include "cows/ast.hpp"

namespace cows {

/// Renders a model in the dialect grammar. The output re-parses to a model
/// alpha-equivalent to the input.
std::string prettyPrint(const Model& m);

std::string printTerm(const TermPtr& t);
std::string printExpr(const ExprPtr& e);

/// Deterministic indentation-structured AST dump (the `--dump-ast` format).
std::string dumpAst(const Model& m);

}  // namespace cows

#endif
