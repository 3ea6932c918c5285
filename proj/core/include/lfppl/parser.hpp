#ifndef LFPPL_PARSER_HPP
#define LFPPL_PARSER_HPP

#include <string_view>
#include <vector>

#include "lfppl/ast.hpp"
#include "lfppl/lexer.hpp"

namespace lfppl {

// Parses a token stream into a surface-syntax tree. Recognizes the special
// forms let/if/sample/observe, the operator table (core operators plus the
// sugar forms <, max, vector, nth) and distribution constructors inside
// sample/observe. factor is rejected outside observe.
ExprPtr parse_tokens(const std::vector<Token>& tokens);

// tokenize + parse.
ExprPtr parse_text(std::string_view source);

bool is_core_op(const std::string& name);
bool is_distribution_name(const std::string& name);

}  // namespace lfppl

#endif
