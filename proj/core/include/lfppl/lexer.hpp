#ifndef LFPPL_LEXER_HPP
#define LFPPL_LEXER_HPP

#include <string>
#include <string_view>
#include <vector>

#include "lfppl/errors.hpp"

namespace lfppl {

enum class TokenKind {
    OpenParen,
    CloseParen,
    OpenBracket,
    CloseBracket,
    Symbol,
    Number,
};

struct Token {
    TokenKind kind;
    std::string text;
    SourcePos pos;
    double number = 0.0;  // valid when kind == Number
};

// Splits source text into parens, brackets, numbers and symbols.
// `;` starts a comment running to end of line. Paren balance is not
// checked here; that is the parser's job.
std::vector<Token> tokenize(std::string_view source);

}  // namespace lfppl

#endif
