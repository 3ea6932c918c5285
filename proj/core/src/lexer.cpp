#include "lfppl/lexer.hpp"

#include <cctype>
#include <cstdlib>

namespace lfppl {

namespace {

bool is_delimiter(char c) {
    return std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')' ||
           c == '[' || c == ']' || c == ';';
}

}  // namespace

std::vector<Token> tokenize(std::string_view source) {
    std::vector<Token> tokens;
    int line = 1;
    int column = 1;
    size_t i = 0;
    const size_t n = source.size();

    auto advance = [&](size_t count) {
        for (size_t k = 0; k < count; ++k) {
            if (source[i + k] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        i += count;
    };

    while (i < n) {
        char c = source[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (c == ';') {
            size_t end = i;
            while (end < n && source[end] != '\n') ++end;
            advance(end - i);
            continue;
        }
        SourcePos pos{line, column};
        if (c == '(' || c == ')' || c == '[' || c == ']') {
            TokenKind kind = c == '(' ? TokenKind::OpenParen
                           : c == ')' ? TokenKind::CloseParen
                           : c == '[' ? TokenKind::OpenBracket
                                      : TokenKind::CloseBracket;
            tokens.push_back({kind, std::string(1, c), pos, 0.0});
            advance(1);
            continue;
        }
        if (!std::isprint(static_cast<unsigned char>(c))) {
            throw parse_error("invalid character in input", pos);
        }
        size_t end = i;
        while (end < n && !is_delimiter(source[end])) ++end;
        std::string text(source.substr(i, end - i));

        // A run that fully parses as a floating literal is a number; a run
        // starting with a digit that does not is a malformed literal.
        char* parse_end = nullptr;
        double value = std::strtod(text.c_str(), &parse_end);
        bool full_number = parse_end == text.c_str() + text.size();
        if (full_number) {
            tokens.push_back({TokenKind::Number, text, pos, value});
        } else {
            char first = text[0];
            bool signed_digit = (first == '+' || first == '-') && text.size() > 1 &&
                                std::isdigit(static_cast<unsigned char>(text[1]));
            if (std::isdigit(static_cast<unsigned char>(first)) || signed_digit) {
                throw parse_error("malformed number literal '" + text + "'", pos);
            }
            tokens.push_back({TokenKind::Symbol, text, pos, 0.0});
        }
        advance(end - i);
    }
    return tokens;
}

}  // namespace lfppl
