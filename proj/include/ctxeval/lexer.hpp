#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace ctxeval {

enum class TokenKind {
    Identifier,
    Keyword,
    Number,
    String,
    Op,
};

struct Token {
    TokenKind kind;
    std::string text;
    int line = 0; // 1-based
    int col = 0;  // 1-based
};

/// One logical (statement) line: physical lines joined across open brackets,
/// backslash continuations and multi-line strings. Blank and comment-only
/// lines produce no logical line.
struct LogicalLine {
    int indent = 0;     // leading-whitespace width of the first physical line (tab = next multiple of 8)
    int first_line = 0; // 1-based physical line span
    int last_line = 0;
    std::vector<Token> tokens;
};

bool is_python_keyword(std::string_view word);

/// Tokenize python-like source into logical lines. Throws ParseError on
/// unterminated strings or characters outside the grammar.
std::vector<LogicalLine> lex_logical_lines(std::string_view source);

/// Flat token stream, same grammar, no line structure.
std::vector<Token> lex_tokens(std::string_view source);

/// Identifier tokens only (strings and comments excluded), for presence
/// checks on generated completions. `language` selects the comment/string
/// syntax: "python-like" (#, triple quotes) or "java-like" (//, /* */).
std::vector<std::string> lex_identifiers(std::string_view source, std::string_view language);

} // namespace ctxeval
