#include "ctxeval/lexer.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <unordered_set>

#include "ctxeval/error.hpp"

namespace ctxeval {

namespace {

const std::unordered_set<std::string_view> kPythonKeywords = {
    "False", "None", "True", "and", "as", "assert", "async", "await",
    "break", "class", "continue", "def", "del", "elif", "else", "except",
    "finally", "for", "from", "global", "if", "import", "in", "is",
    "lambda", "nonlocal", "not", "or", "pass", "raise", "return", "try",
    "while", "with", "yield",
};

// Multi-character operators, longest first so greedy matching works.
const std::array<std::string_view, 26> kMultiOps = {
    "**=", "//=", ">>=", "<<=", "...", "!=", ">=", "<=", "==", "->",
    ":=", "+=", "-=", "*=", "/=", "%=", "@=", "&=", "|=", "^=", "**",
    "//", ">>", "<<", "&&", "||",
};

bool is_ident_start(unsigned char c) {
    return std::isalpha(c) || c == '_' || c >= 0x80;
}

bool is_ident_cont(unsigned char c) {
    return std::isalnum(c) || c == '_' || c >= 0x80;
}

struct Cursor {
    std::string_view src;
    std::size_t pos = 0;
    int line = 1;
    int col = 1;

    bool done() const { return pos >= src.size(); }
    char peek(std::size_t off = 0) const {
        return pos + off < src.size() ? src[pos + off] : '\0';
    }
    char advance() {
        char c = src[pos++];
        if (c == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
        return c;
    }
};

bool is_string_prefix(std::string_view word) {
    if (word.size() > 2) return false;
    for (char c : word) {
        char l = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        if (l != 'r' && l != 'b' && l != 'u' && l != 'f') return false;
    }
    return !word.empty();
}

// Consumes a string literal; cur sits on the opening quote. The returned
// token text is the raw literal including quotes (prefix excluded).
Token scan_string(Cursor& cur, bool raw) {
    int start_line = cur.line;
    int start_col = cur.col;
    std::string text;
    char quote = cur.peek();
    bool triple = cur.peek(1) == quote && cur.peek(2) == quote;
    int n_quotes = triple ? 3 : 1;
    for (int i = 0; i < n_quotes; ++i) text += cur.advance();

    while (true) {
        if (cur.done())
            throw ParseError("unterminated string literal", start_line, start_col);
        char c = cur.peek();
        if (!triple && c == '\n')
            throw ParseError("unterminated string literal", start_line, start_col);
        if (c == '\\') {
            text += cur.advance();
            if (cur.done())
                throw ParseError("unterminated string literal", start_line, start_col);
            text += cur.advance();
            (void)raw; // raw strings still cannot end on a quote shielded by a backslash
            continue;
        }
        if (c == quote) {
            if (!triple) {
                text += cur.advance();
                return {TokenKind::String, text, start_line, start_col};
            }
            if (cur.peek(1) == quote && cur.peek(2) == quote) {
                for (int i = 0; i < 3; ++i) text += cur.advance();
                return {TokenKind::String, text, start_line, start_col};
            }
        }
        text += cur.advance();
    }
}

Token scan_number(Cursor& cur) {
    int start_line = cur.line;
    int start_col = cur.col;
    std::string text;
    text += cur.advance();
    while (!cur.done()) {
        char c = cur.peek();
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.') {
            text += cur.advance();
        } else if ((c == '+' || c == '-') && !text.empty() &&
                   (text.back() == 'e' || text.back() == 'E') &&
                   text.find_first_not_of("0123456789") != std::string::npos) {
            text += cur.advance();
        } else {
            break;
        }
    }
    return {TokenKind::Number, text, start_line, start_col};
}

int indent_width(std::string_view line) {
    int width = 0;
    for (char c : line) {
        if (c == ' ') ++width;
        else if (c == '\t') width += 8 - width % 8;
        else break;
    }
    return width;
}

bool bracket_open(char c) { return c == '(' || c == '[' || c == '{'; }
bool bracket_close(char c) { return c == ')' || c == ']' || c == '}'; }

} // namespace

bool is_python_keyword(std::string_view word) {
    return kPythonKeywords.count(word) > 0;
}

std::vector<LogicalLine> lex_logical_lines(std::string_view source) {
    std::vector<LogicalLine> lines;
    Cursor cur{source};
    LogicalLine current;
    int depth = 0;
    bool in_statement = false;

    auto flush = [&](int last_line) {
        if (!current.tokens.empty()) {
            current.last_line = last_line;
            lines.push_back(std::move(current));
        }
        current = LogicalLine{};
        in_statement = false;
    };

    while (!cur.done()) {
        // At a fresh physical line outside any statement: measure indent.
        if (!in_statement && cur.col == 1) {
            std::size_t eol = source.find('\n', cur.pos);
            std::string_view phys = source.substr(
                cur.pos, eol == std::string_view::npos ? std::string_view::npos : eol - cur.pos);
            current.indent = indent_width(phys);
        }

        char c = cur.peek();
        if (c == '\n') {
            int line_no = cur.line;
            cur.advance();
            if (depth == 0 && in_statement) flush(line_no);
            continue;
        }
        if (c == ' ' || c == '\t' || c == '\r') {
            cur.advance();
            continue;
        }
        if (c == '#') {
            while (!cur.done() && cur.peek() != '\n') cur.advance();
            continue;
        }
        if (c == '\\' && cur.peek(1) == '\n') {
            cur.advance();
            cur.advance();
            continue;
        }

        if (!in_statement) {
            in_statement = true;
            current.first_line = cur.line;
        }

        if (is_ident_start(static_cast<unsigned char>(c))) {
            int start_line = cur.line;
            int start_col = cur.col;
            std::string word;
            while (!cur.done() && is_ident_cont(static_cast<unsigned char>(cur.peek())))
                word += cur.advance();
            if (is_string_prefix(word) && (cur.peek() == '"' || cur.peek() == '\'')) {
                bool raw = word.find('r') != std::string::npos || word.find('R') != std::string::npos;
                Token tok = scan_string(cur, raw);
                tok.line = start_line;
                tok.col = start_col;
                current.tokens.push_back(std::move(tok));
            } else {
                TokenKind kind = is_python_keyword(word) ? TokenKind::Keyword : TokenKind::Identifier;
                current.tokens.push_back({kind, std::move(word), start_line, start_col});
            }
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '.' && std::isdigit(static_cast<unsigned char>(cur.peek(1))))) {
            current.tokens.push_back(scan_number(cur));
            continue;
        }
        if (c == '"' || c == '\'') {
            current.tokens.push_back(scan_string(cur, false));
            continue;
        }

        // Operators and punctuation.
        if (bracket_open(c)) ++depth;
        if (bracket_close(c)) depth = std::max(0, depth - 1);

        bool matched = false;
        for (std::string_view op : kMultiOps) {
            if (source.compare(cur.pos, op.size(), op) == 0) {
                int l = cur.line, co = cur.col;
                for (std::size_t i = 0; i < op.size(); ++i) cur.advance();
                current.tokens.push_back({TokenKind::Op, std::string(op), l, co});
                matched = true;
                break;
            }
        }
        if (matched) continue;

        static const std::string_view kSingles = "()[]{},:.;@=+-*/%<>&|^~!";
        if (kSingles.find(c) != std::string_view::npos) {
            current.tokens.push_back({TokenKind::Op, std::string(1, c), cur.line, cur.col});
            cur.advance();
            continue;
        }
        throw ParseError(std::string("unexpected character '") + c + "'", cur.line, cur.col);
    }
    flush(cur.line);
    return lines;
}

std::vector<Token> lex_tokens(std::string_view source) {
    std::vector<Token> out;
    for (auto& line : lex_logical_lines(source))
        for (auto& tok : line.tokens) out.push_back(tok);
    return out;
}

namespace {

// C-family scan used for java-like completions: only identifiers matter,
// everything else (strings, comments, operators) is skipped.
std::vector<std::string> identifiers_cstyle(std::string_view source) {
    std::vector<std::string> out;
    std::size_t i = 0;
    int line = 1, col = 1;
    auto step = [&](std::size_t n = 1) {
        for (std::size_t k = 0; k < n && i < source.size(); ++k) {
            if (source[i] == '\n') { ++line; col = 1; } else { ++col; }
            ++i;
        }
    };
    while (i < source.size()) {
        char c = source[i];
        if (c == '/' && i + 1 < source.size() && source[i + 1] == '/') {
            while (i < source.size() && source[i] != '\n') step();
        } else if (c == '/' && i + 1 < source.size() && source[i + 1] == '*') {
            int sl = line, sc = col;
            step(2);
            while (i + 1 < source.size() && !(source[i] == '*' && source[i + 1] == '/')) step();
            if (i + 1 >= source.size()) throw ParseError("unterminated comment", sl, sc);
            step(2);
        } else if (c == '"' || c == '\'') {
            int sl = line, sc = col;
            char quote = c;
            step();
            while (i < source.size() && source[i] != quote && source[i] != '\n') {
                if (source[i] == '\\') step();
                step();
            }
            if (i >= source.size() || source[i] != quote)
                throw ParseError("unterminated literal", sl, sc);
            step();
        } else if (is_ident_start(static_cast<unsigned char>(c))) {
            std::string word;
            while (i < source.size() && is_ident_cont(static_cast<unsigned char>(source[i]))) {
                word += source[i];
                step();
            }
            out.push_back(std::move(word));
        } else {
            step();
        }
    }
    return out;
}

} // namespace

std::vector<std::string> lex_identifiers(std::string_view source, std::string_view language) {
    if (language == "java-like") return identifiers_cstyle(source);
    std::vector<std::string> out;
    for (auto& tok : lex_tokens(source))
        if (tok.kind == TokenKind::Identifier) out.push_back(tok.text);
    return out;
}

} // namespace ctxeval
