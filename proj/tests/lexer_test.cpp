#include "doctest.h"

#include "ctxeval/error.hpp"
#include "ctxeval/lexer.hpp"

using namespace ctxeval;

TEST_CASE("logical lines join bracket continuations") {
    auto lines = lex_logical_lines("x = f(1,\n      2)\ny = 3\n");
    REQUIRE(lines.size() == 2);
    CHECK(lines[0].first_line == 1);
    CHECK(lines[0].last_line == 2);
    CHECK(lines[1].first_line == 3);
}

TEST_CASE("comments and blank lines produce no logical lines") {
    auto lines = lex_logical_lines("# header\n\n   \nx = 1  # trailing\n");
    REQUIRE(lines.size() == 1);
    CHECK(lines[0].tokens.size() == 3);
}

TEST_CASE("strings are single tokens and keep quotes") {
    auto toks = lex_tokens("s = 'it\\'s'\nd = \"x\"\nt = '''a\nb'''\n");
    int strings = 0;
    for (const auto& t : toks)
        if (t.kind == TokenKind::String) ++strings;
    CHECK(strings == 3);
}

TEST_CASE("indent width counts tabs to the next multiple of eight") {
    auto lines = lex_logical_lines("if x:\n\ty = 1\n");
    REQUIRE(lines.size() == 2);
    CHECK(lines[0].indent == 0);
    CHECK(lines[1].indent == 8);
}

TEST_CASE("unterminated string raises ParseError with location") {
    CHECK_THROWS_AS(lex_logical_lines("x = 'oops\n"), ParseError);
    CHECK_THROWS_AS(lex_logical_lines("x = '''oops\n"), ParseError);
}

TEST_CASE("keywords are distinguished from identifiers") {
    auto toks = lex_tokens("for item in items:\n    pass\n");
    REQUIRE(toks.size() >= 4);
    CHECK(toks[0].kind == TokenKind::Keyword);
    CHECK(toks[1].kind == TokenKind::Identifier);
    CHECK(toks[2].kind == TokenKind::Keyword);
}

TEST_CASE("walrus and arrow are single operator tokens") {
    auto toks = lex_tokens("def f(x) -> int:\n    if (n := x) > 0:\n        return n\n");
    bool arrow = false;
    bool walrus = false;
    for (const auto& t : toks) {
        if (t.kind == TokenKind::Op && t.text == "->") arrow = true;
        if (t.kind == TokenKind::Op && t.text == ":=") walrus = true;
    }
    CHECK(arrow);
    CHECK(walrus);
}

TEST_CASE("identifier extraction skips strings and comments") {
    auto ids = lex_identifiers("os.path.join(a)  # os in comment\nx = 'os'\n", "python-like");
    int os_count = 0;
    for (const auto& name : ids)
        if (name == "os") ++os_count;
    CHECK(os_count == 1);
}

TEST_CASE("java-like identifier extraction handles c-style comments") {
    auto ids = lex_identifiers(
        "int x = foo(); // bar in comment\n/* baz */ String s = \"qux\";", "java-like");
    bool has_foo = false, has_bar = false, has_baz = false, has_qux = false;
    for (const auto& name : ids) {
        if (name == "foo") has_foo = true;
        if (name == "bar") has_bar = true;
        if (name == "baz") has_baz = true;
        if (name == "qux") has_qux = true;
    }
    CHECK(has_foo);
    CHECK(!has_bar);
    CHECK(!has_baz);
    CHECK(!has_qux);
}
