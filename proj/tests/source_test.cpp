#include <algorithm>
#include <string>

#include "doctest.h"

#include "ctxeval/error.hpp"
#include "ctxeval/source.hpp"

using namespace ctxeval;

namespace {

const std::string kTwoFunctions =
    "def first(a):\n"
    "    \"\"\"First doc.\"\"\"\n"
    "    x = a + 1\n"
    "    if x > 0:\n"
    "        return x\n"
    "    return 0\n"
    "\n"
    "\n"
    "def second(b):\n"
    "    \"\"\"Second doc.\"\"\"\n"
    "    y = b * 2\n"
    "    return y\n";

} // namespace

TEST_CASE("two top-level functions with correct spans") {
    SourceUnit unit = parse_unit_text(kTwoFunctions, "mod.py", "python-like");
    REQUIRE(unit.functions.size() == 2);
    CHECK(unit.functions[0].qualified_name == "mod.first");
    CHECK(unit.functions[0].begin_line == 1);
    CHECK(unit.functions[0].end_line == 6);
    CHECK(unit.functions[1].qualified_name == "mod.second");
    CHECK(unit.functions[1].begin_line == 9);
    CHECK(unit.functions[1].end_line == 12);
    CHECK(unit.functions[0].docstring_original == "First doc.");
    CHECK(unit.functions[0].signature == "def first(a):");
}

TEST_CASE("method records carry their enclosing class") {
    SourceUnit unit = parse_unit_text(
        "class Box:\n"
        "    def get(self):\n"
        "        \"\"\"Doc.\"\"\"\n"
        "        return self.v\n",
        "box.py", "python-like");
    REQUIRE(unit.functions.size() == 1);
    CHECK(unit.functions[0].qualified_name == "box.Box.get");
    REQUIRE(unit.functions[0].enclosing_class.has_value());
    CHECK(*unit.functions[0].enclosing_class == "Box");
}

TEST_CASE("nested closures are not extracted; only the outer record exists") {
    SourceUnit unit = parse_unit_text(
        "def outer(a):\n"
        "    \"\"\"Doc.\"\"\"\n"
        "    def inner(b):\n"
        "        return b + 1\n"
        "    return inner(a)\n",
        "mod.py", "python-like");
    REQUIRE(unit.functions.size() == 1);
    CHECK(unit.functions[0].name == "outer");
    CHECK(unit.functions[0].end_line == 5);
}

TEST_CASE("straight-line body has complexity 1") {
    SourceUnit unit = parse_unit_text(
        "def flat(a):\n"
        "    x = a + 1\n"
        "    return x\n",
        "mod.py", "python-like");
    REQUIRE(unit.functions.size() == 1);
    CHECK(cyclomatic_complexity(unit.functions[0]) == 1);
}

TEST_CASE("one if plus one loop gives complexity 3") {
    SourceUnit unit = parse_unit_text(
        "def f(xs):\n"
        "    total = 0\n"
        "    for x in xs:\n"
        "        if x > 0:\n"
        "            total += x\n"
        "    return total\n",
        "mod.py", "python-like");
    CHECK(cyclomatic_complexity(unit.functions[0]) == 3);
}

// decision points counted by hand before implementation: if, and, elif, or,
// for -> 5, so the complexity is 6
TEST_CASE("five decision points give complexity 6") {
    SourceUnit unit = parse_unit_text(
        "def busy(a, b, xs):\n"
        "    t = 0\n"
        "    if a and b:\n"
        "        t = 1\n"
        "    elif a or b:\n"
        "        t = 2\n"
        "    for x in xs:\n"
        "        t += x\n"
        "    return t\n",
        "mod.py", "python-like");
    CHECK(cyclomatic_complexity(unit.functions[0]) == 6);
}

TEST_CASE("exception handlers and ternaries count as decision points") {
    SourceUnit unit = parse_unit_text(
        "def g(x):\n"
        "    try:\n"
        "        y = 1 if x else 2\n"
        "    except ValueError:\n"
        "        y = 0\n"
        "    return y\n",
        "mod.py", "python-like");
    CHECK(cyclomatic_complexity(unit.functions[0]) == 3);
}

TEST_CASE("imports bind heads and aliases") {
    SourceUnit unit = parse_unit_text(
        "import os.path\n"
        "import numpy as np\n"
        "from collections import OrderedDict, defaultdict\n"
        "from . import sibling\n",
        "mod.py", "python-like");
    REQUIRE(unit.imports.size() == 4);
    CHECK(unit.imports[0].module_head == "os");
    CHECK(unit.imports[0].bound_names == std::vector<std::string>{"os"});
    CHECK(unit.imports[1].bound_names == std::vector<std::string>{"np"});
    CHECK(unit.imports[2].bound_names ==
          std::vector<std::string>{"OrderedDict", "defaultdict"});
    CHECK(unit.imports[3].is_relative);
}

TEST_CASE("definition index holds file-level types, functions and constants") {
    SourceUnit unit = parse_unit_text(
        "LIMIT = 10\n"
        "name = \"x\"\n"
        "class Widget:\n"
        "    size = 3\n"
        "def helper(a):\n"
        "    return a\n",
        "mod.py", "python-like");
    const Definition* limit = unit.top_level_defs.find_in_file("LIMIT", "mod.py");
    REQUIRE(limit != nullptr);
    CHECK(limit->kind == DefKind::Constant);
    const Definition* widget = unit.top_level_defs.find_in_file("Widget", "mod.py");
    REQUIRE(widget != nullptr);
    CHECK(widget->kind == DefKind::Type);
    const Definition* size = unit.top_level_defs.find_in_class("size", "mod.py", "Widget");
    REQUIRE(size != nullptr);
    CHECK(size->kind == DefKind::Variable);
    const Definition* helper = unit.top_level_defs.find_in_file("helper", "mod.py");
    REQUIRE(helper != nullptr);
    CHECK(helper->kind == DefKind::Function);
}

TEST_CASE("test detection by name, directory and framework import") {
    SourceUnit by_name = parse_unit_text("def test_x():\n    assert True\n", "mod.py",
                                         "python-like");
    CHECK(by_name.functions[0].is_test);

    SourceUnit by_dir = parse_unit_text("def helper():\n    return 1\n",
                                        "tests/helpers.py", "python-like");
    CHECK(by_dir.functions[0].is_test);

    SourceUnit by_import = parse_unit_text(
        "import unittest\n"
        "def check_sum():\n"
        "    return 2\n",
        "checks.py", "python-like");
    CHECK(by_import.functions[0].is_test);
}

TEST_CASE("deprecated detection by decorator and docstring token") {
    SourceUnit unit = parse_unit_text(
        "@deprecated\n"
        "def old(a):\n"
        "    return a\n"
        "\n"
        "def older(a):\n"
        "    \"\"\"Deprecated: use old instead.\"\"\"\n"
        "    return a\n"
        "\n"
        "def fresh(a):\n"
        "    \"\"\"Does things.\"\"\"\n"
        "    return a\n",
        "mod.py", "python-like");
    REQUIRE(unit.functions.size() == 3);
    CHECK(unit.functions[0].is_deprecated);
    CHECK(unit.functions[1].is_deprecated);
    CHECK(!unit.functions[2].is_deprecated);
}

TEST_CASE("abstract bodies are flagged") {
    SourceUnit unit = parse_unit_text(
        "def stub(a):\n"
        "    \"\"\"Doc.\"\"\"\n"
        "    raise NotImplementedError\n"
        "\n"
        "def ell(a):\n"
        "    ...\n"
        "\n"
        "def real(a):\n"
        "    return a\n",
        "mod.py", "python-like");
    CHECK(unit.functions[0].is_abstract);
    CHECK(unit.functions[1].is_abstract);
    CHECK(!unit.functions[2].is_abstract);
}

TEST_CASE("filter keeps only documented, long enough, low-context candidates") {
    SourceUnit unit = parse_unit_text(
        "def test_thing():\n"
        "    \"\"\"Doc.\"\"\"\n"
        "    assert True\n"
        "\n"
        "def tiny(a):\n"
        "    \"\"\"Doc.\"\"\"\n"
        "    return a\n"
        "\n"
        "def keeper(a, b):\n"
        "    \"\"\"Adds things up carefully.\"\"\"\n"
        "    total = a + b\n"
        "    if total < 0:\n"
        "        total = 0\n"
        "    return total\n",
        "mod.py", "python-like");
    REQUIRE(unit.functions.size() == 3);
    std::vector<int> counts = {0, 0, 4};
    auto kept = filter_candidates(unit.functions, counts);
    REQUIRE(kept.size() == 1);
    CHECK(kept[0].name == "keeper");

    // ten or more distinct oracle tokens excludes the function
    counts = {0, 0, 10};
    CHECK(filter_candidates(unit.functions, counts).empty());
}

TEST_CASE("non-english docstrings are filtered") {
    CHECK(docstring_is_english("Returns the sum of inputs."));
    CHECK(!docstring_is_english("\xE8\xBF\x94\xE5\x9B\x9E\xE4\xB8\xA4\xE6\x95\xB0\xE4\xB9\x8B\xE5\x92\x8C"));
}

TEST_CASE("re-parsing an unchanged file is deterministic") {
    SourceUnit a = parse_unit_text(kTwoFunctions, "mod.py", "python-like");
    SourceUnit b = parse_unit_text(kTwoFunctions, "mod.py", "python-like");
    REQUIRE(a.functions.size() == b.functions.size());
    for (std::size_t i = 0; i < a.functions.size(); ++i) {
        CHECK(a.functions[i].qualified_name == b.functions[i].qualified_name);
        CHECK(a.functions[i].begin_line == b.functions[i].begin_line);
        CHECK(a.functions[i].end_line == b.functions[i].end_line);
        CHECK(a.functions[i].body_text == b.functions[i].body_text);
        CHECK(a.functions[i].complexity == b.functions[i].complexity);
    }
}

TEST_CASE("loc sums stay within the file's non-blank line count") {
    SourceUnit unit = parse_unit_text(kTwoFunctions, "mod.py", "python-like");
    int total_loc = 0;
    for (const auto& fn : unit.functions) total_loc += fn.loc;
    int non_blank = 0;
    for (const auto& line : unit.raw_lines)
        if (line.find_first_not_of(" \t") != std::string::npos) ++non_blank;
    CHECK(total_loc <= non_blank);
}

TEST_CASE("definition names are findable at their recorded spans") {
    SourceUnit unit = parse_unit_text(
        "LIMIT = 10\n"
        "class Widget:\n"
        "    def get(self):\n"
        "        return LIMIT\n"
        "def helper(a):\n"
        "    return a\n",
        "mod.py", "python-like");
    for (const Definition* def : unit.top_level_defs.all()) {
        bool found = false;
        for (int ln = def->begin_line; ln <= def->end_line && !found; ++ln) {
            if (ln - 1 < static_cast<int>(unit.raw_lines.size()) &&
                unit.raw_lines[ln - 1].find(def->name) != std::string::npos)
                found = true;
        }
        CHECK_MESSAGE(found, "definition not at span: ", def->name);
    }
}

TEST_CASE("unsupported language and unreadable files raise") {
    CHECK_THROWS_AS(parse_unit_text("class A {}", "A.java", "java-like"), ParseError);
    CHECK_THROWS_AS(parse_unit("/nonexistent/file.py", "python-like"), IoError);
}

TEST_CASE("single-line defs keep an inline body") {
    SourceUnit unit = parse_unit_text("def one(x): return x + 1\n", "mod.py", "python-like");
    REQUIRE(unit.functions.size() == 1);
    CHECK(unit.functions[0].begin_line == 1);
    CHECK(unit.functions[0].end_line == 1);
    CHECK(unit.functions[0].loc == 1);
    CHECK(unit.functions[0].body_text == "return x + 1");
}
