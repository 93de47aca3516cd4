#include <initializer_list>
#include <string>
#include <vector>

#include "doctest.h"

#include "ctxeval/callgraph.hpp"
#include "ctxeval/error.hpp"
#include "ctxeval/source.hpp"

using namespace ctxeval;

namespace {

std::vector<SourceUnit> units_of(
    std::initializer_list<std::pair<std::string, std::string>> files) {
    std::vector<SourceUnit> units;
    for (const auto& [path, text] : files)
        units.push_back(parse_unit_text(text, path, "python-like"));
    return units;
}

bool has_edge(const CallGraph& graph, const std::string& a, const std::string& b) {
    return graph.edges.count({a, b}) > 0;
}

} // namespace

TEST_CASE("direct and transitive call edges") {
    auto units = units_of({{"mod.py",
                            "def f(a):\n"
                            "    return a\n"
                            "def g(a):\n"
                            "    return f(a)\n"
                            "def test_one(a):\n"
                            "    return f(a)\n"
                            "def test_two(a):\n"
                            "    return g(a)\n"}});
    CallGraph graph = build_call_graph(units);
    CHECK(has_edge(graph, "mod.test_one", "mod.f"));
    CHECK(has_edge(graph, "mod.test_two", "mod.g"));
    CHECK(has_edge(graph, "mod.g", "mod.f"));
    CHECK(graph.test_nodes.count("mod.test_one") == 1);
    CHECK(graph.test_nodes.count("mod.test_two") == 1);
    CHECK(graph.test_nodes.count("mod.f") == 0);
}

TEST_CASE("recursion yields a self-edge") {
    auto units = units_of({{"mod.py",
                            "def fact(n):\n"
                            "    if n <= 1:\n"
                            "        return 1\n"
                            "    return n * fact(n - 1)\n"}});
    CallGraph graph = build_call_graph(units);
    CHECK(has_edge(graph, "mod.fact", "mod.fact"));
}

// over-approximation confirmed on this fixture: with an unknown receiver the
// call maps to both same-named methods
TEST_CASE("unknown receivers over-approximate to every same-named method") {
    auto units = units_of({{"a.py",
                            "class A:\n"
                            "    def run(self):\n"
                            "        return 1\n"},
                           {"b.py",
                            "class B:\n"
                            "    def run(self):\n"
                            "        return 2\n"},
                           {"c.py",
                            "def kick(x):\n"
                            "    return x.run()\n"}});
    CallGraph graph = build_call_graph(units);
    CHECK(has_edge(graph, "c.kick", "a.A.run"));
    CHECK(has_edge(graph, "c.kick", "b.B.run"));
}

TEST_CASE("self receiver resolves to the enclosing class including one base level") {
    auto units = units_of({{"mod.py",
                            "class Base:\n"
                            "    def ping(self):\n"
                            "        return 0\n"
                            "class Child(Base):\n"
                            "    def go(self):\n"
                            "        return self.ping()\n"
                            "    def loop(self):\n"
                            "        return self.go()\n"}});
    CallGraph graph = build_call_graph(units);
    CHECK(has_edge(graph, "mod.Child.go", "mod.Base.ping"));
    CHECK(has_edge(graph, "mod.Child.loop", "mod.Child.go"));
}

TEST_CASE("imported names resolve to their source module") {
    auto units = units_of({{"util.py",
                            "def helper(a):\n"
                            "    return a\n"},
                           {"main.py",
                            "from util import helper\n"
                            "def drive(a):\n"
                            "    return helper(a)\n"}});
    CallGraph graph = build_call_graph(units);
    CHECK(has_edge(graph, "main.drive", "util.helper"));
}

TEST_CASE("covering tests by reachability") {
    auto units = units_of({{"mod.py",
                            "def f(a):\n"
                            "    return a\n"
                            "def g(a):\n"
                            "    return f(a)\n"
                            "def h(a):\n"
                            "    return a\n"
                            "def test_t1(a):\n"
                            "    return f(a)\n"
                            "def test_t2(a):\n"
                            "    return g(a)\n"
                            "def test_t3(a):\n"
                            "    return h(a)\n"}});
    CallGraph graph = build_call_graph(units);
    auto tests = covering_tests(graph, "mod.f");
    REQUIRE(tests.size() == 2);
    CHECK(tests[0] == "mod.test_t1");
    CHECK(tests[1] == "mod.test_t2");

    auto none = covering_tests(graph, "mod.test_t3");
    CHECK(none == std::vector<std::string>{"mod.test_t3"});

    CHECK_THROWS_AS(covering_tests(graph, "mod.absent"), UnknownFunction);
}

TEST_CASE("targets with no incoming test paths get an empty list") {
    auto units = units_of({{"mod.py",
                            "def lonely(a):\n"
                            "    return a\n"
                            "def test_other():\n"
                            "    return 1\n"}});
    CallGraph graph = build_call_graph(units);
    CHECK(covering_tests(graph, "mod.lonely").empty());
}

// closure over the cyclic fixture traced by hand: t -> a <-> b, so the test
// reaches b through the cycle
TEST_CASE("cycles are closed over") {
    auto units = units_of({{"mod.py",
                            "def a(n):\n"
                            "    return b(n)\n"
                            "def b(n):\n"
                            "    return a(n - 1)\n"
                            "def test_cycle():\n"
                            "    return a(3)\n"}});
    CallGraph graph = build_call_graph(units);
    auto tests = covering_tests(graph, "mod.b");
    REQUIRE(tests.size() == 1);
    CHECK(tests[0] == "mod.test_cycle");
}

TEST_CASE("adding an edge never removes a covering test") {
    auto units = units_of({{"mod.py",
                            "def f(a):\n"
                            "    return a\n"
                            "def g(a):\n"
                            "    return f(a)\n"
                            "def test_t(a):\n"
                            "    return g(a)\n"}});
    CallGraph graph = build_call_graph(units);
    auto before = covering_tests(graph, "mod.f");
    graph.edges.insert({"mod.test_t", "mod.f"});
    auto after = covering_tests(graph, "mod.f");
    for (const auto& t : before)
        CHECK(std::find(after.begin(), after.end(), t) != after.end());
}

namespace {

std::pair<std::vector<FunctionRecord>, std::vector<ImportDecl>> tests_from(
    const std::string& source) {
    SourceUnit unit = parse_unit_text(source, "tests/test_mod.py", "python-like");
    return {unit.functions, unit.imports};
}

} // namespace

TEST_CASE("driver inlines tests, prints the sentinel and parses cleanly") {
    auto [tests, imports] = tests_from(
        "from calc import add\n"
        "def test_add():\n"
        "    assert add(2, 2) == 4\n"
        "def test_add_negative():\n"
        "    assert add(-2, -3) == -5\n");
    TestDriver driver = synthesize_driver(tests, "calc.add", "python-like", imports);

    CHECK(driver.task_id == "calc.add");
    CHECK(driver.expected_sentinel == "CTXEVAL_RESULT: PASS");
    CHECK(driver.run_command.find("{driver}") != std::string::npos);
    CHECK(driver.source_text.find("from calc import add") != std::string::npos);
    CHECK(driver.source_text.find("def test_add():") != std::string::npos);
    CHECK(driver.source_text.find("def test_add_negative():") != std::string::npos);
    CHECK(driver.source_text.find("print(\"CTXEVAL_RESULT: PASS\")") != std::string::npos);

    // round trip: the generated driver parses under this module's own grammar
    SourceUnit reparsed = parse_unit_text(driver.source_text, "driver.py", "python-like");
    bool has_main = false;
    for (const auto& fn : reparsed.functions)
        if (fn.name == "main") has_main = true;
    CHECK(has_main);
}

TEST_CASE("unittest assertions translate to plain checks") {
    auto [tests, imports] = tests_from(
        "import unittest\n"
        "from calc import add\n"
        "def test_mixed():\n"
        "    self_result = add(1, 2)\n"
        "    self.assertEqual(add(1, 2), 3)\n"
        "    self.assertNotEqual(add(1, 2), 4)\n"
        "    self.assertTrue(add(1, 0) == 1)\n"
        "    self.assertFalse(add(1, 1) == 3)\n");
    TestDriver driver = synthesize_driver(tests, "t", "python-like", imports);
    CHECK(driver.source_text.find("assert (add(1, 2)) == (3)") != std::string::npos);
    CHECK(driver.source_text.find("assert (add(1, 2)) != (4)") != std::string::npos);
    CHECK(driver.source_text.find("assert (add(1, 0) == 1)") != std::string::npos);
    CHECK(driver.source_text.find("assert not (add(1, 1) == 3)") != std::string::npos);
    CHECK(driver.source_text.find("import unittest") == std::string::npos);
}

TEST_CASE("raise-expectation forms become try/except blocks") {
    auto [tests, imports] = tests_from(
        "def test_raises():\n"
        "    with self.assertRaises(ValueError):\n"
        "        int(\"nope\")\n"
        "def test_raises_call():\n"
        "    self.assertRaises(TypeError, len, 3)\n");
    TestDriver driver = synthesize_driver(tests, "t", "python-like", imports);
    CHECK(driver.source_text.find("except ValueError:") != std::string::npos);
    CHECK(driver.source_text.find("except TypeError:") != std::string::npos);
    CHECK(driver.source_text.find("len(3)") != std::string::npos);
    // still valid under our grammar
    parse_unit_text(driver.source_text, "driver.py", "python-like");
}

TEST_CASE("fixture-injected parameters fail loudly") {
    auto [tests, imports] = tests_from(
        "def test_with_fixture(tmp_path):\n"
        "    assert tmp_path\n");
    CHECK_THROWS_AS(synthesize_driver(tests, "t", "python-like", imports),
                    DriverSynthesisError);
}

TEST_CASE("instance state and unsupported assertions fail loudly") {
    auto [tests1, imports1] = tests_from(
        "def test_state():\n"
        "    assert self.widget == 1\n");
    CHECK_THROWS_AS(synthesize_driver(tests1, "t", "python-like", imports1),
                    DriverSynthesisError);

    auto [tests2, imports2] = tests_from(
        "def test_almost():\n"
        "    self.assertAlmostEqual(0.1 + 0.2, 0.3)\n");
    CHECK_THROWS_AS(synthesize_driver(tests2, "t", "python-like", imports2),
                    DriverSynthesisError);
}

TEST_CASE("empty test lists and unsupported languages fail loudly") {
    CHECK_THROWS_AS(synthesize_driver({}, "t", "python-like", {}), DriverSynthesisError);
    auto [tests, imports] = tests_from("def test_x():\n    assert True\n");
    CHECK_THROWS_AS(synthesize_driver(tests, "t", "java-like", imports),
                    DriverSynthesisError);
}
