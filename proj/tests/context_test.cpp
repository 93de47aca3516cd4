#include <initializer_list>
#include <map>
#include <string>

#include "doctest.h"

#include "ctxeval/context.hpp"
#include "ctxeval/error.hpp"
#include "ctxeval/registry.hpp"

using namespace ctxeval;

namespace {

const char* kRegistryDir = CTXEVAL_FIXTURES_DIR "/registry";

struct Analyzed {
    SymbolRegistry reg = load_registry(kRegistryDir, "python-like", "3.8");
    std::vector<SourceUnit> units;
    DefinitionIndex index;

    Analyzed(std::initializer_list<std::pair<std::string, std::string>> files) {
        for (const auto& [path, text] : files)
            units.push_back(parse_unit_text(text, path, "python-like"));
        index = build_project_index(units);
    }

    ContextReport analyze(const std::string& qualified) {
        for (const auto& unit : units) {
            int idx = unit.function_index(qualified);
            if (idx >= 0)
                return analyze_context(unit.functions[static_cast<std::size_t>(idx)], unit,
                                       reg, index);
        }
        FAIL("function not found: ", qualified);
        return {};
    }
};

const ContextToken* find_token(const ContextReport& report, const std::string& name) {
    for (const auto& token : report.oracle_context)
        if (token.name == name) return &token;
    return nullptr;
}

} // namespace

TEST_CASE("self member and file constant produce class and file tokens") {
    Analyzed a({{"mod.py",
                 "MAX = 9\n"
                 "class C:\n"
                 "    def __init__(self):\n"
                 "        self.count = 0\n"
                 "    def total(self):\n"
                 "        \"\"\"Doc.\"\"\"\n"
                 "        return self.count + MAX\n"}});
    ContextReport report = a.analyze("mod.C.total");

    const ContextToken* count = find_token(report, "count");
    REQUIRE(count != nullptr);
    CHECK(count->category == TokenCategory::VarReference);
    CHECK(count->origin == OriginClass::ProjectClass);
    REQUIRE(count->def_site.has_value());

    const ContextToken* max = find_token(report, "MAX");
    REQUIRE(max != nullptr);
    CHECK(max->category == TokenCategory::VarReference);
    CHECK(max->origin == OriginClass::ProjectFile);

    CHECK(report.oracle_context.size() == 2);
    CHECK(classify_runnable_level(report) == RunnableLevel::file_runnable);
}

TEST_CASE("builtin calls yield only Builtin origins") {
    Analyzed a({{"mod.py",
                 "def shout(xs):\n"
                 "    \"\"\"Doc.\"\"\"\n"
                 "    print(min(xs))\n"}});
    ContextReport report = a.analyze("mod.shout");
    REQUIRE(!report.oracle_context.empty());
    for (const auto& token : report.oracle_context) {
        CHECK(token.origin == OriginClass::Builtin);
        CHECK(token.category == TokenCategory::APIInvocation);
    }
    CHECK(find_token(report, "print") != nullptr);
    CHECK(find_token(report, "min") != nullptr);
    CHECK(classify_runnable_level(report) == RunnableLevel::self_contained);
}

TEST_CASE("parameters and locals produce an empty oracle context") {
    Analyzed a({{"mod.py",
                 "def pure(a, b):\n"
                 "    \"\"\"Doc.\"\"\"\n"
                 "    c = a + b\n"
                 "    d = c * 2\n"
                 "    return d\n"}});
    ContextReport report = a.analyze("mod.pure");
    CHECK(report.oracle_context.empty());
    CHECK(classify_runnable_level(report) == RunnableLevel::self_contained);
}

TEST_CASE("module attribute chains keep the head and the called terminal") {
    Analyzed a({{"mod.py",
                 "import os\n"
                 "def cwd_name(p):\n"
                 "    \"\"\"Doc.\"\"\"\n"
                 "    return os.path.join(p, \"x\")\n"}});
    ContextReport report = a.analyze("mod.cwd_name");
    const ContextToken* os_token = find_token(report, "os");
    REQUIRE(os_token != nullptr);
    CHECK(os_token->category == TokenCategory::TypeReference);
    CHECK(os_token->origin == OriginClass::StandardLib);
    const ContextToken* join_token = find_token(report, "join");
    REQUIRE(join_token != nullptr);
    CHECK(join_token->category == TokenCategory::APIInvocation);
    CHECK(join_token->origin == OriginClass::StandardLib);
    CHECK(find_token(report, "path") == nullptr); // middles are skipped
}

TEST_CASE("methods called on locals are not dependencies") {
    Analyzed a({{"mod.py",
                 "def collect(xs):\n"
                 "    \"\"\"Doc.\"\"\"\n"
                 "    out = []\n"
                 "    for x in xs:\n"
                 "        out.append(x)\n"
                 "    return out\n"}});
    ContextReport report = a.analyze("mod.collect");
    CHECK(report.oracle_context.empty());
    CHECK(report.unresolved.empty());
}

TEST_CASE("annotations are type references") {
    Analyzed a({{"mod.py",
                 "import pathlib\n"
                 "def read(p: pathlib.Path) -> str:\n"
                 "    \"\"\"Doc.\"\"\"\n"
                 "    return p.read_text()\n"}});
    ContextReport report = a.analyze("mod.read");
    const ContextToken* pathlib_token = find_token(report, "pathlib");
    REQUIRE(pathlib_token != nullptr);
    CHECK(pathlib_token->category == TokenCategory::TypeReference);
    const ContextToken* str_token = find_token(report, "str");
    REQUIRE(str_token != nullptr);
    CHECK(str_token->category == TokenCategory::TypeReference);
}

TEST_CASE("local imports still count as dependencies") {
    Analyzed a({{"mod.py",
                 "def here():\n"
                 "    \"\"\"Doc.\"\"\"\n"
                 "    import os\n"
                 "    return os.getcwd()\n"}});
    ContextReport report = a.analyze("mod.here");
    const ContextToken* os_token = find_token(report, "os");
    REQUIRE(os_token != nullptr);
    CHECK(os_token->origin == OriginClass::StandardLib);
    CHECK(classify_runnable_level(report) == RunnableLevel::slib_runnable);
}

TEST_CASE("constructor calls of project classes are type references") {
    Analyzed a({{"mod.py",
                 "class Widget:\n"
                 "    def __init__(self):\n"
                 "        self.v = 0\n"
                 "def make():\n"
                 "    \"\"\"Doc.\"\"\"\n"
                 "    w = Widget()\n"
                 "    return w\n"}});
    ContextReport report = a.analyze("mod.make");
    const ContextToken* widget = find_token(report, "Widget");
    REQUIRE(widget != nullptr);
    CHECK(widget->category == TokenCategory::TypeReference);
    CHECK(widget->origin == OriginClass::ProjectFile);
    REQUIRE(widget->def_site.has_value());
    CHECK(widget->def_site->file == "mod.py");
}

TEST_CASE("unresolved names are reported but excluded from the level") {
    Analyzed a({{"mod.py",
                 "def murky(a):\n"
                 "    \"\"\"Doc.\"\"\"\n"
                 "    return mystery(a)\n"}});
    ContextReport report = a.analyze("mod.murky");
    CHECK(find_token(report, "mystery") == nullptr);
    REQUIRE(report.unresolved.size() == 1);
    CHECK(report.unresolved[0] == "mystery");
    CHECK(classify_runnable_level(report) == RunnableLevel::self_contained);
}

TEST_CASE("keyword argument names are not references") {
    Analyzed a({{"mod.py",
                 "import json\n"
                 "def dump(payload):\n"
                 "    \"\"\"Doc.\"\"\"\n"
                 "    return json.dumps(payload, sort_keys=True)\n"}});
    ContextReport report = a.analyze("mod.dump");
    CHECK(find_token(report, "sort_keys") == nullptr);
    CHECK(find_token(report, "json") != nullptr);
    CHECK(find_token(report, "dumps") != nullptr);
}

TEST_CASE("level classification follows the max rule") {
    auto mk = [](std::vector<OriginClass> origins) {
        ContextReport report;
        for (auto origin : origins) {
            ContextToken token;
            token.name = "t";
            token.category = TokenCategory::VarReference;
            token.origin = origin;
            if (origin == OriginClass::ProjectClass || origin == OriginClass::ProjectFile ||
                origin == OriginClass::ProjectOtherFile)
                token.def_site = DefSite{"f.py", 1, 1};
            report.oracle_context.push_back(token);
        }
        return report;
    };
    CHECK(classify_runnable_level(mk({OriginClass::Builtin})) ==
          RunnableLevel::self_contained);
    CHECK(classify_runnable_level(mk({OriginClass::Builtin, OriginClass::StandardLib})) ==
          RunnableLevel::slib_runnable);
    CHECK(classify_runnable_level(mk({OriginClass::StandardLib,
                                      OriginClass::ProjectOtherFile})) ==
          RunnableLevel::project_runnable);
    CHECK(classify_runnable_level(ContextReport{}) == RunnableLevel::self_contained);
}

TEST_CASE("adding a token never lowers the level") {
    ContextReport report;
    ContextToken base;
    base.name = "os";
    base.category = TokenCategory::TypeReference;
    base.origin = OriginClass::StandardLib;
    report.oracle_context.push_back(base);
    RunnableLevel before = classify_runnable_level(report);

    for (OriginClass origin : {OriginClass::Builtin, OriginClass::StandardLib,
                               OriginClass::PublicLib, OriginClass::ProjectClass,
                               OriginClass::ProjectFile, OriginClass::ProjectOtherFile}) {
        ContextReport grown = report;
        ContextToken extra;
        extra.name = "x";
        extra.category = TokenCategory::VarReference;
        extra.origin = origin;
        if (origin_rank(origin) >= origin_rank(OriginClass::ProjectClass))
            extra.def_site = DefSite{"f.py", 1, 1};
        grown.oracle_context.push_back(extra);
        CHECK(level_rank(classify_runnable_level(grown)) >= level_rank(before));
    }
}

TEST_CASE("all_context counts imports plus file-level definitions") {
    Analyzed a({{"mod.py",
                 "import os\n"
                 "import json\n"
                 "from collections import OrderedDict\n"
                 "def f1(a):\n"
                 "    return a\n"
                 "def f2(a):\n"
                 "    return a\n"}});
    auto tokens = compute_all_context(a.units[0], a.reg, &a.index);
    CHECK(tokens.size() == 5);
}

TEST_CASE("all_context is empty for an empty file") {
    Analyzed a({{"mod.py", "\n"}});
    auto tokens = compute_all_context(a.units[0], a.reg, &a.index);
    CHECK(tokens.empty());
}

// derived from the definition index: the class appears at file level as a
// TypeReference; its method is class-scoped, so it is not listed
TEST_CASE("all_context lists classes but not their methods") {
    Analyzed a({{"mod.py",
                 "class C:\n"
                 "    def m(self):\n"
                 "        return 1\n"}});
    auto tokens = compute_all_context(a.units[0], a.reg, &a.index);
    REQUIRE(tokens.size() == 1);
    CHECK(tokens[0].name == "C");
    CHECK(tokens[0].category == TokenCategory::TypeReference);
    CHECK(tokens[0].origin == OriginClass::ProjectFile);
}

TEST_CASE("oracle token names occur lexically in the function text") {
    Analyzed a({{"mod.py",
                 "import os\n"
                 "LIMIT = 2\n"
                 "def walk(p, depth: int):\n"
                 "    \"\"\"Doc.\"\"\"\n"
                 "    if depth > LIMIT:\n"
                 "        return []\n"
                 "    return os.listdir(p)\n"}});
    const SourceUnit& unit = a.units[0];
    int idx = unit.function_index("mod.walk");
    REQUIRE(idx >= 0);
    const FunctionRecord& fn = unit.functions[static_cast<std::size_t>(idx)];
    ContextReport report = a.analyze("mod.walk");
    std::string text = fn.signature + "\n" + fn.body_text;
    for (const auto& token : report.oracle_context)
        CHECK_MESSAGE(text.find(token.name) != std::string::npos,
                      "token not in function text: ", token.name);
}

TEST_CASE("analyze_context rejects foreign functions") {
    Analyzed a({{"mod.py", "def f(a):\n    return a\n"},
                {"other.py", "def g(a):\n    return a\n"}});
    const SourceUnit& wrong_unit = a.units[1];
    int idx = a.units[0].function_index("mod.f");
    REQUIRE(idx >= 0);
    CHECK_THROWS_AS(
        analyze_context(a.units[0].functions[static_cast<std::size_t>(idx)], wrong_unit,
                        a.reg, a.index),
        InvalidTarget);
}

TEST_CASE("standalone statistics count levels exactly") {
    auto report_with = [](OriginClass origin) {
        ContextReport report;
        if (origin != OriginClass::Unknown) {
            ContextToken token;
            token.name = "t";
            token.category = TokenCategory::VarReference;
            token.origin = origin;
            if (origin_rank(origin) >= origin_rank(OriginClass::ProjectClass))
                token.def_site = DefSite{"f.py", 1, 1};
            report.oracle_context.push_back(token);
        }
        return report;
    };

    std::vector<ContextReport> corpus;
    for (int i = 0; i < 2; ++i) {
        corpus.push_back(report_with(OriginClass::Unknown)); // empty -> self_contained
        corpus.push_back(report_with(OriginClass::StandardLib));
        corpus.push_back(report_with(OriginClass::PublicLib));
        corpus.push_back(report_with(OriginClass::ProjectClass));
        corpus.push_back(report_with(OriginClass::ProjectFile));
        corpus.push_back(report_with(OriginClass::ProjectOtherFile));
    }
    StandaloneStats stats = standalone_stats(corpus);
    CHECK(stats.standalone_count == 4);
    CHECK(stats.non_standalone_count == 8);
    CHECK(stats.standalone_fraction == doctest::Approx(4.0 / 12.0).epsilon(1e-12));
    for (const auto& [level, count] : stats.per_level_counts) CHECK(count == 2);

    CHECK_THROWS_AS(standalone_stats({}), EmptyCorpus);
}

TEST_CASE("all self_contained gives standalone fraction 1.0") {
    std::vector<ContextReport> corpus(5);
    StandaloneStats stats = standalone_stats(corpus);
    CHECK(stats.standalone_fraction == doctest::Approx(1.0));
}
