#pragma once

#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ctxeval/source.hpp"

namespace ctxeval {

/// Printed by a synthesized driver only when every inlined test passed.
/// Versioned and grep-exact; exit codes alone cannot distinguish harness
/// faults from test failures.
inline constexpr std::string_view kPassSentinel = "CTXEVAL_RESULT: PASS";

struct CallGraph {
    std::set<std::string> nodes; // qualified function names
    std::set<std::pair<std::string, std::string>> edges; // (caller, callee)
    std::set<std::string> test_nodes;
};

/// Static call graph over all units of one project. Callees resolve by
/// exact qualified match, then self/cls receiver against the enclosing
/// class (single-level inheritance), then name-only match across the
/// project (over-approximation; extra edges are acceptable, missing ones
/// are not).
CallGraph build_call_graph(std::span<const SourceUnit> units);

/// Test nodes from which `target` is reachable, lexicographically sorted.
/// Throws UnknownFunction when the target is not a node.
std::vector<std::string> covering_tests(const CallGraph& graph, const std::string& target);

struct TestDriver {
    std::string task_id;
    std::string source_text;
    std::string run_command; // references the {driver} placeholder
    std::string expected_sentinel;
};

/// Convert the covering tests into plain functions inside a single
/// main-driven source file. Framework assertions translate to plain
/// condition checks; untranslatable constructs fail loudly with
/// DriverSynthesisError. `imports` carries the import statements harvested
/// from the tests' source files (test-framework imports are dropped).
TestDriver synthesize_driver(std::span<const FunctionRecord> tests, const std::string& task_id,
                             const std::string& language,
                             std::span<const ImportDecl> imports = {});

} // namespace ctxeval
