#include "ctxeval/callgraph.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "ctxeval/error.hpp"

namespace ctxeval {

namespace {

const std::unordered_set<std::string> kDriverFrameworkHeads = {
    "unittest", "unittest2", "pytest", "nose", "nose2", "testtools",
};

struct CallSite {
    std::vector<std::string> chain; // a.b.c() -> {a, b, c}
};

// Call sites of one token stream: identifier chains directly followed by '('.
std::vector<CallSite> find_call_sites(const std::vector<Token>& toks) {
    std::vector<CallSite> sites;
    for (std::size_t i = 0; i < toks.size(); ++i) {
        if (toks[i].kind != TokenKind::Identifier) continue;
        if (i > 0 && toks[i - 1].kind == TokenKind::Op && toks[i - 1].text == ".") continue;
        std::vector<std::string> chain = {toks[i].text};
        std::size_t end = i;
        while (end + 2 < toks.size() && toks[end + 1].kind == TokenKind::Op &&
               toks[end + 1].text == "." && toks[end + 2].kind == TokenKind::Identifier) {
            chain.push_back(toks[end + 2].text);
            end += 2;
        }
        bool called = end + 1 < toks.size() && toks[end + 1].kind == TokenKind::Op &&
                      toks[end + 1].text == "(";
        if (called) sites.push_back({std::move(chain)});
        i = end;
    }
    return sites;
}

std::string join_chain(const std::vector<std::string>& chain) {
    std::string out;
    for (const auto& seg : chain) {
        if (!out.empty()) out += '.';
        out += seg;
    }
    return out;
}

std::vector<CallSite> find_call_sites_for(const FunctionTokens& ft) {
    std::vector<CallSite> sites = find_call_sites(ft.header);
    for (const auto& line : ft.body) {
        auto more = find_call_sites(line.tokens);
        sites.insert(sites.end(), more.begin(), more.end());
    }
    return sites;
}

struct Resolver {
    const std::set<std::string>& nodes;
    // terminal name -> qualified nodes
    std::unordered_map<std::string, std::vector<std::string>> by_terminal;
    // class simple name -> modules defining it
    std::unordered_map<std::string, std::vector<std::string>> class_modules;
    // (module, class) -> base class names
    std::map<std::pair<std::string, std::string>, std::vector<std::string>> bases;
    // per module: bound import name -> source module head
    std::unordered_map<std::string, std::unordered_map<std::string, std::string>> import_heads;
    // project module name -> dotted module
    std::unordered_map<std::string, std::string> project_modules;

    bool has(const std::string& node) const { return nodes.count(node) > 0; }

    std::vector<std::string> method_nodes(const std::string& module, const std::string& cls,
                                          const std::string& member, int depth) const {
        std::vector<std::string> out;
        std::string direct = module + "." + cls + "." + member;
        if (has(direct)) {
            out.push_back(direct);
            return out;
        }
        if (depth <= 0) return out;
        auto it = bases.find({module, cls});
        if (it == bases.end()) return out;
        for (const std::string& base_name : it->second) {
            std::string base = base_name;
            auto dot = base.rfind('.');
            if (dot != std::string::npos) base = base.substr(dot + 1);
            auto mods = class_modules.find(base);
            if (mods == class_modules.end()) continue;
            for (const std::string& base_module : mods->second) {
                auto found = method_nodes(base_module, base, member, depth - 1);
                out.insert(out.end(), found.begin(), found.end());
            }
        }
        return out;
    }
};

} // namespace

CallGraph build_call_graph(std::span<const SourceUnit> units) {
    std::vector<const SourceUnit*> ordered;
    for (const auto& u : units) ordered.push_back(&u);
    std::sort(ordered.begin(), ordered.end(),
              [](const SourceUnit* a, const SourceUnit* b) { return a->file_path < b->file_path; });

    CallGraph graph;
    Resolver resolver{graph.nodes, {}, {}, {}, {}, {}};

    for (const SourceUnit* unit : ordered) {
        resolver.project_modules[unit->module_name] = unit->module_name;
        auto last_dot = unit->module_name.rfind('.');
        std::string last = last_dot == std::string::npos ? unit->module_name
                                                         : unit->module_name.substr(last_dot + 1);
        resolver.project_modules.emplace(last, unit->module_name);

        for (const auto& fn : unit->functions) {
            graph.nodes.insert(fn.qualified_name);
            if (fn.is_test) graph.test_nodes.insert(fn.qualified_name);
        }
        for (const Definition* def : unit->top_level_defs.all()) {
            if (def->kind != DefKind::Type || def->enclosing_class) continue;
            resolver.class_modules[def->name].push_back(unit->module_name);
            if (const auto* b = unit->top_level_defs.bases_of(unit->file_path, def->name))
                resolver.bases[{unit->module_name, def->name}] = *b;
        }
        auto& heads = resolver.import_heads[unit->module_name];
        for (const auto& imp : unit->imports)
            for (const auto& bound : imp.bound_names)
                if (bound != "*") heads.emplace(bound, imp.module_head);
    }
    for (const std::string& node : graph.nodes) {
        auto dot = node.rfind('.');
        resolver.by_terminal[dot == std::string::npos ? node : node.substr(dot + 1)]
            .push_back(node);
    }

    for (const SourceUnit* unit : ordered) {
        for (std::size_t fi = 0; fi < unit->functions.size(); ++fi) {
            const FunctionRecord& fn = unit->functions[fi];
            const FunctionTokens& ft = unit->function_tokens[fi];

            std::vector<CallSite> sites = find_call_sites_for(ft);
            for (const auto& site : sites) {
                const auto& chain = site.chain;
                std::vector<std::string> callees;

                // exact qualified text, then same-module qualification
                std::string dotted = join_chain(chain);
                if (resolver.has(dotted)) {
                    callees.push_back(dotted);
                } else if (resolver.has(unit->module_name + "." + dotted)) {
                    callees.push_back(unit->module_name + "." + dotted);
                }

                // self/cls receiver: method of the enclosing class, one
                // inheritance level deep
                if (callees.empty() && chain.size() >= 2 &&
                    (chain[0] == "self" || chain[0] == "cls") && fn.enclosing_class) {
                    callees = resolver.method_nodes(unit->module_name, *fn.enclosing_class,
                                                    chain[1], 1);
                }

                // imported module or name: re-qualify against the source module
                if (callees.empty()) {
                    auto heads = resolver.import_heads.find(unit->module_name);
                    if (heads != resolver.import_heads.end()) {
                        auto bound = heads->second.find(chain[0]);
                        if (bound != heads->second.end()) {
                            auto mod = resolver.project_modules.find(bound->second);
                            if (mod != resolver.project_modules.end()) {
                                // "import util; util.f()" and "from util import f; f()"
                                std::string tail = chain.size() >= 2
                                                       ? join_chain({chain.begin() + 1, chain.end()})
                                                       : chain[0];
                                std::string candidate = mod->second + "." + tail;
                                if (resolver.has(candidate)) callees.push_back(candidate);
                            }
                        }
                    }
                }

                // name-only fallback across the project
                if (callees.empty()) {
                    auto it = resolver.by_terminal.find(chain.back());
                    if (it != resolver.by_terminal.end()) callees = it->second;
                }

                for (const std::string& callee : callees)
                    graph.edges.insert({fn.qualified_name, callee});
            }
        }
    }
    return graph;
}

std::vector<std::string> covering_tests(const CallGraph& graph, const std::string& target) {
    if (!graph.nodes.count(target))
        throw UnknownFunction("target not in call graph: " + target);

    std::unordered_map<std::string, std::vector<std::string>> reverse;
    for (const auto& [caller, callee] : graph.edges) reverse[callee].push_back(caller);

    std::unordered_set<std::string> visited = {target};
    std::deque<std::string> queue = {target};
    while (!queue.empty()) {
        std::string node = queue.front();
        queue.pop_front();
        auto it = reverse.find(node);
        if (it == reverse.end()) continue;
        for (const std::string& caller : it->second)
            if (visited.insert(caller).second) queue.push_back(caller);
    }

    std::vector<std::string> tests;
    for (const std::string& node : graph.test_nodes)
        if (visited.count(node)) tests.push_back(node);
    std::sort(tests.begin(), tests.end());
    return tests;
}

namespace {

std::string trim_copy(const std::string& s) {
    auto b = s.find_first_not_of(" \t");
    auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

std::string indent_str(int n) { return std::string(static_cast<std::size_t>(n), ' '); }

// One statement of a test body, bracket continuations collapsed to one line.
struct Statement {
    int indent = 0;
    std::string text; // without leading indentation
};

std::vector<Statement> body_statements(const std::string& body_text) {
    std::vector<std::string> lines;
    std::string current;
    for (char c : body_text + "\n") {
        if (c == '\n') {
            lines.push_back(current);
            current.clear();
        } else {
            current += c;
        }
    }

    std::vector<Statement> stmts;
    for (const auto& logical : lex_logical_lines(body_text)) {
        Statement stmt;
        stmt.indent = logical.indent;
        for (int ln = logical.first_line; ln <= logical.last_line; ++ln) {
            if (ln - 1 >= static_cast<int>(lines.size())) break;
            std::string part = trim_copy(lines[ln - 1]);
            if (!part.empty() && part.back() == '\\') part.pop_back();
            if (!stmt.text.empty() && !part.empty()) stmt.text += ' ';
            stmt.text += part;
        }
        stmts.push_back(std::move(stmt));
    }

    if (!stmts.empty()) {
        int base = stmts.front().indent;
        for (auto& s : stmts) s.indent = std::max(0, s.indent - base);
    }
    return stmts;
}

// Balanced argument text of the first call in `text` starting at `open_paren`.
std::string call_args(const std::string& text, std::size_t open_paren, std::size_t* end_out) {
    int depth = 0;
    char in_string = '\0';
    for (std::size_t i = open_paren; i < text.size(); ++i) {
        char c = text[i];
        if (in_string) {
            if (c == '\\') { ++i; continue; }
            if (c == in_string) in_string = '\0';
            continue;
        }
        if (c == '"' || c == '\'') { in_string = c; continue; }
        if (c == '(' || c == '[' || c == '{') ++depth;
        else if (c == ')' || c == ']' || c == '}') {
            if (--depth == 0) {
                if (end_out) *end_out = i;
                return text.substr(open_paren + 1, i - open_paren - 1);
            }
        }
    }
    throw DriverSynthesisError("unbalanced call in test body: " + text);
}

std::vector<std::string> split_top_commas(const std::string& args) {
    std::vector<std::string> parts;
    int depth = 0;
    char in_string = '\0';
    std::string current;
    for (std::size_t i = 0; i < args.size(); ++i) {
        char c = args[i];
        if (in_string) {
            current += c;
            if (c == '\\' && i + 1 < args.size()) current += args[++i];
            else if (c == in_string) in_string = '\0';
            continue;
        }
        if (c == '"' || c == '\'') { in_string = c; current += c; continue; }
        if (c == '(' || c == '[' || c == '{') ++depth;
        else if (c == ')' || c == ']' || c == '}') --depth;
        if (c == ',' && depth == 0) {
            parts.push_back(trim_copy(current));
            current.clear();
        } else {
            current += c;
        }
    }
    std::string last = trim_copy(current);
    if (!last.empty()) parts.push_back(last);
    return parts;
}

class DriverBuilder {
public:
    explicit DriverBuilder(std::span<const FunctionRecord> tests,
                           std::span<const ImportDecl> imports)
        : tests_(tests), imports_(imports) {}

    std::string build() {
        std::ostringstream out;
        out << "import os\n";
        out << "import sys\n\n";
        out << "sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))\n\n";

        std::set<std::string> emitted;
        for (const auto& imp : imports_) {
            if (kDriverFrameworkHeads.count(imp.module_head)) continue;
            if (imp.is_relative)
                throw DriverSynthesisError("relative import in test file: " + imp.raw_text);
            std::string line = trim_copy(imp.raw_text);
            if (emitted.insert(line).second) out << line << "\n";
        }
        if (!emitted.empty()) out << "\n";

        std::vector<std::string> names;
        std::set<std::string> used;
        for (const auto& test : tests_) {
            for (const auto& p : test.parameters)
                if (p != "self" && p != "cls")
                    throw DriverSynthesisError("fixture-injected parameter '" + p +
                                               "' in test " + test.qualified_name);
            std::string name = test.name;
            int n = 2;
            while (!used.insert(name).second) name = test.name + "_" + std::to_string(n++);
            names.push_back(name);

            out << "def " << name << "():\n";
            for (const std::string& line : translate_body(test))
                out << "    " << line << "\n";
            out << "\n";
        }

        out << "def main():\n";
        for (const std::string& name : names) out << "    " << name << "()\n";
        out << "    print(\"" << kPassSentinel << "\")\n\n";
        out << "if __name__ == \"__main__\":\n";
        out << "    main()\n";
        return out.str();
    }

private:
    std::span<const FunctionRecord> tests_;
    std::span<const ImportDecl> imports_;
    int raise_counter_ = 0;

    std::vector<std::string> translate_body(const FunctionRecord& test) {
        std::vector<Statement> stmts = body_statements(test.body_text);
        std::vector<std::string> out;
        for (std::size_t i = 0; i < stmts.size(); ++i) i = translate_statement(stmts, i, out);
        if (out.empty()) out.push_back("pass");

        // anything still touching instance state cannot run as a plain function
        for (const auto& tok : lex_tokens(join_lines(out)))
            if (tok.kind == TokenKind::Identifier && (tok.text == "self" || tok.text == "cls"))
                throw DriverSynthesisError("instance state in test " + test.qualified_name);
        return out;
    }

    static std::string join_lines(const std::vector<std::string>& lines) {
        std::string text;
        for (const auto& l : lines) {
            text += l;
            text += '\n';
        }
        return text;
    }

    // Translates stmts[i]; returns the index of the last statement consumed.
    std::size_t translate_statement(const std::vector<Statement>& stmts, std::size_t i,
                                    std::vector<std::string>& out) {
        const Statement& stmt = stmts[i];
        const std::string& text = stmt.text;
        std::string ind = indent_str(stmt.indent);

        auto raises_head = [&](const std::string& prefix) {
            return text.rfind(prefix, 0) == 0;
        };

        // with self.assertRaises(E): / with pytest.raises(E):
        if (raises_head("with self.assertRaises(") || raises_head("with pytest.raises(")) {
            if (text.find(" as ") != std::string::npos)
                throw DriverSynthesisError("captured exception value: " + text);
            std::size_t open = text.find('(');
            std::size_t close = 0;
            std::string exc = trim_copy(call_args(text, open, &close));
            if (exc.empty() || text.back() != ':')
                throw DriverSynthesisError("unsupported raise-expectation form: " + text);

            std::string flag = "_raised_" + std::to_string(raise_counter_++);
            out.push_back(ind + flag + " = False");
            out.push_back(ind + "try:");
            std::size_t j = i + 1;
            bool any = false;
            for (; j < stmts.size() && stmts[j].indent > stmt.indent; ++j) {
                out.push_back(indent_str(stmts[j].indent) + stmts[j].text);
                any = true;
            }
            if (!any) out.push_back(ind + "    pass");
            out.push_back(ind + "except " + exc + ":");
            out.push_back(ind + "    " + flag + " = True");
            out.push_back(ind + "assert " + flag + ", \"expected " + exc + "\"");
            return j - 1;
        }

        // self.assertRaises(E, callable, args...) / pytest.raises(E, callable, ...)
        if (raises_head("self.assertRaises(") || raises_head("pytest.raises(")) {
            std::size_t open = text.find('(');
            std::size_t close = 0;
            auto args = split_top_commas(call_args(text, open, &close));
            if (args.size() < 2)
                throw DriverSynthesisError("unsupported raise-expectation form: " + text);
            std::string exc = args[0];
            std::string call = args[1] + "(";
            for (std::size_t k = 2; k < args.size(); ++k) {
                if (k > 2) call += ", ";
                call += args[k];
            }
            call += ")";

            std::string flag = "_raised_" + std::to_string(raise_counter_++);
            out.push_back(ind + flag + " = False");
            out.push_back(ind + "try:");
            out.push_back(ind + "    " + call);
            out.push_back(ind + "except " + exc + ":");
            out.push_back(ind + "    " + flag + " = True");
            out.push_back(ind + "assert " + flag + ", \"expected " + exc + "\"");
            return i;
        }

        // self.assert<Name>(args)
        if (raises_head("self.assert")) {
            std::size_t open = text.find('(');
            if (open == std::string::npos)
                throw DriverSynthesisError("unsupported assertion: " + text);
            std::string method = text.substr(5, open - 5); // past "self."
            std::size_t close = 0;
            auto args = split_top_commas(call_args(text, open, &close));
            if (close + 1 < text.size() && !trim_copy(text.substr(close + 1)).empty())
                throw DriverSynthesisError("assertion inside larger expression: " + text);

            if (method == "assertEqual" && args.size() == 2)
                out.push_back(ind + "assert (" + args[0] + ") == (" + args[1] + ")");
            else if (method == "assertNotEqual" && args.size() == 2)
                out.push_back(ind + "assert (" + args[0] + ") != (" + args[1] + ")");
            else if (method == "assertTrue" && args.size() == 1)
                out.push_back(ind + "assert (" + args[0] + ")");
            else if (method == "assertFalse" && args.size() == 1)
                out.push_back(ind + "assert not (" + args[0] + ")");
            else
                throw DriverSynthesisError("unsupported assertion: " + method);
            return i;
        }

        out.push_back(ind + text);
        return i;
    }
};

} // namespace

TestDriver synthesize_driver(std::span<const FunctionRecord> tests, const std::string& task_id,
                             const std::string& language, std::span<const ImportDecl> imports) {
    if (tests.empty()) throw DriverSynthesisError("no tests to inline for task " + task_id);
    if (language != "python-like")
        throw DriverSynthesisError("driver synthesis not available for language: " + language);

    DriverBuilder builder(tests, imports);
    TestDriver driver;
    driver.task_id = task_id;
    driver.source_text = builder.build();
    driver.run_command = "python3 {driver}";
    driver.expected_sentinel = std::string(kPassSentinel);
    return driver;
}

} // namespace ctxeval

