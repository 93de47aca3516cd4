#include "ctxeval/source.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "ctxeval/error.hpp"

namespace ctxeval {

namespace {

const std::unordered_set<std::string> kTestFrameworkHeads = {
    "unittest", "unittest2", "pytest", "nose", "nose2", "testtools",
};

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

bool valid_utf8(std::string_view text) {
    std::size_t i = 0;
    while (i < text.size()) {
        unsigned char c = text[i];
        int extra = 0;
        if (c < 0x80) extra = 0;
        else if ((c >> 5) == 0x6) extra = 1;
        else if ((c >> 4) == 0xE) extra = 2;
        else if ((c >> 3) == 0x1E) extra = 3;
        else return false;
        if (i + extra >= text.size()) return false;
        for (int k = 1; k <= extra; ++k)
            if ((static_cast<unsigned char>(text[i + k]) >> 6) != 0x2) return false;
        i += extra + 1;
    }
    return true;
}

std::vector<std::string> split_lines(std::string_view text) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t nl = text.find('\n', start);
        if (nl == std::string_view::npos) {
            lines.emplace_back(text.substr(start));
            break;
        }
        lines.emplace_back(text.substr(start, nl - start));
        start = nl + 1;
    }
    if (!lines.empty() && lines.back().empty() && text.size() > 0 && text.back() == '\n')
        lines.pop_back();
    return lines;
}

bool is_blank(const std::string& line) {
    return std::all_of(line.begin(), line.end(),
                       [](unsigned char c) { return std::isspace(c); });
}

bool all_upper_name(const std::string& name) {
    bool has_alpha = false;
    for (unsigned char c : name) {
        if (std::isalpha(c)) {
            has_alpha = true;
            if (std::islower(c)) return false;
        } else if (c != '_' && !std::isdigit(c)) {
            return false;
        }
    }
    return has_alpha;
}

std::string module_name_of(const std::string& file_path) {
    std::string mod = file_path;
    auto dot = mod.rfind('.');
    if (dot != std::string::npos) mod.resize(dot);
    std::replace(mod.begin(), mod.end(), '/', '.');
    std::replace(mod.begin(), mod.end(), '\\', '.');
    return mod;
}

// Strips quotes and prefix from a string literal token and dedents the body.
std::string string_literal_content(const std::string& raw) {
    std::size_t i = 0;
    while (i < raw.size() && raw[i] != '"' && raw[i] != '\'') ++i;
    std::string text = raw.substr(i);
    int quotes = 1;
    if (text.size() >= 6 && text[0] == text[1] && text[1] == text[2]) quotes = 3;
    if (static_cast<int>(text.size()) >= 2 * quotes)
        text = text.substr(quotes, text.size() - 2 * quotes);

    auto lines = split_lines(text);
    if (lines.size() <= 1) {
        // trim
        auto b = text.find_first_not_of(" \t\n");
        auto e = text.find_last_not_of(" \t\n");
        return b == std::string::npos ? std::string() : text.substr(b, e - b + 1);
    }
    std::size_t common = std::string::npos;
    for (std::size_t k = 1; k < lines.size(); ++k) {
        if (is_blank(lines[k])) continue;
        std::size_t ind = lines[k].find_first_not_of(" \t");
        common = std::min(common, ind);
    }
    if (common == std::string::npos) common = 0;
    std::string out = lines[0];
    for (std::size_t k = 1; k < lines.size(); ++k) {
        out += '\n';
        out += lines[k].size() > common ? lines[k].substr(common) : "";
    }
    auto b = out.find_first_not_of(" \t\n");
    auto e = out.find_last_not_of(" \t\n");
    return b == std::string::npos ? std::string() : out.substr(b, e - b + 1);
}

struct Scope {
    enum Kind { Module, Class, Def } kind;
    int header_indent = -1;
    std::string name;
    int record_index = -1; // functions[] slot when this def is extracted
    int begin_line = 0;    // physical line of the header
    int last_line = 0;     // last physical line seen inside this scope
};

class UnitParser {
public:
    UnitParser(const std::string& text, std::string record_path, std::string language)
        : unit_() {
        unit_.file_path = std::move(record_path);
        unit_.module_name = module_name_of(unit_.file_path);
        unit_.language = std::move(language);
        unit_.raw_lines = split_lines(text);
        lines_ = lex_logical_lines(text);
        scopes_.push_back({Scope::Module, -1, unit_.module_name, -1, 0, 0});
    }

    SourceUnit run() {
        for (const LogicalLine& line : lines_) {
            close_scopes(line.indent);
            dispatch(line);
        }
        close_scopes(0);
        finalize_unit();
        return std::move(unit_);
    }

private:
    SourceUnit unit_;
    std::vector<LogicalLine> lines_;
    std::vector<Scope> scopes_;
    std::vector<std::string> pending_decorators_;
    int pending_decorator_indent_ = -1;

    Scope& top() { return scopes_.back(); }

    const Scope* innermost_class() const {
        for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it)
            if (it->kind == Scope::Class) return &*it;
        return nullptr;
    }

    int current_record() const {
        for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it)
            if (it->kind == Scope::Def && it->record_index >= 0) return it->record_index;
        return -1;
    }

    bool inside_def() const {
        for (const auto& s : scopes_)
            if (s.kind == Scope::Def) return true;
        return false;
    }

    std::string scope_prefix() const {
        std::string prefix = unit_.module_name;
        for (const auto& s : scopes_)
            if (s.kind == Scope::Class) prefix += "." + s.name;
        return prefix;
    }

    void close_scopes(int indent) {
        while (scopes_.size() > 1 && indent <= scopes_.back().header_indent) {
            Scope done = scopes_.back();
            scopes_.pop_back();
            if (done.record_index >= 0)
                unit_.functions[done.record_index].end_line = done.last_line;
            if (done.kind == Scope::Class || done.kind == Scope::Def)
                unit_.top_level_defs.extend_span(done.name, unit_.file_path, done.begin_line,
                                                 done.last_line);
            scopes_.back().last_line = std::max(scopes_.back().last_line, done.last_line);
        }
    }

    void dispatch(const LogicalLine& line) {
        for (auto& s : scopes_) s.last_line = std::max(s.last_line, line.last_line);
        int rec = current_record();
        if (rec >= 0) unit_.function_tokens[rec].body.push_back(line);

        const auto& toks = line.tokens;
        if (toks.empty()) return;

        if (toks[0].kind == TokenKind::Op && toks[0].text == "@") {
            if (rec < 0) { // decorators inside function bodies belong to nested defs
                pending_decorators_.push_back(decorator_name(toks));
                pending_decorator_indent_ = line.indent;
            }
            return;
        }

        std::size_t at = 0;
        if (toks[0].kind == TokenKind::Keyword && toks[0].text == "async") at = 1;

        if (at < toks.size() && toks[at].kind == TokenKind::Keyword && toks[at].text == "def") {
            handle_def(line, at);
            return;
        }
        if (toks[0].kind == TokenKind::Keyword && toks[0].text == "class") {
            handle_class(line);
            return;
        }
        pending_decorators_.clear();
        if (toks[0].kind == TokenKind::Keyword &&
            (toks[0].text == "import" || toks[0].text == "from")) {
            if (top().kind == Scope::Module) handle_import(line);
            return;
        }
        if (rec >= 0) {
            harvest_instance_attrs(line);
            return;
        }
        if (top().kind == Scope::Module || top().kind == Scope::Class)
            handle_assignment(line);
    }

    static std::string decorator_name(const std::vector<Token>& toks) {
        // "@" NAME ("." NAME)* [ "(" ... ]  ->  terminal NAME
        std::string last;
        for (std::size_t i = 1; i < toks.size(); ++i) {
            if (toks[i].kind == TokenKind::Identifier) last = toks[i].text;
            else if (toks[i].kind == TokenKind::Op && toks[i].text == ".") continue;
            else break;
        }
        return last;
    }

    std::vector<std::string> take_decorators(int indent) {
        std::vector<std::string> decs;
        if (pending_decorator_indent_ == indent) decs = std::move(pending_decorators_);
        pending_decorators_.clear();
        pending_decorator_indent_ = -1;
        return decs;
    }

    void handle_def(const LogicalLine& line, std::size_t def_at) {
        const auto& toks = line.tokens;
        if (def_at + 1 >= toks.size() || toks[def_at + 1].kind != TokenKind::Identifier)
            throw ParseError("malformed function header", line.tokens[0].line, line.tokens[0].col);
        std::string name = toks[def_at + 1].text;
        auto decorators = take_decorators(line.indent);

        bool extract = !inside_def() &&
                       (top().kind == Scope::Module || top().kind == Scope::Class);
        int record_index = -1;
        std::size_t colon = header_colon(toks, def_at + 2);

        if (extract) {
            FunctionRecord fn;
            fn.name = name;
            fn.qualified_name = scope_prefix() + "." + name;
            const Scope* cls = innermost_class();
            if (cls) fn.enclosing_class = cls->name;
            fn.file_path = unit_.file_path;
            fn.begin_line = line.first_line;
            fn.end_line = line.last_line;
            fn.decorators = decorators;
            fn.parameters = parse_params(toks, def_at + 2);
            fn.signature = header_text(line, toks, colon);
            unit_.functions.push_back(std::move(fn));

            FunctionTokens ft;
            ft.header.assign(toks.begin(), toks.end());
            unit_.function_tokens.push_back(std::move(ft));
            record_index = static_cast<int>(unit_.functions.size()) - 1;

            Definition def;
            def.name = name;
            def.kind = DefKind::Function;
            def.file_path = unit_.file_path;
            def.begin_line = line.first_line;
            def.end_line = line.last_line; // extended in finalize_unit
            if (cls) def.enclosing_class = cls->name;
            unit_.top_level_defs.add(def);
        }

        // Inline body on the header line ("def f(x): return x")
        if (colon != std::string::npos && colon + 1 < toks.size() && record_index >= 0) {
            LogicalLine body_line;
            body_line.indent = line.indent + 4;
            body_line.first_line = line.first_line;
            body_line.last_line = line.last_line;
            body_line.tokens.assign(toks.begin() + static_cast<long>(colon) + 1, toks.end());
            unit_.function_tokens[record_index].body.push_back(body_line);
        }

        scopes_.push_back({Scope::Def, line.indent, name, record_index, line.first_line,
                           line.last_line});
    }

    void handle_class(const LogicalLine& line) {
        const auto& toks = line.tokens;
        if (toks.size() < 2 || toks[1].kind != TokenKind::Identifier)
            throw ParseError("malformed class header", toks[0].line, toks[0].col);
        std::string name = toks[1].text;
        take_decorators(line.indent);

        if (!inside_def()) {
            Definition def;
            def.name = name;
            def.kind = DefKind::Type;
            def.file_path = unit_.file_path;
            def.begin_line = line.first_line;
            def.end_line = line.last_line;
            const Scope* cls = innermost_class();
            if (cls) def.enclosing_class = cls->name;
            unit_.top_level_defs.add(def);
            unit_.top_level_defs.add_class_bases(unit_.file_path, name, class_bases(toks));
        }
        scopes_.push_back({Scope::Class, line.indent, name, -1, line.first_line, line.last_line});
    }

    static std::vector<std::string> class_bases(const std::vector<Token>& toks) {
        std::vector<std::string> bases;
        std::size_t i = 2;
        if (i >= toks.size() || toks[i].text != "(") return bases;
        int depth = 0;
        bool in_kwarg = false; // class C(Base, metaclass=M): metaclass is not a base
        std::string current;
        for (; i < toks.size(); ++i) {
            const Token& t = toks[i];
            if (t.kind == TokenKind::Op && (t.text == "(" || t.text == "[")) { ++depth; continue; }
            if (t.kind == TokenKind::Op && (t.text == ")" || t.text == "]")) {
                if (--depth == 0) break;
                continue;
            }
            if (depth != 1) continue;
            if (t.kind == TokenKind::Op && t.text == ",") {
                if (!current.empty() && !in_kwarg) bases.push_back(current);
                current.clear();
                in_kwarg = false;
            } else if (t.kind == TokenKind::Op && t.text == "=") {
                in_kwarg = true;
                current.clear();
            } else if (t.kind == TokenKind::Identifier || t.text == ".") {
                current += t.text;
            }
        }
        if (!current.empty() && !in_kwarg) bases.push_back(current);
        return bases;
    }

    void handle_import(const LogicalLine& line) {
        const auto& toks = line.tokens;
        ImportDecl decl;
        decl.raw_text = raw_text(line);

        if (toks[0].text == "import") {
            // import a.b.c [as d][, x.y [as z]]*
            std::size_t i = 1;
            while (i < toks.size()) {
                std::string head;
                std::string last;
                bool first = true;
                while (i < toks.size() && (toks[i].kind == TokenKind::Identifier || toks[i].text == ".")) {
                    if (toks[i].kind == TokenKind::Identifier) {
                        if (first) { head = toks[i].text; first = false; }
                        last = toks[i].text;
                    }
                    ++i;
                }
                std::string bound = head;
                if (i < toks.size() && toks[i].text == "as" && i + 1 < toks.size()) {
                    bound = toks[i + 1].text;
                    i += 2;
                }
                if (!head.empty()) {
                    ImportDecl one = decl;
                    one.module_head = head;
                    one.bound_names = {bound};
                    unit_.imports.push_back(std::move(one));
                }
                if (i < toks.size() && toks[i].text == ",") ++i;
                else break;
            }
            return;
        }

        // from [.]*mod[.sub] import a [as b][, c]*  |  from mod import *
        decl.is_from = true;
        std::size_t i = 1;
        while (i < toks.size() && toks[i].kind == TokenKind::Op &&
               (toks[i].text == "." || toks[i].text == "...")) {
            decl.is_relative = true;
            ++i;
        }
        bool first = true;
        while (i < toks.size() && (toks[i].kind == TokenKind::Identifier || toks[i].text == ".")) {
            if (toks[i].kind == TokenKind::Identifier && first) {
                decl.module_head = toks[i].text;
                first = false;
            }
            ++i;
        }
        if (i < toks.size() && toks[i].kind == TokenKind::Keyword && toks[i].text == "import") ++i;
        while (i < toks.size()) {
            const Token& t = toks[i];
            if (t.kind == TokenKind::Identifier) {
                std::string bound = t.text;
                if (i + 2 < toks.size() && toks[i + 1].text == "as") {
                    bound = toks[i + 2].text;
                    i += 2;
                }
                decl.bound_names.push_back(bound);
            } else if (t.kind == TokenKind::Op && t.text == "*") {
                decl.bound_names.push_back("*");
            }
            ++i;
        }
        if (decl.bound_names.empty()) decl.bound_names.push_back("*");
        unit_.imports.push_back(std::move(decl));
    }

    void add_binding(const std::string& name, const LogicalLine& line) {
        Definition def;
        def.name = name;
        def.kind = all_upper_name(name) ? DefKind::Constant : DefKind::Variable;
        def.file_path = unit_.file_path;
        def.begin_line = line.first_line;
        def.end_line = line.last_line;
        const Scope* cls = innermost_class();
        if (cls && top().kind == Scope::Class) def.enclosing_class = cls->name;
        unit_.top_level_defs.add(def);
    }

    // Module- or class-level bindings: "name = ...", "name: T = ...",
    // "for x in ...:", "with ... as x:".
    void handle_assignment(const LogicalLine& line) {
        const auto& toks = line.tokens;
        if (toks[0].kind == TokenKind::Keyword) {
            if (toks[0].text == "for") {
                for (std::size_t i = 1; i < toks.size(); ++i) {
                    if (toks[i].kind == TokenKind::Keyword && toks[i].text == "in") break;
                    if (toks[i].kind == TokenKind::Identifier) add_binding(toks[i].text, line);
                }
            } else if (toks[0].text == "with" || toks[0].text == "except") {
                for (std::size_t i = 1; i + 1 < toks.size(); ++i)
                    if (toks[i].kind == TokenKind::Keyword && toks[i].text == "as" &&
                        toks[i + 1].kind == TokenKind::Identifier)
                        add_binding(toks[i + 1].text, line);
            }
            return;
        }

        int depth = 0;
        std::size_t eq = std::string::npos;
        std::size_t colon = std::string::npos;
        for (std::size_t i = 0; i < toks.size(); ++i) {
            const Token& t = toks[i];
            if (t.kind != TokenKind::Op) continue;
            if (t.text == "(" || t.text == "[" || t.text == "{") ++depth;
            else if (t.text == ")" || t.text == "]" || t.text == "}") --depth;
            else if (depth == 0 && t.text == "=" && eq == std::string::npos) eq = i;
            else if (depth == 0 && t.text == ":" && colon == std::string::npos) colon = i;
        }
        std::size_t end = std::min(eq, colon);
        if (end == std::string::npos) return;

        for (std::size_t i = 0; i < end; ++i) {
            const Token& t = toks[i];
            if (t.kind != TokenKind::Identifier) continue;
            bool attr = i > 0 && toks[i - 1].kind == TokenKind::Op && toks[i - 1].text == ".";
            bool call = i + 1 <= end && i + 1 < toks.size() &&
                        toks[i + 1].kind == TokenKind::Op &&
                        (toks[i + 1].text == "(" || toks[i + 1].text == "[" ||
                         toks[i + 1].text == ".");
            if (attr || call) continue;
            add_binding(t.text, line);
        }
    }

    // "self.attr = ..." / "self.attr: T = ..." in a method body registers a
    // class attribute so member references resolve to a definition site.
    void harvest_instance_attrs(const LogicalLine& line) {
        const Scope* cls = innermost_class();
        if (!cls) return;
        const auto& toks = line.tokens;
        int depth = 0;
        for (std::size_t i = 0; i + 2 < toks.size(); ++i) {
            const Token& t = toks[i];
            if (t.kind == TokenKind::Op) {
                if (t.text == "(" || t.text == "[" || t.text == "{") ++depth;
                else if (t.text == ")" || t.text == "]" || t.text == "}") --depth;
                continue;
            }
            if (depth != 0) continue;
            if (t.kind == TokenKind::Identifier && t.text == "self" &&
                toks[i + 1].text == "." && toks[i + 2].kind == TokenKind::Identifier) {
                bool assigned = i + 3 < toks.size() && toks[i + 3].kind == TokenKind::Op &&
                                (toks[i + 3].text == "=" || toks[i + 3].text == ":");
                if (!assigned) continue;
                Definition def;
                def.name = toks[i + 2].text;
                def.kind = all_upper_name(def.name) ? DefKind::Constant : DefKind::Variable;
                def.file_path = unit_.file_path;
                def.begin_line = line.first_line;
                def.end_line = line.last_line;
                def.enclosing_class = cls->name;
                unit_.top_level_defs.add(def);
            }
        }
    }

    // Index of the colon ending the header (after the parameter list).
    static std::size_t header_colon(const std::vector<Token>& toks, std::size_t from) {
        int depth = 0;
        bool params_done = false;
        for (std::size_t i = from; i < toks.size(); ++i) {
            const Token& t = toks[i];
            if (t.kind != TokenKind::Op) continue;
            if (t.text == "(" || t.text == "[" || t.text == "{") ++depth;
            else if (t.text == ")" || t.text == "]" || t.text == "}") {
                if (--depth == 0) params_done = true;
            } else if (t.text == ":" && depth == 0 && params_done) {
                return i;
            }
        }
        return std::string::npos;
    }

    static std::vector<std::string> parse_params(const std::vector<Token>& toks, std::size_t from) {
        std::vector<std::string> params;
        std::size_t i = from;
        while (i < toks.size() && toks[i].text != "(") ++i;
        if (i >= toks.size()) return params;
        int depth = 0;
        bool expect_name = true;
        for (; i < toks.size(); ++i) {
            const Token& t = toks[i];
            if (t.kind == TokenKind::Op) {
                if (t.text == "(" || t.text == "[" || t.text == "{") {
                    ++depth;
                    continue;
                }
                if (t.text == ")" || t.text == "]" || t.text == "}") {
                    if (--depth == 0) break;
                    continue;
                }
                if (depth == 1 && t.text == ",") expect_name = true;
                continue;
            }
            if (depth == 1 && expect_name && t.kind == TokenKind::Identifier) {
                params.push_back(t.text);
                expect_name = false;
            }
        }
        return params;
    }

    std::string header_text(const LogicalLine& line, const std::vector<Token>& toks,
                            std::size_t colon) const {
        int last_phys = line.last_line;
        int last_col = -1;
        if (colon != std::string::npos) {
            last_phys = toks[colon].line;
            last_col = toks[colon].col; // 1-based, points at ':'
        }
        std::string text;
        for (int ln = line.first_line; ln <= last_phys; ++ln) {
            if (ln - 1 >= static_cast<int>(unit_.raw_lines.size())) break;
            std::string part = unit_.raw_lines[ln - 1];
            if (ln == last_phys && last_col > 0)
                part = part.substr(0, static_cast<std::size_t>(last_col));
            if (ln == line.first_line) {
                auto b = part.find_first_not_of(" \t");
                part = b == std::string::npos ? "" : part.substr(b);
            }
            if (!text.empty()) text += '\n';
            text += part;
        }
        while (!text.empty() && (text.back() == ' ' || text.back() == '\t')) text.pop_back();
        return text;
    }

    std::string raw_text(const LogicalLine& line) const {
        std::string text;
        for (int ln = line.first_line; ln <= line.last_line; ++ln) {
            if (ln - 1 >= static_cast<int>(unit_.raw_lines.size())) break;
            if (!text.empty()) text += '\n';
            text += unit_.raw_lines[ln - 1];
        }
        return text;
    }

    bool has_test_framework_import() const {
        for (const auto& imp : unit_.imports)
            if (kTestFrameworkHeads.count(imp.module_head)) return true;
        return false;
    }

    bool path_under_tests() const {
        std::string p = "/" + unit_.file_path;
        std::replace(p.begin(), p.end(), '\\', '/');
        return p.find("/test/") != std::string::npos || p.find("/tests/") != std::string::npos;
    }

    void finalize_unit() {
        bool framework = has_test_framework_import();
        bool tests_dir = path_under_tests();

        for (std::size_t i = 0; i < unit_.functions.size(); ++i) {
            FunctionRecord& fn = unit_.functions[i];
            FunctionTokens& ft = unit_.function_tokens[i];

            // docstring: first body statement that is a lone string literal
            if (!ft.body.empty() && ft.body.front().tokens.size() == 1 &&
                ft.body.front().tokens[0].kind == TokenKind::String) {
                fn.docstring_original = string_literal_content(ft.body.front().tokens[0].text);
            }

            // body_text and loc from the raw lines after the header
            int header_last = fn.begin_line;
            for (const Token& t : ft.header) header_last = std::max(header_last, t.line);
            bool inline_body =
                !ft.body.empty() && ft.body.front().first_line <= header_last;

            std::string body;
            int loc = 0;
            if (inline_body) {
                const Token& first = ft.body.front().tokens.front();
                if (first.line - 1 < static_cast<int>(unit_.raw_lines.size()))
                    body = unit_.raw_lines[first.line - 1].substr(
                        static_cast<std::size_t>(first.col - 1));
                loc = 1;
            } else {
                for (int ln = header_last + 1; ln <= fn.end_line; ++ln) {
                    if (ln - 1 >= static_cast<int>(unit_.raw_lines.size())) break;
                    if (ln > header_last + 1) body += '\n';
                    body += unit_.raw_lines[ln - 1];
                    if (!is_blank(unit_.raw_lines[ln - 1])) ++loc;
                }
            }
            fn.body_text = std::move(body);
            fn.loc = std::max(loc, 1);

            fn.is_test = tests_dir || framework || fn.name.rfind("test_", 0) == 0 ||
                         (fn.name.size() > 4 &&
                          fn.name.compare(fn.name.size() - 4, 4, "Test") == 0);
            fn.is_deprecated = detect_deprecated(fn);
            fn.is_abstract = detect_abstract(ft);
            fn.complexity = cyclomatic_complexity(fn);
        }
    }

    static bool detect_deprecated(const FunctionRecord& fn) {
        for (const auto& dec : fn.decorators) {
            std::string low;
            for (char c : dec) low += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            if (low == "deprecated") return true;
        }
        if (!fn.docstring_original) return false;
        std::string word;
        for (unsigned char c : *fn.docstring_original + " ") {
            if (std::isalnum(c) || c == '_') {
                word += static_cast<char>(std::tolower(c));
            } else {
                if (word == "deprecated") return true;
                word.clear();
            }
        }
        return false;
    }

    // Empty-body detection: only a docstring plus pass / ... /
    // raise NotImplementedError statements.
    static bool detect_abstract(const FunctionTokens& ft) {
        for (std::size_t k = 0; k < ft.body.size(); ++k) {
            const auto& toks = ft.body[k].tokens;
            if (toks.empty()) continue;
            if (k == 0 && toks.size() == 1 && toks[0].kind == TokenKind::String)
                continue; // docstring
            if (toks[0].kind == TokenKind::Keyword && toks[0].text == "pass") continue;
            if (toks[0].kind == TokenKind::Op && toks[0].text == "...") continue;
            if (toks[0].kind == TokenKind::Keyword && toks[0].text == "raise" &&
                toks.size() >= 2 && toks[1].text == "NotImplementedError")
                continue;
            return false;
        }
        return true;
    }
};

} // namespace

std::string to_string(DefKind kind) {
    switch (kind) {
        case DefKind::Type: return "type";
        case DefKind::Function: return "function";
        case DefKind::Variable: return "variable";
        case DefKind::Constant: return "constant";
    }
    return "variable";
}

void DefinitionIndex::add(Definition def) {
    auto& bucket = by_name_[def.name];
    for (const auto& existing : bucket) {
        if (existing.file_path == def.file_path && existing.begin_line == def.begin_line &&
            existing.end_line == def.end_line)
            return;
    }
    bucket.push_back(std::move(def));
    ++count_;
}

void DefinitionIndex::extend_span(const std::string& name, const std::string& file,
                                  int begin_line, int new_end) {
    auto it = by_name_.find(name);
    if (it == by_name_.end()) return;
    for (auto& def : it->second)
        if (def.file_path == file && def.begin_line == begin_line)
            def.end_line = std::max(def.end_line, new_end);
}

void DefinitionIndex::add_file_imports(const std::string& file,
                                       const std::vector<ImportDecl>& imports) {
    auto& dst = file_imports_[file];
    dst.insert(dst.end(), imports.begin(), imports.end());
}

void DefinitionIndex::add_module(const std::string& file_path) {
    std::string dotted = module_name_of(file_path);
    if (!modules_.count(dotted)) modules_[dotted] = file_path;
    auto last_dot = dotted.rfind('.');
    std::string last = last_dot == std::string::npos ? dotted : dotted.substr(last_dot + 1);
    if (!modules_.count(last)) modules_[last] = file_path;
}

void DefinitionIndex::add_class_bases(const std::string& file, const std::string& cls,
                                      const std::vector<std::string>& bases) {
    class_bases_[file + ":" + cls] = bases;
}

std::span<const Definition> DefinitionIndex::find(const std::string& name) const {
    auto it = by_name_.find(name);
    if (it == by_name_.end()) return {};
    return it->second;
}

const Definition* DefinitionIndex::find_in_class(const std::string& name, const std::string& file,
                                                 const std::string& cls) const {
    for (const auto& def : find(name))
        if (def.file_path == file && def.enclosing_class && *def.enclosing_class == cls)
            return &def;
    return nullptr;
}

const Definition* DefinitionIndex::find_in_file(const std::string& name,
                                                const std::string& file) const {
    for (const auto& def : find(name))
        if (def.file_path == file && !def.enclosing_class) return &def;
    return nullptr;
}

const Definition* DefinitionIndex::find_in_other_file(const std::string& name,
                                                      const std::string& file) const {
    for (const auto& def : find(name))
        if (def.file_path != file && !def.enclosing_class) return &def;
    return nullptr;
}

const Definition* DefinitionIndex::find_class(const std::string& cls_name,
                                              const std::string& preferred_file) const {
    const Definition* fallback = nullptr;
    for (const auto& def : find(cls_name)) {
        if (def.kind != DefKind::Type) continue;
        if (def.file_path == preferred_file) return &def;
        if (!fallback) fallback = &def;
    }
    return fallback;
}

const std::vector<ImportDecl>* DefinitionIndex::imports_of(const std::string& file) const {
    auto it = file_imports_.find(file);
    return it == file_imports_.end() ? nullptr : &it->second;
}

const std::vector<std::string>* DefinitionIndex::bases_of(const std::string& file,
                                                          const std::string& cls) const {
    auto it = class_bases_.find(file + ":" + cls);
    return it == class_bases_.end() ? nullptr : &it->second;
}

const std::string* DefinitionIndex::module_file(const std::string& head) const {
    auto it = modules_.find(head);
    return it == modules_.end() ? nullptr : &it->second;
}

std::vector<const Definition*> DefinitionIndex::all() const {
    std::vector<const Definition*> out;
    for (const auto& [name, defs] : by_name_)
        for (const auto& def : defs) out.push_back(&def);
    return out;
}

int SourceUnit::function_index(const std::string& qualified_name) const {
    for (std::size_t i = 0; i < functions.size(); ++i)
        if (functions[i].qualified_name == qualified_name) return static_cast<int>(i);
    return -1;
}

SourceUnit parse_unit(const std::filesystem::path& file_path, const std::string& language,
                      const std::string& record_path) {
    std::string text = read_file(file_path);
    return parse_unit_text(text, record_path.empty() ? file_path.string() : record_path, language);
}

SourceUnit parse_unit_text(const std::string& text, const std::string& record_path,
                           const std::string& language) {
    if (language != "python-like")
        throw ParseError("unsupported language: " + language, 1, 1);
    if (!valid_utf8(text)) throw IoError("file is not valid UTF-8: " + record_path);
    UnitParser parser(text, record_path, language);
    return parser.run();
}

DefinitionIndex build_project_index(std::span<const SourceUnit> units) {
    std::vector<const SourceUnit*> ordered;
    for (const auto& u : units) ordered.push_back(&u);
    std::sort(ordered.begin(), ordered.end(),
              [](const SourceUnit* a, const SourceUnit* b) { return a->file_path < b->file_path; });

    DefinitionIndex index;
    for (const SourceUnit* unit : ordered) {
        for (const Definition* def : unit->top_level_defs.all()) index.add(*def);
        index.add_file_imports(unit->file_path, unit->imports);
        index.add_module(unit->file_path);
        for (const auto& fn : unit->functions) {
            if (!fn.enclosing_class) continue;
            const auto* bases = unit->top_level_defs.bases_of(unit->file_path, *fn.enclosing_class);
            if (bases) index.add_class_bases(unit->file_path, *fn.enclosing_class, *bases);
        }
        // class bases for classes without methods
        for (const Definition* def : unit->top_level_defs.all()) {
            if (def->kind != DefKind::Type) continue;
            const auto* bases = unit->top_level_defs.bases_of(def->file_path, def->name);
            if (bases) index.add_class_bases(def->file_path, def->name, *bases);
        }
    }
    return index;
}

int cyclomatic_complexity(const FunctionRecord& fn) {
    std::vector<LogicalLine> lines;
    try {
        lines = lex_logical_lines(fn.body_text);
    } catch (const ParseError&) {
        return 1;
    }
    int points = 0;
    for (const auto& line : lines) {
        for (std::size_t i = 0; i < line.tokens.size(); ++i) {
            const Token& t = line.tokens[i];
            if (t.kind == TokenKind::Keyword) {
                if (t.text == "if" || t.text == "elif" || t.text == "for" ||
                    t.text == "while" || t.text == "and" || t.text == "or" ||
                    t.text == "except")
                    ++points;
            } else if (t.kind == TokenKind::Identifier && t.text == "case" && i == 0 &&
                       !line.tokens.empty() && line.tokens.back().text == ":") {
                ++points; // match-statement arm
            }
        }
    }
    return 1 + points;
}

bool docstring_is_english(const std::string& doc) {
    long ascii_letters = 0;
    long non_ascii = 0;
    for (unsigned char c : doc) {
        if (c < 0x80 && std::isalpha(c)) ++ascii_letters;
        else if (c >= 0x80) ++non_ascii;
    }
    long total = ascii_letters + non_ascii;
    if (total == 0) return true;
    return static_cast<double>(ascii_letters) / static_cast<double>(total) >= 0.9;
}

bool is_candidate(const FunctionRecord& fn, int oracle_token_count, const FilterOptions& opts) {
    if (fn.is_test || fn.is_deprecated || fn.is_abstract) return false;
    if (!fn.docstring_original || fn.docstring_original->empty()) return false;
    if (!docstring_is_english(*fn.docstring_original)) return false;
    if (fn.loc <= opts.min_loc) return false;
    if (oracle_token_count >= opts.max_context_tokens) return false;
    return true;
}

std::vector<FunctionRecord> filter_candidates(std::span<const FunctionRecord> fns,
                                              std::span<const int> oracle_token_counts,
                                              const FilterOptions& opts) {
    if (fns.size() != oracle_token_counts.size())
        throw ValidationError("token counts not aligned with function list");
    std::vector<FunctionRecord> kept;
    for (std::size_t i = 0; i < fns.size(); ++i)
        if (is_candidate(fns[i], oracle_token_counts[i], opts)) kept.push_back(fns[i]);
    return kept;
}

} // namespace ctxeval
