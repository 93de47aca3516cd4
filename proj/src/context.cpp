#include "ctxeval/context.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_map>
#include <unordered_set>

#include "ctxeval/error.hpp"

namespace ctxeval {

namespace {

bool upper_initial(const std::string& name) {
    return !name.empty() && std::isupper(static_cast<unsigned char>(name[0]));
}

int category_precedence(TokenCategory c) {
    switch (c) {
        case TokenCategory::TypeReference: return 3;
        case TokenCategory::APIInvocation: return 2;
        case TokenCategory::VarReference: return 1;
    }
    return 0;
}

struct ImportBinding {
    std::string head;
    bool is_relative = false;
    bool is_module = false; // "import x" binds a module object; "from m import f" does not
};

struct RawUse {
    std::string name;
    TokenCategory category;
    OriginClass origin;
    std::optional<DefSite> def_site;
};

DefSite site_of(const Definition& def) {
    return DefSite{def.file_path, def.begin_line, def.end_line};
}

class ContextWalker {
public:
    ContextWalker(const FunctionRecord& fn, const SourceUnit& unit,
                  const SymbolRegistry& registry, const DefinitionIndex& index,
                  const FunctionTokens& tokens)
        : fn_(fn), unit_(unit), registry_(registry), index_(index), tokens_(tokens) {}

    ContextReport run() {
        collect_file_imports();
        collect_globals();
        collect_bindings();
        scan(tokens_.header, true);
        for (const auto& line : tokens_.body) {
            if (line.tokens.empty()) continue;
            const Token& first = line.tokens.front();
            if (first.kind == TokenKind::Keyword &&
                (first.text == "import" || first.text == "from" || first.text == "global" ||
                 first.text == "nonlocal"))
                continue;
            scan(line.tokens, false);
        }

        ContextReport report;
        report.oracle_context = reduce();
        report.unresolved = unresolved_;
        return report;
    }

private:
    const FunctionRecord& fn_;
    const SourceUnit& unit_;
    const SymbolRegistry& registry_;
    const DefinitionIndex& index_;
    const FunctionTokens& tokens_;

    std::unordered_set<std::string> locals_;
    std::unordered_set<std::string> globals_;
    std::unordered_map<std::string, ImportBinding> imports_; // file-level and local
    std::vector<RawUse> uses_;
    std::vector<std::string> use_order_;
    std::vector<std::string> unresolved_;
    std::unordered_set<std::string> unresolved_seen_;

    static bool is_open(const Token& t) {
        return t.kind == TokenKind::Op && (t.text == "(" || t.text == "[" || t.text == "{");
    }
    static bool is_close(const Token& t) {
        return t.kind == TokenKind::Op && (t.text == ")" || t.text == "]" || t.text == "}");
    }

    void collect_file_imports() {
        for (const auto& imp : unit_.imports)
            for (const auto& bound : imp.bound_names)
                if (bound != "*" && !imports_.count(bound))
                    imports_[bound] = {imp.module_head, imp.is_relative, !imp.is_from};
    }

    void collect_globals() {
        for (const auto& line : tokens_.body) {
            const auto& toks = line.tokens;
            if (toks.empty() || toks[0].kind != TokenKind::Keyword) continue;
            if (toks[0].text != "global" && toks[0].text != "nonlocal") continue;
            for (std::size_t i = 1; i < toks.size(); ++i)
                if (toks[i].kind == TokenKind::Identifier) globals_.insert(toks[i].text);
        }
    }

    void add_local(const std::string& name) {
        if (!globals_.count(name)) locals_.insert(name);
    }

    void collect_bindings() {
        for (const auto& p : fn_.parameters) locals_.insert(p);
        locals_.insert(fn_.name);
        locals_.insert("self");
        locals_.insert("cls");

        for (const auto& line : tokens_.body) {
            const auto& toks = line.tokens;
            if (toks.empty()) continue;
            const Token& first = toks[0];

            if (first.kind == TokenKind::Keyword) {
                if (first.text == "import" || first.text == "from") {
                    bind_local_import(toks);
                    continue;
                }
                if (first.text == "def" ||
                    (first.text == "async" && toks.size() > 1 && toks[1].text == "def")) {
                    std::size_t at = first.text == "def" ? 1 : 2;
                    if (at < toks.size() && toks[at].kind == TokenKind::Identifier)
                        add_local(toks[at].text);
                    bind_params(toks, at + 1);
                }
                if (first.text == "class" && toks.size() > 1 &&
                    toks[1].kind == TokenKind::Identifier)
                    add_local(toks[1].text);
                if (first.text == "with" || first.text == "except") {
                    for (std::size_t i = 1; i + 1 < toks.size(); ++i)
                        if (toks[i].kind == TokenKind::Keyword && toks[i].text == "as" &&
                            toks[i + 1].kind == TokenKind::Identifier)
                            add_local(toks[i + 1].text);
                }
            }

            bind_for_targets(toks);
            bind_lambda_params(toks);
            bind_assign_targets(toks);
        }
    }

    void bind_local_import(const std::vector<Token>& toks) {
        bool is_from = toks[0].text == "from";
        std::string head;
        bool relative = false;
        std::size_t i = 1;
        if (is_from) {
            while (i < toks.size() && toks[i].kind == TokenKind::Op &&
                   (toks[i].text == "." || toks[i].text == "...")) {
                relative = true;
                ++i;
            }
            bool first_seg = true;
            while (i < toks.size() &&
                   (toks[i].kind == TokenKind::Identifier || toks[i].text == ".")) {
                if (toks[i].kind == TokenKind::Identifier && first_seg) {
                    head = toks[i].text;
                    first_seg = false;
                }
                ++i;
            }
            if (i < toks.size() && toks[i].text == "import") ++i;
            while (i < toks.size()) {
                if (toks[i].kind == TokenKind::Identifier) {
                    std::string bound = toks[i].text;
                    if (i + 2 < toks.size() && toks[i + 1].text == "as") {
                        bound = toks[i + 2].text;
                        i += 2;
                    }
                    imports_[bound] = {head, relative, false};
                }
                ++i;
            }
            return;
        }
        while (i < toks.size()) {
            std::string seg_head;
            bool first_seg = true;
            while (i < toks.size() && (toks[i].kind == TokenKind::Identifier || toks[i].text == ".")) {
                if (toks[i].kind == TokenKind::Identifier && first_seg) {
                    seg_head = toks[i].text;
                    first_seg = false;
                }
                ++i;
            }
            std::string bound = seg_head;
            if (i < toks.size() && toks[i].text == "as" && i + 1 < toks.size()) {
                bound = toks[i + 1].text;
                i += 2;
            }
            if (!seg_head.empty()) imports_[bound] = {seg_head, false, true};
            if (i < toks.size() && toks[i].text == ",") ++i;
            else break;
        }
    }

    void bind_params(const std::vector<Token>& toks, std::size_t from) {
        std::size_t i = from;
        while (i < toks.size() && toks[i].text != "(") ++i;
        int depth = 0;
        bool expect = true;
        for (; i < toks.size(); ++i) {
            const Token& t = toks[i];
            if (is_open(t)) { ++depth; continue; }
            if (is_close(t)) {
                if (--depth == 0) break;
                continue;
            }
            if (t.kind == TokenKind::Op && t.text == "," && depth == 1) expect = true;
            else if (expect && depth == 1 && t.kind == TokenKind::Identifier) {
                add_local(t.text);
                expect = false;
            }
        }
    }

    void bind_for_targets(const std::vector<Token>& toks) {
        for (std::size_t i = 0; i < toks.size(); ++i) {
            if (toks[i].kind != TokenKind::Keyword || toks[i].text != "for") continue;
            for (std::size_t j = i + 1; j < toks.size(); ++j) {
                if (toks[j].kind == TokenKind::Keyword && toks[j].text == "in") break;
                if (toks[j].kind == TokenKind::Identifier) add_local(toks[j].text);
            }
        }
    }

    void bind_lambda_params(const std::vector<Token>& toks) {
        for (std::size_t i = 0; i < toks.size(); ++i) {
            if (toks[i].kind != TokenKind::Keyword || toks[i].text != "lambda") continue;
            bool expect = true;
            bool in_default = false;
            for (std::size_t j = i + 1; j < toks.size(); ++j) {
                const Token& t = toks[j];
                if (t.kind == TokenKind::Op) {
                    if (t.text == ":") break;
                    if (t.text == ",") { expect = true; in_default = false; }
                    if (t.text == "=") in_default = true;
                    continue;
                }
                if (expect && !in_default && t.kind == TokenKind::Identifier) {
                    add_local(t.text);
                    expect = false;
                }
            }
        }
    }

    void bind_assign_targets(const std::vector<Token>& toks) {
        // walrus bindings
        for (std::size_t i = 1; i < toks.size(); ++i)
            if (toks[i].kind == TokenKind::Op && toks[i].text == ":=" &&
                toks[i - 1].kind == TokenKind::Identifier)
                add_local(toks[i - 1].text);

        // augmented assignment
        static const std::unordered_set<std::string> kAugOps = {
            "+=", "-=", "*=", "/=", "//=", "**=", "%=", "@=", "&=", "|=", "^=", ">>=", "<<=",
        };
        for (std::size_t i = 1; i < toks.size(); ++i)
            if (toks[i].kind == TokenKind::Op && kAugOps.count(toks[i].text) &&
                toks[i - 1].kind == TokenKind::Identifier &&
                (i < 2 || toks[i - 2].text != "."))
                add_local(toks[i - 1].text);

        // statement-head annotation: NAME ':' ...
        if (toks.size() >= 2 && toks[0].kind == TokenKind::Identifier &&
            toks[1].kind == TokenKind::Op && toks[1].text == ":")
            add_local(toks[0].text);

        // plain / chained assignment targets
        bool keyword_led = toks[0].kind == TokenKind::Keyword;
        if (keyword_led && toks[0].text != "if" && toks[0].text != "elif" &&
            toks[0].text != "else" && toks[0].text != "while" && toks[0].text != "try" &&
            toks[0].text != "finally" && toks[0].text != "with" && toks[0].text != "for" &&
            toks[0].text != "except")
            return;

        int depth = 0;
        std::size_t region_start = 0;
        if (keyword_led) {
            // inline compound statement: assignments live after the last ':'
            std::size_t last_colon = std::string::npos;
            int d = 0;
            for (std::size_t i = 0; i < toks.size(); ++i) {
                if (is_open(toks[i])) ++d;
                else if (is_close(toks[i])) --d;
                else if (d == 0 && toks[i].kind == TokenKind::Op && toks[i].text == ":")
                    last_colon = i;
            }
            if (last_colon == std::string::npos) return;
            region_start = last_colon + 1;
        }

        std::vector<std::size_t> eqs;
        depth = 0;
        for (std::size_t i = region_start; i < toks.size(); ++i) {
            if (is_open(toks[i])) ++depth;
            else if (is_close(toks[i])) --depth;
            else if (depth == 0 && toks[i].kind == TokenKind::Op && toks[i].text == "=")
                eqs.push_back(i);
        }
        if (eqs.empty()) return;

        std::size_t start = region_start;
        for (std::size_t eq : eqs) {
            for (std::size_t i = start; i < eq; ++i) {
                const Token& t = toks[i];
                if (t.kind != TokenKind::Identifier) continue;
                bool attr = i > 0 && toks[i - 1].kind == TokenKind::Op && toks[i - 1].text == ".";
                bool call_or_index = i + 1 < toks.size() && toks[i + 1].kind == TokenKind::Op &&
                                     (toks[i + 1].text == "(" || toks[i + 1].text == "[" ||
                                      toks[i + 1].text == ".");
                if (!attr && !call_or_index) add_local(t.text);
            }
            start = eq + 1;
        }
    }

    // ---- use scan ----

    void scan(const std::vector<Token>& toks, bool is_header) {
        int depth = 0;
        bool in_annotation = false;
        bool in_except = false;

        for (std::size_t i = 0; i < toks.size(); ++i) {
            const Token& t = toks[i];
            if (t.kind == TokenKind::Op) {
                if (is_open(t)) ++depth;
                else if (is_close(t)) {
                    --depth;
                    if (is_header && depth == 0) in_annotation = false;
                } else if (t.text == ":") {
                    if (is_header && depth >= 1) in_annotation = true;
                    else if (in_except) { in_except = false; in_annotation = false; }
                    else if (!is_header && depth == 0 && i >= 1 && i == 1 &&
                             toks[0].kind == TokenKind::Identifier)
                        in_annotation = true; // "name: T = ..." annotation region
                    else if (depth == 0) in_annotation = false;
                } else if (t.text == "->") {
                    in_annotation = true;
                } else if (t.text == "," && depth <= 1) {
                    if (is_header) in_annotation = false;
                } else if (t.text == "=" && depth <= 1) {
                    in_annotation = false;
                }
                continue;
            }
            if (t.kind == TokenKind::Keyword) {
                if (t.text == "except") { in_except = true; in_annotation = true; }
                if (t.text == "as" && in_except) in_annotation = false;
                continue;
            }
            if (t.kind != TokenKind::Identifier) continue;

            // attribute members are handled from their chain head
            if (i > 0 && toks[i - 1].kind == TokenKind::Op && toks[i - 1].text == ".") continue;
            // keyword argument names
            if (i + 1 < toks.size() && toks[i + 1].kind == TokenKind::Op &&
                toks[i + 1].text == "=" && depth >= 1 && i > 0 &&
                (toks[i - 1].text == "(" || toks[i - 1].text == ","))
                continue;

            // collect the attribute chain starting here
            std::vector<std::string> chain = {t.text};
            std::size_t end = i;
            while (end + 2 < toks.size() && toks[end + 1].kind == TokenKind::Op &&
                   toks[end + 1].text == "." && toks[end + 2].kind == TokenKind::Identifier) {
                chain.push_back(toks[end + 2].text);
                end += 2;
            }
            bool called = end + 1 < toks.size() && toks[end + 1].kind == TokenKind::Op &&
                          toks[end + 1].text == "(";

            handle_chain(chain, called, in_annotation);
            i = end;
        }
    }

    void record_use(RawUse use) {
        use_order_.push_back(use.name);
        uses_.push_back(std::move(use));
    }

    void mark_unresolved(const std::string& name) {
        if (unresolved_seen_.insert(name).second) unresolved_.push_back(name);
    }

    const Definition* project_definition(const std::string& name, OriginClass origin) const {
        switch (origin) {
            case OriginClass::ProjectClass:
                return fn_.enclosing_class
                           ? index_.find_in_class(name, fn_.file_path, *fn_.enclosing_class)
                           : nullptr;
            case OriginClass::ProjectFile:
                return index_.find_in_file(name, fn_.file_path);
            case OriginClass::ProjectOtherFile:
                return index_.find_in_other_file(name, fn_.file_path);
            default:
                return nullptr;
        }
    }

    std::optional<DefSite> project_site(const std::string& name, OriginClass origin,
                                        const ImportBinding* binding) const {
        if (origin != OriginClass::ProjectClass && origin != OriginClass::ProjectFile &&
            origin != OriginClass::ProjectOtherFile)
            return std::nullopt;
        if (const Definition* def = project_definition(name, origin)) return site_of(*def);
        if (binding) {
            if (const std::string* mfile = index_.module_file(binding->head)) {
                if (const Definition* def = index_.find_in_file(name, *mfile))
                    return site_of(*def);
                return DefSite{*mfile, 1, 1};
            }
        }
        if (origin == OriginClass::ProjectClass && fn_.enclosing_class) {
            if (const Definition* cls = index_.find_class(*fn_.enclosing_class, fn_.file_path))
                return site_of(*cls);
        }
        return DefSite{fn_.file_path, fn_.begin_line, fn_.end_line};
    }

    void handle_chain(const std::vector<std::string>& chain, bool called, bool annotation) {
        const std::string& head = chain.front();

        if ((head == "self" || head == "cls") && chain.size() >= 2) {
            const std::string& member = chain[1];
            bool member_called = called && chain.size() == 2;
            RawUse use;
            use.name = member;
            use.category = member_called ? TokenCategory::APIInvocation
                                         : TokenCategory::VarReference;
            use.origin = OriginClass::ProjectClass;
            use.def_site = project_site(member, OriginClass::ProjectClass, nullptr);
            record_use(std::move(use));
            return;
        }

        if (locals_.count(head)) return;

        const ImportBinding* binding = nullptr;
        auto imp = imports_.find(head);
        if (imp != imports_.end()) binding = &imp->second;

        OriginClass origin;
        if (binding) {
            origin = classify_import_head(registry_, binding->head, binding->is_relative, index_);
            if (origin == OriginClass::Unknown) {
                mark_unresolved(head);
                return;
            }
        } else {
            origin = classify_symbol(registry_, head, index_, fn_);
            if (origin == OriginClass::Unknown) {
                mark_unresolved(head);
                return;
            }
        }

        // category of the head use
        const Definition* head_def = project_definition(head, origin);
        bool is_class = head_def && head_def->kind == DefKind::Type;
        TokenCategory category;
        if (annotation || (binding && binding->is_module) || is_class) {
            category = TokenCategory::TypeReference;
        } else if (chain.size() == 1 && called) {
            category = upper_initial(head) ? TokenCategory::TypeReference
                                           : TokenCategory::APIInvocation;
        } else if (chain.size() == 1) {
            category = TokenCategory::VarReference;
        } else {
            category = upper_initial(head) ? TokenCategory::TypeReference
                                           : TokenCategory::VarReference;
        }

        RawUse head_use;
        head_use.name = head;
        head_use.category = category;
        head_use.origin = origin;
        head_use.def_site = project_site(head, origin, binding);
        record_use(std::move(head_use));

        // terminal callee of a called chain with an external head
        if (chain.size() >= 2 && called) {
            const std::string& callee = chain.back();
            OriginClass callee_origin = origin;
            std::optional<DefSite> callee_site;
            if (is_class && head_def) {
                if (fn_.enclosing_class && head == *fn_.enclosing_class)
                    callee_origin = OriginClass::ProjectClass;
                if (const Definition* m =
                        index_.find_in_class(callee, head_def->file_path, head_def->name))
                    callee_site = site_of(*m);
                else
                    callee_site = site_of(*head_def);
            } else if (binding) {
                if (const std::string* mfile = index_.module_file(binding->head)) {
                    if (const Definition* m = index_.find_in_file(callee, *mfile))
                        callee_site = site_of(*m);
                    else
                        callee_site = DefSite{*mfile, 1, 1};
                }
            }
            if (callee_origin == OriginClass::ProjectClass ||
                callee_origin == OriginClass::ProjectFile ||
                callee_origin == OriginClass::ProjectOtherFile) {
                if (!callee_site)
                    callee_site = DefSite{fn_.file_path, fn_.begin_line, fn_.end_line};
            } else {
                callee_site = std::nullopt;
            }
            RawUse callee_use;
            callee_use.name = callee;
            callee_use.category = TokenCategory::APIInvocation;
            callee_use.origin = callee_origin;
            callee_use.def_site = callee_site;
            record_use(std::move(callee_use));
        }
    }

    std::vector<ContextToken> reduce() const {
        std::vector<ContextToken> out;
        std::unordered_set<std::string> done;
        for (const std::string& name : use_order_) {
            if (done.count(name)) continue;
            done.insert(name);

            int best_prec = 0;
            for (const RawUse& u : uses_)
                if (u.name == name) best_prec = std::max(best_prec, category_precedence(u.category));
            const RawUse* best = nullptr;
            for (const RawUse& u : uses_) {
                if (u.name != name || category_precedence(u.category) != best_prec) continue;
                if (!best || origin_rank(u.origin) > origin_rank(best->origin)) best = &u;
            }
            if (!best) continue;
            ContextToken token;
            token.name = best->name;
            token.category = best->category;
            token.origin = best->origin;
            token.def_site = best->def_site;
            out.push_back(std::move(token));
        }
        return out;
    }
};

} // namespace

std::string to_string(TokenCategory category) {
    switch (category) {
        case TokenCategory::TypeReference: return "TypeReference";
        case TokenCategory::APIInvocation: return "APIInvocation";
        case TokenCategory::VarReference: return "VarReference";
    }
    return "VarReference";
}

TokenCategory category_from_string(const std::string& text) {
    if (text == "TypeReference") return TokenCategory::TypeReference;
    if (text == "APIInvocation") return TokenCategory::APIInvocation;
    if (text == "VarReference") return TokenCategory::VarReference;
    throw ValidationError("unknown token category: " + text);
}

std::string to_string(RunnableLevel level) {
    switch (level) {
        case RunnableLevel::self_contained: return "self_contained";
        case RunnableLevel::slib_runnable: return "slib_runnable";
        case RunnableLevel::plib_runnable: return "plib_runnable";
        case RunnableLevel::class_runnable: return "class_runnable";
        case RunnableLevel::file_runnable: return "file_runnable";
        case RunnableLevel::project_runnable: return "project_runnable";
    }
    return "self_contained";
}

RunnableLevel level_from_string(const std::string& text) {
    if (text == "self_contained") return RunnableLevel::self_contained;
    if (text == "slib_runnable") return RunnableLevel::slib_runnable;
    if (text == "plib_runnable") return RunnableLevel::plib_runnable;
    if (text == "class_runnable") return RunnableLevel::class_runnable;
    if (text == "file_runnable") return RunnableLevel::file_runnable;
    if (text == "project_runnable") return RunnableLevel::project_runnable;
    throw ValidationError("unknown runnable level: " + text);
}

int level_rank(RunnableLevel level) { return static_cast<int>(level); }

RunnableLevel level_for_origin(OriginClass origin) {
    switch (origin) {
        case OriginClass::Builtin: return RunnableLevel::self_contained;
        case OriginClass::StandardLib: return RunnableLevel::slib_runnable;
        case OriginClass::PublicLib: return RunnableLevel::plib_runnable;
        case OriginClass::ProjectClass: return RunnableLevel::class_runnable;
        case OriginClass::ProjectFile: return RunnableLevel::file_runnable;
        case OriginClass::ProjectOtherFile: return RunnableLevel::project_runnable;
        case OriginClass::Unknown: break;
    }
    throw Error("Unknown origin maps to no runnable level");
}

bool is_standalone(RunnableLevel level) {
    return level == RunnableLevel::self_contained || level == RunnableLevel::slib_runnable;
}

ContextReport analyze_context(const FunctionRecord& fn, const SourceUnit& unit,
                              const SymbolRegistry& registry,
                              const DefinitionIndex& project_index) {
    int idx = unit.function_index(fn.qualified_name);
    if (idx < 0)
        throw InvalidTarget("function not in unit: " + fn.qualified_name);

    ContextWalker walker(fn, unit, registry, project_index, unit.function_tokens[idx]);
    ContextReport report = walker.run();
    report.all_context = compute_all_context(unit, registry, &project_index);
    return report;
}

RunnableLevel classify_runnable_level(const ContextReport& report) {
    RunnableLevel level = RunnableLevel::self_contained;
    for (const auto& token : report.oracle_context) {
        RunnableLevel implied = level_for_origin(token.origin);
        if (level_rank(implied) > level_rank(level)) level = implied;
    }
    return level;
}

std::vector<ContextToken> compute_all_context(const SourceUnit& unit,
                                              const SymbolRegistry& registry,
                                              const DefinitionIndex* project_index) {
    DefinitionIndex empty;
    const DefinitionIndex& index = project_index ? *project_index : empty;

    std::vector<ContextToken> tokens;
    for (const auto& imp : unit.imports) {
        for (const auto& bound : imp.bound_names) {
            if (bound == "*") continue;
            ContextToken token;
            token.name = bound;
            token.category = imp.is_from ? TokenCategory::APIInvocation
                                         : TokenCategory::TypeReference;
            token.origin = classify_import_head(registry, imp.module_head, imp.is_relative, index);
            if (token.origin == OriginClass::ProjectOtherFile) {
                if (const std::string* mfile = index.module_file(imp.module_head)) {
                    if (const Definition* def = index.find_in_file(bound, *mfile))
                        token.def_site = site_of(*def);
                    else
                        token.def_site = DefSite{*mfile, 1, 1};
                } else {
                    token.def_site = DefSite{unit.file_path, 1, 1};
                }
            }
            tokens.push_back(std::move(token));
        }
    }

    std::vector<const Definition*> defs;
    for (const Definition* def : unit.top_level_defs.all())
        if (!def->enclosing_class) defs.push_back(def);
    std::sort(defs.begin(), defs.end(), [](const Definition* a, const Definition* b) {
        return std::tie(a->begin_line, a->name) < std::tie(b->begin_line, b->name);
    });

    for (const Definition* def : defs) {
        ContextToken token;
        token.name = def->name;
        switch (def->kind) {
            case DefKind::Type: token.category = TokenCategory::TypeReference; break;
            case DefKind::Function: token.category = TokenCategory::APIInvocation; break;
            case DefKind::Variable:
            case DefKind::Constant: token.category = TokenCategory::VarReference; break;
        }
        token.origin = OriginClass::ProjectFile;
        token.def_site = site_of(*def);
        tokens.push_back(std::move(token));
    }
    return tokens;
}

StandaloneStats standalone_stats(std::span<const ContextReport> corpus) {
    if (corpus.empty()) throw EmptyCorpus("no context reports to aggregate");
    StandaloneStats stats;
    for (const auto& report : corpus) {
        RunnableLevel level = classify_runnable_level(report);
        ++stats.per_level_counts[level];
        if (is_standalone(level)) ++stats.standalone_count;
        else ++stats.non_standalone_count;
    }
    double total = static_cast<double>(corpus.size());
    stats.standalone_fraction = static_cast<double>(stats.standalone_count) / total;
    stats.non_standalone_fraction = static_cast<double>(stats.non_standalone_count) / total;
    return stats;
}

} // namespace ctxeval
