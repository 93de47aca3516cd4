#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "ctxeval/lexer.hpp"

namespace ctxeval {

struct ImportDecl {
    std::string raw_text;
    std::vector<std::string> bound_names; // names the statement binds in the file scope
    std::string module_head;              // first segment of the source module; "" when relative
    bool is_from = false;
    bool is_relative = false;
};

struct FunctionRecord {
    std::string qualified_name; // <module>.<Class...>.<name>
    std::string name;
    std::string signature; // header text through the colon, leading indent stripped
    std::optional<std::string> docstring_original;
    std::optional<std::string> docstring_human;
    std::string body_text; // raw body lines, original indentation
    int begin_line = 0;    // 1-based inclusive span, starting at the def line
    int end_line = 0;
    std::optional<std::string> enclosing_class;
    std::string file_path;
    bool is_test = false;
    bool is_deprecated = false;
    bool is_abstract = false; // body is only docstring / pass / ... / raise NotImplementedError
    int loc = 0;              // non-blank body lines
    int complexity = 1;
    std::vector<std::string> parameters;
    std::vector<std::string> decorators;
};

enum class DefKind { Type, Function, Variable, Constant };

std::string to_string(DefKind kind);

struct Definition {
    std::string name;
    DefKind kind = DefKind::Variable;
    std::string file_path;
    int begin_line = 0;
    int end_line = 0;
    std::optional<std::string> enclosing_class;
};

struct SourceUnit;

/// Name-to-definition map for one file or a whole project, plus the import
/// bindings and module names symbol classification needs.
class DefinitionIndex {
public:
    void add(Definition def); // exact (name, file, span) duplicates are ignored
    void extend_span(const std::string& name, const std::string& file, int begin_line, int new_end);
    void add_file_imports(const std::string& file, const std::vector<ImportDecl>& imports);
    void add_module(const std::string& file_path);
    void add_class_bases(const std::string& file, const std::string& cls,
                         const std::vector<std::string>& bases);

    std::span<const Definition> find(const std::string& name) const;
    const Definition* find_in_class(const std::string& name, const std::string& file,
                                    const std::string& cls) const;
    const Definition* find_in_file(const std::string& name, const std::string& file) const;
    const Definition* find_in_other_file(const std::string& name, const std::string& file) const;
    const Definition* find_class(const std::string& cls_name,
                                 const std::string& preferred_file = {}) const;
    const std::vector<ImportDecl>* imports_of(const std::string& file) const;
    const std::vector<std::string>* bases_of(const std::string& file, const std::string& cls) const;
    /// Project file providing module `head`, or nullptr.
    const std::string* module_file(const std::string& head) const;

    std::size_t size() const { return count_; }
    std::vector<const Definition*> all() const;

private:
    std::map<std::string, std::vector<Definition>> by_name_;
    std::unordered_map<std::string, std::vector<ImportDecl>> file_imports_;
    std::unordered_map<std::string, std::string> modules_; // module name -> file path
    std::unordered_map<std::string, std::vector<std::string>> class_bases_; // file:cls -> bases
    std::size_t count_ = 0;
};

/// Tokens kept per function for downstream context analysis.
struct FunctionTokens {
    std::vector<Token> header;
    std::vector<LogicalLine> body;
};

struct SourceUnit {
    std::string file_path;
    std::string module_name; // file path minus extension, '/' -> '.'
    std::string language;
    std::vector<std::string> raw_lines;
    std::vector<ImportDecl> imports;
    std::vector<FunctionRecord> functions;
    std::vector<FunctionTokens> function_tokens; // parallel to functions
    DefinitionIndex top_level_defs;              // this file only

    int function_index(const std::string& qualified_name) const;
};

/// Parse a python-like file. `record_path` is the path stored on the unit and
/// its records (typically project-relative); defaults to `file_path`.
SourceUnit parse_unit(const std::filesystem::path& file_path, const std::string& language,
                      const std::string& record_path = {});
SourceUnit parse_unit_text(const std::string& text, const std::string& record_path,
                           const std::string& language);

/// Deterministic project-wide reduction of per-unit definitions.
DefinitionIndex build_project_index(std::span<const SourceUnit> units);

/// 1 + decision points (if/elif, loop headers, and/or, ternaries, exception
/// handlers, case arms), recomputed from the record text.
int cyclomatic_complexity(const FunctionRecord& fn);

struct FilterOptions {
    int max_context_tokens = 10;
    int min_loc = 3;
};

bool docstring_is_english(const std::string& doc);
bool is_candidate(const FunctionRecord& fn, int oracle_token_count, const FilterOptions& opts = {});

/// Automatable candidate-selection filters: non-test, non-deprecated,
/// non-abstract, English docstring present, loc > min_loc, oracle token
/// count < max_context_tokens. `oracle_token_counts` is parallel to `fns`.
std::vector<FunctionRecord> filter_candidates(std::span<const FunctionRecord> fns,
                                              std::span<const int> oracle_token_counts,
                                              const FilterOptions& opts = {});

} // namespace ctxeval
