#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ctxeval/registry.hpp"
#include "ctxeval/source.hpp"

namespace ctxeval {

enum class TokenCategory { TypeReference, APIInvocation, VarReference };

std::string to_string(TokenCategory category);
TokenCategory category_from_string(const std::string& text);

struct DefSite {
    std::string file;
    int begin_line = 0;
    int end_line = 0;
};

/// One out-of-function dependency of a target function.
struct ContextToken {
    std::string name;
    TokenCategory category = TokenCategory::VarReference;
    OriginClass origin = OriginClass::Unknown;
    std::optional<DefSite> def_site; // present iff origin is a Project* class
};

struct ContextReport {
    std::vector<ContextToken> oracle_context; // deduplicated by (name, category)
    std::vector<ContextToken> all_context;
    std::vector<std::string> unresolved; // names excluded from level computation
};

/// Smallest scope in which a function can run, six ordered values.
enum class RunnableLevel {
    self_contained,
    slib_runnable,
    plib_runnable,
    class_runnable,
    file_runnable,
    project_runnable,
};

std::string to_string(RunnableLevel level);
RunnableLevel level_from_string(const std::string& text);
int level_rank(RunnableLevel level);
RunnableLevel level_for_origin(OriginClass origin);
bool is_standalone(RunnableLevel level);

/// Identify every out-of-function dependency of `fn`: identifiers used but
/// not bound inside the function, categorized by use (call / type position /
/// reference) with origins resolved through the registry and project index.
/// self/cls member accesses map to ProjectClass.
ContextReport analyze_context(const FunctionRecord& fn, const SourceUnit& unit,
                              const SymbolRegistry& registry,
                              const DefinitionIndex& project_index);

/// Level = maximum over oracle tokens of the level implied by each origin;
/// an empty context is self_contained.
RunnableLevel classify_runnable_level(const ContextReport& report);

/// One token per file-level definition and per imported binding.
std::vector<ContextToken> compute_all_context(const SourceUnit& unit,
                                              const SymbolRegistry& registry,
                                              const DefinitionIndex* project_index = nullptr);

struct StandaloneStats {
    long standalone_count = 0;
    long non_standalone_count = 0;
    std::map<RunnableLevel, long> per_level_counts;
    double standalone_fraction = 0.0;
    double non_standalone_fraction = 0.0;
};

/// Counts over a corpus of context reports; standalone means the level is
/// self_contained or slib_runnable. Throws EmptyCorpus on an empty span.
StandaloneStats standalone_stats(std::span<const ContextReport> corpus);

} // namespace ctxeval
