#pragma once

#include <filesystem>
#include <string>
#include <unordered_set>

#include "ctxeval/source.hpp"

namespace ctxeval {

/// Where a referenced symbol comes from, ordered from most to least
/// self-contained. Unknown is a valid lookup result but can never be ranked.
enum class OriginClass {
    Builtin,
    StandardLib,
    PublicLib,
    ProjectClass,
    ProjectFile,
    ProjectOtherFile,
    Unknown,
};

/// Position of an origin in the runnable-level order. Throws Error for Unknown.
int origin_rank(OriginClass origin);

std::string to_string(OriginClass origin);
OriginClass origin_from_string(const std::string& text);

struct SymbolRegistry {
    std::string language;
    std::string version;
    std::unordered_set<std::string> builtins;
    std::unordered_set<std::string> stdlib_modules;
    std::unordered_set<std::string> public_packages;

    bool is_builtin(const std::string& name) const { return builtins.count(name) > 0; }
    bool is_stdlib(const std::string& name) const { return stdlib_modules.count(name) > 0; }
    bool is_public(const std::string& name) const { return public_packages.count(name) > 0; }
};

/// Load `<registry_dir>/<language>/<version>/{builtins,stdlib,public}.txt`.
/// Plain text, one symbol per line, `#` comments. A missing public list
/// degrades to an empty set; missing builtins or stdlib is an error.
SymbolRegistry load_registry(const std::filesystem::path& registry_dir,
                             const std::string& language, const std::string& version);

/// Resolve a name seen inside `site` against project definitions, file
/// imports and the registry. Precedence: enclosing class > same file >
/// other project file > builtins > stdlib > public packages > Unknown.
/// Dotted names classify by their head segment.
OriginClass classify_symbol(const SymbolRegistry& registry, const std::string& name,
                            const DefinitionIndex& project_index, const FunctionRecord& site);

/// Origin of a module head as bound by an import (used for import tokens
/// and locally imported names).
OriginClass classify_import_head(const SymbolRegistry& registry, const std::string& head,
                                 bool is_relative, const DefinitionIndex& project_index);

} // namespace ctxeval
