#include "ctxeval/registry.hpp"

#include <cctype>
#include <fstream>

#include "ctxeval/error.hpp"

namespace ctxeval {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

bool load_list(const std::filesystem::path& file, std::unordered_set<std::string>& out) {
    std::ifstream in(file);
    if (!in) return false;
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::string name = trim(line);
        if (!name.empty()) out.insert(name);
    }
    return true;
}

bool valid_version(const std::string& version) {
    if (version.empty()) return false;
    bool digit_seen = false;
    bool prev_dot = true;
    for (char c : version) {
        if (std::isdigit(static_cast<unsigned char>(c))) {
            digit_seen = true;
            prev_dot = false;
        } else if (c == '.') {
            if (prev_dot) return false;
            prev_dot = true;
        } else {
            return false;
        }
    }
    return digit_seen && !prev_dot;
}

} // namespace

int origin_rank(OriginClass origin) {
    switch (origin) {
        case OriginClass::Builtin: return 0;
        case OriginClass::StandardLib: return 1;
        case OriginClass::PublicLib: return 2;
        case OriginClass::ProjectClass: return 3;
        case OriginClass::ProjectFile: return 4;
        case OriginClass::ProjectOtherFile: return 5;
        case OriginClass::Unknown: break;
    }
    throw Error("Unknown origin has no rank");
}

std::string to_string(OriginClass origin) {
    switch (origin) {
        case OriginClass::Builtin: return "Builtin";
        case OriginClass::StandardLib: return "StandardLib";
        case OriginClass::PublicLib: return "PublicLib";
        case OriginClass::ProjectClass: return "ProjectClass";
        case OriginClass::ProjectFile: return "ProjectFile";
        case OriginClass::ProjectOtherFile: return "ProjectOtherFile";
        case OriginClass::Unknown: return "Unknown";
    }
    return "Unknown";
}

OriginClass origin_from_string(const std::string& text) {
    if (text == "Builtin") return OriginClass::Builtin;
    if (text == "StandardLib") return OriginClass::StandardLib;
    if (text == "PublicLib") return OriginClass::PublicLib;
    if (text == "ProjectClass") return OriginClass::ProjectClass;
    if (text == "ProjectFile") return OriginClass::ProjectFile;
    if (text == "ProjectOtherFile") return OriginClass::ProjectOtherFile;
    if (text == "Unknown") return OriginClass::Unknown;
    throw ValidationError("unknown origin class: " + text);
}

SymbolRegistry load_registry(const std::filesystem::path& registry_dir,
                             const std::string& language, const std::string& version) {
    if (!valid_version(version)) throw InvalidVersion("malformed version string: " + version);

    SymbolRegistry reg;
    reg.language = language;
    reg.version = version;

    std::filesystem::path base = registry_dir / language / version;
    if (!load_list(base / "builtins.txt", reg.builtins))
        throw RegistryLoadError("missing builtins list: " + (base / "builtins.txt").string());
    if (!load_list(base / "stdlib.txt", reg.stdlib_modules))
        throw RegistryLoadError("missing stdlib list: " + (base / "stdlib.txt").string());
    load_list(base / "public.txt", reg.public_packages); // optional

    // builtins shadow stdlib entries; keep the sets disjoint
    for (const auto& name : reg.builtins) reg.stdlib_modules.erase(name);
    return reg;
}

OriginClass classify_import_head(const SymbolRegistry& registry, const std::string& head,
                                 bool is_relative, const DefinitionIndex& project_index) {
    if (is_relative) return OriginClass::ProjectOtherFile;
    if (project_index.module_file(head)) return OriginClass::ProjectOtherFile;
    if (registry.is_stdlib(head)) return OriginClass::StandardLib;
    if (registry.is_public(head)) return OriginClass::PublicLib;
    if (registry.is_builtin(head)) return OriginClass::Builtin;
    return OriginClass::Unknown;
}

OriginClass classify_symbol(const SymbolRegistry& registry, const std::string& name,
                            const DefinitionIndex& project_index, const FunctionRecord& site) {
    std::string head = name;
    auto dot = head.find('.');
    if (dot != std::string::npos) head.resize(dot);

    if (site.enclosing_class &&
        project_index.find_in_class(head, site.file_path, *site.enclosing_class))
        return OriginClass::ProjectClass;

    if (const Definition* def = project_index.find_in_file(head, site.file_path)) {
        // a definition that is the site itself does not count as a dependency
        if (!(def->begin_line == site.begin_line && def->name == site.name))
            return OriginClass::ProjectFile;
    }

    if (const auto* imports = project_index.imports_of(site.file_path)) {
        for (const auto& imp : *imports) {
            for (const auto& bound : imp.bound_names) {
                if (bound != head) continue;
                OriginClass via = classify_import_head(registry, imp.module_head,
                                                       imp.is_relative, project_index);
                if (via != OriginClass::Unknown) return via;
            }
        }
    }

    if (project_index.find_in_other_file(head, site.file_path))
        return OriginClass::ProjectOtherFile;

    if (registry.is_builtin(head)) return OriginClass::Builtin;
    if (registry.is_stdlib(head)) return OriginClass::StandardLib;
    if (registry.is_public(head)) return OriginClass::PublicLib;
    return OriginClass::Unknown;
}

} // namespace ctxeval
