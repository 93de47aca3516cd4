#include "ctxeval/manifest.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <mutex>
#include <set>
#include <thread>

#include "ctxeval/callgraph.hpp"
#include "ctxeval/context.hpp"
#include "ctxeval/error.hpp"
#include "ctxeval/fsio.hpp"
#include "ctxeval/registry.hpp"

namespace ctxeval {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

struct ProjectConfig {
    std::vector<std::string> setup_commands;
    std::optional<std::string> compile_command;
    std::string run_command = "python3 {driver}";
};

ProjectConfig load_project_config(const fs::path& project_root) {
    ProjectConfig config;
    fs::path file = project_root / "ctxeval_project.json";
    if (!fs::exists(file)) return config;
    json obj = json::parse(read_text_file(file));
    if (obj.contains("setup_commands"))
        for (const auto& cmd : obj["setup_commands"]) config.setup_commands.push_back(cmd);
    if (obj.contains("compile_command") && !obj["compile_command"].is_null())
        config.compile_command = obj["compile_command"].get<std::string>();
    if (obj.contains("run_command")) config.run_command = obj["run_command"].get<std::string>();
    return config;
}

std::map<std::string, std::string> load_human_docstrings(const fs::path& project_root) {
    std::map<std::string, std::string> labels;
    fs::path file = project_root / "human_docstrings.json";
    if (!fs::exists(file)) return labels;
    json obj = json::parse(read_text_file(file));
    for (auto it = obj.begin(); it != obj.end(); ++it)
        labels[it.key()] = it.value().get<std::string>();
    return labels;
}

std::vector<fs::path> source_files(const fs::path& project_root) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(project_root)) {
        if (!entry.is_regular_file()) continue;
        if (entry.path().extension() != ".py") continue;
        std::string rel = fs::relative(entry.path(), project_root).string();
        if (rel.find("__ctxeval__") != std::string::npos) continue;
        files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    return files;
}

std::vector<SourceUnit> parse_project(const fs::path& project_root, const std::string& language,
                                      int workers, std::vector<std::string>& warnings) {
    std::vector<fs::path> files = source_files(project_root);
    std::vector<SourceUnit> units(files.size());
    std::vector<char> ok(files.size(), 0);
    std::vector<std::string> errors(files.size());

    std::atomic<std::size_t> next{0};
    auto work = [&]() {
        while (true) {
            std::size_t i = next.fetch_add(1);
            if (i >= files.size()) break;
            std::string rel = fs::relative(files[i], project_root).generic_string();
            try {
                units[i] = parse_unit(files[i], language, rel);
                ok[i] = 1;
            } catch (const Error& e) {
                errors[i] = std::string(e.what());
            }
        }
    };
    std::size_t n_workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)),
                                                  std::max<std::size_t>(files.size(), 1));
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();

    std::vector<SourceUnit> parsed;
    for (std::size_t i = 0; i < files.size(); ++i) {
        if (ok[i]) parsed.push_back(std::move(units[i]));
        else warnings.push_back("skipped " + files[i].string() + ": " + errors[i]);
    }
    return parsed;
}

} // namespace

ScanDetail scan_corpus_detail(const fs::path& root, const fs::path& registry_dir,
                              const ScanOptions& options) {
    if (!fs::exists(root)) throw IoError("corpus root does not exist: " + root.string());

    SymbolRegistry registry =
        load_registry(registry_dir, options.language, options.registry_version);

    std::vector<fs::path> projects;
    for (const auto& entry : fs::directory_iterator(root))
        if (entry.is_directory()) projects.push_back(entry.path());
    std::sort(projects.begin(), projects.end());
    if (projects.empty()) throw EmptyCorpus("no project directories under " + root.string());

    ScanDetail detail;
    bool any_sources = false;

    for (const fs::path& project : projects) {
        std::vector<SourceUnit> units =
            parse_project(project, options.language, options.workers, detail.warnings);
        if (units.empty()) continue;
        any_sources = true;

        DefinitionIndex index = build_project_index(units);
        CallGraph graph = build_call_graph(units);
        ProjectConfig config = load_project_config(project);
        auto human_labels = load_human_docstrings(project);
        std::string project_name = project.filename().string();

        for (const SourceUnit& unit : units) {
            for (const FunctionRecord& fn : unit.functions) {
                ContextReport report = analyze_context(fn, unit, registry, index);
                int token_count = static_cast<int>(report.oracle_context.size());
                if (!is_candidate(fn, token_count, options.filter)) continue;

                std::vector<std::string> tests = covering_tests(graph, fn.qualified_name);
                if (tests.empty()) continue;

                Task task;
                task.task_id = project_name + "." + fn.qualified_name;
                task.language = options.language;
                task.project_root = project.generic_string();
                task.file_path = fn.file_path;
                task.begin_line = fn.begin_line;
                task.end_line = fn.end_line;
                task.signature = fn.signature;
                task.docstring_original = fn.docstring_original.value_or("");
                if (auto it = human_labels.find(fn.qualified_name); it != human_labels.end())
                    task.docstring_human = it->second;
                task.level = classify_runnable_level(report);
                task.oracle_context = report.oracle_context;
                task.all_context = report.all_context;
                task.test_refs = std::move(tests);
                task.setup_commands = config.setup_commands;
                task.compile_command = config.compile_command;
                task.run_command = config.run_command;
                detail.manifest.tasks.push_back(std::move(task));
                detail.loc_complexity[detail.manifest.tasks.back().task_id] = {fn.loc,
                                                                               fn.complexity};
            }
        }
    }

    if (!any_sources) throw EmptyCorpus("no supported source files under " + root.string());
    if (detail.manifest.tasks.empty())
        throw EmptyCorpus("no candidate functions survived filtering under " + root.string());

    std::sort(detail.manifest.tasks.begin(), detail.manifest.tasks.end(),
              [](const Task& a, const Task& b) {
                  return std::tie(a.project_root, a.file_path, a.begin_line) <
                         std::tie(b.project_root, b.file_path, b.begin_line);
              });
    return detail;
}

TaskManifest scan_corpus(const fs::path& root, const fs::path& registry_dir,
                         const ScanOptions& options) {
    return scan_corpus_detail(root, registry_dir, options).manifest;
}

ordered_json token_to_json(const ContextToken& token) {
    ordered_json obj;
    obj["name"] = token.name;
    obj["category"] = to_string(token.category);
    obj["origin"] = to_string(token.origin);
    if (token.def_site) {
        ordered_json site;
        site["file"] = token.def_site->file;
        site["span"] = {token.def_site->begin_line, token.def_site->end_line};
        obj["def_site"] = site;
    } else {
        obj["def_site"] = nullptr;
    }
    return obj;
}

ContextToken token_from_json(const json& obj) {
    ContextToken token;
    token.name = obj.at("name").get<std::string>();
    token.category = category_from_string(obj.at("category").get<std::string>());
    token.origin = origin_from_string(obj.at("origin").get<std::string>());
    if (obj.contains("def_site") && !obj["def_site"].is_null()) {
        DefSite site;
        site.file = obj["def_site"].at("file").get<std::string>();
        site.begin_line = obj["def_site"].at("span").at(0).get<int>();
        site.end_line = obj["def_site"].at("span").at(1).get<int>();
        token.def_site = site;
    }
    return token;
}

ordered_json task_to_json(const Task& task) {
    ordered_json obj;
    obj["task_id"] = task.task_id;
    obj["language"] = task.language;
    obj["project_root"] = task.project_root;
    obj["file_path"] = task.file_path;
    obj["span"] = {task.begin_line, task.end_line};
    obj["signature"] = task.signature;
    obj["docstring_original"] = task.docstring_original;
    obj["docstring_human"] = task.docstring_human ? json(*task.docstring_human) : json(nullptr);
    obj["level"] = to_string(task.level);
    obj["oracle_context"] = ordered_json::array();
    for (const auto& token : task.oracle_context)
        obj["oracle_context"].push_back(token_to_json(token));
    obj["all_context"] = ordered_json::array();
    for (const auto& token : task.all_context) obj["all_context"].push_back(token_to_json(token));
    obj["test_refs"] = task.test_refs;
    obj["setup_commands"] = task.setup_commands;
    obj["compile_command"] =
        task.compile_command ? json(*task.compile_command) : json(nullptr);
    obj["run_command"] = task.run_command;
    return obj;
}

Task task_from_json(const json& obj) {
    Task task;
    try {
        task.task_id = obj.at("task_id").get<std::string>();
        task.language = obj.at("language").get<std::string>();
        task.project_root = obj.at("project_root").get<std::string>();
        task.file_path = obj.at("file_path").get<std::string>();
        task.begin_line = obj.at("span").at(0).get<int>();
        task.end_line = obj.at("span").at(1).get<int>();
        task.signature = obj.at("signature").get<std::string>();
        task.docstring_original = obj.at("docstring_original").get<std::string>();
        if (!obj.at("docstring_human").is_null())
            task.docstring_human = obj["docstring_human"].get<std::string>();
        task.level = level_from_string(obj.at("level").get<std::string>());
        for (const auto& token : obj.at("oracle_context"))
            task.oracle_context.push_back(token_from_json(token));
        for (const auto& token : obj.at("all_context"))
            task.all_context.push_back(token_from_json(token));
        for (const auto& ref : obj.at("test_refs")) task.test_refs.push_back(ref);
        for (const auto& cmd : obj.at("setup_commands")) task.setup_commands.push_back(cmd);
        if (!obj.at("compile_command").is_null())
            task.compile_command = obj["compile_command"].get<std::string>();
        task.run_command = obj.at("run_command").get<std::string>();
    } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed task object: ") + e.what());
    }
    return task;
}

ordered_json verdict_to_json(const Verdict& verdict) {
    ordered_json obj;
    obj["task_id"] = verdict.task_id;
    obj["sample_index"] = verdict.sample_index;
    obj["outcome"] = to_string(verdict.outcome);
    obj["duration_ms"] = verdict.duration_ms;
    obj["log_path"] = verdict.log_path;
    return obj;
}

Verdict verdict_from_json(const json& obj) {
    Verdict verdict;
    verdict.task_id = obj.at("task_id").get<std::string>();
    verdict.sample_index = obj.at("sample_index").get<int>();
    verdict.outcome = outcome_from_string(obj.at("outcome").get<std::string>());
    verdict.duration_ms = obj.at("duration_ms").get<std::int64_t>();
    verdict.log_path = obj.value("log_path", std::string());
    return verdict;
}

std::string manifest_to_string(const TaskManifest& manifest) {
    ordered_json obj;
    obj["schema_version"] = manifest.schema_version;
    obj["tasks"] = ordered_json::array();
    for (const auto& task : manifest.tasks) obj["tasks"].push_back(task_to_json(task));
    return obj.dump(2) + "\n";
}

void save_manifest(const TaskManifest& manifest, const fs::path& path) {
    atomic_write(path, manifest_to_string(manifest));
}

TaskManifest load_manifest(const fs::path& path) {
    json obj;
    try {
        obj = json::parse(read_text_file(path));
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("tasks file is not valid json: ") + e.what());
    }
    if (!obj.contains("schema_version") || !obj["schema_version"].is_string())
        throw VersionError("tasks file missing schema_version");
    TaskManifest manifest;
    manifest.schema_version = obj["schema_version"].get<std::string>();
    if (manifest.schema_version != kManifestSchemaVersion)
        throw VersionError("unsupported schema_version: " + manifest.schema_version);
    for (const auto& task : obj.at("tasks")) manifest.tasks.push_back(task_from_json(task));
    return manifest;
}

TaskManifest validate_manifest(const fs::path& path, std::vector<std::string>* warnings) {
    TaskManifest manifest = load_manifest(path);

    std::set<std::string> ids;
    for (const Task& task : manifest.tasks) {
        if (!ids.insert(task.task_id).second)
            throw ValidationError("duplicate task_id: " + task.task_id);
        if (task.begin_line < 1 || task.end_line < task.begin_line)
            throw ValidationError("invalid span in task " + task.task_id);
        if (task.run_command.find("{driver}") == std::string::npos)
            throw ValidationError("run_command lacks {driver} placeholder in " + task.task_id);
        if (task.language == "java-like" && !task.compile_command)
            throw ValidationError("compiled language without compile_command in " +
                                  task.task_id);

        ContextReport report;
        report.oracle_context = task.oracle_context;
        RunnableLevel recomputed = classify_runnable_level(report);
        if (recomputed != task.level)
            throw ConsistencyError("task " + task.task_id + " stores level " +
                                   to_string(task.level) + " but oracle_context implies " +
                                   to_string(recomputed));
    }

    // test_refs resolve within their projects when the projects are present
    std::map<std::string, std::set<std::string>> project_functions;
    for (const Task& task : manifest.tasks) {
        fs::path project(task.project_root);
        if (!fs::exists(project)) {
            if (warnings)
                warnings->push_back("project not on disk, test_refs unchecked: " +
                                    task.project_root);
            continue;
        }
        auto it = project_functions.find(task.project_root);
        if (it == project_functions.end()) {
            std::set<std::string> names;
            std::vector<std::string> parse_warnings;
            for (const SourceUnit& unit :
                 parse_project(project, task.language, 1, parse_warnings))
                for (const auto& fn : unit.functions) names.insert(fn.qualified_name);
            it = project_functions.emplace(task.project_root, std::move(names)).first;
        }
        for (const std::string& ref : task.test_refs)
            if (!it->second.count(ref))
                throw ValidationError("test_ref " + ref + " does not resolve in project " +
                                      task.project_root);
    }
    return manifest;
}

std::vector<Verdict> load_verdicts(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read verdicts: " + path.string());
    std::vector<Verdict> out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.push_back(verdict_from_json(json::parse(line)));
        } catch (const json::exception& e) {
            throw ParseError(std::string("bad verdict json: ") + e.what(), line_no, 1);
        }
    }
    return out;
}

void save_verdicts(std::span<const Verdict> verdicts, const fs::path& path) {
    std::string text;
    for (const auto& verdict : verdicts) text += verdict_to_json(verdict).dump() + "\n";
    atomic_write(path, text);
}

EvalPreparation prepare_evaluation(const TaskManifest& manifest, const fs::path& work_root) {
    EvalPreparation prep;
    fs::path root = workspace_root(work_root);
    std::error_code ec;
    fs::create_directories(root, ec);

    // one snapshot per project; setup commands run once against it
    std::map<std::string, fs::path> snapshots;
    std::map<std::string, std::vector<SourceUnit>> project_units;

    for (const Task& task : manifest.tasks) {
        if (!snapshots.count(task.project_root)) {
            fs::path project(task.project_root);
            std::string snap_name = "snap_" + project.filename().string();
            fs::path snapshot =
                prepare_snapshot(project, task.setup_commands, root / snap_name);
            snapshots[task.project_root] = snapshot;
            project_units[task.project_root] =
                parse_project(snapshot, task.language, 1, prep.warnings);
        }

        const auto& units = project_units[task.project_root];
        std::vector<FunctionRecord> tests;
        std::vector<ImportDecl> imports;
        std::set<std::string> import_lines;
        for (const std::string& ref : task.test_refs) {
            bool found = false;
            for (const SourceUnit& unit : units) {
                int idx = unit.function_index(ref);
                if (idx < 0) continue;
                tests.push_back(unit.functions[static_cast<std::size_t>(idx)]);
                for (const auto& imp : unit.imports)
                    if (import_lines.insert(imp.raw_text).second) imports.push_back(imp);
                found = true;
                break;
            }
            if (!found)
                prep.warnings.push_back("test_ref not found in snapshot: " + ref);
        }

        PreparedTask prepared;
        prepared.task = task;
        prepared.snapshot = snapshots[task.project_root];
        if (!tests.empty()) {
            TestDriver driver = synthesize_driver(tests, task.task_id, task.language, imports);
            prepared.driver_source = driver.source_text;
        } else {
            prep.warnings.push_back("no usable tests for task " + task.task_id);
        }
        prep.prepared.push_back(std::move(prepared));
    }
    return prep;
}

} // namespace ctxeval
