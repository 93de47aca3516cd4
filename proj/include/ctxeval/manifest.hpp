#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "ctxeval/harness.hpp"
#include "ctxeval/source.hpp"

namespace ctxeval {

inline constexpr const char* kManifestSchemaVersion = "1";

struct TaskManifest {
    std::string schema_version = kManifestSchemaVersion;
    std::vector<Task> tasks;
};

struct ScanOptions {
    std::string language = "python-like";
    std::string registry_version = "3.8";
    FilterOptions filter;
    int workers = 1;
};

/// Scan result with the per-task source statistics the stats command reports.
struct ScanDetail {
    TaskManifest manifest;
    std::map<std::string, std::pair<int, int>> loc_complexity; // task_id -> (loc, cc)
    std::vector<std::string> warnings;
};

/// Parse every project under `root`, filter candidate functions, analyze
/// context, classify levels and select covering tests. Per-file parse
/// errors become warnings; an empty result is EmptyCorpus.
ScanDetail scan_corpus_detail(const std::filesystem::path& root,
                              const std::filesystem::path& registry_dir,
                              const ScanOptions& options = {});
TaskManifest scan_corpus(const std::filesystem::path& root,
                         const std::filesystem::path& registry_dir,
                         const ScanOptions& options = {});

nlohmann::ordered_json token_to_json(const ContextToken& token);
ContextToken token_from_json(const nlohmann::json& obj);
nlohmann::ordered_json task_to_json(const Task& task);
Task task_from_json(const nlohmann::json& obj);
nlohmann::ordered_json verdict_to_json(const Verdict& verdict);
Verdict verdict_from_json(const nlohmann::json& obj);

std::string manifest_to_string(const TaskManifest& manifest);
void save_manifest(const TaskManifest& manifest, const std::filesystem::path& path);
TaskManifest load_manifest(const std::filesystem::path& path);

/// Load + schema and invariant checks: unique ids, valid spans, stored level
/// consistent with the stored oracle_context (ConsistencyError), compile
/// command present for compiled languages. Test-ref resolution is checked
/// when the project is reachable on disk; otherwise a warning is recorded.
TaskManifest validate_manifest(const std::filesystem::path& path,
                               std::vector<std::string>* warnings = nullptr);

std::vector<Verdict> load_verdicts(const std::filesystem::path& path);
void save_verdicts(std::span<const Verdict> verdicts, const std::filesystem::path& path);

/// Snapshot each task's project (setup commands applied once per project)
/// and synthesize its test driver, ready for evaluate_batch.
struct EvalPreparation {
    std::vector<PreparedTask> prepared;
    std::vector<std::string> warnings;
};
EvalPreparation prepare_evaluation(const TaskManifest& manifest,
                                   const std::filesystem::path& work_root);

} // namespace ctxeval
