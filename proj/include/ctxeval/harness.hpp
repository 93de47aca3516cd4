#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ctxeval/context.hpp"

namespace ctxeval {

/// One evaluation manifest entry: everything needed to splice a candidate
/// into its project and run the covering tests.
struct Task {
    std::string task_id;
    std::string language;
    std::string project_root;
    std::string file_path; // relative to project_root
    int begin_line = 0;    // 1-based inclusive function span
    int end_line = 0;
    std::string signature;
    std::string docstring_original;
    std::optional<std::string> docstring_human;
    RunnableLevel level = RunnableLevel::self_contained;
    std::vector<ContextToken> oracle_context;
    std::vector<ContextToken> all_context;
    std::vector<std::string> test_refs;
    std::vector<std::string> setup_commands;
    std::optional<std::string> compile_command; // "{file}" placeholder available
    std::string run_command;                    // "{driver}" placeholder required
};

struct Candidate {
    std::string task_id;
    int sample_index = 0;
    std::string completion; // full function text including the signature
};

enum class Outcome { Pass, Fail, CompileError, Timeout, HarnessError };

std::string to_string(Outcome outcome);
Outcome outcome_from_string(const std::string& text);

struct Verdict {
    std::string task_id;
    int sample_index = 0;
    Outcome outcome = Outcome::HarnessError;
    std::int64_t duration_ms = 0;
    std::string log_path;
};

struct RunLimits {
    int timeout_s = 60;
    std::size_t max_output_bytes = 1048576;
};

/// Task bundled with its prepared snapshot and synthesized driver text.
struct PreparedTask {
    Task task;
    std::filesystem::path snapshot; // pristine project copy, setup applied
    std::string driver_source;
    std::string driver_filename; // under __ctxeval__/ in the workspace
};

/// Root directory for workspaces: $CTXEVAL_WORKDIR when set, else `fallback`
/// (or a temp directory when `fallback` is empty).
std::filesystem::path workspace_root(const std::filesystem::path& fallback = {});

/// Copy `project_root` into `dest` and run the task's setup commands there.
/// Returns the snapshot path. Setup failures raise HarnessError.
std::filesystem::path prepare_snapshot(const std::filesystem::path& project_root,
                                       std::span<const std::string> setup_commands,
                                       const std::filesystem::path& dest);

/// Fresh copy of the snapshot with lines [begin_line, end_line] of the task
/// file replaced by the candidate (re-indented to the original definition's
/// indentation) and the driver written under __ctxeval__/. Everything else
/// is byte-identical to the snapshot.
std::filesystem::path splice_candidate(const std::filesystem::path& snapshot, const Task& task,
                                       const Candidate& candidate,
                                       const std::string& driver_source,
                                       const std::filesystem::path& workspace_dir);

/// Compile (when configured) and run the driver inside the workspace,
/// classifying the outcome. A failed compile short-circuits: no test
/// process is spawned. Missing commands are HarnessError, never Fail.
/// `log_file`, when non-empty, receives the combined command transcript.
Verdict run_evaluation(const std::filesystem::path& workspace, const Task& task,
                       const RunLimits& limits = {},
                       const std::filesystem::path& log_file = {});

struct BatchOptions {
    int workers = 1;
    RunLimits limits;
    std::filesystem::path work_root; // empty: workspace_root() decides
    std::filesystem::path log_dir;
};

/// One verdict per candidate, sorted by (task_id, sample_index); outcomes
/// are identical for any worker count. Unknown task ids yield per-candidate
/// HarnessError verdicts without aborting the batch.
std::vector<Verdict> evaluate_batch(std::span<const PreparedTask> tasks,
                                    std::span<const Candidate> candidates,
                                    const BatchOptions& options);

} // namespace ctxeval
