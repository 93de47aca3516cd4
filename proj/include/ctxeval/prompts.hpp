#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ctxeval/harness.hpp"

namespace ctxeval {

struct SamplingConfig {
    int n = 10;
    double temperature = 0.8;
    double nucleus_top_p = 0.95;
    int max_window_tokens = 1024;
    bool greedy = false; // implies n == 1; sent to the provider as temperature 0
    int retry_limit = 3;
    int retry_base_ms = 250;

    void validate() const; // ValidationError on violated invariants
};

enum class PromptMode {
    docstring_only,
    oracle_context_doc,
    all_context_doc,
    signature_only,
    context_only,
};

std::string to_string(PromptMode mode);
PromptMode prompt_mode_from_string(const std::string& text);

enum class DocSource { original, human };

std::string to_string(DocSource source);
DocSource doc_source_from_string(const std::string& text);

/// Deterministic concatenation: optional context block (tokens as commented
/// declaration stubs, one per line), docstring as a comment block, then the
/// signature line. The docstring_only prompt is always a suffix of the
/// context-bearing prompts.
std::string build_prompt(const Task& task, PromptMode mode, DocSource source);

/// Character-budget token approximation for window enforcement.
int approx_token_count(std::string_view text, int chars_per_token = 4);

/// candidates.jsonl: {"task_id": str, "sample_index": int, "completion": str}
std::vector<Candidate> load_candidates(const std::filesystem::path& path);
void save_candidates(std::span<const Candidate> candidates, const std::filesystem::path& path);

struct EndpointResult {
    std::vector<Candidate> candidates;
    std::vector<std::pair<std::string, std::string>> failures; // (task_id, reason)
};

/// POST {"prompt", "n", "temperature", "top_p", "max_tokens"} to the
/// endpoint for each prompt; expects {"completions": [str, ...]} with at
/// least n entries. Transient failures retry with exponential backoff;
/// per-prompt failures are recorded, not fatal to the batch. Bearer auth
/// from $CTXEVAL_ENDPOINT_TOKEN.
EndpointResult sample_endpoint(const std::string& endpoint_url,
                               std::span<const std::pair<std::string, std::string>> prompts,
                               const SamplingConfig& config, int workers = 1);

} // namespace ctxeval
