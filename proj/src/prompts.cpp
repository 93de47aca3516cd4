#include "ctxeval/prompts.hpp"

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "httplib.h"
#include "json.hpp"

#include "ctxeval/error.hpp"
#include "ctxeval/fsio.hpp"

namespace ctxeval {

using nlohmann::json;
using nlohmann::ordered_json;

void SamplingConfig::validate() const {
    if (n < 1) throw ValidationError("sampling config: n must be >= 1");
    if (temperature < 0) throw ValidationError("sampling config: temperature must be >= 0");
    if (greedy && n != 1) throw ValidationError("sampling config: greedy implies n == 1");
}

std::string to_string(PromptMode mode) {
    switch (mode) {
        case PromptMode::docstring_only: return "docstring_only";
        case PromptMode::oracle_context_doc: return "oracle_context_doc";
        case PromptMode::all_context_doc: return "all_context_doc";
        case PromptMode::signature_only: return "signature_only";
        case PromptMode::context_only: return "context_only";
    }
    return "docstring_only";
}

PromptMode prompt_mode_from_string(const std::string& text) {
    if (text == "docstring_only") return PromptMode::docstring_only;
    if (text == "oracle_context_doc") return PromptMode::oracle_context_doc;
    if (text == "all_context_doc") return PromptMode::all_context_doc;
    if (text == "signature_only") return PromptMode::signature_only;
    if (text == "context_only") return PromptMode::context_only;
    throw ValidationError("unknown prompt mode: " + text);
}

std::string to_string(DocSource source) {
    return source == DocSource::original ? "original" : "human";
}

DocSource doc_source_from_string(const std::string& text) {
    if (text == "original") return DocSource::original;
    if (text == "human") return DocSource::human;
    throw ValidationError("unknown doc source: " + text);
}

namespace {

std::string comment_prefix(const Task& task) {
    return task.language == "java-like" ? "// " : "# ";
}

std::string context_block(const Task& task, std::span<const ContextToken> tokens) {
    std::string prefix = comment_prefix(task);
    std::string block;
    for (const auto& token : tokens) {
        block += prefix + "uses " + token.name + " (" + to_string(token.category) + ", " +
                 to_string(token.origin) + ")\n";
    }
    return block;
}

std::string doc_block(const Task& task, DocSource source) {
    const std::string* doc = nullptr;
    if (source == DocSource::original) {
        doc = &task.docstring_original;
    } else {
        if (!task.docstring_human)
            throw MissingDocstring("task " + task.task_id + " has no human-labeled docstring");
        doc = &*task.docstring_human;
    }
    std::string prefix = comment_prefix(task);
    std::string block;
    std::istringstream lines(*doc);
    std::string line;
    while (std::getline(lines, line)) block += prefix + line + "\n";
    if (block.empty()) block = prefix + "\n";
    return block;
}

} // namespace

std::string build_prompt(const Task& task, PromptMode mode, DocSource source) {
    std::string prompt;
    switch (mode) {
        case PromptMode::oracle_context_doc:
            prompt += context_block(task, task.oracle_context);
            prompt += doc_block(task, source);
            break;
        case PromptMode::all_context_doc:
            prompt += context_block(task, task.all_context);
            prompt += doc_block(task, source);
            break;
        case PromptMode::docstring_only:
            prompt += doc_block(task, source);
            break;
        case PromptMode::context_only:
            prompt += context_block(task, task.oracle_context);
            break;
        case PromptMode::signature_only:
            break;
    }
    prompt += task.signature;
    prompt += "\n";
    return prompt;
}

int approx_token_count(std::string_view text, int chars_per_token) {
    if (chars_per_token < 1) chars_per_token = 1;
    return static_cast<int>((text.size() + static_cast<std::size_t>(chars_per_token) - 1) /
                            static_cast<std::size_t>(chars_per_token));
}

std::vector<Candidate> load_candidates(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read candidates: " + path.string());

    std::vector<Candidate> out;
    std::set<std::pair<std::string, int>> seen;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ParseError(std::string("bad candidate json: ") + e.what(), line_no, 1);
        }
        if (!obj.contains("task_id") || !obj.contains("sample_index") ||
            !obj.contains("completion") || !obj["task_id"].is_string() ||
            !obj["sample_index"].is_number_integer() || !obj["completion"].is_string())
            throw ParseError("candidate line missing task_id/sample_index/completion", line_no, 1);

        Candidate cand;
        cand.task_id = obj["task_id"].get<std::string>();
        cand.sample_index = obj["sample_index"].get<int>();
        cand.completion = obj["completion"].get<std::string>();
        if (!seen.insert({cand.task_id, cand.sample_index}).second)
            throw DuplicateSample("duplicate sample (" + cand.task_id + ", " +
                                  std::to_string(cand.sample_index) + ")");
        out.push_back(std::move(cand));
    }
    return out;
}

void save_candidates(std::span<const Candidate> candidates, const std::filesystem::path& path) {
    std::string text;
    for (const auto& cand : candidates) {
        ordered_json obj;
        obj["task_id"] = cand.task_id;
        obj["sample_index"] = cand.sample_index;
        obj["completion"] = cand.completion;
        text += obj.dump() + "\n";
    }
    atomic_write(path, text);
}

namespace {

struct ParsedUrl {
    std::string host;
    int port = 80;
    std::string path = "/";
};

ParsedUrl parse_http_url(const std::string& url) {
    std::string rest = url;
    if (rest.rfind("https://", 0) == 0)
        throw ProviderError("https endpoints are not supported; use a local http adapter");
    if (rest.rfind("http://", 0) == 0) rest = rest.substr(7);

    ParsedUrl parsed;
    auto slash = rest.find('/');
    std::string hostport = slash == std::string::npos ? rest : rest.substr(0, slash);
    if (slash != std::string::npos) parsed.path = rest.substr(slash);
    auto colon = hostport.find(':');
    if (colon == std::string::npos) {
        parsed.host = hostport;
    } else {
        parsed.host = hostport.substr(0, colon);
        parsed.port = std::atoi(hostport.c_str() + colon + 1);
    }
    if (parsed.host.empty() || parsed.port <= 0)
        throw ProviderError("malformed endpoint url: " + url);
    return parsed;
}

std::vector<Candidate> sample_one(const ParsedUrl& url, const std::string& task_id,
                                  const std::string& prompt, const SamplingConfig& config) {
    ordered_json body;
    body["prompt"] = prompt;
    body["n"] = config.n;
    body["temperature"] = config.greedy ? 0.0 : config.temperature;
    body["top_p"] = config.nucleus_top_p;
    body["max_tokens"] = config.max_window_tokens;
    std::string payload = body.dump();

    httplib::Headers headers;
    if (const char* token = std::getenv("CTXEVAL_ENDPOINT_TOKEN"); token && *token)
        headers.emplace("Authorization", std::string("Bearer ") + token);

    std::string last_error;
    for (int attempt = 0; attempt <= config.retry_limit; ++attempt) {
        if (attempt > 0) {
            int delay = config.retry_base_ms * (1 << (attempt - 1));
            std::this_thread::sleep_for(std::chrono::milliseconds(delay));
        }
        httplib::Client client(url.host, url.port);
        client.set_read_timeout(120, 0);
        auto res = client.Post(url.path, headers, payload, "application/json");
        if (!res) {
            last_error = "connection failed";
            continue; // transient
        }
        if (res->status >= 500) {
            last_error = "server error " + std::to_string(res->status);
            continue; // transient
        }
        if (res->status != 200)
            throw ProviderError("endpoint returned status " + std::to_string(res->status));

        json parsed;
        try {
            parsed = json::parse(res->body);
        } catch (const json::parse_error&) {
            throw ProviderError("endpoint returned unparsable body");
        }
        if (!parsed.contains("completions") || !parsed["completions"].is_array())
            throw ProviderError("endpoint response missing completions array");
        auto& arr = parsed["completions"];
        if (static_cast<int>(arr.size()) < config.n)
            throw ProviderError("endpoint returned " + std::to_string(arr.size()) +
                                " completions, expected " + std::to_string(config.n));

        std::vector<Candidate> out;
        for (int i = 0; i < config.n; ++i) {
            if (!arr[static_cast<std::size_t>(i)].is_string())
                throw ProviderError("completion " + std::to_string(i) + " is not a string");
            out.push_back({task_id, i, arr[static_cast<std::size_t>(i)].get<std::string>()});
        }
        return out;
    }
    throw ProviderError("endpoint unreachable after retries: " + last_error);
}

} // namespace

EndpointResult sample_endpoint(const std::string& endpoint_url,
                               std::span<const std::pair<std::string, std::string>> prompts,
                               const SamplingConfig& config, int workers) {
    config.validate();
    ParsedUrl url = parse_http_url(endpoint_url);

    struct Slot {
        std::vector<Candidate> candidates;
        std::string failure;
    };
    std::vector<Slot> slots(prompts.size());
    std::atomic<std::size_t> next{0};

    auto run = [&]() {
        while (true) {
            std::size_t i = next.fetch_add(1);
            if (i >= prompts.size()) break;
            try {
                slots[i].candidates =
                    sample_one(url, prompts[i].first, prompts[i].second, config);
            } catch (const Error& e) {
                slots[i].failure = e.what();
            }
        }
    };

    std::vector<std::thread> pool;
    std::size_t n_workers =
        std::min(static_cast<std::size_t>(std::max(workers, 1)), std::max<std::size_t>(prompts.size(), 1));
    for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(run);
    for (auto& t : pool) t.join();

    EndpointResult result;
    for (std::size_t i = 0; i < slots.size(); ++i) {
        if (!slots[i].failure.empty()) {
            result.failures.emplace_back(prompts[i].first, slots[i].failure);
        } else {
            result.candidates.insert(result.candidates.end(), slots[i].candidates.begin(),
                                     slots[i].candidates.end());
        }
    }
    return result;
}

} // namespace ctxeval
