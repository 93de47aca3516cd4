#include "ctxeval/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>
#include <tuple>
#include <unordered_map>

#include "ctxeval/callgraph.hpp"
#include "ctxeval/error.hpp"
#include "ctxeval/subprocess.hpp"

namespace ctxeval {

namespace fs = std::filesystem;

namespace {

std::string sanitize(const std::string& id) {
    std::string out;
    for (char c : id)
        out += (std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '_')
                   ? c
                   : '_';
    return out;
}

std::vector<std::string> split_lines_keep(const std::string& text, bool& trailing_newline) {
    std::vector<std::string> lines;
    std::string current;
    trailing_newline = !text.empty() && text.back() == '\n';
    for (char c : text) {
        if (c == '\n') {
            lines.push_back(current);
            current.clear();
        } else {
            current += c;
        }
    }
    if (!current.empty()) lines.push_back(current);
    return lines;
}

int leading_ws(const std::string& line) {
    int n = 0;
    for (char c : line) {
        if (c == ' ' || c == '\t') ++n;
        else break;
    }
    return n;
}

std::string substitute(std::string text, const std::string& key, const std::string& value) {
    std::size_t pos = 0;
    while ((pos = text.find(key, pos)) != std::string::npos) {
        text.replace(pos, key.size(), value);
        pos += value.size();
    }
    return text;
}

void write_text(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw HarnessError("cannot write " + path.string());
    out << content;
}

} // namespace

std::string to_string(Outcome outcome) {
    switch (outcome) {
        case Outcome::Pass: return "Pass";
        case Outcome::Fail: return "Fail";
        case Outcome::CompileError: return "CompileError";
        case Outcome::Timeout: return "Timeout";
        case Outcome::HarnessError: return "HarnessError";
    }
    return "HarnessError";
}

Outcome outcome_from_string(const std::string& text) {
    if (text == "Pass") return Outcome::Pass;
    if (text == "Fail") return Outcome::Fail;
    if (text == "CompileError") return Outcome::CompileError;
    if (text == "Timeout") return Outcome::Timeout;
    if (text == "HarnessError") return Outcome::HarnessError;
    throw ValidationError("unknown outcome: " + text);
}

fs::path workspace_root(const fs::path& fallback) {
    if (const char* env = std::getenv("CTXEVAL_WORKDIR"); env && *env) return fs::path(env);
    if (!fallback.empty()) return fallback;
    return fs::temp_directory_path() / "ctxeval";
}

fs::path prepare_snapshot(const fs::path& project_root,
                          std::span<const std::string> setup_commands, const fs::path& dest) {
    std::error_code ec;
    if (!fs::exists(project_root))
        throw HarnessError("project root does not exist: " + project_root.string());
    fs::remove_all(dest, ec);
    fs::create_directories(dest.parent_path(), ec);
    fs::copy(project_root, dest, fs::copy_options::recursive, ec);
    if (ec) throw HarnessError("snapshot copy failed: " + ec.message());

    for (const std::string& command : setup_commands) {
        ExecResult res = run_shell(command, dest, 300, 1 << 20);
        if (res.spawn_failed || res.not_found || res.exit_code != 0)
            throw HarnessError("setup command failed (" + command + "): exit " +
                               std::to_string(res.exit_code));
    }
    return dest;
}

fs::path splice_candidate(const fs::path& snapshot, const Task& task, const Candidate& candidate,
                          const std::string& driver_source, const fs::path& workspace_dir) {
    if (candidate.completion.empty())
        throw InvalidTarget("empty candidate for task " + task.task_id);

    std::error_code ec;
    fs::remove_all(workspace_dir, ec);
    fs::create_directories(workspace_dir.parent_path(), ec);
    fs::copy(snapshot, workspace_dir, fs::copy_options::recursive, ec);
    if (ec) throw HarnessError("workspace copy failed: " + ec.message());

    fs::path target = workspace_dir / task.file_path;
    std::ifstream in(target, std::ios::binary);
    if (!in) throw HarnessError("task file missing in workspace: " + target.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    in.close();

    bool trailing_newline = true;
    std::vector<std::string> lines = split_lines_keep(buf.str(), trailing_newline);
    int n_lines = static_cast<int>(lines.size());
    if (task.begin_line < 1 || task.end_line < task.begin_line || task.begin_line > n_lines ||
        task.end_line > n_lines)
        throw InvalidTarget("span [" + std::to_string(task.begin_line) + ", " +
                            std::to_string(task.end_line) + "] out of range for " +
                            task.file_path);

    // re-indent: shift the candidate so its first line matches the original
    // definition's indentation
    int original_indent = leading_ws(lines[task.begin_line - 1]);
    bool unused;
    std::vector<std::string> cand_lines = split_lines_keep(candidate.completion, unused);
    while (!cand_lines.empty() && cand_lines.back().empty()) cand_lines.pop_back();
    int cand_indent = cand_lines.empty() ? 0 : leading_ws(cand_lines.front());
    int delta = original_indent - cand_indent;

    std::vector<std::string> shifted;
    for (const std::string& line : cand_lines) {
        if (line.find_first_not_of(" \t") == std::string::npos) {
            shifted.push_back("");
            continue;
        }
        if (delta >= 0) {
            shifted.push_back(std::string(static_cast<std::size_t>(delta), ' ') + line);
        } else {
            int strip = std::min(-delta, leading_ws(line));
            shifted.push_back(line.substr(static_cast<std::size_t>(strip)));
        }
    }

    std::vector<std::string> merged;
    merged.reserve(lines.size());
    for (int i = 0; i < task.begin_line - 1; ++i) merged.push_back(lines[i]);
    for (const auto& line : shifted) merged.push_back(line);
    for (int i = task.end_line; i < n_lines; ++i) merged.push_back(lines[i]);

    std::string out_text;
    for (std::size_t i = 0; i < merged.size(); ++i) {
        out_text += merged[i];
        if (i + 1 < merged.size() || trailing_newline) out_text += '\n';
    }
    write_text(target, out_text);

    if (!driver_source.empty()) {
        fs::path driver_dir = workspace_dir / "__ctxeval__";
        fs::create_directories(driver_dir, ec);
        std::string ext = task.language == "java-like" ? ".java" : ".py";
        write_text(driver_dir / ("driver_" + sanitize(task.task_id) + ext), driver_source);
    }
    return workspace_dir;
}

Verdict run_evaluation(const fs::path& workspace, const Task& task, const RunLimits& limits,
                       const fs::path& log_file_in) {
    Verdict verdict;
    verdict.task_id = task.task_id;

    std::string ext = task.language == "java-like" ? ".java" : ".py";
    std::string driver_rel = "__ctxeval__/driver_" + sanitize(task.task_id) + ext;

    fs::path log_file = log_file_in;
    if (!log_file.empty()) {
        std::error_code ec;
        fs::create_directories(log_file.parent_path(), ec);
        verdict.log_path = log_file.string();
    }
    std::string log_text;
    std::int64_t total_ms = 0;

    auto finish = [&](Outcome outcome) {
        verdict.outcome = outcome;
        verdict.duration_ms = total_ms;
        if (!log_file.empty()) write_text(log_file, log_text);
        return verdict;
    };

    if (task.compile_command) {
        std::string cmd = substitute(*task.compile_command, "{file}", task.file_path);
        cmd = substitute(cmd, "{driver}", driver_rel);
        ExecResult res = run_shell(cmd, workspace, limits.timeout_s, limits.max_output_bytes);
        total_ms += res.duration_ms;
        log_text += "$ " + cmd + "\n" + res.stdout_data + res.stderr_data;
        if (res.spawn_failed || res.not_found)
            return finish(Outcome::HarnessError);
        if (res.timed_out) return finish(Outcome::Timeout);
        if (res.exit_code != 0) return finish(Outcome::CompileError);
    }

    std::string cmd = substitute(task.run_command, "{driver}", driver_rel);
    cmd = substitute(cmd, "{file}", task.file_path);
    ExecResult res = run_shell(cmd, workspace, limits.timeout_s, limits.max_output_bytes);
    total_ms += res.duration_ms;
    log_text += "$ " + cmd + "\n--- stdout ---\n" + res.stdout_data + "\n--- stderr ---\n" +
                res.stderr_data;

    if (res.spawn_failed || res.not_found) return finish(Outcome::HarnessError);
    if (res.timed_out) return finish(Outcome::Timeout);

    bool sentinel = res.stdout_data.find(kPassSentinel) != std::string::npos;
    if (res.exit_code == 0 && sentinel) return finish(Outcome::Pass);
    return finish(Outcome::Fail);
}

std::vector<Verdict> evaluate_batch(std::span<const PreparedTask> tasks,
                                    std::span<const Candidate> candidates,
                                    const BatchOptions& options) {
    if (options.workers < 1) throw HarnessError("workers must be >= 1");

    std::unordered_map<std::string, const PreparedTask*> by_id;
    for (const auto& pt : tasks) by_id[pt.task.task_id] = &pt;

    fs::path root = workspace_root(options.work_root);
    std::error_code ec;
    fs::create_directories(root, ec);

    std::vector<Verdict> verdicts(candidates.size());
    std::atomic<std::size_t> next{0};

    auto worker = [&]() {
        while (true) {
            std::size_t i = next.fetch_add(1);
            if (i >= candidates.size()) break;
            const Candidate& cand = candidates[i];

            auto it = by_id.find(cand.task_id);
            if (it == by_id.end()) {
                Verdict v;
                v.task_id = cand.task_id;
                v.sample_index = cand.sample_index;
                v.outcome = Outcome::HarnessError;
                verdicts[i] = std::move(v);
                continue;
            }
            const PreparedTask& pt = *it->second;
            if (pt.driver_source.empty()) {
                Verdict v;
                v.task_id = cand.task_id;
                v.sample_index = cand.sample_index;
                v.outcome = Outcome::HarnessError;
                verdicts[i] = std::move(v);
                continue;
            }

            fs::path ws = root / ("ws_" + sanitize(cand.task_id) + "_" +
                                  std::to_string(cand.sample_index));
            fs::path log_file = options.log_dir.empty()
                                    ? fs::path()
                                    : options.log_dir / sanitize(cand.task_id) /
                                          (std::to_string(cand.sample_index) + ".log");
            Verdict v;
            try {
                splice_candidate(pt.snapshot, pt.task, cand, pt.driver_source, ws);
                v = run_evaluation(ws, pt.task, options.limits, log_file);
            } catch (const Error&) {
                v.task_id = cand.task_id;
                v.outcome = Outcome::HarnessError;
            }
            v.sample_index = cand.sample_index;
            verdicts[i] = std::move(v);
            std::error_code cleanup_ec;
            fs::remove_all(ws, cleanup_ec);
        }
    };

    std::vector<std::thread> pool;
    std::size_t n_workers = std::min(static_cast<std::size_t>(options.workers),
                                     std::max<std::size_t>(candidates.size(), 1));
    for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    std::sort(verdicts.begin(), verdicts.end(), [](const Verdict& a, const Verdict& b) {
        return std::tie(a.task_id, a.sample_index) < std::tie(b.task_id, b.sample_index);
    });
    return verdicts;
}

} // namespace ctxeval
