#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

namespace ctxeval {

struct ExecResult {
    int exit_code = -1;
    bool timed_out = false;
    bool spawn_failed = false; // fork/exec machinery failed, not the command
    bool not_found = false;    // shell reported the command missing (exit 127)
    bool output_truncated = false;
    std::string stdout_data;
    std::string stderr_data;
    std::int64_t duration_ms = 0;
};

/// Run `command` through /bin/sh -c with `cwd` as working directory.
/// The child gets its own process group; on timeout the whole group is
/// killed. Captured streams are capped at `max_output_bytes` each.
ExecResult run_shell(const std::string& command, const std::filesystem::path& cwd,
                     int timeout_s, std::size_t max_output_bytes);

} // namespace ctxeval
