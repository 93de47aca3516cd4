#include "ctxeval/subprocess.hpp"

#include <cerrno>
#include <chrono>
#include <csignal>
#include <cstring>

#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

namespace ctxeval {

namespace {

void drain(int fd, std::string& sink, std::size_t cap, bool& truncated) {
    char buf[4096];
    while (true) {
        ssize_t n = ::read(fd, buf, sizeof(buf));
        if (n <= 0) break;
        if (sink.size() < cap) {
            std::size_t take = std::min(static_cast<std::size_t>(n), cap - sink.size());
            sink.append(buf, take);
            if (take < static_cast<std::size_t>(n)) truncated = true;
        } else {
            truncated = true;
        }
    }
}

} // namespace

ExecResult run_shell(const std::string& command, const std::filesystem::path& cwd,
                     int timeout_s, std::size_t max_output_bytes) {
    ExecResult result;
    auto start = std::chrono::steady_clock::now();

    int out_pipe[2];
    int err_pipe[2];
    if (::pipe(out_pipe) != 0 || ::pipe(err_pipe) != 0) {
        result.spawn_failed = true;
        return result;
    }

    pid_t pid = ::fork();
    if (pid < 0) {
        for (int fd : {out_pipe[0], out_pipe[1], err_pipe[0], err_pipe[1]}) ::close(fd);
        result.spawn_failed = true;
        return result;
    }

    if (pid == 0) {
        ::setpgid(0, 0);
        if (!cwd.empty() && ::chdir(cwd.c_str()) != 0) _exit(126);
        ::dup2(out_pipe[1], STDOUT_FILENO);
        ::dup2(err_pipe[1], STDERR_FILENO);
        for (int fd : {out_pipe[0], out_pipe[1], err_pipe[0], err_pipe[1]}) ::close(fd);
        ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
        _exit(127);
    }

    ::setpgid(pid, pid); // best effort; the child does the same
    ::close(out_pipe[1]);
    ::close(err_pipe[1]);
    ::fcntl(out_pipe[0], F_SETFL, O_NONBLOCK);
    ::fcntl(err_pipe[0], F_SETFL, O_NONBLOCK);

    auto deadline = start + std::chrono::seconds(timeout_s);
    bool out_open = true;
    bool err_open = true;

    while (out_open || err_open) {
        auto now = std::chrono::steady_clock::now();
        if (now >= deadline) {
            result.timed_out = true;
            ::kill(-pid, SIGKILL);
            break;
        }
        int wait_ms = static_cast<int>(
            std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count());
        wait_ms = std::max(1, std::min(wait_ms, 200));

        struct pollfd fds[2];
        nfds_t nfds = 0;
        if (out_open) fds[nfds++] = {out_pipe[0], POLLIN, 0};
        if (err_open) fds[nfds++] = {err_pipe[0], POLLIN, 0};
        int rc = ::poll(fds, nfds, wait_ms);
        if (rc < 0 && errno != EINTR) break;

        for (nfds_t i = 0; i < nfds; ++i) {
            if (!(fds[i].revents & (POLLIN | POLLHUP))) continue;
            char buf[4096];
            ssize_t n;
            while ((n = ::read(fds[i].fd, buf, sizeof(buf))) > 0) {
                std::string& sink =
                    fds[i].fd == out_pipe[0] ? result.stdout_data : result.stderr_data;
                if (sink.size() < max_output_bytes) {
                    std::size_t take =
                        std::min(static_cast<std::size_t>(n), max_output_bytes - sink.size());
                    sink.append(buf, take);
                    if (take < static_cast<std::size_t>(n)) result.output_truncated = true;
                } else {
                    result.output_truncated = true;
                }
            }
            if (n == 0) {
                if (fds[i].fd == out_pipe[0]) out_open = false;
                else err_open = false;
            }
        }
    }

    // pick up anything still buffered after a kill
    drain(out_pipe[0], result.stdout_data, max_output_bytes, result.output_truncated);
    drain(err_pipe[0], result.stderr_data, max_output_bytes, result.output_truncated);
    ::close(out_pipe[0]);
    ::close(err_pipe[0]);

    int status = 0;
    ::waitpid(pid, &status, 0);
    if (result.timed_out) {
        // make sure stragglers in the group are gone
        ::kill(-pid, SIGKILL);
    }

    if (WIFEXITED(status)) result.exit_code = WEXITSTATUS(status);
    else if (WIFSIGNALED(status)) result.exit_code = 128 + WTERMSIG(status);
    result.not_found = result.exit_code == 127;

    result.duration_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                             std::chrono::steady_clock::now() - start)
                             .count();
    return result;
}

} // namespace ctxeval
