#include "splinenas/evaluator.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cctype>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <thread>

#include <nlohmann/json.hpp>

#include "splinenas/error.hpp"

namespace splinenas {

namespace {

std::string format_value(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct Pipe {
    int fd[2] = {-1, -1};
    Pipe() {
        if (::pipe2(fd, O_CLOEXEC) != 0) throw Error(ErrorKind::IoError, std::string("pipe: ") + std::strerror(errno));
    }
    ~Pipe() {
        close_read();
        close_write();
    }
    Pipe(const Pipe&) = delete;
    Pipe& operator=(const Pipe&) = delete;
    void close_read() {
        if (fd[0] >= 0) ::close(fd[0]);
        fd[0] = -1;
    }
    void close_write() {
        if (fd[1] >= 0) ::close(fd[1]);
        fd[1] = -1;
    }
};

// Ignores SIGPIPE while writing to a child that may exit without reading.
class ScopedIgnoreSigpipe {
public:
    ScopedIgnoreSigpipe() {
        struct sigaction ignore {};
        ignore.sa_handler = SIG_IGN;
        ::sigaction(SIGPIPE, &ignore, &previous_);
    }
    ~ScopedIgnoreSigpipe() { ::sigaction(SIGPIPE, &previous_, nullptr); }

private:
    struct sigaction previous_ {};
};

struct ProcessResult {
    int status = 0;
    bool timed_out = false;
    std::string out;
    std::string err;
};

ProcessResult spawn(const ExternalCommand& cmd, const Point& point) {
    std::vector<std::string> env_entries;
    for (std::size_t k = 0; k < cmd.names.size() && k < point.size(); ++k) {
        env_entries.push_back(env_var_name(cmd.names[k]) + "=" + format_value(point[k]));
    }
    const std::string request = evaluator_request(cmd, point) + "\n";

    Pipe in, out, err;
    ScopedIgnoreSigpipe guard;
    const pid_t pid = ::fork();
    if (pid < 0) throw Error(ErrorKind::IoError, std::string("fork: ") + std::strerror(errno));
    if (pid == 0) {
        ::setpgid(0, 0);
        ::dup2(in.fd[0], STDIN_FILENO);
        ::dup2(out.fd[1], STDOUT_FILENO);
        ::dup2(err.fd[1], STDERR_FILENO);
        for (auto& e : env_entries) ::putenv(e.data());
        ::execl("/bin/sh", "sh", "-c", cmd.command.c_str(), static_cast<char*>(nullptr));
        ::_exit(127);
    }
    ::setpgid(pid, pid);
    in.close_read();
    out.close_write();
    err.close_write();

    std::size_t written = 0;
    while (written < request.size()) {
        const ssize_t n = ::write(in.fd[1], request.data() + written, request.size() - written);
        if (n < 0) {
            if (errno == EINTR) continue;
            break;  // child closed stdin; its exit status decides the outcome
        }
        written += static_cast<std::size_t>(n);
    }
    in.close_write();

    using clock = std::chrono::steady_clock;
    const bool has_deadline = cmd.timeout.count() > 0;
    const auto deadline = clock::now() + cmd.timeout;

    ProcessResult result;
    pollfd fds[2] = {{out.fd[0], POLLIN, 0}, {err.fd[0], POLLIN, 0}};
    std::string* sinks[2] = {&result.out, &result.err};
    int open_fds = 2;
    char buf[4096];
    while (open_fds > 0) {
        int wait_ms = -1;
        if (has_deadline) {
            const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - clock::now());
            if (left.count() <= 0) {
                result.timed_out = true;
                break;
            }
            wait_ms = static_cast<int>(left.count());
        }
        const int rc = ::poll(fds, 2, wait_ms);
        if (rc < 0) {
            if (errno == EINTR) continue;
            break;
        }
        for (int i = 0; i < 2; ++i) {
            if (fds[i].fd < 0 || fds[i].revents == 0) continue;
            const ssize_t n = ::read(fds[i].fd, buf, sizeof buf);
            if (n > 0) {
                sinks[i]->append(buf, static_cast<std::size_t>(n));
            } else if (n == 0 || errno != EINTR) {
                fds[i].fd = -1;
                --open_fds;
            }
        }
    }

    // Output closed; the child may still be running (or have forked a holder
    // of the pipes). Poll for exit until the deadline.
    while (!result.timed_out) {
        const pid_t w = ::waitpid(pid, &result.status, WNOHANG);
        if (w == pid) return result;
        if (w < 0 && errno != EINTR) return result;
        if (has_deadline && clock::now() >= deadline) {
            result.timed_out = true;
            break;
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
    ::kill(-pid, SIGKILL);
    while (::waitpid(pid, &result.status, 0) < 0 && errno == EINTR) {
    }
    return result;
}

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

}  // namespace

std::string env_var_name(std::string_view name) {
    std::string out = "SPLINENAS_";
    for (char c : name) {
        const auto u = static_cast<unsigned char>(c);
        out.push_back(std::isalnum(u) ? static_cast<char>(std::toupper(u)) : '_');
    }
    return out;
}

std::string evaluator_request(const ExternalCommand& cmd, const Point& point) {
    const nlohmann::json line = {{"study", cmd.study_id}, {"names", cmd.names}, {"point", point}};
    return line.dump();
}

double parse_measurement(std::string_view text) {
    std::string last;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        auto line = trim(text.substr(start, end - start));
        if (!line.empty()) last = std::move(line);
        start = end + 1;
    }
    if (last.empty()) throw Error(ErrorKind::EvalUnparseable, "evaluator printed nothing");
    double v = 0.0;
    const char* first = last.data();
    if (*first == '+') ++first;
    const char* end = last.data() + last.size();
    auto [ptr, ec] = std::from_chars(first, end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
        throw Error(ErrorKind::EvalUnparseable, "last output line '" + last + "' is not a finite number");
    }
    return v;
}

double run_external_evaluator(const ExternalCommand& cmd, const Point& point, std::size_t* spawned) {
    if (cmd.command.empty()) throw Error(ErrorKind::InvalidConfig, "evaluator command is empty");
    for (std::size_t attempt = 0;; ++attempt) {
        const bool last_attempt = attempt >= cmd.retries;
        if (spawned) ++*spawned;
        const ProcessResult r = spawn(cmd, point);
        try {
            if (r.timed_out) {
                throw Error(ErrorKind::EvalTimeout, "evaluator exceeded " + std::to_string(cmd.timeout.count()) +
                                                        " ms; stderr: " + r.err);
            }
            if (!WIFEXITED(r.status) || WEXITSTATUS(r.status) != 0) {
                const int code = WIFEXITED(r.status) ? WEXITSTATUS(r.status) : -1;
                throw Error(ErrorKind::EvalNonZeroExit,
                            "evaluator exited with status " + std::to_string(code) + "; stderr: " + r.err);
            }
            try {
                return parse_measurement(r.out);
            } catch (const Error& e) {
                throw Error(ErrorKind::EvalUnparseable, std::string(e.what()) + "; stderr: " + r.err);
            }
        } catch (const Error&) {
            if (last_attempt) throw;
        }
    }
}

Evaluator external_evaluator(ExternalCommand cmd) {
    return [cmd = std::move(cmd)](const Point& x) { return run_external_evaluator(cmd, x); };
}

}  // namespace splinenas
