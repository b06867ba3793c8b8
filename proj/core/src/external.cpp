#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <charconv>
#include <cmath>
#include <string>

#include "autotune/objective.hpp"

extern char** environ;

namespace autotune {

namespace {

std::string_view trim(std::string_view s) {
  const auto is_space = [](char ch) {
    return ch == ' ' || ch == '\t' || ch == '\r' || ch == '\n';
  };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::optional<double> parse_last_line(const std::string& output) {
  std::string_view rest(output);
  std::string_view last;
  while (!rest.empty()) {
    const auto pos = rest.find('\n');
    const std::string_view line = trim(rest.substr(0, pos));
    if (!line.empty()) last = line;
    if (pos == std::string_view::npos) break;
    rest.remove_prefix(pos + 1);
  }
  if (last.empty()) return std::nullopt;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(last.data(), last.data() + last.size(), value);
  if (ec != std::errc() || ptr != last.data() + last.size()) return std::nullopt;
  if (!std::isfinite(value) || value <= 0.0) return std::nullopt;
  return value;
}

}  // namespace

std::string substitute_command(std::string_view command_template, const Configuration& c) {
  std::string out;
  out.reserve(command_template.size() + 16);
  std::size_t i = 0;
  while (i < command_template.size()) {
    bool replaced = false;
    if (command_template[i] == '{') {
      for (std::size_t d = 0; d < kDimensions; ++d) {
        const std::string token = "{" + std::string(kDimensionNames[d]) + "}";
        if (command_template.substr(i, token.size()) == token) {
          out += std::to_string(c[d]);
          i += token.size();
          replaced = true;
          break;
        }
      }
    }
    if (!replaced) out += command_template[i++];
  }
  return out;
}

std::optional<double> run_external(std::string_view command_template, const Configuration& c,
                                   std::chrono::milliseconds timeout) {
  const std::string command = substitute_command(command_template, c);

  int pipe_fds[2];
  if (pipe2(pipe_fds, O_CLOEXEC) != 0) return std::nullopt;

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, pipe_fds[1], STDOUT_FILENO);
  posix_spawn_file_actions_addopen(&actions, STDIN_FILENO, "/dev/null", O_RDONLY, 0);

  posix_spawnattr_t attr;
  posix_spawnattr_init(&attr);
  // Own process group, so a timeout can kill the shell and its children.
  posix_spawnattr_setflags(&attr, POSIX_SPAWN_SETPGROUP);
  posix_spawnattr_setpgroup(&attr, 0);

  std::string shell = "/bin/sh";
  std::string flag = "-c";
  std::array<char*, 4> argv{shell.data(), flag.data(), const_cast<char*>(command.c_str()),
                            nullptr};
  pid_t pid = 0;
  const int spawned = posix_spawn(&pid, shell.c_str(), &actions, &attr, argv.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  posix_spawnattr_destroy(&attr);
  close(pipe_fds[1]);
  if (spawned != 0) {
    close(pipe_fds[0]);
    return std::nullopt;
  }

  std::string output;
  bool timed_out = false;
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  std::array<char, 4096> buffer{};
  for (;;) {
    const auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (remaining.count() <= 0) {
      timed_out = true;
      break;
    }
    pollfd pfd{pipe_fds[0], POLLIN, 0};
    const int ready = poll(&pfd, 1, static_cast<int>(remaining.count()));
    if (ready < 0) {
      if (errno == EINTR) continue;
      break;
    }
    if (ready == 0) {
      timed_out = true;
      break;
    }
    const ssize_t n = read(pipe_fds[0], buffer.data(), buffer.size());
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) break;
    output.append(buffer.data(), static_cast<std::size_t>(n));
  }
  close(pipe_fds[0]);

  if (timed_out) kill(-pid, SIGKILL);
  int status = 0;
  while (waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  if (timed_out) return std::nullopt;
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) return std::nullopt;
  return parse_last_line(output);
}

}  // namespace autotune
