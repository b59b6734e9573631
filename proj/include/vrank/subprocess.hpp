#pragma once

#include <chrono>
#include <filesystem>
#include <string>

namespace vrank {

struct ProcessResult {
  int exit_code = -1;     // valid when exited
  bool exited = false;    // normal exit (not signalled, not timed out)
  bool timed_out = false;
  std::string out;
  std::string err;
};

/// Runs `command` through /bin/sh in its own process group, capturing stdout
/// and stderr. On timeout the whole group is killed. Captured streams are
/// truncated at `max_capture` bytes each.
ProcessResult run_shell(const std::string& command, const std::filesystem::path& cwd,
                        std::chrono::milliseconds timeout,
                        std::size_t max_capture = 16u << 20);

/// Single-quotes `arg` for /bin/sh.
std::string shell_quote(const std::string& arg);

}  // namespace vrank
