// Copyright 2026 The Duofuzz Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DUOFUZZ_SUBPROCESS_H_
#define DUOFUZZ_SUBPROCESS_H_

#include <filesystem>
#include <optional>
#include <string>

namespace duofuzz {

struct ProcessResult {
  int exit_code = -1;  // valid when !signaled
  bool signaled = false;
  int signal = 0;
  bool timed_out = false;
  std::string out;
  std::string err;

  bool ok() const { return !signaled && !timed_out && exit_code == 0; }
};

// Runs `command` through /bin/sh in its own process group. On timeout the
// whole group gets SIGKILL. Throws std::system_error if the process cannot
// be started.
ProcessResult RunShell(const std::string& command,
                       std::optional<double> timeout_seconds = std::nullopt,
                       const std::filesystem::path& cwd = {});

// Single-quotes `text` for the shell.
std::string ShellQuote(const std::string& text);

}  // namespace duofuzz

#endif  // DUOFUZZ_SUBPROCESS_H_
