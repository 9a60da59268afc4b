// Copyright 2026 The Pseudokit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line entry point. Every subcommand writes its outputs and a
// manifest.json atomically.

#ifndef PSEUDOKIT_CLI_H_
#define PSEUDOKIT_CLI_H_

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace pseudokit {

inline constexpr int kExitOk = 0;
inline constexpr int kExitPartial = 1;
inline constexpr int kExitUsage = 2;

// `args` excludes the program name. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);
int run(const std::vector<std::string>& args);

std::string_view tool_version();

// Lower-case hex SHA-256.
std::string sha256_hex(std::string_view data);

// Writes `content` to a sibling temp file and renames it over `path`.
void write_file_atomic(const std::string& path, std::string_view content);

// Whole file contents. Throws UsageError if it cannot be read.
std::string read_file(const std::string& path);

}  // namespace pseudokit

#endif  // PSEUDOKIT_CLI_H_
