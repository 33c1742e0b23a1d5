// Copyright 2026 The RLLF Authors.
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

#ifndef RLLF_CLI_H_
#define RLLF_CLI_H_

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace rllf {

inline constexpr const char* kToolName = "rllf";
inline constexpr const char* kToolVersion = "0.1.0";

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;

// args excludes the program name. Subcommands: gen-data, gen-pairs,
// train-reward, train-policy, evaluate, compare, verify, serve.
int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

std::string Sha256Hex(std::string_view bytes);
// Throws IoError.
std::string Sha256File(const std::string& path);

// Where the manifest for an output file goes.
std::string ManifestPath(const std::string& output_path);

}  // namespace rllf

#endif  // RLLF_CLI_H_
