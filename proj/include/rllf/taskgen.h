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

#ifndef RLLF_TASKGEN_H_
#define RLLF_TASKGEN_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "rllf/engine.h"
#include "rllf/term.h"

namespace rllf {

struct GenConfig {
  int n_predicates = 8;
  int max_rule_body = 3;
  int rule_depth = 3;
  double negation_rate = 0.25;
  int n_constants = 2;
  double balance = 0.5;  // target fraction of entailed-gold instances

  // Throws InvalidConfig naming the offending field.
  void Validate() const;
};

struct TaskMeta {
  int rule_depth = 0;  // depth actually realized by the level assignment
  int negation_count = 0;
  std::uint64_t seed = 0;
};

// A ground stratified rule base with a ground query and its oracle verdict.
struct TaskInstance {
  std::string id;
  Program program;  // program.source_text holds the canonical text
  Term query;
  VerdictValue gold = VerdictValue::kNotEntailed;
  TaskMeta meta;

  std::string query_text() const { return ToString(query) + "."; }
};

// Rejection-sampling budget per instance.
inline constexpr int kMaxGenerationAttempts = 1000;

// Deterministic in (config, seed). Throws GenerationExhausted when no
// instance with the sampled target verdict is found within the budget.
TaskInstance GenerateInstance(const GenConfig& config, std::uint64_t seed);

// Instance i is GenerateInstance(config, SubSeed(seed, i)).
std::vector<TaskInstance> GenerateDataset(const GenConfig& config,
                                          std::size_t n, std::uint64_t seed);

struct InstanceCheck {
  bool ok = false;
  std::string diagnostic;  // empty when ok
};

// Re-parses the program text and re-checks groundness, stratification and
// the gold verdict against the brute-force oracle.
InstanceCheck ValidateInstance(const TaskInstance& instance);

// Dataset lines: {id, program_text, query_text, gold, meta}.
nlohmann::json ToJson(const TaskInstance& instance);
TaskInstance InstanceFromJson(const nlohmann::json& j);

void WriteDataset(const std::string& path,
                  const std::vector<TaskInstance>& instances);
std::vector<TaskInstance> ReadDataset(const std::string& path);

}  // namespace rllf

#endif  // RLLF_TASKGEN_H_
