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

#ifndef RLLF_EXPERIMENT_H_
#define RLLF_EXPERIMENT_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "rllf/logical_feedback.h"
#include "rllf/preference.h"
#include "rllf/rllf_trainer.h"
#include "rllf/taskgen.h"

namespace rllf {

// Every knob the command line can set, with defaults.
struct ExperimentConfig {
  GenConfig gen;
  std::size_t n_train = 200;
  std::size_t n_eval = 200;
  std::size_t n_pairs = 100;  // gen-pairs
  TrainConfig train;
  AnnotatorConfig annotator;
  BlendConfig blend;
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};  // compare
  std::vector<double> lambdas = {0.25, 0.5, 0.75, 1.0};  // compare

  void Validate() const;
};

// "key = value" lines; '#' starts a comment. Throws InvalidConfig naming the
// line on malformed input.
std::map<std::string, std::string> ParseSettings(const std::string& text);

// Throws InvalidConfig naming the key when it is unknown or its value does
// not parse.
void ApplySetting(ExperimentConfig& config, const std::string& key,
                  const std::string& value);
void ApplySettings(ExperimentConfig& config,
                   const std::map<std::string, std::string>& settings);

// All keys with their effective values; canonical, so it can be digested.
nlohmann::json ToJson(const ExperimentConfig& config);

// n instances, exactly half of each gold verdict (n rounded down to even),
// taken in index order from the stream GenerateInstance(config,
// SubSeed(seed, i)).
std::vector<TaskInstance> GenerateBalancedDataset(const GenConfig& config,
                                                  std::size_t n, std::uint64_t seed);

struct CompareRow {
  std::string arm;                // "rlhf" or "rllf"
  std::optional<double> lambda;   // rllf only
  std::uint64_t seed = 0;
  Metrics final_eval;
};

// One RLHF run and one RLLF run per lambda, for every seed. The data come
// from `data_seed`: train = GenerateDataset(SubSeed(data_seed, 0)), eval =
// GenerateBalancedDataset(SubSeed(data_seed, 1)). Each run uses the seed for
// both training and the annotator. Rows are ordered arm-major, then seed.
std::vector<CompareRow> RunComparison(const ExperimentConfig& config,
                                      std::uint64_t data_seed);

// Side by side: one row per arm, one accuracy column per seed, then means.
std::string ComparisonCsv(const std::vector<CompareRow>& rows);

}  // namespace rllf

#endif  // RLLF_EXPERIMENT_H_
