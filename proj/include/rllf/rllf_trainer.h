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

#ifndef RLLF_RLLF_TRAINER_H_
#define RLLF_RLLF_TRAINER_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "rllf/logical_feedback.h"
#include "rllf/policy.h"
#include "rllf/preference.h"
#include "rllf/reward_model.h"
#include "rllf/taskgen.h"

namespace rllf {

enum class BlendMode { kDatasetMix, kRewardBlend };
const char* ToString(BlendMode m);
std::optional<BlendMode> ParseBlendMode(std::string_view text);

enum class BaselineKind { kBatchMean, kNone };
const char* ToString(BaselineKind b);
std::optional<BaselineKind> ParseBaselineKind(std::string_view text);

struct BlendConfig {
  double lambda = 0.5;
  BlendMode mode = BlendMode::kDatasetMix;

  void Validate() const;
};

struct TrainConfig {
  int iterations = 200;
  int rollouts_per_iter = 64;
  int responses_per_instance = 4;  // rollouts are grouped per instance
  int pairs_per_iter = 32;
  double policy_lr = 0.005;
  BaselineKind baseline = BaselineKind::kBatchMean;
  int max_steps = kDefaultMaxSteps;
  std::uint64_t seed = 0;
  TrainHyper reward_hyper;
  int eval_every = 10;
  LogicRewardConfig logic;

  void Validate() const;
};

struct Metrics {
  double logical_accuracy = 0.0;
  double mean_logic_reward = 0.0;
  double simulated_satisfaction = 0.0;
};

struct IterationMetrics {
  int iteration = 0;
  double mean_predicted_reward = 0.0;  // over the iteration's rollouts
  double mean_logic_reward = 0.0;      // over the iteration's rollouts
  double logical_accuracy = 0.0;       // eval set, refreshed every eval_every
  double simulated_satisfaction = 0.0;  // eval set, refreshed every eval_every
};

struct TrainReport {
  TrainConfig config;
  std::optional<BlendConfig> blend;
  AnnotatorConfig annotator;
  std::vector<IterationMetrics> series;
  Metrics final_eval;
  PolicyParams policy;
  RewardParams reward;
};

// round(lambda * target_size) logic records, the rest human. A source
// holding at least what is asked is sampled without replacement, a shorter
// one with replacement. The human pick, the logic pick and the final shuffle
// draw from separate streams, so lambda = 0 returns the same records as any
// other call with the same human store and seed.
std::vector<PreferenceRecord> MixPreferenceDatasets(
    const std::vector<PreferenceRecord>& human,
    const std::vector<PreferenceRecord>& logic, double lambda,
    std::size_t target_size, std::uint64_t seed);

double Sigmoid(double x);

// (1 - lambda) * sigmoid(segment return) + lambda * logic reward.
double BlendedReward(const RewardParams& reward_params,
                     const LogicRewardConfig& logic_config,
                     const Response& response, const TaskInstance& instance,
                     double lambda);

// params + lr * sum_i (reward_i - b) * grad log pi(response_i). Throws
// MismatchedBatch when sizes differ or the batch is empty.
PolicyParams ReinforceUpdate(const PolicyParams& params,
                             const std::vector<Response>& responses,
                             const std::vector<double>& rewards,
                             BaselineKind baseline, double lr,
                             const InstanceIndex& instances);

// Scores finished responses, one per eval instance, in order.
Metrics EvaluateResponses(const std::vector<Response>& responses,
                          const std::vector<TaskInstance>& eval_set,
                          const AnnotatorConfig& annotator,
                          const LogicRewardConfig& logic = {});

// Greedy decoding on every eval instance. Throws EmptyDataset.
Metrics EvaluatePolicy(const PolicyParams& params,
                       const std::vector<TaskInstance>& eval_set,
                       const AnnotatorConfig& annotator,
                       const LogicRewardConfig& logic = {},
                       int max_steps = kDefaultMaxSteps);

// Without a blend config this is the RLHF baseline.
TrainReport TrainPolicy(const std::vector<TaskInstance>& train_set,
                        const std::vector<TaskInstance>& eval_set,
                        const TrainConfig& config,
                        const std::optional<BlendConfig>& blend,
                        const AnnotatorConfig& annotator);

nlohmann::json ToJson(const TrainConfig& config);
nlohmann::json ToJson(const TrainReport& report);
std::string SeriesCsv(const TrainReport& report);
// Accepts a policy object or a whole report.
PolicyParams PolicyFromJson(const nlohmann::json& j);

}  // namespace rllf

#endif  // RLLF_RLLF_TRAINER_H_
