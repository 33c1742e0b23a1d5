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

#ifndef RLLF_LOGICAL_FEEDBACK_H_
#define RLLF_LOGICAL_FEEDBACK_H_

#include <string>
#include <vector>

#include "rllf/engine.h"
#include "rllf/policy.h"
#include "rllf/preference.h"
#include "rllf/taskgen.h"

namespace rllf {

struct LogicRewardConfig {
  double w_answer = 0.5;
  double w_chain = 0.5;
  double parse_failure_reward = 0.0;

  void Validate() const;
};

// w_answer * [answer consistent] + w_chain * valid / max(total, 1). An empty
// chain counts as fully valid when the answer is consistent, so a bare
// correct answer scores 1 and a bare wrong one 0. Unparseable output scores
// parse_failure_reward.
double LogicReward(const ChainReport& report, bool parse_ok,
                   const LogicRewardConfig& config);

struct ScoredChain {
  ChainReport report;
  double reward = 0.0;
};

// Verifies the response's chain; the answer is checked against the gold
// verdict.
ScoredChain ScoreResponse(const Response& response, const TaskInstance& instance,
                          const LogicRewardConfig& config);

PreferenceRecord LabelPairByLogic(const SegmentPair& pair,
                                  const TaskInstance& instance,
                                  const LogicRewardConfig& config);

// Order-aligned with `pairs`. Throws MissingInstance naming the pair.
std::vector<PreferenceRecord> GenerateLogicPreferenceDataset(
    const std::vector<SegmentPair>& pairs, const InstanceIndex& instances,
    const LogicRewardConfig& config);

}  // namespace rllf

#endif  // RLLF_LOGICAL_FEEDBACK_H_
