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

#include "rllf/logical_feedback.h"

#include <cmath>

#include "rllf/errors.h"

namespace rllf {

void LogicRewardConfig::Validate() const {
  if (!(w_answer >= 0.0 && w_answer <= 1.0 && w_chain >= 0.0 && w_chain <= 1.0)) {
    throw InvalidConfig("w_answer and w_chain must be in [0, 1]");
  }
  if (std::abs(w_answer + w_chain - 1.0) > 1e-9) {
    throw InvalidConfig("w_answer + w_chain must equal 1");
  }
}

double LogicReward(const ChainReport& report, bool parse_ok,
                   const LogicRewardConfig& config) {
  if (!parse_ok) return config.parse_failure_reward;
  // An empty chain is vacuously perfect only next to a consistent answer.
  const double chain =
      report.total_steps == 0
          ? (report.answer_consistent ? 1.0 : 0.0)
          : static_cast<double>(report.valid_steps) / report.total_steps;
  return config.w_answer * (report.answer_consistent ? 1.0 : 0.0) +
         config.w_chain * chain;
}

ScoredChain ScoreResponse(const Response& response, const TaskInstance& instance,
                          const LogicRewardConfig& config) {
  ScoredChain out;
  out.report = VerifyChain(instance.program, instance.query,
                           ResponseToChain(response, instance), kDefaultDepthLimit,
                           instance.gold);
  out.reward = LogicReward(out.report, true, config);
  return out;
}

PreferenceRecord LabelPairByLogic(const SegmentPair& pair,
                                  const TaskInstance& instance,
                                  const LogicRewardConfig& config) {
  const double r1 = ScoreResponse(pair.sigma1, instance, config).reward;
  const double r2 = ScoreResponse(pair.sigma2, instance, config).reward;
  const Mu mu = r1 > r2 ? kPreferFirst : r2 > r1 ? kPreferSecond : kTie;
  return PreferenceRecord{pair.pair_id, mu, RecordSource::kLogicTeacher,
                          std::nullopt, std::nullopt};
}

std::vector<PreferenceRecord> GenerateLogicPreferenceDataset(
    const std::vector<SegmentPair>& pairs, const InstanceIndex& instances,
    const LogicRewardConfig& config) {
  std::vector<PreferenceRecord> out;
  out.reserve(pairs.size());
  for (const SegmentPair& p : pairs) {
    out.push_back(LabelPairByLogic(
        p, LookupInstance(instances, p.instance_ref, "pair " + p.pair_id), config));
  }
  return out;
}

}  // namespace rllf
