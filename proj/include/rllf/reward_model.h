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

#ifndef RLLF_REWARD_MODEL_H_
#define RLLF_REWARD_MODEL_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "rllf/policy.h"
#include "rllf/preference.h"
#include "rllf/taskgen.h"

namespace rllf {

struct RewardParams {
  FeatureVector weights = FeatureVector::Zero(kFeatureDim);
};

struct TrainHyper {
  double learning_rate = 0.05;
  int epochs = 30;
  int batch_size = 32;
  double l2 = 1e-4;
  std::uint64_t seed = 0;

  void Validate() const;
};

// One comparison with both segments reduced to Phi(sigma), the sum of their
// step features. Returns are linear in the weights, so this is all the
// predictor ever needs from a pair.
struct BtExample {
  FeatureVector phi1;
  FeatureVector phi2;
  Mu mu;
};

BtExample MakeExample(const SegmentPair& pair, const Mu& mu,
                      const TaskInstance& instance);

// Joins records with their pairs by pair_id. Throws UnknownPair for a record
// without a pair and MissingInstance for a pair without an instance.
std::vector<BtExample> MakeExamples(const std::vector<SegmentPair>& pairs,
                                    const std::vector<PreferenceRecord>& records,
                                    const InstanceIndex& instances);

double SegmentReturn(const RewardParams& params, const Response& sigma,
                     const TaskInstance& instance);

// exp(r1) / (exp(r1) + exp(r2)), without overflow.
double PreferenceProbability(double r1, double r2);
double PreferenceProbability(const RewardParams& params, const SegmentPair& pair,
                             const TaskInstance& instance);

// -sum [mu1 log P + mu2 log (1 - P)] + l2 * |w|^2. Throws EmptyDataset.
double BtLoss(const RewardParams& params, std::span<const BtExample> examples,
              double l2);
FeatureVector BtLossGradient(const RewardParams& params,
                             std::span<const BtExample> examples, double l2);

// sum [mu1 P + mu2 (1 - P)], the expression without log or sign. Inspection
// only; minimizing it favours the dispreferred side.
double DebugUnloggedObjective(const RewardParams& params,
                              std::span<const BtExample> examples);

struct RewardTrainResult {
  RewardParams params;
  std::vector<double> loss_trace;  // full-data loss after each epoch
};

// Minibatch gradient descent from zero. Each step moves along the batch mean
// of the per-record gradients plus the l2 term scaled by 1/N, so one epoch
// matches one full-batch step on loss / N when batch_size >= N. Throws
// EmptyDataset and DivergenceDetected.
RewardTrainResult TrainRewardModel(std::span<const BtExample> examples,
                                   const TrainHyper& hyper);

// Fraction of strict records whose preferred side has the higher return.
// Equal returns count as a prediction of sigma1. Throws EmptyDataset when no
// strict record remains.
double PairwiseAccuracy(const RewardParams& params,
                        std::span<const BtExample> examples);

nlohmann::json CheckpointToJson(const RewardParams& params, const TrainHyper& hyper,
                                const std::vector<double>& loss_trace);
RewardParams ParamsFromCheckpoint(const nlohmann::json& j);

}  // namespace rllf

#endif  // RLLF_REWARD_MODEL_H_
