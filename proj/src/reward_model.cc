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

#include "rllf/reward_model.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "rllf/errors.h"
#include "rllf/random.h"

namespace rllf {
namespace {

// log sigmoid(d), evaluated on the side that cannot overflow.
double LogSigmoid(double d) {
  return d >= 0 ? -std::log1p(std::exp(-d)) : d - std::log1p(std::exp(d));
}

void RequireNonEmpty(std::span<const BtExample> examples) {
  if (examples.empty()) throw EmptyDataset("no preference records");
}

}  // namespace

void TrainHyper::Validate() const {
  if (!(learning_rate > 0.0)) throw InvalidConfig("learning_rate must be > 0");
  if (epochs < 1) throw InvalidConfig("epochs must be >= 1");
  if (batch_size < 1) throw InvalidConfig("batch_size must be >= 1");
  if (!(l2 >= 0.0)) throw InvalidConfig("l2 must be >= 0");
}

BtExample MakeExample(const SegmentPair& pair, const Mu& mu,
                      const TaskInstance& instance) {
  return BtExample{SegmentFeatures(pair.sigma1, instance),
                   SegmentFeatures(pair.sigma2, instance), mu};
}

std::vector<BtExample> MakeExamples(const std::vector<SegmentPair>& pairs,
                                    const std::vector<PreferenceRecord>& records,
                                    const InstanceIndex& instances) {
  std::unordered_map<std::string, const SegmentPair*> by_id;
  for (const SegmentPair& p : pairs) by_id.emplace(p.pair_id, &p);
  std::vector<BtExample> out;
  out.reserve(records.size());
  for (const PreferenceRecord& r : records) {
    const auto it = by_id.find(r.pair_id);
    if (it == by_id.end()) throw UnknownPair("no pair for record '" + r.pair_id + "'");
    const SegmentPair& p = *it->second;
    out.push_back(MakeExample(p, r.mu, LookupInstance(instances, p.instance_ref, p.pair_id)));
  }
  return out;
}

double SegmentReturn(const RewardParams& params, const Response& sigma,
                     const TaskInstance& instance) {
  double total = 0.0;
  for (const ResponseStep& step : sigma.steps) {
    total += params.weights.dot(Featurize(step.state, step.action, instance));
  }
  return total;
}

double PreferenceProbability(double r1, double r2) {
  const double d = r1 - r2;
  if (d >= 0) return 1.0 / (1.0 + std::exp(-d));
  const double e = std::exp(d);
  return e / (1.0 + e);
}

double PreferenceProbability(const RewardParams& params, const SegmentPair& pair,
                             const TaskInstance& instance) {
  return PreferenceProbability(SegmentReturn(params, pair.sigma1, instance),
                               SegmentReturn(params, pair.sigma2, instance));
}

double BtLoss(const RewardParams& params, std::span<const BtExample> examples,
              double l2) {
  RequireNonEmpty(examples);
  double loss = 0.0;
  for (const BtExample& e : examples) {
    const double d = params.weights.dot(e.phi1 - e.phi2);
    loss -= e.mu.first * LogSigmoid(d) + e.mu.second * LogSigmoid(-d);
  }
  return loss + l2 * params.weights.squaredNorm();
}

FeatureVector BtLossGradient(const RewardParams& params,
                             std::span<const BtExample> examples, double l2) {
  RequireNonEmpty(examples);
  FeatureVector grad = FeatureVector::Zero(params.weights.size());
  for (const BtExample& e : examples) {
    const FeatureVector diff = e.phi1 - e.phi2;
    const double p = PreferenceProbability(params.weights.dot(diff), 0.0);
    grad += (p - e.mu.first) * diff;
  }
  return grad + 2.0 * l2 * params.weights;
}

double DebugUnloggedObjective(const RewardParams& params,
                              std::span<const BtExample> examples) {
  RequireNonEmpty(examples);
  double total = 0.0;
  for (const BtExample& e : examples) {
    const double p = PreferenceProbability(params.weights.dot(e.phi1 - e.phi2), 0.0);
    total += e.mu.first * p + e.mu.second * (1.0 - p);
  }
  return total;
}

RewardTrainResult TrainRewardModel(std::span<const BtExample> examples,
                                   const TrainHyper& hyper) {
  hyper.Validate();
  RequireNonEmpty(examples);
  const std::size_t n = examples.size();
  const std::size_t batch = std::min<std::size_t>(hyper.batch_size, n);

  RewardTrainResult result;
  FeatureVector& w = result.params.weights;
  w = FeatureVector::Zero(examples.front().phi1.size());

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(hyper.seed);
  FeatureVector grad(w.size());
  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    rng.Shuffle(std::span(order));
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t end = std::min(start + batch, n);
      grad.setZero();
      for (std::size_t k = start; k < end; ++k) {
        const BtExample& e = examples[order[k]];
        const double d = w.dot(e.phi1) - w.dot(e.phi2);
        grad.noalias() += (PreferenceProbability(d, 0.0) - e.mu.first) * (e.phi1 - e.phi2);
      }
      grad /= static_cast<double>(end - start);
      grad += (2.0 * hyper.l2 / static_cast<double>(n)) * w;
      w -= hyper.learning_rate * grad;
    }
    const double loss = BtLoss(result.params, examples, hyper.l2);
    if (!std::isfinite(loss) || !w.allFinite()) {
      throw DivergenceDetected("reward model loss became non-finite at epoch " +
                               std::to_string(epoch));
    }
    result.loss_trace.push_back(loss);
  }
  return result;
}

double PairwiseAccuracy(const RewardParams& params,
                        std::span<const BtExample> examples) {
  std::size_t strict = 0;
  std::size_t correct = 0;
  for (const BtExample& e : examples) {
    if (e.mu.first == e.mu.second) continue;
    ++strict;
    const bool predict_first = params.weights.dot(e.phi1) >= params.weights.dot(e.phi2);
    correct += predict_first == (e.mu.first > e.mu.second);
  }
  if (strict == 0) throw EmptyDataset("no strict preference records");
  return static_cast<double>(correct) / static_cast<double>(strict);
}

nlohmann::json CheckpointToJson(const RewardParams& params, const TrainHyper& hyper,
                                const std::vector<double>& loss_trace) {
  return nlohmann::json{
      {"weights", std::vector<double>(params.weights.data(),
                                      params.weights.data() + params.weights.size())},
      {"feature_dim", params.weights.size()},
      {"hyper",
       {{"learning_rate", hyper.learning_rate},
        {"epochs", hyper.epochs},
        {"batch_size", hyper.batch_size},
        {"l2", hyper.l2},
        {"seed", hyper.seed}}},
      {"loss_trace", loss_trace}};
}

RewardParams ParamsFromCheckpoint(const nlohmann::json& j) {
  const auto w = j.at("weights").get<std::vector<double>>();
  const auto dim = j.at("feature_dim").get<std::size_t>();
  if (w.size() != dim || dim != static_cast<std::size_t>(kFeatureDim)) {
    throw Error("checkpoint feature_dim " + std::to_string(dim) + " with " +
                std::to_string(w.size()) + " weights; expected " +
                std::to_string(kFeatureDim));
  }
  RewardParams p;
  for (std::size_t i = 0; i < dim; ++i) {
    if (!std::isfinite(w[i])) throw Error("checkpoint has a non-finite weight");
    p.weights[static_cast<Eigen::Index>(i)] = w[i];
  }
  return p;
}

}  // namespace rllf
