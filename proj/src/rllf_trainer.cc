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

#include "rllf/rllf_trainer.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <span>
#include <unordered_map>

#include "rllf/errors.h"
#include "rllf/random.h"

namespace rllf {
namespace {

// Stream indices under an iteration seed.
constexpr std::uint64_t kInstanceStream = 0;
constexpr std::uint64_t kPairStream = 1;
constexpr std::uint64_t kMixStream = 2;
constexpr std::uint64_t kRewardStream = 3;
constexpr std::uint64_t kRolloutStreamBase = 16;

// Picks `count` items: without replacement when the source is large enough.
std::vector<PreferenceRecord> Pick(const std::vector<PreferenceRecord>& source,
                                   std::size_t count, Rng& rng) {
  std::vector<PreferenceRecord> out;
  if (count == 0) return out;
  out.reserve(count);
  if (source.size() >= count) {
    std::vector<std::size_t> idx(source.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    // Partial Fisher-Yates over the first `count` slots.
    for (std::size_t i = 0; i < count; ++i) {
      std::swap(idx[i], idx[i + rng.UniformIndex(idx.size() - i)]);
      out.push_back(source[idx[i]]);
    }
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      out.push_back(source[rng.UniformIndex(source.size())]);
    }
  }
  return out;
}

Metrics Average(double accuracy, double logic, double satisfaction, std::size_t n) {
  const double d = static_cast<double>(n);
  return Metrics{accuracy / d, logic / d, satisfaction / d};
}

template <typename E>
[[noreturn]] void Rethrow(const E& e, int iteration) {
  throw E("iteration " + std::to_string(iteration) + ": " + e.what());
}

nlohmann::json WeightsJson(const FeatureVector& w) {
  return std::vector<double>(w.data(), w.data() + w.size());
}

}  // namespace

const char* ToString(BlendMode m) {
  return m == BlendMode::kDatasetMix ? "dataset_mix" : "reward_blend";
}

std::optional<BlendMode> ParseBlendMode(std::string_view text) {
  if (text == "dataset_mix") return BlendMode::kDatasetMix;
  if (text == "reward_blend") return BlendMode::kRewardBlend;
  return std::nullopt;
}

const char* ToString(BaselineKind b) {
  return b == BaselineKind::kBatchMean ? "batch_mean" : "none";
}

std::optional<BaselineKind> ParseBaselineKind(std::string_view text) {
  if (text == "batch_mean") return BaselineKind::kBatchMean;
  if (text == "none") return BaselineKind::kNone;
  return std::nullopt;
}

void BlendConfig::Validate() const {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw InvalidConfig("lambda must be in [0, 1]");
}

void TrainConfig::Validate() const {
  if (iterations < 1) throw InvalidConfig("iterations must be >= 1");
  if (responses_per_instance < 2) {
    throw InvalidConfig("responses_per_instance must be >= 2");
  }
  if (rollouts_per_iter < responses_per_instance) {
    throw InvalidConfig("rollouts_per_iter must be >= responses_per_instance");
  }
  if (pairs_per_iter < 1) throw InvalidConfig("pairs_per_iter must be >= 1");
  if (!(policy_lr > 0.0)) throw InvalidConfig("policy_lr must be > 0");
  if (max_steps < 1) throw InvalidConfig("max_steps must be >= 1");
  if (eval_every < 1) throw InvalidConfig("eval_every must be >= 1");
  reward_hyper.Validate();
  logic.Validate();
}

std::vector<PreferenceRecord> MixPreferenceDatasets(
    const std::vector<PreferenceRecord>& human,
    const std::vector<PreferenceRecord>& logic, double lambda,
    std::size_t target_size, std::uint64_t seed) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw InvalidConfig("lambda must be in [0, 1]");
  if (human.empty() && logic.empty()) throw EmptyDataset("both record sources are empty");
  const auto n_logic = static_cast<std::size_t>(
      std::llround(lambda * static_cast<double>(target_size)));
  const std::size_t n_human = target_size - n_logic;
  if (n_logic > 0 && logic.empty()) throw EmptyDataset("no logic-teacher records");
  if (n_human > 0 && human.empty()) throw EmptyDataset("no human records");

  Rng human_rng(SubSeed(seed, 0));
  Rng logic_rng(SubSeed(seed, 1));
  Rng shuffle_rng(SubSeed(seed, 2));
  std::vector<PreferenceRecord> out = Pick(human, n_human, human_rng);
  for (PreferenceRecord& r : Pick(logic, n_logic, logic_rng)) out.push_back(std::move(r));
  shuffle_rng.Shuffle(std::span(out));
  return out;
}

double Sigmoid(double x) { return PreferenceProbability(x, 0.0); }

double BlendedReward(const RewardParams& reward_params,
                     const LogicRewardConfig& logic_config,
                     const Response& response, const TaskInstance& instance,
                     double lambda) {
  const double predicted = Sigmoid(SegmentReturn(reward_params, response, instance));
  if (lambda == 0.0) return predicted;
  const double logic = ScoreResponse(response, instance, logic_config).reward;
  if (lambda == 1.0) return logic;
  return (1.0 - lambda) * predicted + lambda * logic;
}

PolicyParams ReinforceUpdate(const PolicyParams& params,
                             const std::vector<Response>& responses,
                             const std::vector<double>& rewards,
                             BaselineKind baseline, double lr,
                             const InstanceIndex& instances) {
  if (responses.empty() || responses.size() != rewards.size()) {
    throw MismatchedBatch(std::to_string(responses.size()) + " responses with " +
                          std::to_string(rewards.size()) + " rewards");
  }
  double b = 0.0;
  if (baseline == BaselineKind::kBatchMean) {
    const auto [lo, hi] = std::minmax_element(rewards.begin(), rewards.end());
    if (*lo == *hi) {
      b = *lo;  // exact, where the mean could round away from it
    } else {
      for (double r : rewards) b += r;
      b /= static_cast<double>(rewards.size());
    }
  }
  FeatureVector step = FeatureVector::Zero(params.weights.size());
  for (std::size_t i = 0; i < responses.size(); ++i) {
    const double advantage = rewards[i] - b;
    if (advantage == 0.0) continue;
    const TaskInstance& inst =
        LookupInstance(instances, responses[i].instance_ref, "response");
    step += advantage * LogProbGradient(params, responses[i], inst);
  }
  PolicyParams out = params;
  out.weights += lr * step;
  return out;
}

Metrics EvaluateResponses(const std::vector<Response>& responses,
                          const std::vector<TaskInstance>& eval_set,
                          const AnnotatorConfig& annotator,
                          const LogicRewardConfig& logic) {
  if (eval_set.empty()) throw EmptyDataset("empty eval set");
  if (responses.size() != eval_set.size()) {
    throw MismatchedBatch("one response per eval instance expected");
  }
  double accuracy = 0.0, reward = 0.0, satisfaction = 0.0;
  for (std::size_t i = 0; i < eval_set.size(); ++i) {
    accuracy += responses[i].answer() == eval_set[i].gold;
    reward += ScoreResponse(responses[i], eval_set[i], logic).reward;
    satisfaction += Appeal(responses[i], annotator);
  }
  return Average(accuracy, reward, satisfaction, eval_set.size());
}

Metrics EvaluatePolicy(const PolicyParams& params,
                       const std::vector<TaskInstance>& eval_set,
                       const AnnotatorConfig& annotator,
                       const LogicRewardConfig& logic, int max_steps) {
  if (eval_set.empty()) throw EmptyDataset("empty eval set");
  std::vector<Response> responses;
  responses.reserve(eval_set.size());
  for (const TaskInstance& inst : eval_set) {
    responses.push_back(GreedyResponse(params, inst, max_steps));
  }
  return EvaluateResponses(responses, eval_set, annotator, logic);
}

TrainReport TrainPolicy(const std::vector<TaskInstance>& train_set,
                        const std::vector<TaskInstance>& eval_set,
                        const TrainConfig& config,
                        const std::optional<BlendConfig>& blend,
                        const AnnotatorConfig& annotator) {
  config.Validate();
  annotator.Validate();
  if (blend) blend->Validate();
  if (train_set.empty()) throw EmptyDataset("empty training set");
  if (eval_set.empty()) throw EmptyDataset("empty eval set");

  const bool teacher_labels = blend && blend->mode == BlendMode::kDatasetMix;
  const bool reward_blend = blend && blend->mode == BlendMode::kRewardBlend;
  const double mix_lambda = teacher_labels ? blend->lambda : 0.0;
  const InstanceIndex index = IndexInstances(train_set);
  const std::size_t groups_per_iter =
      static_cast<std::size_t>(config.rollouts_per_iter / config.responses_per_instance);

  TrainReport report;
  report.config = config;
  report.blend = blend;
  report.annotator = annotator;

  std::vector<PreferenceRecord> human_store;
  std::vector<PreferenceRecord> logic_store;
  // Phi(sigma1), Phi(sigma2) per pair id; both sources label the same pairs.
  std::unordered_map<std::string, std::pair<FeatureVector, FeatureVector>> phis;

  PolicyParams policy;
  RewardParams reward;
  Metrics eval;
  for (int it = 0; it < config.iterations; ++it) {
    try {
      const std::uint64_t iter_seed = SubSeed(config.seed, it);

      // 1. Rollouts, grouped by instance.
      Rng pick(SubSeed(iter_seed, kInstanceStream));
      std::vector<std::vector<Response>> groups(groups_per_iter);
      std::vector<Response> flat;
      for (std::size_t g = 0; g < groups_per_iter; ++g) {
        const TaskInstance& inst = train_set[pick.UniformIndex(train_set.size())];
        for (int k = 0; k < config.responses_per_instance; ++k) {
          const std::uint64_t s = SubSeed(
              iter_seed, kRolloutStreamBase + g * config.responses_per_instance + k);
          groups[g].push_back(SampleResponse(policy, inst, s, config.max_steps));
          flat.push_back(groups[g].back());
        }
      }

      // 2. Labels and the reward predictor.
      const std::vector<SegmentPair> pairs =
          SamplePairs(groups, config.pairs_per_iter, SubSeed(iter_seed, kPairStream));
      for (const SegmentPair& p : pairs) {
        const TaskInstance& inst = LookupInstance(index, p.instance_ref, p.pair_id);
        phis.emplace(p.pair_id, std::make_pair(SegmentFeatures(p.sigma1, inst),
                                               SegmentFeatures(p.sigma2, inst)));
        human_store.push_back(
            SimulateAnnotation(p, annotator, inst, config.logic));
        if (teacher_labels) {
          logic_store.push_back(LabelPairByLogic(p, inst, config.logic));
        }
      }
      const std::vector<PreferenceRecord> mixed =
          MixPreferenceDatasets(human_store, logic_store, mix_lambda,
                                human_store.size(), SubSeed(iter_seed, kMixStream));
      std::vector<BtExample> examples;
      examples.reserve(mixed.size());
      for (const PreferenceRecord& r : mixed) {
        const auto& [phi1, phi2] = phis.at(r.pair_id);
        examples.push_back(BtExample{phi1, phi2, r.mu});
      }
      TrainHyper hyper = config.reward_hyper;
      hyper.seed = config.reward_hyper.seed ^ SubSeed(iter_seed, kRewardStream);
      reward = TrainRewardModel(examples, hyper).params;

      // 3. Policy update against the predicted (or blended) reward.
      IterationMetrics m;
      m.iteration = it;
      std::vector<double> rewards;
      rewards.reserve(flat.size());
      for (const Response& r : flat) {
        const TaskInstance& inst = *index.at(r.instance_ref);
        const double predicted = SegmentReturn(reward, r, inst);
        const double logic = ScoreResponse(r, inst, config.logic).reward;
        m.mean_predicted_reward += predicted;
        m.mean_logic_reward += logic;
        rewards.push_back(reward_blend ? (1.0 - blend->lambda) * Sigmoid(predicted) +
                                             blend->lambda * logic
                                       : predicted);
      }
      m.mean_predicted_reward /= static_cast<double>(flat.size());
      m.mean_logic_reward /= static_cast<double>(flat.size());
      policy = ReinforceUpdate(policy, flat, rewards, config.baseline,
                               config.policy_lr, index);

      if (it % config.eval_every == 0 || it + 1 == config.iterations) {
        eval = EvaluatePolicy(policy, eval_set, annotator, config.logic,
                              config.max_steps);
      }
      m.logical_accuracy = eval.logical_accuracy;
      m.simulated_satisfaction = eval.simulated_satisfaction;
      report.series.push_back(m);
    } catch (const DivergenceDetected& e) {
      Rethrow(e, it);
    } catch (const EmptyDataset& e) {
      Rethrow(e, it);
    } catch (const MissingInstance& e) {
      Rethrow(e, it);
    }
  }
  report.final_eval = eval;
  report.policy = policy;
  report.reward = reward;
  return report;
}

nlohmann::json ToJson(const TrainConfig& c) {
  return nlohmann::json{
      {"iterations", c.iterations},
      {"rollouts_per_iter", c.rollouts_per_iter},
      {"responses_per_instance", c.responses_per_instance},
      {"pairs_per_iter", c.pairs_per_iter},
      {"policy_lr", c.policy_lr},
      {"baseline", ToString(c.baseline)},
      {"max_steps", c.max_steps},
      {"seed", c.seed},
      {"eval_every", c.eval_every},
      {"reward_hyper",
       {{"learning_rate", c.reward_hyper.learning_rate},
        {"epochs", c.reward_hyper.epochs},
        {"batch_size", c.reward_hyper.batch_size},
        {"l2", c.reward_hyper.l2},
        {"seed", c.reward_hyper.seed}}},
      {"logic",
       {{"w_answer", c.logic.w_answer},
        {"w_chain", c.logic.w_chain},
        {"parse_failure_reward", c.logic.parse_failure_reward}}}};
}

nlohmann::json ToJson(const TrainReport& report) {
  nlohmann::json series = nlohmann::json::array();
  for (const IterationMetrics& m : report.series) {
    series.push_back({{"iteration", m.iteration},
                      {"mean_predicted_reward", m.mean_predicted_reward},
                      {"mean_logic_reward", m.mean_logic_reward},
                      {"logical_accuracy", m.logical_accuracy},
                      {"simulated_satisfaction", m.simulated_satisfaction}});
  }
  nlohmann::json blend = nullptr;
  if (report.blend) {
    blend = {{"lambda", report.blend->lambda}, {"mode", ToString(report.blend->mode)}};
  }
  const AnnotatorConfig& a = report.annotator;
  return nlohmann::json{
      {"config", ToJson(report.config)},
      {"blend", blend},
      {"annotator",
       {{"bias", a.bias},
        {"noise", a.noise},
        {"seed", a.seed},
        {"appeal_length_weight", a.appeal_length_weight},
        {"appeal_entailed_weight", a.appeal_entailed_weight}}},
      {"series", std::move(series)},
      {"final_eval",
       {{"logical_accuracy", report.final_eval.logical_accuracy},
        {"mean_logic_reward", report.final_eval.mean_logic_reward},
        {"simulated_satisfaction", report.final_eval.simulated_satisfaction}}},
      {"policy",
       {{"weights", WeightsJson(report.policy.weights)},
        {"temperature", report.policy.temperature},
        {"feature_dim", kFeatureDim}}},
      {"reward", {{"weights", WeightsJson(report.reward.weights)},
                  {"feature_dim", kFeatureDim}}}};
}

std::string SeriesCsv(const TrainReport& report) {
  std::string out =
      "iteration,mean_predicted_reward,mean_logic_reward,logical_accuracy,"
      "simulated_satisfaction\n";
  char buf[160];
  for (const IterationMetrics& m : report.series) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%.17g\n", m.iteration,
                  m.mean_predicted_reward, m.mean_logic_reward, m.logical_accuracy,
                  m.simulated_satisfaction);
    out += buf;
  }
  return out;
}

PolicyParams PolicyFromJson(const nlohmann::json& doc) {
  const nlohmann::json& j = doc.contains("policy") ? doc.at("policy") : doc;
  const auto w = j.at("weights").get<std::vector<double>>();
  if (w.size() != static_cast<std::size_t>(kFeatureDim)) {
    throw Error("policy has " + std::to_string(w.size()) + " weights; expected " +
                std::to_string(kFeatureDim));
  }
  PolicyParams p;
  for (std::size_t i = 0; i < w.size(); ++i) p.weights[static_cast<Eigen::Index>(i)] = w[i];
  p.temperature = j.value("temperature", 1.0);
  if (!(p.temperature > 0.0)) throw Error("temperature must be > 0");
  return p;
}

}  // namespace rllf
