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

#include "rllf/experiment.h"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string_view>

#include "rllf/errors.h"
#include "rllf/random.h"

namespace rllf {
namespace {

std::string_view Trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T ParseNumber(const std::string& key, const std::string& value) {
  T out{};
  const char* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw InvalidConfig(key + ": cannot parse '" + value + "'");
  }
  return out;
}

template <typename T>
std::vector<T> ParseList(const std::string& key, const std::string& value) {
  std::vector<T> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(ParseNumber<T>(key, std::string(Trim(item))));
  if (out.empty()) throw InvalidConfig(key + ": empty list");
  return out;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, const std::string&)>;

#define RLLF_NUMBER(field, type)                                              \
  [](ExperimentConfig& c, const std::string& k, const std::string& v) {      \
    c.field = ParseNumber<type>(k, v);                                       \
  }

const std::map<std::string, Setter>& Setters() {
  static const std::map<std::string, Setter> table = {
      {"n_predicates", RLLF_NUMBER(gen.n_predicates, int)},
      {"max_rule_body", RLLF_NUMBER(gen.max_rule_body, int)},
      {"rule_depth", RLLF_NUMBER(gen.rule_depth, int)},
      {"negation_rate", RLLF_NUMBER(gen.negation_rate, double)},
      {"n_constants", RLLF_NUMBER(gen.n_constants, int)},
      {"balance", RLLF_NUMBER(gen.balance, double)},
      {"n_train", RLLF_NUMBER(n_train, std::size_t)},
      {"n_eval", RLLF_NUMBER(n_eval, std::size_t)},
      {"n_pairs", RLLF_NUMBER(n_pairs, std::size_t)},
      {"iterations", RLLF_NUMBER(train.iterations, int)},
      {"rollouts_per_iter", RLLF_NUMBER(train.rollouts_per_iter, int)},
      {"responses_per_instance", RLLF_NUMBER(train.responses_per_instance, int)},
      {"pairs_per_iter", RLLF_NUMBER(train.pairs_per_iter, int)},
      {"policy_lr", RLLF_NUMBER(train.policy_lr, double)},
      {"max_steps", RLLF_NUMBER(train.max_steps, int)},
      {"eval_every", RLLF_NUMBER(train.eval_every, int)},
      {"reward_lr", RLLF_NUMBER(train.reward_hyper.learning_rate, double)},
      {"reward_epochs", RLLF_NUMBER(train.reward_hyper.epochs, int)},
      {"reward_batch_size", RLLF_NUMBER(train.reward_hyper.batch_size, int)},
      {"reward_l2", RLLF_NUMBER(train.reward_hyper.l2, double)},
      {"w_answer", RLLF_NUMBER(train.logic.w_answer, double)},
      {"w_chain", RLLF_NUMBER(train.logic.w_chain, double)},
      {"parse_failure_reward", RLLF_NUMBER(train.logic.parse_failure_reward, double)},
      {"bias", RLLF_NUMBER(annotator.bias, double)},
      {"noise", RLLF_NUMBER(annotator.noise, double)},
      {"appeal_length_weight", RLLF_NUMBER(annotator.appeal_length_weight, double)},
      {"appeal_entailed_weight", RLLF_NUMBER(annotator.appeal_entailed_weight, double)},
      {"lambda", RLLF_NUMBER(blend.lambda, double)},
      {"baseline",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         const auto b = ParseBaselineKind(v);
         if (!b) throw InvalidConfig(k + ": expected batch_mean or none, got '" + v + "'");
         c.train.baseline = *b;
       }},
      {"blend_mode",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         const auto m = ParseBlendMode(v);
         if (!m) {
           throw InvalidConfig(k + ": expected dataset_mix or reward_blend, got '" + v + "'");
         }
         c.blend.mode = *m;
       }},
      {"seeds",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.seeds = ParseList<std::uint64_t>(k, v);
       }},
      {"lambdas",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.lambdas = ParseList<double>(k, v);
       }},
  };
  return table;
}

#undef RLLF_NUMBER

}  // namespace

void ExperimentConfig::Validate() const {
  gen.Validate();
  train.Validate();
  annotator.Validate();
  blend.Validate();
  if (n_train < 1) throw InvalidConfig("n_train must be >= 1");
  if (n_eval < 2) throw InvalidConfig("n_eval must be >= 2");
  if (seeds.empty()) throw InvalidConfig("seeds must not be empty");
  for (double l : lambdas) {
    if (!(l >= 0.0 && l <= 1.0)) throw InvalidConfig("lambdas must lie in [0, 1]");
  }
}

std::map<std::string, std::string> ParseSettings(const std::string& text) {
  std::map<std::string, std::string> out;
  std::stringstream ss(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(ss, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw InvalidConfig("line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key(Trim(line.substr(0, eq)));
    if (key.empty()) throw InvalidConfig("line " + std::to_string(line_no) + ": empty key");
    out[key] = std::string(Trim(line.substr(eq + 1)));
  }
  return out;
}

void ApplySetting(ExperimentConfig& config, const std::string& key,
                  const std::string& value) {
  const auto& table = Setters();
  const auto it = table.find(key);
  if (it == table.end()) throw InvalidConfig("unknown config key: " + key);
  it->second(config, key, value);
}

void ApplySettings(ExperimentConfig& config,
                   const std::map<std::string, std::string>& settings) {
  for (const auto& [k, v] : settings) ApplySetting(config, k, v);
}

nlohmann::json ToJson(const ExperimentConfig& c) {
  const TrainConfig& t = c.train;
  return nlohmann::json{
      {"n_predicates", c.gen.n_predicates},
      {"max_rule_body", c.gen.max_rule_body},
      {"rule_depth", c.gen.rule_depth},
      {"negation_rate", c.gen.negation_rate},
      {"n_constants", c.gen.n_constants},
      {"balance", c.gen.balance},
      {"n_train", c.n_train},
      {"n_eval", c.n_eval},
      {"n_pairs", c.n_pairs},
      {"iterations", t.iterations},
      {"rollouts_per_iter", t.rollouts_per_iter},
      {"responses_per_instance", t.responses_per_instance},
      {"pairs_per_iter", t.pairs_per_iter},
      {"policy_lr", t.policy_lr},
      {"baseline", ToString(t.baseline)},
      {"max_steps", t.max_steps},
      {"eval_every", t.eval_every},
      {"reward_lr", t.reward_hyper.learning_rate},
      {"reward_epochs", t.reward_hyper.epochs},
      {"reward_batch_size", t.reward_hyper.batch_size},
      {"reward_l2", t.reward_hyper.l2},
      {"w_answer", t.logic.w_answer},
      {"w_chain", t.logic.w_chain},
      {"parse_failure_reward", t.logic.parse_failure_reward},
      {"bias", c.annotator.bias},
      {"noise", c.annotator.noise},
      {"appeal_length_weight", c.annotator.appeal_length_weight},
      {"appeal_entailed_weight", c.annotator.appeal_entailed_weight},
      {"lambda", c.blend.lambda},
      {"blend_mode", ToString(c.blend.mode)},
      {"seeds", c.seeds},
      {"lambdas", c.lambdas}};
}

std::vector<TaskInstance> GenerateBalancedDataset(const GenConfig& config,
                                                  std::size_t n, std::uint64_t seed) {
  const std::size_t half = n / 2;
  std::size_t entailed = 0, not_entailed = 0;
  std::vector<TaskInstance> out;
  for (std::uint64_t i = 0; out.size() < 2 * half; ++i) {
    if (i > 100 * (n + 1)) throw GenerationExhausted("cannot balance the dataset");
    TaskInstance inst = GenerateInstance(config, SubSeed(seed, i));
    std::size_t& count =
        inst.gold == VerdictValue::kEntailed ? entailed : not_entailed;
    if (count == half) continue;
    ++count;
    out.push_back(std::move(inst));
  }
  return out;
}

std::vector<CompareRow> RunComparison(const ExperimentConfig& config,
                                      std::uint64_t data_seed) {
  config.Validate();
  const auto train = GenerateDataset(config.gen, config.n_train, SubSeed(data_seed, 0));
  const auto eval = GenerateBalancedDataset(config.gen, config.n_eval, SubSeed(data_seed, 1));
  auto run = [&](std::uint64_t seed, const std::optional<BlendConfig>& blend) {
    TrainConfig t = config.train;
    t.seed = seed;
    AnnotatorConfig a = config.annotator;
    a.seed = seed;
    return TrainPolicy(train, eval, t, blend, a).final_eval;
  };
  std::vector<CompareRow> rows;
  for (std::uint64_t s : config.seeds) {
    rows.push_back({"rlhf", std::nullopt, s, run(s, std::nullopt)});
  }
  for (double l : config.lambdas) {
    for (std::uint64_t s : config.seeds) {
      rows.push_back({"rllf", l, s, run(s, BlendConfig{l, config.blend.mode})});
    }
  }
  return rows;
}

std::string ComparisonCsv(const std::vector<CompareRow>& rows) {
  // Arms in first-seen order; seeds likewise.
  std::vector<std::pair<std::string, std::optional<double>>> arms;
  std::vector<std::uint64_t> seeds;
  for (const CompareRow& r : rows) {
    const auto arm = std::make_pair(r.arm, r.lambda);
    if (std::find(arms.begin(), arms.end(), arm) == arms.end()) arms.push_back(arm);
    if (std::find(seeds.begin(), seeds.end(), r.seed) == seeds.end()) seeds.push_back(r.seed);
  }
  std::string out = "arm,lambda";
  for (std::uint64_t s : seeds) out += ",accuracy_seed_" + std::to_string(s);
  out += ",mean_accuracy,mean_logic_reward,mean_satisfaction\n";
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return std::string(buf);
  };
  for (const auto& [arm, lambda] : arms) {
    out += arm + ",";
    if (lambda) out += num(*lambda);
    double acc = 0.0, logic = 0.0, sat = 0.0;
    std::size_t n = 0;
    for (std::uint64_t s : seeds) {
      out += ",";
      for (const CompareRow& r : rows) {
        if (r.arm != arm || r.lambda != lambda || r.seed != s) continue;
        out += num(r.final_eval.logical_accuracy);
        acc += r.final_eval.logical_accuracy;
        logic += r.final_eval.mean_logic_reward;
        sat += r.final_eval.simulated_satisfaction;
        ++n;
        break;
      }
    }
    const double d = n ? static_cast<double>(n) : 1.0;
    out += "," + num(acc / d) + "," + num(logic / d) + "," + num(sat / d) + "\n";
  }
  return out;
}

}  // namespace rllf
