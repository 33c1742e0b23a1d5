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

#include "rllf/taskgen.h"

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <span>
#include <string_view>

#include "rllf/errors.h"
#include "rllf/oracle.h"
#include "rllf/parser.h"
#include "rllf/random.h"

namespace rllf {
namespace {

// Cosmetic legal vocabulary for predicate and party names.
constexpr std::array<std::string_view, 32> kPredicateWords = {
    "obligation", "breach",      "liable",    "damages",    "consent",
    "minor",      "void",        "valid",     "notice",     "excused",
    "performed",  "owner",       "tenant",    "payment",    "default",
    "guarantee",  "terminated",  "remedy",    "negligent",  "injured",
    "employer",   "contractor",  "licensed",  "forfeit",    "rescinded",
    "assigned",   "registered",  "deposit",   "fraud",      "duress",
    "accepted",   "offered"};

constexpr std::array<std::string_view, 12> kPartyWords = {
    "acme", "globex", "alice", "bob", "carol", "dave",
    "initech", "umbrella", "erin", "frank", "grace", "hooli"};

std::string Indexed(std::string_view word, std::size_t round) {
  std::string out(word);
  if (round > 0) out += std::to_string(round);
  return out;
}

std::vector<std::string> PickNames(Rng& rng, std::span<const std::string_view> words,
                                   int count) {
  std::vector<std::string> pool;
  for (std::size_t round = 0; pool.size() < static_cast<std::size_t>(count); ++round) {
    for (std::string_view w : words) pool.push_back(Indexed(w, round));
  }
  rng.Shuffle(std::span<std::string>(pool));
  pool.resize(count);
  return pool;
}

struct Draft {
  Program program;
  Term query;
  int depth = 0;
  int negations = 0;
};

Draft DraftProgram(const GenConfig& config, Rng& rng) {
  const int n_preds = config.n_predicates;
  const int depth = std::min(config.max_rule_body > 0 ? config.rule_depth : 0,
                             n_preds - 1);
  const std::vector<std::string> preds =
      PickNames(rng, kPredicateWords, n_preds);
  const std::vector<std::string> parties =
      PickNames(rng, kPartyWords, config.n_constants);

  // One predicate per level first, the rest spread at random.
  std::vector<int> level(n_preds);
  for (int p = 0; p < n_preds; ++p) {
    level[p] = p <= depth ? p : rng.UniformInt(0, depth);
  }
  std::vector<std::vector<int>> by_level(depth + 1);
  for (int p = 0; p < n_preds; ++p) by_level[level[p]].push_back(p);

  auto atom = [&](int p, int c) {
    return Term::Compound(preds[p], {Term::Constant(parties[c])});
  };
  auto pick_from = [&](const std::vector<int>& v) {
    return v[rng.UniformIndex(v.size())];
  };

  Draft d;
  d.depth = depth;
  std::vector<Clause> clauses;
  for (int p : by_level[0]) {
    for (int c = 0; c < config.n_constants; ++c) {
      if (rng.Bernoulli(0.5)) clauses.push_back(Clause{atom(p, c), {}});
    }
  }
  for (int k = 1; k <= depth; ++k) {
    std::vector<int> lower;
    for (int j = 0; j < k; ++j) {
      lower.insert(lower.end(), by_level[j].begin(), by_level[j].end());
    }
    for (int p : by_level[k]) {
      for (int c = 0; c < config.n_constants; ++c) {
        // The top level always gets rules so queries have something to prove.
        if (k < depth && !rng.Bernoulli(0.7)) continue;
        Clause rule{atom(p, c), {}};
        const int len = rng.UniformInt(1, config.max_rule_body);
        for (int b = 0; b < len; ++b) {
          // The first literal comes from the level right below so the
          // designed derivation depth is realized.
          const int bp = b == 0 ? pick_from(by_level[k - 1]) : pick_from(lower);
          const int bc = rng.Bernoulli(0.2)
                             ? static_cast<int>(rng.UniformIndex(config.n_constants))
                             : c;
          const bool neg = b > 0 && rng.Bernoulli(config.negation_rate);
          if (neg) ++d.negations;
          rule.body.push_back(Literal{neg, atom(bp, bc)});
        }
        clauses.push_back(std::move(rule));
      }
    }
  }
  rng.Shuffle(std::span<Clause>(clauses));
  d.program.clauses = std::move(clauses);
  d.query = atom(pick_from(by_level[depth]),
                 static_cast<int>(rng.UniformIndex(config.n_constants)));
  return d;
}

std::string InstanceId(std::uint64_t seed) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "task-%016llx",
                static_cast<unsigned long long>(seed));
  return buf;
}

}  // namespace

void GenConfig::Validate() const {
  if (n_predicates < 1) throw InvalidConfig("n_predicates must be >= 1");
  if (n_constants < 1) throw InvalidConfig("n_constants must be >= 1");
  if (max_rule_body < 0) throw InvalidConfig("max_rule_body must be >= 0");
  if (rule_depth < 0) throw InvalidConfig("rule_depth must be >= 0");
  if (!(negation_rate >= 0.0 && negation_rate <= 1.0)) {
    throw InvalidConfig("negation_rate must be in [0, 1]");
  }
  if (!(balance >= 0.0 && balance <= 1.0)) {
    throw InvalidConfig("balance must be in [0, 1]");
  }
}

TaskInstance GenerateInstance(const GenConfig& config, std::uint64_t seed) {
  config.Validate();
  Rng rng(seed);
  const VerdictValue target = rng.Bernoulli(config.balance)
                                  ? VerdictValue::kEntailed
                                  : VerdictValue::kNotEntailed;
  for (int attempt = 0; attempt < kMaxGenerationAttempts; ++attempt) {
    Draft d = DraftProgram(config, rng);
    if (!IsStratified(d.program)) continue;
    if (BruteForceEntailment(d.program, d.query) != target) continue;

    TaskInstance inst;
    inst.id = InstanceId(seed);
    inst.program = ParseProgram(ToString(d.program));
    inst.query = std::move(d.query);
    inst.gold = target;
    inst.meta = TaskMeta{d.depth, d.negations, seed};
    return inst;
  }
  throw GenerationExhausted("no instance with gold " +
                            std::string(ToString(target)) + " after " +
                            std::to_string(kMaxGenerationAttempts) +
                            " attempts (seed " + std::to_string(seed) + ")");
}

std::vector<TaskInstance> GenerateDataset(const GenConfig& config,
                                          std::size_t n, std::uint64_t seed) {
  std::vector<TaskInstance> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    try {
      out.push_back(GenerateInstance(config, SubSeed(seed, i)));
    } catch (const GenerationExhausted& e) {
      throw GenerationExhausted("instance " + std::to_string(i) + ": " +
                                e.what());
    }
  }
  return out;
}

InstanceCheck ValidateInstance(const TaskInstance& instance) {
  InstanceCheck check;
  Program program;
  try {
    program = ParseProgram(instance.program.source_text);
  } catch (const SyntaxError& e) {
    check.diagnostic = std::string("program: ") + e.what();
    return check;
  }
  if (!program.IsGround()) {
    check.diagnostic = "program contains variables";
    return check;
  }
  if (!IsStratified(program)) {
    check.diagnostic = "program is not stratified";
    return check;
  }
  if (!instance.query.IsGround()) {
    check.diagnostic = "query contains variables";
    return check;
  }
  const VerdictValue truth = BruteForceEntailment(program, instance.query);
  if (truth != instance.gold) {
    check.diagnostic = std::string("gold is ") + ToString(instance.gold) +
                       " but the oracle says " + ToString(truth);
    return check;
  }
  check.ok = true;
  return check;
}

nlohmann::json ToJson(const TaskInstance& instance) {
  return nlohmann::json{
      {"id", instance.id},
      {"program_text", instance.program.source_text},
      {"query_text", instance.query_text()},
      {"gold", ToString(instance.gold)},
      {"meta",
       {{"rule_depth", instance.meta.rule_depth},
        {"negation_count", instance.meta.negation_count},
        {"seed", instance.meta.seed}}}};
}

TaskInstance InstanceFromJson(const nlohmann::json& j) {
  TaskInstance inst;
  inst.id = j.at("id").get<std::string>();
  inst.program = ParseProgram(j.at("program_text").get<std::string>());
  inst.query = ParseQuery(j.at("query_text").get<std::string>());
  const auto gold = ParseVerdictValue(j.at("gold").get<std::string>());
  if (!gold) throw Error("instance " + inst.id + ": bad gold value");
  inst.gold = *gold;
  if (j.contains("meta")) {
    const auto& m = j.at("meta");
    inst.meta.rule_depth = m.value("rule_depth", 0);
    inst.meta.negation_count = m.value("negation_count", 0);
    inst.meta.seed = m.value("seed", std::uint64_t{0});
  }
  return inst;
}

void WriteDataset(const std::string& path,
                  const std::vector<TaskInstance>& instances) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");
  for (const TaskInstance& inst : instances) out << ToJson(inst).dump() << "\n";
  if (!out) throw IoError("write failed: " + path);
}

std::vector<TaskInstance> ReadDataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::vector<TaskInstance> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(InstanceFromJson(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw Error(path + ":" + std::to_string(line_no) + ": " + e.what());
    } catch (const SyntaxError& e) {
      throw Error(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace rllf
