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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.h"
#include "json.hpp"
#include "random_programs.h"
#include "rllf/cli.h"
#include "rllf/errors.h"
#include "rllf/experiment.h"
#include "rllf/oracle.h"
#include "rllf/reward_model.h"
#include "rllf/rllf_trainer.h"
#include "rllf/transcript.h"

namespace rllf {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), format, args...);
  return buf;
}

// --- engine against the oracle --------------------------------------------

struct EngineCorpusResult {
  std::size_t programs = 0, queries = 0, agree = 0, proofs = 0, sound = 0;
};

EngineCorpusResult RunEngineCorpus() {
  EngineCorpusResult r;
  Rng rng(20260101);
  for (int n = 0; n < 500; ++n) {
    const auto c = testing::RandomGroundProgram(rng, 10);
    ++r.programs;
    for (const Term& q : c.atoms) {
      ++r.queries;
      const Verdict v = Solve(c.program, q);
      r.agree += v.value == BruteForceEntailment(c.program, q);
      if (v.proof) {
        ++r.proofs;
        const ChainReport rep = VerifyChain(c.program, q, *v.proof);
        r.sound += rep.fully_valid() && rep.answer_consistent;
      }
    }
  }
  return r;
}

EngineCorpusResult engine_corpus;
double engine_seconds = 0.0;

Outcome EngineOracle() {
  const auto t0 = std::chrono::steady_clock::now();
  engine_corpus = RunEngineCorpus();
  engine_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const auto& r = engine_corpus;
  const bool ok = r.programs >= 500 && r.queries >= 5 * r.programs && r.agree == r.queries &&
                  engine_seconds < 10.0;
  return {ok, Fmt("%zu/%zu verdicts agree over %zu programs, corpus time %.2f s (limit 10 s)",
                  r.agree, r.queries, r.programs, engine_seconds)};
}

Outcome ProofSoundness() {
  const auto& r = engine_corpus;
  return {r.proofs > 0 && r.sound == r.proofs,
          Fmt("%zu/%zu proofs verify with every step valid and a consistent answer",
              r.sound, r.proofs)};
}

// --- Bradley-Terry properties and gradients ---------------------------------

Outcome BradleyTerry() {
  Rng rng(77);
  const auto data = GenerateDataset(GenConfig{}, 40, 5);
  double worst_complement = 0.0, worst_shift = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double scale = i % 10 == 0 ? 200.0 : 10.0;
    const double a = scale * (rng.Uniform01() - 0.5);
    const double b = scale * (rng.Uniform01() - 0.5);
    worst_complement = std::max(
        worst_complement,
        std::abs(PreferenceProbability(a, b) + PreferenceProbability(b, a) - 1.0));
  }
  // Two equal-length responses; a constant added to every step reward
  // (through the bias weight) must not move the preference probability.
  int shift_cases = 0;
  while (shift_cases < 1000) {
    const TaskInstance& inst = data[rng.UniformIndex(data.size())];
    const PolicyParams p = testing::RandomPolicy(rng, 1.0);
    const Response s1 = SampleResponse(p, inst, rng.NextU64());
    Response s2;
    bool found = false;
    for (int k = 0; k < 40 && !found; ++k) {
      s2 = SampleResponse(p, inst, rng.NextU64());
      found = s2.length() == s1.length();
    }
    if (!found) continue;
    RewardParams w;
    w.weights = testing::RandomPolicy(rng, 1.0).weights;
    RewardParams shifted = w;
    shifted.weights[kBias] += 5.0 * (rng.Uniform01() - 0.5);
    const double before =
        PreferenceProbability(SegmentReturn(w, s1, inst), SegmentReturn(w, s2, inst));
    const double after = PreferenceProbability(SegmentReturn(shifted, s1, inst),
                                               SegmentReturn(shifted, s2, inst));
    worst_shift = std::max(worst_shift, std::abs(before - after));
    ++shift_cases;
  }

  // Central differences; relative error |g - fd| / max(1, |fd|) per
  // coordinate.
  const double h = 1e-6;
  double worst_bt = 0.0;
  for (int i = 0; i < 100; ++i) {
    const std::size_t n = 1 + rng.UniformIndex(20);
    std::vector<BtExample> ex;
    for (std::size_t k = 0; k < n; ++k) {
      const double m = rng.Uniform01();
      const Mu mu = k % 3 == 0 ? Mu{m, 1.0 - m} : (rng.Bernoulli(0.5) ? kPreferFirst : kPreferSecond);
      ex.push_back(BtExample{testing::RandomPolicy(rng, 3.0).weights,
                             testing::RandomPolicy(rng, 3.0).weights, mu});
    }
    RewardParams w;
    w.weights = testing::RandomPolicy(rng, 0.5).weights;
    const double l2 = rng.Bernoulli(0.5) ? 0.0 : 0.01;
    const FeatureVector g = BtLossGradient(w, ex, l2);
    for (int d = 0; d < kFeatureDim; ++d) {
      RewardParams plus = w, minus = w;
      plus.weights[d] += h;
      minus.weights[d] -= h;
      const double fd = (BtLoss(plus, ex, l2) - BtLoss(minus, ex, l2)) / (2 * h);
      worst_bt = std::max(worst_bt, std::abs(g[d] - fd) / std::max(1.0, std::abs(fd)));
    }
  }
  double worst_lp = 0.0;
  for (int i = 0; i < 100; ++i) {
    const TaskInstance& inst = data[rng.UniformIndex(data.size())];
    PolicyParams p = testing::RandomPolicy(rng, 1.5);
    if (i % 4 == 0) p.temperature = 0.5 + rng.Uniform01();
    const Response r = SampleResponse(p, inst, rng.NextU64());
    const FeatureVector g = LogProbGradient(p, r, inst);
    for (int d = 0; d < kFeatureDim; ++d) {
      PolicyParams plus = p, minus = p;
      plus.weights[d] += h;
      minus.weights[d] -= h;
      const double fd = (LogProb(plus, r, inst) - LogProb(minus, r, inst)) / (2 * h);
      worst_lp = std::max(worst_lp, std::abs(g[d] - fd) / std::max(1.0, std::abs(fd)));
    }
  }
  const bool ok = worst_complement <= 1e-12 && worst_shift <= 1e-12 && worst_bt <= 1e-5 &&
                  worst_lp <= 1e-5;
  return {ok, Fmt("complement err %.1e, shift err %.1e (1000 cases each); gradient rel err "
                  "bt %.1e, log-prob %.1e (100 cases each, limit 1e-5)",
                  worst_complement, worst_shift, worst_bt, worst_lp)};
}

// --- reward model recovery --------------------------------------------------

Outcome RewardRecovery() {
  const auto t0 = std::chrono::steady_clock::now();
  FeatureVector truth = FeatureVector::Zero(kFeatureDim);
  Rng rng(404);
  for (int i = 1; i < kFeatureDim; ++i) truth[i] = 2.0 * rng.Uniform01() - 1.0;
  const auto data = GenerateDataset(GenConfig{}, 100, 41);
  const auto train = testing::PlantedExamples(data, truth, 500, 0.5, 1);
  const auto held_out = testing::PlantedExamples(data, truth, 200, 0.5, 2);
  const RewardTrainResult r = TrainRewardModel(train, TrainHyper{});
  const double acc = PairwiseAccuracy(r.params, held_out);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {acc >= 0.90 && secs < 60.0,
          Fmt("held-out pairwise accuracy %.3f (need >= 0.90), %.2f s (limit 60 s)", acc,
              secs)};
}

// --- policy gradient on a two-armed bandit ---------------------------------

Outcome Bandit() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<TaskInstance> data = {testing::EntailedInstance()};
  const InstanceIndex index = IndexInstances(data);
  const TaskInstance& inst = data[0];
  std::string per_seed;
  bool ok = true;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Rng rng(seed);
    PolicyParams p;
    const State s0 = InitialState(inst);
    // A zero step budget leaves exactly the two answers.
    const auto arms = CandidateActions(s0, inst, 0);
    const std::size_t good = arms[0].answer == VerdictValue::kEntailed ? 0 : 1;
    double prob = 0.0;
    int updates = 0;
    while (updates < 2000) {
      std::vector<Response> batch;
      std::vector<double> rewards;
      for (int k = 0; k < 8; ++k) {
        batch.push_back(SampleResponse(p, inst, rng.NextU64(), 0));
        rewards.push_back(batch.back().answer() == VerdictValue::kEntailed ? 1.0 : 0.0);
      }
      p = ReinforceUpdate(p, batch, rewards, BaselineKind::kBatchMean, 0.05, index);
      ++updates;
      prob = ActionProbabilities(p, s0, arms, inst)[good];
      if (prob >= 0.95) break;
    }
    ok = ok && prob >= 0.95;
    per_seed += Fmt("%s%d", per_seed.empty() ? "" : ",", updates);
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {ok && secs < 30.0,
          Fmt("greedy arm probability >= 0.95 after %s updates on seeds 1-5, %.2f s",
              per_seed.c_str(), secs)};
}

// --- trainer experiments -----------------------------------------------------

ExperimentConfig HeadlineConfig(double bias) {
  ExperimentConfig c;
  c.annotator.bias = bias;
  c.annotator.noise = 0.05;
  c.train.iterations = 200;
  c.train.rollouts_per_iter = 64;
  c.n_eval = 200;
  c.blend = BlendConfig{0.5, BlendMode::kDatasetMix};
  c.lambdas = {0.5};
  c.seeds = {1, 2, 3, 4, 5};
  return c;
}

Outcome Degeneracy() {
  const ExperimentConfig c = HeadlineConfig(0.8);
  const auto train = GenerateDataset(c.gen, c.n_train, SubSeed(0, 0));
  const auto eval = GenerateBalancedDataset(c.gen, c.n_eval, SubSeed(0, 1));
  bool ok = true;
  for (std::uint64_t seed : {1, 2}) {
    TrainConfig t = c.train;
    t.seed = seed;
    AnnotatorConfig a = c.annotator;
    a.seed = seed;
    const auto base = TrainPolicy(train, eval, t, std::nullopt, a);
    const auto mix = TrainPolicy(train, eval, t, BlendConfig{0.0, BlendMode::kDatasetMix}, a);
    ok = ok && SeriesCsv(base) == SeriesCsv(mix) && !base.series.empty();
  }
  return {ok, "lambda = 0 dataset_mix series byte-identical to RLHF on seeds 1, 2 "
              "(200 iterations)"};
}

Outcome BiasMitigation() {
  const auto t0 = std::chrono::steady_clock::now();
  auto gap = [](const std::vector<CompareRow>& rows, int* wins, std::string* table) {
    std::map<std::uint64_t, double> rlhf, rllf;
    for (const CompareRow& r : rows) {
      (r.arm == "rlhf" ? rlhf : rllf)[r.seed] = r.final_eval.logical_accuracy;
    }
    double sum = 0.0;
    *wins = 0;
    for (const auto& [seed, base] : rlhf) {
      sum += rllf.at(seed) - base;
      *wins += rllf.at(seed) > base;
      *table += Fmt(" s%llu %.3f/%.3f", static_cast<unsigned long long>(seed), base,
                    rllf.at(seed));
    }
    return sum / static_cast<double>(rlhf.size());
  };
  int wins_biased = 0, wins_clean = 0;
  std::string biased_table, clean_table;
  const double biased = gap(RunComparison(HeadlineConfig(0.8), 0), &wins_biased, &biased_table);
  const double clean = gap(RunComparison(HeadlineConfig(0.0), 0), &wins_clean, &clean_table);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool ok = wins_biased >= 4 && biased >= 0.05 && std::abs(clean) <= 0.03 &&
                  secs < 600.0;
  return {ok, Fmt("beta 0.8: RLLF > RLHF on %d/5 seeds (need >= 4), mean gain %+.1f pts "
                  "(need >= +5) [rlhf/rllf:%s]; beta 0: mean gap %+.1f pts (need within "
                  "+-3) [%s]; %.0f s (limit 600 s)",
                  wins_biased, 100 * biased, biased_table.c_str(), 100 * clean,
                  clean_table.c_str() + 1, secs)};
}

// --- command line -------------------------------------------------------------

std::string Slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::map<std::string, std::string> CliPipeline(const fs::path& dir) {
  fs::remove_all(dir);
  fs::create_directories(dir);
  auto p = [&](const std::string& n) { return (dir / n).string(); };
  std::ostringstream out, err;
  auto run = [&](std::vector<std::string> args) {
    if (RunCli(args, out, err) != 0) throw Error("command failed: " + args[0] + ": " + err.str());
  };
  const std::vector<std::string> small = {"--set", "iterations=10", "--set", "n_train=20",
                                          "--set", "n_eval=20"};
  auto plus_small = [&](std::vector<std::string> a) {
    a.insert(a.end(), small.begin(), small.end());
    return a;
  };
  run({"gen-data", "--n", "40", "--seed", "11", "--out", p("train.jsonl")});
  run({"gen-data", "--n", "40", "--seed", "12", "--balanced", "--out", p("eval.jsonl")});
  run({"gen-pairs", "--data", p("train.jsonl"), "--n", "60", "--seed", "13", "--label",
       "simulated", "--records", p("records.jsonl"), "--set", "bias=0.8", "--out",
       p("pairs.jsonl")});
  run({"train-reward", "--data", p("train.jsonl"), "--pairs", p("pairs.jsonl"), "--records",
       p("records.jsonl"), "--seed", "14", "--out", p("reward.json")});
  run(plus_small({"train-policy", "--mode", "rlhf", "--data", p("train.jsonl"), "--eval",
                  p("eval.jsonl"), "--seed", "15", "--series", p("rlhf.csv"), "--out",
                  p("rlhf.json")}));
  run(plus_small({"train-policy", "--mode", "rllf", "--lambda", "0.5", "--blend-mode",
                  "reward_blend", "--data", p("train.jsonl"), "--eval", p("eval.jsonl"),
                  "--seed", "15", "--out", p("rllf.json")}));
  run({"evaluate", "--policy", p("rllf.json"), "--data", p("eval.jsonl"), "--out",
       p("metrics.csv")});
  run(plus_small({"compare", "--set", "seeds=1,2", "--out", p("compare.csv")}));
  const TaskInstance inst = testing::EntailedInstance();
  std::ofstream(p("program.pl")) << inst.program.source_text;
  std::ofstream(p("transcripts.jsonl"))
      << TranscriptToJson(testing::OracleResponse(inst), inst).dump() << "\n";
  run({"verify", "--program", p("program.pl"), "--transcripts", p("transcripts.jsonl"),
       "--out", p("verify.jsonl")});
  std::map<std::string, std::string> artifacts;
  for (const auto& e : fs::directory_iterator(dir)) {
    const std::string name = e.path().filename().string();
    if (name.find(".manifest.json") == std::string::npos) artifacts[name] = Slurp(e.path());
  }
  return artifacts;
}

Outcome Determinism() {
  const fs::path base = fs::temp_directory_path() / "rllf_acceptance_determinism";
  const auto a = CliPipeline(base / "a");
  const auto b = CliPipeline(base / "b");
  std::size_t same = 0, manifests = 0;
  for (const auto& [name, bytes] : a) {
    same += b.count(name) && b.at(name) == bytes;
  }
  for (const auto& e : fs::directory_iterator(base / "a")) {
    manifests += e.path().string().ends_with(".manifest.json");
  }
  fs::remove_all(base);
  return {same == a.size() && a.size() == b.size() && manifests >= 8,
          Fmt("%zu/%zu artifacts byte-identical across reruns of 8 commands, %zu manifests",
              same, a.size(), manifests)};
}

Outcome ParsePenalty() {
  const fs::path dir = fs::temp_directory_path() / "rllf_acceptance_verify";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const TaskInstance inst = testing::EntailedInstance();
  std::ofstream((dir / "program.pl").string()) << inst.program.source_text;
  json good = TranscriptToJson(testing::OracleResponse(inst), inst);
  json bad = good;
  bad["steps"][1]["goal"] = "breach(acme";
  std::ofstream((dir / "t.jsonl").string()) << good.dump() << "\n" << bad.dump() << "\n";
  std::ostringstream out, err;
  const int code = RunCli({"verify", "--program", (dir / "program.pl").string(),
                           "--transcripts", (dir / "t.jsonl").string(), "--out",
                           (dir / "v.jsonl").string()},
                          out, err);
  std::istringstream in(Slurp((dir / "v.jsonl").string()));
  std::string l1, l2;
  std::getline(in, l1);
  std::getline(in, l2);
  fs::remove_all(dir);
  if (code != 0 || l2.empty()) return {false, "verify failed: " + err.str()};
  const json r = json::parse(l2);
  const double reward = r.at("logic_reward").get<double>();
  const bool ok = json::parse(l1).at("logic_reward").get<double>() == 1.0 && reward == 0.0 &&
                  r.at("error").at("type") == "SyntaxError" &&
                  err.str().find(":2: SyntaxError at line 1, column 12") != std::string::npos;
  std::string diag = err.str();
  if (!diag.empty() && diag.back() == '\n') diag.pop_back();
  diag = diag.substr(diag.find_last_of('/') + 1);
  return {ok, Fmt("malformed line scored %.1f; diagnostic \"%s\"", reward, diag.c_str())};
}

}  // namespace
}  // namespace rllf

int main() {
  using namespace rllf;
  struct Criterion {
    const char* name;
    std::function<Outcome()> check;
  };
  const std::vector<Criterion> criteria = {
      {"engine-oracle equivalence", EngineOracle},
      {"proof soundness", ProofSoundness},
      {"bradley-terry properties", BradleyTerry},
      {"reward-model recovery", RewardRecovery},
      {"policy-gradient sanity", Bandit},
      {"rlhf degeneracy", Degeneracy},
      {"bias-mitigation direction", BiasMitigation},
      {"cli determinism", Determinism},
      {"parse-penalty path", ParsePenalty},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !o.pass;
    std::printf("%s  %-27s %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str(),
                secs);
    std::fflush(stdout);
  }
  std::printf("%zu criteria, %d failed\n", criteria.size(), failed);
  return failed == 0 ? 0 : 1;
}
