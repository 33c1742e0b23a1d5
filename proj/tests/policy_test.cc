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

#include <cmath>
#include <vector>

#include "gtest/gtest.h"
#include "rllf/engine.h"
#include "rllf/errors.h"
#include "rllf/parser.h"
#include "rllf/policy.h"
#include "rllf/random.h"
#include "rllf/taskgen.h"
#include "rllf/transcript.h"

namespace rllf {
namespace {

TaskInstance SmallInstance() {
  TaskInstance inst;
  inst.id = "small";
  inst.program = ParseProgram(
      "liable(acme) :- breach(acme), \\+ excused(acme).\n"
      "breach(acme).\n"
      "excused(bob).\n");
  inst.query = ParseQuery("liable(acme).");
  inst.gold = VerdictValue::kEntailed;
  return inst;
}

PolicyParams RandomParams(Rng& rng, double scale) {
  PolicyParams p;
  for (int i = 0; i < kFeatureDim; ++i) p.weights[i] = scale * (2 * rng.Uniform01() - 1);
  return p;
}

// Actions that follow an engine proof.
std::vector<Action> ActionsFromProof(const ProofChain& chain) {
  std::vector<Action> out;
  for (const ProofStep& s : chain.steps) {
    out.push_back(s.clause_index ? Action::ApplyClause(*s.clause_index)
                                 : Action::CheckNegation());
  }
  out.push_back(Action::Answer(chain.final_answer));
  return out;
}

TEST(FeaturizeTest, FixedDimensionAndBias) {
  const TaskInstance inst = SmallInstance();
  const State s = InitialState(inst);
  for (const Action& a : CandidateActions(s, inst)) {
    const FeatureVector phi = Featurize(s, a, inst);
    ASSERT_EQ(phi.size(), kFeatureDim);
    EXPECT_EQ(phi[kBias], 1.0);
  }
}

TEST(FeaturizeTest, HeadUnifiesFlag) {
  const TaskInstance inst = SmallInstance();
  const State s = InitialState(inst);
  EXPECT_EQ(Featurize(s, Action::ApplyClause(0), inst)[kHeadUnifies], 1.0);
  EXPECT_EQ(Featurize(s, Action::ApplyClause(1), inst)[kHeadUnifies], 0.0);
}

TEST(FeaturizeTest, ReplayReproducesFeatures) {
  const TaskInstance inst = GenerateInstance(GenConfig{}, 17);
  Rng rng(4);
  const PolicyParams params = RandomParams(rng, 1.0);
  const Response r = SampleResponse(params, inst, 123);
  std::vector<Action> actions;
  for (const auto& step : r.steps) actions.push_back(step.action);
  const Response again = ReplayActions(inst, actions);
  ASSERT_EQ(again.steps.size(), r.steps.size());
  for (std::size_t i = 0; i < r.steps.size(); ++i) {
    EXPECT_EQ(Featurize(r.steps[i].state, r.steps[i].action, inst),
              Featurize(again.steps[i].state, again.steps[i].action, inst));
  }
}

TEST(CandidateActionsTest, AnswersAlwaysLast) {
  const TaskInstance inst = SmallInstance();
  const auto c = CandidateActions(InitialState(inst), inst);
  ASSERT_EQ(c.size(), inst.program.size() + 3);
  EXPECT_EQ(c[c.size() - 2], Action::Answer(VerdictValue::kEntailed));
  EXPECT_EQ(c.back(), Action::Answer(VerdictValue::kNotEntailed));
}

TEST(CandidateActionsTest, BudgetForcesAnswer) {
  const TaskInstance inst = SmallInstance();
  State s = InitialState(inst);
  s.steps_taken = 3;
  const auto c = CandidateActions(s, inst, 4);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_TRUE(c[0].is_terminal());
}

TEST(SoftmaxTest, HandExample) {
  Eigen::VectorXd s(2);
  s << std::log(2.0), 0.0;
  const Eigen::VectorXd p = Softmax(s);
  EXPECT_NEAR(p[0], 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(p[1], 1.0 / 3.0, 1e-15);
}

TEST(SoftmaxTest, ShiftInvariant) {
  Eigen::VectorXd s(4);
  s << 0.3, -1.2, 2.5, 0.0;
  const Eigen::VectorXd shifted = (s.array() + 7.0).matrix();
  EXPECT_TRUE(Softmax(s).isApprox(Softmax(shifted), 1e-14));
}

TEST(ActionProbabilitiesTest, ZeroWeightsUniform) {
  const TaskInstance inst = SmallInstance();
  const State s = InitialState(inst);
  const auto c = CandidateActions(s, inst);
  const Eigen::VectorXd p = ActionProbabilities(PolicyParams{}, s, c, inst);
  for (Eigen::Index i = 0; i < p.size(); ++i) EXPECT_NEAR(p[i], 1.0 / c.size(), 1e-15);
}

TEST(ActionProbabilitiesTest, ValidDistributionOnReachableStates) {
  const TaskInstance inst = GenerateInstance(GenConfig{}, 21);
  Rng rng(8);
  for (int k = 0; k < 20; ++k) {
    const PolicyParams params = RandomParams(rng, 3.0);
    const Response r = SampleResponse(params, inst, k);
    for (const auto& step : r.steps) {
      const auto c = CandidateActions(step.state, inst);
      const Eigen::VectorXd p = ActionProbabilities(params, step.state, c, inst);
      EXPECT_NEAR(p.sum(), 1.0, 1e-12);
      EXPECT_GT(p.minCoeff(), 0.0);
    }
  }
}

TEST(SampleResponseTest, BoundedAndTerminal) {
  const TaskInstance inst = GenerateInstance(GenConfig{}, 2);
  Rng rng(1);
  for (int k = 0; k < 50; ++k) {
    PolicyParams params = RandomParams(rng, 2.0);
    params.weights[kApplyClause] = 3.0;  // favour long chains
    const Response r = SampleResponse(params, inst, k, 6);
    ASSERT_LE(r.length(), 6u);
    for (std::size_t i = 0; i + 1 < r.steps.size(); ++i) {
      EXPECT_FALSE(r.steps[i].action.is_terminal());
    }
    EXPECT_TRUE(r.steps.back().action.is_terminal());
  }
}

TEST(SampleResponseTest, Deterministic) {
  const TaskInstance inst = GenerateInstance(GenConfig{}, 2);
  Rng rng(1);
  const PolicyParams params = RandomParams(rng, 1.0);
  EXPECT_EQ(SampleResponse(params, inst, 77), SampleResponse(params, inst, 77));
}

TEST(SampleResponseTest, AnswerHeavyParamsGiveLengthOne) {
  const TaskInstance inst = GenerateInstance(GenConfig{}, 2);
  PolicyParams params;
  params.weights[kAnswerEntailed] = 20.0;
  int short_count = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const Response r = SampleResponse(params, inst, seed);
    short_count += r.length() == 1 && r.answer() == VerdictValue::kEntailed;
  }
  EXPECT_GE(short_count, 990);
}

TEST(SampleResponseTest, InvalidStepMarkedInRawText) {
  const TaskInstance inst = SmallInstance();
  const Response r = ReplayActions(
      inst, {Action::ApplyClause(2), Action::Answer(VerdictValue::kEntailed)});
  EXPECT_NE(r.raw_text.find("[invalid-step]"), std::string::npos);
}

TEST(ResponseToChainTest, MirroredProofValidates) {
  const TaskInstance inst = SmallInstance();
  const Verdict v = Solve(inst.program, inst.query);
  ASSERT_TRUE(v.proof.has_value());
  const Response r = ReplayActions(inst, ActionsFromProof(*v.proof));
  const ChainReport report =
      VerifyChain(inst.program, inst.query, ResponseToChain(r, inst));
  EXPECT_TRUE(report.fully_valid());
  EXPECT_TRUE(report.answer_consistent);
}

TEST(ResponseToChainTest, MirroredProofsOnGeneratedInstances) {
  const auto data = GenerateDataset(GenConfig{}, 30, 5);
  for (const TaskInstance& inst : data) {
    const Verdict v = Solve(inst.program, inst.query);
    if (!v.proof) continue;
    const Response r = ReplayActions(inst, ActionsFromProof(*v.proof));
    const ChainReport report =
        VerifyChain(inst.program, inst.query, ResponseToChain(r, inst));
    EXPECT_TRUE(report.fully_valid()) << inst.id;
    EXPECT_TRUE(report.answer_consistent) << inst.id;
  }
}

TEST(ResponseToChainTest, AnswerOnlyHasNoSteps) {
  const TaskInstance inst = SmallInstance();
  const Response r = ReplayActions(inst, {Action::Answer(VerdictValue::kNotEntailed)});
  const ProofChain chain = ResponseToChain(r, inst);
  EXPECT_TRUE(chain.steps.empty());
  EXPECT_EQ(chain.final_answer, VerdictValue::kNotEntailed);
}

TEST(ResponseToChainTest, NonsenseStepIsFlagged) {
  const TaskInstance inst = SmallInstance();
  const Response r = ReplayActions(
      inst, {Action::ApplyClause(0), Action::ApplyClause(2),
             Action::Answer(VerdictValue::kEntailed)});
  const ChainReport report =
      VerifyChain(inst.program, inst.query, ResponseToChain(r, inst));
  ASSERT_TRUE(report.first_invalid_index.has_value());
  EXPECT_EQ(*report.first_invalid_index, 1u);
  EXPECT_EQ(report.valid_steps, 1u);
}

TEST(LogProbGradientTest, SingleCandidateGivesZero) {
  Eigen::MatrixXd feats(1, kFeatureDim);
  feats.setRandom();
  PolicyParams params;
  params.weights.setRandom();
  EXPECT_EQ(StepLogProbGradient(params, feats, 0).norm(), 0.0);
}

TEST(LogProbGradientTest, MatchesFiniteDifferences) {
  const auto data = GenerateDataset(GenConfig{}, 10, 9);
  Rng rng(31);
  const double h = 1e-5;
  for (int trial = 0; trial < 30; ++trial) {
    const TaskInstance& inst = data[trial % data.size()];
    PolicyParams params = RandomParams(rng, 1.5);
    params.temperature = trial % 3 == 0 ? 0.7 : 1.0;
    const Response r = SampleResponse(params, inst, rng.NextU64());
    const FeatureVector g = LogProbGradient(params, r, inst);
    for (int k = 0; k < kFeatureDim; ++k) {
      PolicyParams up = params, down = params;
      up.weights[k] += h;
      down.weights[k] -= h;
      const double fd = (LogProb(up, r, inst) - LogProb(down, r, inst)) / (2 * h);
      EXPECT_NEAR(g[k], fd, 1e-5 * std::max(1.0, std::abs(fd)))
          << "trial " << trial << " feature " << k;
    }
  }
}

TEST(LogProbGradientTest, BatchIsSumOfParts) {
  const TaskInstance inst = GenerateInstance(GenConfig{}, 4);
  Rng rng(2);
  const PolicyParams params = RandomParams(rng, 1.0);
  const Response a = SampleResponse(params, inst, 1);
  const Response b = SampleResponse(params, inst, 2);
  const FeatureVector ga = LogProbGradient(params, a, inst);
  const FeatureVector gb = LogProbGradient(params, b, inst);
  FeatureVector batch = FeatureVector::Zero(kFeatureDim);
  for (const Response* r : {&a, &b}) batch += LogProbGradient(params, *r, inst);
  EXPECT_TRUE(batch.isApprox(ga + gb, 1e-14));
}

TEST(TranscriptTest, RoundTrip) {
  const TaskInstance inst = GenerateInstance(GenConfig{}, 12);
  Rng rng(6);
  for (int k = 0; k < 20; ++k) {
    const Response r = SampleResponse(RandomParams(rng, 1.0), inst, k);
    const auto j = TranscriptToJson(r, inst);
    EXPECT_EQ(ResponseFromTranscript(j, inst), r);
    const TranscriptChain tc = ChainFromTranscript(j, inst.program);
    const ProofChain direct = ResponseToChain(r, inst);
    ASSERT_EQ(tc.chain.steps.size(), direct.steps.size());
    for (std::size_t i = 0; i < direct.steps.size(); ++i) {
      EXPECT_EQ(tc.chain.steps[i].goal, direct.steps[i].goal);
      EXPECT_EQ(tc.chain.steps[i].clause_index, direct.steps[i].clause_index);
    }
    EXPECT_EQ(tc.chain.final_answer, direct.final_answer);
  }
}

TEST(TranscriptTest, MalformedGoalThrowsSyntaxError) {
  const TaskInstance inst = SmallInstance();
  nlohmann::json j = {
      {"instance_id", "small"},
      {"steps", {{{"goal", "liable(acme"}, {"action", "apply_clause"}, {"clause_index", 0}}}},
      {"answer", "entailed"}};
  EXPECT_THROW(ChainFromTranscript(j, inst.program), SyntaxError);
}

}  // namespace
}  // namespace rllf
