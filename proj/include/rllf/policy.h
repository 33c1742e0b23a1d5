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

#ifndef RLLF_POLICY_H_
#define RLLF_POLICY_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "rllf/engine.h"
#include "rllf/taskgen.h"
#include "rllf/term.h"

namespace rllf {

inline constexpr int kDefaultMaxSteps = 16;

// Feature layout shared by the policy and the reward predictor.
enum Feature : int {
  kBias = 0,
  kApplyClause,
  kNegationCheck,
  kAnswerEntailed,
  kAnswerNotEntailed,
  kClauseBucket0,
  kClauseBucket1,
  kClauseBucket2,
  kClauseBucket3,
  kHeadUnifies,        // applied clause head unifies with the selected goal
  kNegationHolds,      // checked negative goal finitely fails
  kEntailedProved,     // answer entailed with no open goals
  kNotEntailedProved,  // answer not_entailed with no open goals
  kEntailedStuck,      // answer entailed while the selected goal is stuck
  kNotEntailedStuck,   // answer not_entailed while stuck
  kOpenGoalsStep,      // open goal count, on proof actions
  kOpenGoalsAnswer,    // open goal count, on answer actions
  kProgressStep,       // steps taken, on proof actions
  kProgressAnswer,     // steps taken, on answer actions
  kFeatureDim
};

using FeatureVector = Eigen::VectorXd;

struct State {
  std::string instance_ref;
  std::vector<Literal> goal_stack;  // front is the selected goal
  int steps_taken = 0;

  friend bool operator==(const State&, const State&) = default;
};

struct Action {
  enum class Kind { kApplyClause, kNegationCheck, kAnswer };

  Kind kind = Kind::kAnswer;
  std::size_t clause_index = 0;                     // kApplyClause only
  VerdictValue answer = VerdictValue::kNotEntailed;  // kAnswer only

  static Action ApplyClause(std::size_t index) {
    return {Kind::kApplyClause, index, VerdictValue::kNotEntailed};
  }
  static Action CheckNegation() {
    return {Kind::kNegationCheck, 0, VerdictValue::kNotEntailed};
  }
  static Action Answer(VerdictValue v) { return {Kind::kAnswer, 0, v}; }

  bool is_terminal() const { return kind == Kind::kAnswer; }

  friend bool operator==(const Action&, const Action&) = default;
};

struct PolicyParams {
  FeatureVector weights = FeatureVector::Zero(kFeatureDim);
  double temperature = 1.0;
};

struct ResponseStep {
  State state;
  Action action;

  friend bool operator==(const ResponseStep&, const ResponseStep&) = default;
};

// A sampled reasoning chain ending in exactly one answer action. This is
// the unit that annotators compare and the reward predictor scores.
struct Response {
  std::string instance_ref;
  std::vector<ResponseStep> steps;
  std::string raw_text;
  int max_steps = kDefaultMaxSteps;

  VerdictValue answer() const { return steps.back().action.answer; }
  std::size_t length() const { return steps.size(); }

  friend bool operator==(const Response&, const Response&) = default;
};

State InitialState(const TaskInstance& instance);

// Legal actions in `state`: every clause application plus the negation
// check while goals are open and the step budget allows, and both answers
// always. Answers come last.
std::vector<Action> CandidateActions(const State& state,
                                     const TaskInstance& instance,
                                     int max_steps = kDefaultMaxSteps);

FeatureVector Featurize(const State& state, const Action& action,
                        const TaskInstance& instance);

// Rows are candidates, columns features. Shares the per-state analysis
// across candidates.
Eigen::MatrixXd FeaturizeCandidates(const State& state,
                                    const std::vector<Action>& candidates,
                                    const TaskInstance& instance);

// Softmax of `scores`, shifted by the maximum.
Eigen::VectorXd Softmax(const Eigen::VectorXd& scores);

Eigen::VectorXd ActionProbabilities(const PolicyParams& params,
                                    const State& state,
                                    const std::vector<Action>& candidates,
                                    const TaskInstance& instance);

// Deterministic in (params, instance, rng_seed, max_steps).
Response SampleResponse(const PolicyParams& params,
                        const TaskInstance& instance, std::uint64_t rng_seed,
                        int max_steps = kDefaultMaxSteps);

// Argmax decoding; ties go to the earliest candidate.
Response GreedyResponse(const PolicyParams& params,
                        const TaskInstance& instance,
                        int max_steps = kDefaultMaxSteps);

// Rebuilds a response by replaying `actions` from the initial state. The
// last action must be the only answer.
Response ReplayActions(const TaskInstance& instance,
                       const std::vector<Action>& actions,
                       int max_steps = kDefaultMaxSteps);

ProofChain ResponseToChain(const Response& response,
                           const TaskInstance& instance);

// Gradient of log pi(a | s) for one state, given the candidate feature rows
// and the chosen row: (phi_a - E_pi[phi]) / temperature.
FeatureVector StepLogProbGradient(const PolicyParams& params,
                                  const Eigen::MatrixXd& candidate_features,
                                  std::size_t chosen);

// Exact gradient of sum_t log pi(a_t | s_t) with respect to the weights.
FeatureVector LogProbGradient(const PolicyParams& params,
                              const Response& response,
                              const TaskInstance& instance);

double LogProb(const PolicyParams& params, const Response& response,
               const TaskInstance& instance);

// Sum of step features over a response, Phi(sigma).
FeatureVector SegmentFeatures(const Response& response,
                              const TaskInstance& instance);

}  // namespace rllf

#endif  // RLLF_POLICY_H_
