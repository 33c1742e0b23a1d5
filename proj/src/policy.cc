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

#include "rllf/policy.h"

#include <algorithm>
#include <cmath>

#include "rllf/errors.h"
#include "rllf/random.h"

namespace rllf {
namespace {

constexpr double kGoalScale = 8.0;
constexpr double kStepScale = kDefaultMaxSteps;

// What a state offers, computed once and shared by all candidates.
struct StateAnalysis {
  bool has_goal = false;
  bool negated = false;
  std::vector<bool> unifies;  // per clause
  bool negation_holds = false;
  bool stuck = false;
  double open_goals = 0.0;
  double progress = 0.0;
};

StateAnalysis Analyze(const State& state, const TaskInstance& instance) {
  StateAnalysis a;
  const std::size_t n = instance.program.size();
  a.unifies.assign(n, false);
  a.open_goals = std::min<double>(state.goal_stack.size(), kGoalScale) / kGoalScale;
  a.progress = state.steps_taken / kStepScale;
  if (state.goal_stack.empty()) return a;
  a.has_goal = true;
  const Literal& goal = state.goal_stack.front();
  a.negated = goal.negated;
  bool any = false;
  if (goal.negated) {
    const Verdict v = Solve(instance.program, goal.atom);
    a.negation_holds = !v.entailed() && !v.depth_exceeded;
    any = a.negation_holds;
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      const Clause renamed =
          RenameForStep(instance.program.clauses[i], state.steps_taken);
      a.unifies[i] = Unify(goal.atom, renamed.head).has_value();
      any = any || a.unifies[i];
    }
  }
  a.stuck = !any;
  return a;
}

void FillFeatures(const StateAnalysis& a, const Action& action,
                  std::size_t n_clauses, Eigen::Ref<Eigen::VectorXd> phi) {
  phi.setZero();
  phi[kBias] = 1.0;
  switch (action.kind) {
    case Action::Kind::kApplyClause: {
      phi[kApplyClause] = 1.0;
      const std::size_t bucket =
          n_clauses == 0 ? 0 : std::min<std::size_t>(action.clause_index * 4 / n_clauses, 3);
      phi[kClauseBucket0 + bucket] = 1.0;
      if (a.has_goal && !a.negated && action.clause_index < a.unifies.size() &&
          a.unifies[action.clause_index]) {
        phi[kHeadUnifies] = 1.0;
      }
      phi[kOpenGoalsStep] = a.open_goals;
      phi[kProgressStep] = a.progress;
      break;
    }
    case Action::Kind::kNegationCheck:
      phi[kNegationCheck] = 1.0;
      if (a.has_goal && a.negated && a.negation_holds) phi[kNegationHolds] = 1.0;
      phi[kOpenGoalsStep] = a.open_goals;
      phi[kProgressStep] = a.progress;
      break;
    case Action::Kind::kAnswer: {
      const bool entailed = action.answer == VerdictValue::kEntailed;
      phi[entailed ? kAnswerEntailed : kAnswerNotEntailed] = 1.0;
      if (!a.has_goal) phi[entailed ? kEntailedProved : kNotEntailedProved] = 1.0;
      if (a.stuck) phi[entailed ? kEntailedStuck : kNotEntailedStuck] = 1.0;
      phi[kOpenGoalsAnswer] = a.open_goals;
      phi[kProgressAnswer] = a.progress;
      break;
    }
  }
}

std::string StepLine(const State& state, const Action& action, bool valid,
                     std::size_t number) {
  std::string line = std::to_string(number) + ". ";
  const std::string goal = state.goal_stack.empty()
                               ? std::string("<no goal>")
                               : ToString(state.goal_stack.front());
  if (action.kind == Action::Kind::kApplyClause) {
    line += goal + " <- clause " + std::to_string(action.clause_index);
  } else {
    line += goal + " <- naf_check";
  }
  if (!valid) line += " [invalid-step]";
  return line + "\n";
}

Eigen::VectorXd Scores(const PolicyParams& params, const Eigen::MatrixXd& features) {
  return (features * params.weights) / params.temperature;
}

// Shared rollout loop. `choose` maps (candidates, probabilities) to an index.
template <typename Choose>
Response Rollout(const PolicyParams& params, const TaskInstance& instance,
                 int max_steps, Choose&& choose) {
  Derivation env(instance.program, instance.query);
  Response r;
  r.instance_ref = instance.id;
  r.max_steps = max_steps;
  r.raw_text = "?- " + instance.query_text() + "\n";
  while (true) {
    State state{instance.id, env.OpenGoals(), static_cast<int>(env.steps())};
    const std::vector<Action> cands = CandidateActions(state, instance, max_steps);
    const Eigen::MatrixXd feats = FeaturizeCandidates(state, cands, instance);
    const Eigen::VectorXd probs = Softmax(Scores(params, feats));
    const Action action = cands[choose(cands, probs)];
    r.steps.push_back({state, action});
    if (action.is_terminal()) {
      r.raw_text += std::string("answer: ") + ToString(action.answer) + "\n";
      break;
    }
    const bool valid = action.kind == Action::Kind::kApplyClause
                           ? env.TryApplyClause(action.clause_index)
                           : env.TryNegation();
    r.raw_text += StepLine(state, action, valid, r.steps.size());
  }
  return r;
}

}  // namespace

State InitialState(const TaskInstance& instance) {
  return State{instance.id, {Literal{false, instance.query}}, 0};
}

std::vector<Action> CandidateActions(const State& state,
                                     const TaskInstance& instance,
                                     int max_steps) {
  std::vector<Action> out;
  if (!state.goal_stack.empty() && state.steps_taken < max_steps - 1) {
    out.reserve(instance.program.size() + 3);
    for (std::size_t i = 0; i < instance.program.size(); ++i) {
      out.push_back(Action::ApplyClause(i));
    }
    out.push_back(Action::CheckNegation());
  }
  out.push_back(Action::Answer(VerdictValue::kEntailed));
  out.push_back(Action::Answer(VerdictValue::kNotEntailed));
  return out;
}

FeatureVector Featurize(const State& state, const Action& action,
                        const TaskInstance& instance) {
  FeatureVector phi(kFeatureDim);
  FillFeatures(Analyze(state, instance), action, instance.program.size(), phi);
  return phi;
}

Eigen::MatrixXd FeaturizeCandidates(const State& state,
                                    const std::vector<Action>& candidates,
                                    const TaskInstance& instance) {
  const StateAnalysis a = Analyze(state, instance);
  Eigen::MatrixXd out(candidates.size(), kFeatureDim);
  Eigen::VectorXd row(kFeatureDim);
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    FillFeatures(a, candidates[i], instance.program.size(), row);
    out.row(i) = row.transpose();
  }
  return out;
}

Eigen::VectorXd Softmax(const Eigen::VectorXd& scores) {
  const double top = scores.maxCoeff();
  Eigen::VectorXd e = (scores.array() - top).exp();
  return e / e.sum();
}

Eigen::VectorXd ActionProbabilities(const PolicyParams& params,
                                    const State& state,
                                    const std::vector<Action>& candidates,
                                    const TaskInstance& instance) {
  return Softmax(Scores(params, FeaturizeCandidates(state, candidates, instance)));
}

Response SampleResponse(const PolicyParams& params,
                        const TaskInstance& instance, std::uint64_t rng_seed,
                        int max_steps) {
  Rng rng(rng_seed);
  return Rollout(params, instance, max_steps,
                 [&](const std::vector<Action>&, const Eigen::VectorXd& p) {
    const double u = rng.Uniform01();
    double acc = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      acc += p[i];
      if (u < acc) return static_cast<std::size_t>(i);
    }
    return static_cast<std::size_t>(p.size() - 1);
  });
}

Response GreedyResponse(const PolicyParams& params,
                        const TaskInstance& instance, int max_steps) {
  return Rollout(params, instance, max_steps,
                 [](const std::vector<Action>&, const Eigen::VectorXd& p) {
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < p.size(); ++i) {
      if (p[i] > p[best]) best = i;
    }
    return static_cast<std::size_t>(best);
  });
}

Response ReplayActions(const TaskInstance& instance,
                       const std::vector<Action>& actions, int max_steps) {
  if (actions.empty() || !actions.back().is_terminal()) {
    throw Error("action sequence must end with an answer");
  }
  std::size_t next = 0;
  Response r = Rollout(
      PolicyParams{}, instance, max_steps,
      [&](const std::vector<Action>& cands, const Eigen::VectorXd&) {
        if (next >= actions.size()) throw Error("action sequence too short");
        const auto it = std::find(cands.begin(), cands.end(), actions[next]);
        if (it == cands.end()) {
          throw Error("action " + std::to_string(next) +
                      " is not legal in its state");
        }
        ++next;
        return static_cast<std::size_t>(it - cands.begin());
      });
  if (next != actions.size()) throw Error("answer before the last action");
  return r;
}

ProofChain ResponseToChain(const Response& response,
                           const TaskInstance& instance) {
  ProofChain chain;
  for (const ResponseStep& step : response.steps) {
    const Action& a = step.action;
    if (a.is_terminal()) {
      chain.final_answer = a.answer;
      break;
    }
    const std::size_t position = chain.steps.size();
    ProofStep ps;
    if (!step.state.goal_stack.empty()) {
      ps.goal = step.state.goal_stack.front().atom;
    }
    if (a.kind == Action::Kind::kApplyClause) {
      ps.clause_index = a.clause_index;
      if (a.clause_index < instance.program.size()) {
        const Clause renamed =
            RenameForStep(instance.program.clauses[a.clause_index], position);
        if (auto mgu = Unify(ps.goal, renamed.head)) ps.unifier = std::move(*mgu);
      }
    }
    chain.steps.push_back(std::move(ps));
  }
  return chain;
}

FeatureVector StepLogProbGradient(const PolicyParams& params,
                                  const Eigen::MatrixXd& candidate_features,
                                  std::size_t chosen) {
  const Eigen::VectorXd probs = Softmax(Scores(params, candidate_features));
  const FeatureVector expected = candidate_features.transpose() * probs;
  return (candidate_features.row(chosen).transpose() - expected) /
         params.temperature;
}

namespace {

// Calls fn(candidate_features, chosen_index) for every step of `response`.
template <typename Fn>
void ForEachDecision(const Response& response, const TaskInstance& instance,
                     Fn&& fn) {
  for (const ResponseStep& step : response.steps) {
    const std::vector<Action> cands =
        CandidateActions(step.state, instance, response.max_steps);
    const auto it = std::find(cands.begin(), cands.end(), step.action);
    if (it == cands.end()) throw Error("response step is not a legal action");
    fn(FeaturizeCandidates(step.state, cands, instance),
       static_cast<std::size_t>(it - cands.begin()));
  }
}

}  // namespace

FeatureVector LogProbGradient(const PolicyParams& params,
                              const Response& response,
                              const TaskInstance& instance) {
  FeatureVector grad = FeatureVector::Zero(kFeatureDim);
  ForEachDecision(response, instance,
                  [&](const Eigen::MatrixXd& feats, std::size_t chosen) {
                    grad += StepLogProbGradient(params, feats, chosen);
                  });
  return grad;
}

double LogProb(const PolicyParams& params, const Response& response,
               const TaskInstance& instance) {
  double total = 0.0;
  ForEachDecision(response, instance,
                  [&](const Eigen::MatrixXd& feats, std::size_t chosen) {
                    const Eigen::VectorXd s = Scores(params, feats);
                    const double top = s.maxCoeff();
                    total += s[chosen] - top -
                             std::log((s.array() - top).exp().sum());
                  });
  return total;
}

FeatureVector SegmentFeatures(const Response& response,
                              const TaskInstance& instance) {
  FeatureVector phi = FeatureVector::Zero(kFeatureDim);
  for (const ResponseStep& step : response.steps) {
    phi += Featurize(step.state, step.action, instance);
  }
  return phi;
}

}  // namespace rllf
