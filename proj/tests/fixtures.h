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

#ifndef RLLF_TESTS_FIXTURES_H_
#define RLLF_TESTS_FIXTURES_H_

#include <cmath>
#include <string>
#include <vector>

#include "rllf/engine.h"
#include "rllf/parser.h"
#include "rllf/policy.h"
#include "rllf/random.h"
#include "rllf/reward_model.h"
#include "rllf/taskgen.h"

namespace rllf::testing {

inline TaskInstance MakeInstance(const std::string& id, const std::string& program,
                                 const std::string& query) {
  TaskInstance inst;
  inst.id = id;
  inst.program = ParseProgram(program);
  inst.query = ParseQuery(query);
  inst.gold = Solve(inst.program, inst.query).value;
  return inst;
}

// liable(acme) holds through a rule with one positive and one negated
// literal. Clauses: 0 rule, 1 breach(acme), 2 excused(bob).
inline TaskInstance EntailedInstance() {
  return MakeInstance("entailed",
                      "liable(acme) :- breach(acme), \\+ excused(acme).\n"
                      "breach(acme).\n"
                      "excused(bob).\n",
                      "liable(acme).");
}

// Same rule, but excused(acme) blocks it.
inline TaskInstance NotEntailedInstance() {
  return MakeInstance("not-entailed",
                      "liable(acme) :- breach(acme), \\+ excused(acme).\n"
                      "breach(acme).\n"
                      "excused(acme).\n",
                      "liable(acme).");
}

inline PolicyParams RandomPolicy(Rng& rng, double scale) {
  PolicyParams p;
  for (int i = 0; i < kFeatureDim; ++i) p.weights[i] = scale * (2 * rng.Uniform01() - 1);
  return p;
}

inline std::vector<Action> ActionsFromProof(const ProofChain& chain) {
  std::vector<Action> out;
  for (const ProofStep& s : chain.steps) {
    out.push_back(s.clause_index ? Action::ApplyClause(*s.clause_index)
                                 : Action::CheckNegation());
  }
  out.push_back(Action::Answer(chain.final_answer));
  return out;
}

inline std::size_t ProofSteps(const TaskInstance& inst) {
  const Verdict v = Solve(inst.program, inst.query);
  return v.proof ? v.proof->steps.size() : 0;
}

// A response that follows solve: the proof for entailed instances, a bare
// not_entailed otherwise.
inline Response OracleResponse(const TaskInstance& inst) {
  const Verdict v = Solve(inst.program, inst.query);
  if (v.proof) return ReplayActions(inst, ActionsFromProof(*v.proof));
  return ReplayActions(inst, {Action::Answer(VerdictValue::kNotEntailed)});
}

// Strict comparisons labelled by a hidden linear reward `truth`, keeping
// only pairs whose returns differ by at least `margin`.
inline std::vector<BtExample> PlantedExamples(const std::vector<TaskInstance>& data,
                                              const FeatureVector& truth,
                                              std::size_t n, double margin,
                                              std::uint64_t seed) {
  Rng rng(seed);
  std::vector<BtExample> out;
  while (out.size() < n) {
    const TaskInstance& inst = data[rng.UniformIndex(data.size())];
    const PolicyParams p = RandomPolicy(rng, 2.0);
    const FeatureVector a = SegmentFeatures(SampleResponse(p, inst, rng.NextU64()), inst);
    const FeatureVector b = SegmentFeatures(SampleResponse(p, inst, rng.NextU64()), inst);
    const double gap = truth.dot(a) - truth.dot(b);
    if (std::abs(gap) < margin) continue;
    out.push_back(BtExample{a, b, gap > 0 ? Mu{1.0, 0.0} : Mu{0.0, 1.0}});
  }
  return out;
}

}  // namespace rllf::testing

#endif  // RLLF_TESTS_FIXTURES_H_
