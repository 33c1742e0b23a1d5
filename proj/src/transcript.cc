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

#include "rllf/transcript.h"

#include "rllf/errors.h"
#include "rllf/parser.h"

namespace rllf {
namespace {

nlohmann::json StepJson(const Term& goal, std::optional<std::size_t> clause) {
  nlohmann::json j{{"goal", ToString(goal)}};
  if (clause) {
    j["action"] = "apply_clause";
    j["clause_index"] = *clause;
  } else {
    j["action"] = "naf_check";
  }
  return j;
}

}  // namespace

nlohmann::json TranscriptToJson(const Response& response,
                                const TaskInstance& instance) {
  nlohmann::json steps = nlohmann::json::array();
  for (const ResponseStep& s : response.steps) {
    if (s.action.is_terminal()) break;
    const Term goal = s.state.goal_stack.empty()
                          ? Term::Constant("true")
                          : s.state.goal_stack.front().atom;
    steps.push_back(StepJson(goal, s.action.kind == Action::Kind::kApplyClause
                                       ? std::optional(s.action.clause_index)
                                       : std::nullopt));
  }
  return nlohmann::json{{"instance_id", response.instance_ref},
                        {"query", instance.query_text()},
                        {"steps", std::move(steps)},
                        {"answer", ToString(response.answer())},
                        {"raw_text", response.raw_text}};
}

nlohmann::json TranscriptFromChain(const ProofChain& chain, const Term& query,
                                   const std::string& instance_id) {
  nlohmann::json steps = nlohmann::json::array();
  std::string raw = "?- " + ToString(query) + ".\n";
  for (std::size_t i = 0; i < chain.steps.size(); ++i) {
    const ProofStep& s = chain.steps[i];
    steps.push_back(StepJson(s.goal, s.clause_index));
    raw += std::to_string(i + 1) + ". " + ToString(s.goal) +
           (s.clause_index ? " <- clause " + std::to_string(*s.clause_index)
                           : std::string(" <- naf_check")) +
           "\n";
  }
  raw += std::string("answer: ") + ToString(chain.final_answer) + "\n";
  return nlohmann::json{{"instance_id", instance_id},
                        {"query", ToString(query) + "."},
                        {"steps", std::move(steps)},
                        {"answer", ToString(chain.final_answer)},
                        {"raw_text", raw}};
}

Response ResponseFromTranscript(const nlohmann::json& j,
                                const TaskInstance& instance, int max_steps) {
  std::vector<Action> actions;
  for (const auto& s : j.at("steps")) {
    const std::string kind = s.at("action").get<std::string>();
    if (kind == "apply_clause") {
      actions.push_back(Action::ApplyClause(s.at("clause_index").get<std::size_t>()));
    } else if (kind == "naf_check") {
      actions.push_back(Action::CheckNegation());
    } else {
      throw Error("unknown action '" + kind + "'");
    }
  }
  const auto answer = ParseVerdictValue(j.at("answer").get<std::string>());
  if (!answer) throw Error("bad answer value");
  actions.push_back(Action::Answer(*answer));
  return ReplayActions(instance, actions, max_steps);
}

TranscriptChain ChainFromTranscript(const nlohmann::json& j,
                                    const Program& program) {
  if (!j.is_object()) throw Error("transcript line is not an object");
  TranscriptChain out;
  out.instance_id = j.value("instance_id", std::string());
  if (j.contains("query")) {
    out.query = ParseQuery(j.at("query").get<std::string>());
  }
  const auto answer = ParseVerdictValue(j.at("answer").get<std::string>());
  if (!answer) throw Error("bad answer value");
  out.chain.final_answer = *answer;
  const auto& steps = j.at("steps");
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const auto& s = steps[i];
    ProofStep step;
    try {
      step.goal = ParseQuery(s.at("goal").get<std::string>());
    } catch (const SyntaxError& e) {
      throw SyntaxError(e.line(), e.column(),
                        "step " + std::to_string(i) + " goal: " + e.detail());
    }
    const std::string kind = s.at("action").get<std::string>();
    if (kind == "apply_clause") {
      step.clause_index = s.at("clause_index").get<std::size_t>();
      if (*step.clause_index < program.size()) {
        const Clause renamed =
            RenameForStep(program.clauses[*step.clause_index], i);
        if (auto mgu = Unify(step.goal, renamed.head)) step.unifier = std::move(*mgu);
      }
    } else if (kind != "naf_check") {
      throw Error("step " + std::to_string(i) + ": unknown action '" + kind + "'");
    }
    out.chain.steps.push_back(std::move(step));
  }
  return out;
}

}  // namespace rllf
