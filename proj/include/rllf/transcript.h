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

#ifndef RLLF_TRANSCRIPT_H_
#define RLLF_TRANSCRIPT_H_

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "rllf/engine.h"
#include "rllf/policy.h"
#include "rllf/taskgen.h"

namespace rllf {

// Transcript line:
//   {"instance_id": ..., "query": "q(a).",
//    "steps": [{"goal": "q(a)", "action": "apply_clause", "clause_index": 2},
//              {"goal": "r(a)", "action": "naf_check"}],
//    "answer": "entailed", "raw_text": ...}
nlohmann::json TranscriptToJson(const Response& response,
                                const TaskInstance& instance);

// Same shape, from an engine proof (for example one returned by Solve).
nlohmann::json TranscriptFromChain(const ProofChain& chain, const Term& query,
                                   const std::string& instance_id);

// Rebuilds the response by replaying the recorded actions.
Response ResponseFromTranscript(const nlohmann::json& j,
                                const TaskInstance& instance,
                                int max_steps = kDefaultMaxSteps);

struct TranscriptChain {
  std::string instance_id;
  std::optional<Term> query;  // when the line carries one
  ProofChain chain;
};

// Reads the chain as written, without replaying it. Unifiers are recomputed
// for clause indices that exist in `program`. Throws SyntaxError for a goal
// or query that does not parse and Error for a structurally broken line.
TranscriptChain ChainFromTranscript(const nlohmann::json& j,
                                    const Program& program);

}  // namespace rllf

#endif  // RLLF_TRANSCRIPT_H_
