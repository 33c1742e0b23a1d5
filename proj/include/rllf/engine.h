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

#ifndef RLLF_ENGINE_H_
#define RLLF_ENGINE_H_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rllf/term.h"

namespace rllf {

inline constexpr int kDefaultDepthLimit = 64;

// Most general unifier with occurs check. Returns std::nullopt when the
// terms do not unify. The result is resolved (idempotent).
std::optional<Substitution> Unify(const Term& a, const Term& b);

// Extends `subst` in place. On failure `subst` may hold partial bindings;
// callers that need rollback pass a copy.
bool UnifyInto(const Term& a, const Term& b, Substitution& subst);

enum class VerdictValue { kEntailed, kNotEntailed };

const char* ToString(VerdictValue v);
std::optional<VerdictValue> ParseVerdictValue(std::string_view text);

// One resolution step of a derivation. `clause_index` is std::nullopt for a
// negation-as-failure check of `goal`.
struct ProofStep {
  Term goal;
  std::optional<std::size_t> clause_index;
  Substitution unifier;

  bool is_naf_check() const { return !clause_index.has_value(); }
};

struct ProofChain {
  std::vector<ProofStep> steps;
  VerdictValue final_answer = VerdictValue::kNotEntailed;
};

struct Verdict {
  VerdictValue value = VerdictValue::kNotEntailed;
  std::optional<ProofChain> proof;  // present iff entailed
  bool depth_exceeded = false;
  // Negation applied to a goal sharing a predicate with an enclosing goal.
  bool unstratified_warning = false;
  // Negation applied to a non-ground goal.
  bool floundering_warning = false;

  bool entailed() const { return value == VerdictValue::kEntailed; }
};

// SLD resolution with leftmost selection, clauses tried in source order and
// negation as failure. A ground goal identical to one of its ancestors is
// pruned, which keeps ground recursive programs finite. Anything that is not
// derived within `depth_limit` is reported as not entailed (closed world).
Verdict Solve(const Program& program, const Term& query,
              int depth_limit = kDefaultDepthLimit);

// Answer substitutions restricted to the query's variables, in depth-first
// discovery order, truncated at `max_solutions`.
std::vector<Substitution> EnumerateSolutions(
    const Program& program, const Term& query, std::size_t max_solutions,
    int depth_limit = kDefaultDepthLimit);

struct ChainReport {
  std::size_t valid_steps = 0;
  std::size_t total_steps = 0;
  bool answer_consistent = false;
  std::optional<std::size_t> first_invalid_index;
  bool floundering_warning = false;

  bool fully_valid() const { return valid_steps == total_steps; }
};

// Replays `chain` against `program`. Invalid steps are counted and leave the
// derivation state untouched. `known_verdict` skips the internal Solve call
// when the caller already has it.
ChainReport VerifyChain(const Program& program, const Term& query,
                        const ProofChain& chain,
                        int depth_limit = kDefaultDepthLimit,
                        std::optional<VerdictValue> known_verdict = {});

// Clause with its variables renamed apart for position `step` of a
// derivation. Solve, VerifyChain and the policy environment share this
// scheme, so a chain produced by one replays identically in the others.
// Variables whose names start with "__" are reserved for it.
Clause RenameForStep(const Clause& clause, std::size_t step, int nest = 0);

// Incremental derivation state: an ordered goal list plus the accumulated
// substitution. Used to replay chains and to drive the policy environment.
class Derivation {
 public:
  struct Goal {
    Literal literal;  // bindings not yet applied
    int depth = 0;
  };

  Derivation(const Program& program, const Term& query,
             int depth_limit = kDefaultDepthLimit);

  bool done() const { return goals_.empty(); }
  std::size_t steps() const { return steps_; }

  // Goal list with the accumulated substitution applied.
  std::vector<Literal> OpenGoals() const;
  std::optional<Literal> SelectedGoal() const;

  // Head of `clause_index` (renamed for the next step) unifies with the
  // selected positive goal. No state change.
  std::optional<Substitution> ClauseUnifier(std::size_t clause_index) const;
  // The selected goal is negative and its atom finitely fails.
  bool NegationHolds() const;

  // Each Try* consumes one step index. On success the derivation advances;
  // on failure it stays where it was.
  bool TryApplyClause(std::size_t clause_index);
  bool TryNegation();
  // Consumes a step index without touching the goals (an invalid step).
  void Skip();

  const Program& program() const { return *program_; }

 private:
  const Program* program_;
  int depth_limit_;
  std::vector<Goal> goals_;
  Substitution subst_;
  std::size_t steps_ = 0;
};

}  // namespace rllf

#endif  // RLLF_ENGINE_H_
