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

#ifndef RLLF_ORACLE_H_
#define RLLF_ORACLE_H_

#include <map>
#include <optional>
#include <set>

#include "rllf/engine.h"
#include "rllf/term.h"

namespace rllf {

// Stratum per predicate, computed from the predicate dependency graph:
// positive dependencies may stay in the same stratum, negative ones must go
// strictly lower. std::nullopt when some predicate depends negatively on
// itself through a cycle.
std::optional<std::map<PredicateKey, int>> ComputeStrata(const Program& program);

bool IsStratified(const Program& program);

// Perfect model of a ground stratified program, by stratum-wise fixpoint
// iteration over the ground atoms of the program. Throws OracleInapplicable
// for programs with variables or without a stratification.
std::set<Term> PerfectModel(const Program& program);

// Independent check for Solve: entailed iff `query` is in the perfect model.
// Throws OracleInapplicable for a non-ground query.
VerdictValue BruteForceEntailment(const Program& program, const Term& query);

}  // namespace rllf

#endif  // RLLF_ORACLE_H_
