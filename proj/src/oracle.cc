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

#include "rllf/oracle.h"

#include <algorithm>

#include "rllf/errors.h"

namespace rllf {

std::optional<std::map<PredicateKey, int>> ComputeStrata(
    const Program& program) {
  std::map<PredicateKey, int> stratum;
  for (const Clause& c : program.clauses) {
    stratum.emplace(PredicateOf(c.head), 0);
    for (const Literal& l : c.body) stratum.emplace(PredicateOf(l.atom), 0);
  }
  const int limit = static_cast<int>(stratum.size());
  bool changed = true;
  while (changed) {
    changed = false;
    for (const Clause& c : program.clauses) {
      int& head = stratum[PredicateOf(c.head)];
      for (const Literal& l : c.body) {
        const int need = stratum[PredicateOf(l.atom)] + (l.negated ? 1 : 0);
        if (head < need) {
          head = need;
          changed = true;
          // A stratum above the predicate count means a negative cycle.
          if (head > limit) return std::nullopt;
        }
      }
    }
  }
  return stratum;
}

bool IsStratified(const Program& program) {
  return ComputeStrata(program).has_value();
}

std::set<Term> PerfectModel(const Program& program) {
  if (!program.IsGround()) {
    throw OracleInapplicable("program contains variables");
  }
  const auto strata = ComputeStrata(program);
  if (!strata) throw OracleInapplicable("program is not stratified");

  int top = 0;
  for (const auto& [pred, s] : *strata) top = std::max(top, s);

  std::set<Term> model;
  for (int s = 0; s <= top; ++s) {
    bool changed = true;
    while (changed) {
      changed = false;
      for (const Clause& c : program.clauses) {
        if (strata->at(PredicateOf(c.head)) != s) continue;
        if (model.contains(c.head)) continue;
        const bool fires = std::all_of(
            c.body.begin(), c.body.end(), [&](const Literal& l) {
              return model.contains(l.atom) != l.negated;
            });
        if (fires) {
          model.insert(c.head);
          changed = true;
        }
      }
    }
  }
  return model;
}

VerdictValue BruteForceEntailment(const Program& program, const Term& query) {
  if (!query.IsGround()) throw OracleInapplicable("query contains variables");
  return PerfectModel(program).contains(query) ? VerdictValue::kEntailed
                                               : VerdictValue::kNotEntailed;
}

}  // namespace rllf
