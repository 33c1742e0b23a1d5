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

#include "rllf/engine.h"

#include <functional>
#include <memory>
#include <utility>

namespace rllf {
namespace {

bool OccursIn(const std::string& var, const Term& t, const Substitution& s) {
  const Term& w = s.Walk(t);
  if (w.is_variable()) return w.name == var;
  for (const Term& a : w.args) {
    if (OccursIn(var, a, s)) return true;
  }
  return false;
}

Term RenameTerm(const Term& t, const std::string& suffix) {
  if (t.is_variable()) return Term::Variable("__" + suffix + "_" + t.name);
  if (!t.is_compound()) return t;
  Term out{t.kind, t.name, {}};
  out.args.reserve(t.args.size());
  for (const Term& a : t.args) out.args.push_back(RenameTerm(a, suffix));
  return out;
}

// Ancestor goals along one branch of the SLD tree, as a persistent list.
struct AncestorNode {
  Term atom;  // bindings applied at selection time
  std::shared_ptr<const AncestorNode> parent;
};
using Ancestors = std::shared_ptr<const AncestorNode>;

struct PendingGoal {
  Literal literal;
  int depth;
  Ancestors ancestors;
};

class Resolver {
 public:
  using OnSolution =
      std::function<bool(const Substitution&, const std::vector<ProofStep>&)>;

  Resolver(const Program& program, int depth_limit, int nest,
           Ancestors enclosing)
      : program_(program),
        depth_limit_(depth_limit),
        nest_(nest),
        enclosing_(std::move(enclosing)) {}

  // Returns true when `on_solution` asked to stop.
  bool Run(const Term& query, const OnSolution& on_solution) {
    std::vector<PendingGoal> goals{{Literal{false, query}, 0, nullptr}};
    Substitution subst;
    std::vector<ProofStep> chain;
    return Prove(std::move(goals), subst, chain, on_solution);
  }

  bool depth_exceeded() const { return depth_exceeded_; }
  bool unstratified() const { return unstratified_; }
  bool floundering() const { return floundering_; }

 private:
  bool Prove(std::vector<PendingGoal> goals, const Substitution& subst,
             std::vector<ProofStep>& chain, const OnSolution& on_solution) {
    if (goals.empty()) return on_solution(subst, chain);
    PendingGoal goal = std::move(goals.front());
    goals.erase(goals.begin());
    Term atom = subst.Apply(goal.literal.atom);

    if (goal.depth >= depth_limit_) {
      depth_exceeded_ = true;
      return false;
    }
    if (goal.literal.negated) {
      return ProveNegation(std::move(atom), goal, std::move(goals), subst,
                           chain, on_solution);
    }
    if (atom.IsGround() && HasAncestor(goal.ancestors, atom)) return false;

    const std::size_t position = chain.size();
    auto ancestors = std::make_shared<const AncestorNode>(
        AncestorNode{atom, goal.ancestors});
    for (std::size_t i = 0; i < program_.clauses.size(); ++i) {
      Clause renamed = RenameForStep(program_.clauses[i], position, nest_);
      std::optional<Substitution> mgu = Unify(atom, renamed.head);
      if (!mgu) continue;
      Substitution next = subst;
      if (!UnifyInto(atom, renamed.head, next)) continue;

      std::vector<PendingGoal> next_goals;
      next_goals.reserve(renamed.body.size() + goals.size());
      for (Literal& lit : renamed.body) {
        next_goals.push_back({std::move(lit), goal.depth + 1, ancestors});
      }
      next_goals.insert(next_goals.end(), goals.begin(), goals.end());

      chain.push_back(ProofStep{atom, i, std::move(*mgu)});
      const bool stop = Prove(std::move(next_goals), next, chain, on_solution);
      chain.pop_back();
      if (stop) return true;
    }
    return false;
  }

  bool ProveNegation(Term atom, const PendingGoal& goal,
                     std::vector<PendingGoal> rest, const Substitution& subst,
                     std::vector<ProofStep>& chain,
                     const OnSolution& on_solution) {
    if (!atom.IsGround()) floundering_ = true;
    const PredicateKey key = PredicateOf(atom);
    for (const AncestorNode* a = goal.ancestors.get(); a != nullptr;
         a = a->parent.get()) {
      if (PredicateOf(a->atom) == key) unstratified_ = true;
    }
    for (const AncestorNode* a = enclosing_.get(); a != nullptr;
         a = a->parent.get()) {
      if (PredicateOf(a->atom) == key) unstratified_ = true;
    }

    // The inner proof sees this branch's ancestors only for the
    // stratification warning; loop pruning restarts inside it.
    Ancestors chain_for_inner = goal.ancestors;
    for (const AncestorNode* a = enclosing_.get(); a != nullptr;
         a = a->parent.get()) {
      chain_for_inner = std::make_shared<const AncestorNode>(
          AncestorNode{a->atom, chain_for_inner});
    }
    Resolver inner(program_, depth_limit_ - goal.depth, nest_ + 1,
                   std::move(chain_for_inner));
    const bool found = inner.Run(
        atom, [](const Substitution&, const std::vector<ProofStep>&) {
          return true;
        });
    unstratified_ = unstratified_ || inner.unstratified();
    floundering_ = floundering_ || inner.floundering();
    if (found) return false;
    if (inner.depth_exceeded()) {
      // Not a finite failure, so the negation cannot be concluded.
      depth_exceeded_ = true;
      return false;
    }
    chain.push_back(ProofStep{std::move(atom), std::nullopt, {}});
    const bool stop = Prove(std::move(rest), subst, chain, on_solution);
    chain.pop_back();
    return stop;
  }

  static bool HasAncestor(const Ancestors& ancestors, const Term& atom) {
    for (const AncestorNode* a = ancestors.get(); a != nullptr;
         a = a->parent.get()) {
      if (a->atom == atom) return true;
    }
    return false;
  }

  const Program& program_;
  int depth_limit_;
  int nest_;
  Ancestors enclosing_;
  bool depth_exceeded_ = false;
  bool unstratified_ = false;
  bool floundering_ = false;
};

}  // namespace

bool UnifyInto(const Term& a, const Term& b, Substitution& subst) {
  const Term& x = subst.Walk(a);
  const Term& y = subst.Walk(b);
  if (x.is_variable() && y.is_variable() && x.name == y.name) return true;
  if (x.is_variable()) {
    if (OccursIn(x.name, y, subst)) return false;
    subst.Bind(x.name, y);
    return true;
  }
  if (y.is_variable()) {
    if (OccursIn(y.name, x, subst)) return false;
    subst.Bind(y.name, x);
    return true;
  }
  if (x.kind != y.kind || x.name != y.name || x.args.size() != y.args.size()) {
    return false;
  }
  for (std::size_t i = 0; i < x.args.size(); ++i) {
    if (!UnifyInto(x.args[i], y.args[i], subst)) return false;
  }
  return true;
}

std::optional<Substitution> Unify(const Term& a, const Term& b) {
  Substitution s;
  if (!UnifyInto(a, b, s)) return std::nullopt;
  return s.Resolved();
}

const char* ToString(VerdictValue v) {
  return v == VerdictValue::kEntailed ? "entailed" : "not_entailed";
}

std::optional<VerdictValue> ParseVerdictValue(std::string_view text) {
  if (text == "entailed") return VerdictValue::kEntailed;
  if (text == "not_entailed") return VerdictValue::kNotEntailed;
  return std::nullopt;
}

Clause RenameForStep(const Clause& clause, std::size_t step, int nest) {
  const std::string suffix =
      nest == 0 ? std::to_string(step)
                : std::to_string(nest) + "_" + std::to_string(step);
  Clause out;
  out.head = RenameTerm(clause.head, suffix);
  out.body.reserve(clause.body.size());
  for (const Literal& lit : clause.body) {
    out.body.push_back({lit.negated, RenameTerm(lit.atom, suffix)});
  }
  return out;
}

namespace {

Verdict RunSolve(const Program& program, const Term& query, int depth_limit,
                 int nest) {
  Resolver resolver(program, depth_limit, nest, nullptr);
  Verdict verdict;
  resolver.Run(query, [&](const Substitution&,
                          const std::vector<ProofStep>& chain) {
    verdict.value = VerdictValue::kEntailed;
    verdict.proof = ProofChain{chain, VerdictValue::kEntailed};
    return true;
  });
  verdict.depth_exceeded = resolver.depth_exceeded();
  verdict.unstratified_warning = resolver.unstratified();
  verdict.floundering_warning = resolver.floundering();
  return verdict;
}

}  // namespace

Verdict Solve(const Program& program, const Term& query, int depth_limit) {
  return RunSolve(program, query, depth_limit, 0);
}

std::vector<Substitution> EnumerateSolutions(const Program& program,
                                             const Term& query,
                                             std::size_t max_solutions,
                                             int depth_limit) {
  std::vector<Substitution> out;
  if (max_solutions == 0) return out;
  std::vector<std::string> vars;
  query.CollectVariables(vars);
  Resolver resolver(program, depth_limit, 0, nullptr);
  resolver.Run(query, [&](const Substitution& s,
                          const std::vector<ProofStep>&) {
    out.push_back(s.RestrictedTo(vars));
    return out.size() >= max_solutions;
  });
  return out;
}

Derivation::Derivation(const Program& program, const Term& query,
                       int depth_limit)
    : program_(&program),
      depth_limit_(depth_limit),
      goals_{{Literal{false, query}, 0}} {}

std::vector<Literal> Derivation::OpenGoals() const {
  std::vector<Literal> out;
  out.reserve(goals_.size());
  for (const Goal& g : goals_) out.push_back(subst_.Apply(g.literal));
  return out;
}

std::optional<Literal> Derivation::SelectedGoal() const {
  if (goals_.empty()) return std::nullopt;
  return subst_.Apply(goals_.front().literal);
}

std::optional<Substitution> Derivation::ClauseUnifier(
    std::size_t clause_index) const {
  if (goals_.empty() || clause_index >= program_->clauses.size()) {
    return std::nullopt;
  }
  const Goal& goal = goals_.front();
  if (goal.literal.negated || goal.depth >= depth_limit_) return std::nullopt;
  const Clause renamed =
      RenameForStep(program_->clauses[clause_index], steps_);
  return Unify(subst_.Apply(goal.literal.atom), renamed.head);
}

bool Derivation::NegationHolds() const {
  if (goals_.empty()) return false;
  const Goal& goal = goals_.front();
  if (!goal.literal.negated || goal.depth >= depth_limit_) return false;
  const Verdict inner = RunSolve(*program_, subst_.Apply(goal.literal.atom),
                                 depth_limit_ - goal.depth, 1);
  return !inner.entailed() && !inner.depth_exceeded;
}

bool Derivation::TryApplyClause(std::size_t clause_index) {
  const std::optional<Substitution> mgu = ClauseUnifier(clause_index);
  const std::size_t position = steps_++;
  if (!mgu) return false;
  Clause renamed = RenameForStep(program_->clauses[clause_index], position);
  Goal goal = std::move(goals_.front());
  UnifyInto(goal.literal.atom, renamed.head, subst_);
  goals_.erase(goals_.begin());
  std::vector<Goal> body;
  body.reserve(renamed.body.size());
  for (Literal& lit : renamed.body) {
    body.push_back({std::move(lit), goal.depth + 1});
  }
  goals_.insert(goals_.begin(), body.begin(), body.end());
  return true;
}

void Derivation::Skip() { ++steps_; }

bool Derivation::TryNegation() {
  const bool holds = NegationHolds();
  ++steps_;
  if (!holds) return false;
  goals_.erase(goals_.begin());
  return true;
}

ChainReport VerifyChain(const Program& program, const Term& query,
                        const ProofChain& chain, int depth_limit,
                        std::optional<VerdictValue> known_verdict) {
  ChainReport report;
  report.total_steps = chain.steps.size();
  Derivation derivation(program, query, depth_limit);
  for (std::size_t i = 0; i < chain.steps.size(); ++i) {
    const ProofStep& step = chain.steps[i];
    const std::optional<Literal> selected = derivation.SelectedGoal();
    bool valid = selected.has_value() && selected->atom == step.goal &&
                 selected->negated == step.is_naf_check();
    if (valid && step.is_naf_check()) {
      if (!selected->atom.IsGround()) report.floundering_warning = true;
      valid = derivation.TryNegation();
    } else if (valid) {
      const std::size_t index = *step.clause_index;
      if (index >= program.clauses.size()) {
        valid = false;
      } else {
        // The recorded unifier must make the goal and the renamed head equal.
        const Clause renamed = RenameForStep(program.clauses[index], i);
        valid = step.unifier.Apply(step.goal) ==
                    step.unifier.Apply(renamed.head) &&
                derivation.ClauseUnifier(index).has_value();
        if (valid) valid = derivation.TryApplyClause(index);
      }
    }
    if (!valid) {
      // Keep the step counter aligned with the chain position.
      if (derivation.steps() == i) derivation.Skip();
      if (!report.first_invalid_index) report.first_invalid_index = i;
      continue;
    }
    ++report.valid_steps;
  }
  const VerdictValue truth =
      known_verdict ? *known_verdict : Solve(program, query, depth_limit).value;
  report.answer_consistent = chain.final_answer == truth;
  return report;
}

}  // namespace rllf
