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

#include "rllf/term.h"

#include <algorithm>
#include <sstream>

#include "rllf/errors.h"

namespace rllf {

SyntaxError::SyntaxError(int line, int column, const std::string& message)
    : Error("syntax error at line " + std::to_string(line) + ", column " +
            std::to_string(column) + ": " + message),
      line_(line),
      column_(column),
      detail_(message) {}

Term Term::Variable(std::string name) {
  return Term{Kind::kVariable, std::move(name), {}};
}

Term Term::Constant(std::string name) {
  return Term{Kind::kConstant, std::move(name), {}};
}

Term Term::Compound(std::string functor, std::vector<Term> args) {
  if (args.empty()) return Constant(std::move(functor));
  return Term{Kind::kCompound, std::move(functor), std::move(args)};
}

bool Term::IsGround() const {
  if (is_variable()) return false;
  return std::all_of(args.begin(), args.end(),
                     [](const Term& a) { return a.IsGround(); });
}

void Term::CollectVariables(std::vector<std::string>& out) const {
  if (is_variable()) {
    if (std::find(out.begin(), out.end(), name) == out.end()) {
      out.push_back(name);
    }
    return;
  }
  for (const Term& a : args) a.CollectVariables(out);
}

PredicateKey PredicateOf(const Term& atom) { return {atom.name, atom.arity()}; }

bool Clause::IsGround() const {
  if (!head.IsGround()) return false;
  return std::all_of(body.begin(), body.end(),
                     [](const Literal& l) { return l.atom.IsGround(); });
}

bool Program::IsGround() const {
  return std::all_of(clauses.begin(), clauses.end(),
                     [](const Clause& c) { return c.IsGround(); });
}

std::size_t Program::fact_count() const {
  return std::count_if(clauses.begin(), clauses.end(),
                       [](const Clause& c) { return c.is_fact(); });
}

bool SameClauses(const Program& a, const Program& b) {
  return a.clauses == b.clauses;
}

const Term* Substitution::Find(const std::string& var) const {
  auto it = bindings_.find(var);
  return it == bindings_.end() ? nullptr : &it->second;
}

void Substitution::Bind(const std::string& var, Term value) {
  bindings_[var] = std::move(value);
}

const Term& Substitution::Walk(const Term& t) const {
  const Term* cur = &t;
  while (cur->is_variable()) {
    const Term* next = Find(cur->name);
    if (next == nullptr) break;
    cur = next;
  }
  return *cur;
}

Term Substitution::Apply(const Term& t) const {
  const Term& w = Walk(t);
  if (!w.is_compound()) return w;
  Term out{w.kind, w.name, {}};
  out.args.reserve(w.args.size());
  for (const Term& a : w.args) out.args.push_back(Apply(a));
  return out;
}

Literal Substitution::Apply(const Literal& lit) const {
  return Literal{lit.negated, Apply(lit.atom)};
}

Substitution Substitution::Resolved() const {
  Substitution out;
  for (const auto& [var, value] : bindings_) out.Bind(var, Apply(value));
  return out;
}

Substitution Substitution::RestrictedTo(
    const std::vector<std::string>& vars) const {
  Substitution out;
  for (const std::string& v : vars) {
    Term value = Apply(Term::Variable(v));
    if (value.is_variable() && value.name == v) continue;
    out.Bind(v, std::move(value));
  }
  return out;
}

std::string ToString(const Term& t) {
  if (!t.is_compound()) return t.name;
  std::string out = t.name + "(";
  for (std::size_t i = 0; i < t.args.size(); ++i) {
    if (i > 0) out += ", ";
    out += ToString(t.args[i]);
  }
  out += ")";
  return out;
}

std::string ToString(const Literal& lit) {
  return lit.negated ? "\\+ " + ToString(lit.atom) : ToString(lit.atom);
}

std::string ToString(const Clause& c) {
  std::string out = ToString(c.head);
  if (!c.body.empty()) {
    out += " :- ";
    for (std::size_t i = 0; i < c.body.size(); ++i) {
      if (i > 0) out += ", ";
      out += ToString(c.body[i]);
    }
  }
  out += ".";
  return out;
}

std::string ToString(const Program& p) {
  std::string out;
  for (const Clause& c : p.clauses) {
    out += ToString(c);
    out += "\n";
  }
  return out;
}

std::string ToString(const Substitution& s) {
  std::string out = "{";
  bool first = true;
  for (const auto& [var, value] : s.bindings()) {
    if (!first) out += ", ";
    first = false;
    out += var + " -> " + ToString(value);
  }
  out += "}";
  return out;
}

}  // namespace rllf
