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

#ifndef RLLF_TERM_H_
#define RLLF_TERM_H_

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace rllf {

// A first-order term. Variables start with an uppercase letter or '_',
// constants and functors with a lowercase letter. Compound terms always have
// at least one argument.
struct Term {
  enum class Kind { kVariable, kConstant, kCompound };

  Kind kind = Kind::kConstant;
  std::string name;
  std::vector<Term> args;

  static Term Variable(std::string name);
  static Term Constant(std::string name);
  static Term Compound(std::string functor, std::vector<Term> args);

  bool is_variable() const { return kind == Kind::kVariable; }
  bool is_constant() const { return kind == Kind::kConstant; }
  bool is_compound() const { return kind == Kind::kCompound; }
  std::size_t arity() const { return args.size(); }

  bool IsGround() const;
  void CollectVariables(std::vector<std::string>& out) const;

  friend bool operator==(const Term&, const Term&) = default;
  friend auto operator<=>(const Term& a, const Term& b) {
    if (auto c = a.kind <=> b.kind; c != 0) return c;
    if (auto c = a.name <=> b.name; c != 0) return c;
    return a.args <=> b.args;
  }
};

// name/arity, the key used for predicate-level analyses.
using PredicateKey = std::pair<std::string, std::size_t>;
PredicateKey PredicateOf(const Term& atom);

struct Literal {
  bool negated = false;  // negation as failure
  Term atom;

  friend bool operator==(const Literal&, const Literal&) = default;
};

struct Clause {
  Term head;
  std::vector<Literal> body;  // empty for facts

  bool is_fact() const { return body.empty(); }
  bool IsGround() const;

  friend bool operator==(const Clause&, const Clause&) = default;
};

struct Program {
  std::vector<Clause> clauses;
  std::string source_text;

  std::size_t size() const { return clauses.size(); }
  bool IsGround() const;
  std::size_t fact_count() const;
  std::size_t rule_count() const { return clauses.size() - fact_count(); }
};

// Structural equality ignoring source_text.
bool SameClauses(const Program& a, const Program& b);

// Mapping from variable name to term. Substitutions handed out by the
// public API are fully resolved: no bound variable occurs in any binding.
class Substitution {
 public:
  Substitution() = default;

  bool empty() const { return bindings_.empty(); }
  std::size_t size() const { return bindings_.size(); }
  const std::map<std::string, Term>& bindings() const { return bindings_; }

  const Term* Find(const std::string& var) const;
  void Bind(const std::string& var, Term value);

  // Follows variable bindings at the top level only.
  const Term& Walk(const Term& t) const;

  // Fully applies the (possibly triangular) bindings to `t`.
  Term Apply(const Term& t) const;
  Literal Apply(const Literal& lit) const;

  // Resolves every binding so the result is idempotent.
  Substitution Resolved() const;

  // Keeps only the given variables (already resolved).
  Substitution RestrictedTo(const std::vector<std::string>& vars) const;

  friend bool operator==(const Substitution&, const Substitution&) = default;

 private:
  std::map<std::string, Term> bindings_;
};

// Textual form in the program grammar.
std::string ToString(const Term& t);
std::string ToString(const Literal& lit);
std::string ToString(const Clause& c);
std::string ToString(const Program& p);
std::string ToString(const Substitution& s);

}  // namespace rllf

#endif  // RLLF_TERM_H_
