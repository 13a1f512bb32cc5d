#pragma once

#include <string>
#include <utility>
#include <vector>

#include "catq/calculus.hpp"

namespace catq {

inline constexpr std::size_t kDefaultClauseLimit = 4096;

struct QuantifierEntry {
  FormulaKind kind = FormulaKind::exists;  // forall or exists
  std::string var;
  RangeExpr range;
  bool pointed = false;  // ranges over range + the null element
};

// Literals are atoms or negated atoms; comparisons carry negation in their
// operator instead.
using Clause = std::vector<FormulaPtr>;

struct PrenexQuery {
  std::vector<std::string> targets;
  std::vector<RangeTerm> ranges;
  std::vector<Membership> memberships;
  std::vector<QuantifierEntry> prefix;  // outermost first
  std::vector<Clause> clauses;          // disjunction of conjunctions
};

// Negation normal form: negations only directly above non-comparison atoms.
FormulaPtr to_nnf(const FormulaPtr& f);

// Throws CompileError once the clause count would exceed `clause_limit`.
std::vector<Clause> to_dnf(const FormulaPtr& matrix, std::size_t clause_limit = kDefaultClauseLimit);

// Hoists quantifiers left to right. A quantifier whose range might be empty
// cannot move across && (forall) or || (exists) unchanged; it is made pointed
// and guarded with null(v) so the hoisted form stays equivalent.
FormulaPtr prenex_formula(const FormulaPtr& f);

PrenexQuery to_prenex(const CalculusQuery& q, std::size_t clause_limit = kDefaultClauseLimit);

struct Renaming {
  PrenexQuery query;
  std::vector<std::pair<std::string, std::string>> mapping;  // original -> canonical
};

// Renames every variable to x1..xn in order of first occurrence in the
// qualification (ranges, memberships, prefix, clauses).
Renaming rename_variables(const PrenexQuery& q);

FormulaPtr clauses_formula(const std::vector<Clause>& clauses);
CalculusQuery to_calculus(const PrenexQuery& q);

std::string to_string(const PrenexQuery& q);
std::string clauses_to_string(const std::vector<Clause>& clauses);

// Substitutes variable names throughout a formula (free and bound).
FormulaPtr rename_formula(const FormulaPtr& f,
                          const std::vector<std::pair<std::string, std::string>>& mapping);

}  // namespace catq
