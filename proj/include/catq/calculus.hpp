#pragma once

#include <memory>
#include <string>
#include <vector>

#include "catq/algebra.hpp"
#include "catq/category.hpp"

namespace catq {

// Boolean combination of object names, the range of a variable.
struct RangeExpr {
  enum class Kind { object, union_of, intersect_of, difference_of };
  Kind kind = Kind::object;
  std::string object;               // Kind::object
  std::vector<RangeExpr> operands;  // exactly two for the set operations

  static RangeExpr of(std::string object);
  static RangeExpr combine(Kind kind, RangeExpr lhs, RangeExpr rhs);

  // Object names in left-to-right order, repeats kept.
  std::vector<std::string> objects() const;

  friend bool operator==(const RangeExpr&, const RangeExpr&) = default;
};

std::string to_string(const RangeExpr& range);

enum class TreeAxis { parent, ancestor, sibling };
std::string_view axis_name(TreeAxis axis);  // isParent / isAncestor / isSibling

enum class FormulaKind {
  truth,
  falsity,
  compare,   // lhs op rhs over attribute terms / constants
  morph_eq,  // name(vars[0]) = vars[1]
  tree,      // axis(vars[0], vars[1])
  reach,     // reach(vars[0], vars[1], name)
  nhop,      // nhop(hops, vars[0], vars[1], name)
  is_null,   // null(vars[0])
  negation,
  conjunction,
  disjunction,
  forall,
  exists,
  // Produced only while parsing top-level conjuncts; parse_query lifts them
  // into RangeTerm / Membership entries.
  range_test,  // vars[0] in range
  membership,  // vars[0] = (vars[1..]) in name
};

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
  FormulaKind kind = FormulaKind::truth;

  SelectTerm lhs;
  CmpOp op = CmpOp::eq;
  SelectTerm rhs;

  std::string name;  // morphism or edge set
  TreeAxis axis = TreeAxis::parent;
  int hops = 0;
  std::vector<std::string> vars;

  // negation: one child; conjunction/disjunction: two children; quantifiers:
  // the body. Quantifiers bind vars[0] over `range`, plus the null element
  // when `pointed`.
  std::vector<FormulaPtr> children;
  RangeExpr range;
  bool pointed = false;

  bool is_quantifier() const { return kind == FormulaKind::forall || kind == FormulaKind::exists; }
  bool is_atom() const;
};

FormulaPtr make_true();
FormulaPtr make_false();
FormulaPtr make_compare(SelectTerm lhs, CmpOp op, SelectTerm rhs);
FormulaPtr make_morph_eq(std::string morphism, std::string x, std::string y);
FormulaPtr make_tree(TreeAxis axis, std::string x, std::string y);
FormulaPtr make_reach(std::string x, std::string y, std::string edges);
FormulaPtr make_nhop(int n, std::string x, std::string y, std::string edges);
FormulaPtr make_is_null(std::string v);
FormulaPtr make_not(FormulaPtr f);
FormulaPtr make_and(FormulaPtr a, FormulaPtr b);
FormulaPtr make_or(FormulaPtr a, FormulaPtr b);
FormulaPtr make_quant(FormulaKind kind, std::string var, RangeExpr range, FormulaPtr body,
                      bool pointed = false);
// Left fold with && / ||; empty lists give true / false.
FormulaPtr make_all(const std::vector<FormulaPtr>& parts);
FormulaPtr make_any(const std::vector<FormulaPtr>& parts);

bool structurally_equal(const FormulaPtr& a, const FormulaPtr& b);

// Variables occurring free in f, in order of first occurrence.
std::vector<std::string> free_variables(const FormulaPtr& f);

struct RangeTerm {
  std::string var;
  RangeExpr range;
  friend bool operator==(const RangeTerm&, const RangeTerm&) = default;
};

// r = (x1, ..., xk) in R
struct Membership {
  std::string var;
  std::vector<std::string> components;
  std::string relationship;
  friend bool operator==(const Membership&, const Membership&) = default;
};

struct CalculusQuery {
  std::vector<std::string> targets;
  std::vector<RangeTerm> ranges;
  std::vector<Membership> memberships;
  FormulaPtr matrix = make_true();
};

bool structurally_equal(const CalculusQuery& a, const CalculusQuery& b);

CalculusQuery parse_query(std::string_view text);
FormulaPtr parse_formula(std::string_view text);

std::string to_string(const FormulaPtr& f);
std::string to_string(const CalculusQuery& q);

// Free (non-quantified) variables of a query with the object each ranges over:
// explicit range terms, relationship variables, then membership components
// that have no explicit range. Order is stable and drives column order.
struct FreeVariable {
  std::string name;
  RangeExpr range;
};
std::vector<FreeVariable> free_variables(const CalculusQuery& q, const InstanceCategory& cat);

// Range-restriction and typing checks. Returns human-readable violations.
std::vector<std::string> check_safety(const CalculusQuery& q, const InstanceCategory& cat);
// Throws SafetyError listing the violations, if any.
void require_safe(const CalculusQuery& q, const InstanceCategory& cat);

// Carrier of a range expression; throws SafetyError for unknown objects or
// union-incompatible operands.
std::string range_carrier(const RangeExpr& range, const InstanceCategory& cat);

}  // namespace catq
