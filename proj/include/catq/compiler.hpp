#pragma once

#include <map>
#include <string>
#include <vector>

#include "catq/normalize.hpp"
#include "catq/plan.hpp"

namespace catq {

struct CompileOptions {
  std::size_t clause_limit = kDefaultClauseLimit;
  // Fault injection for the verification campaign: every comparison is
  // compiled with its complemented operator.
  bool flip_comparisons = false;
};

// State shared by the compilation steps of one query.
struct CompileContext {
  const InstanceCategory* cat = nullptr;
  AlgebraPlan plan;
  std::vector<std::string> variables;         // free variables, then prefix variables
  std::map<std::string, int> range_node;      // variable -> node computing its range
  std::vector<PlanArrow> membership_arrows;   // projections r -> component
  std::map<std::string, int> predicate_node;  // literal text -> derived object node
  std::map<std::string, std::string> predicate_label;
  std::vector<PlanArrow> predicate_arrows(const FormulaPtr& literal) const;
};

// Per-variable range subtrees (scan / union / intersect / difference, plus
// the null row for pointed quantifiers).
void build_range_objects(const PrenexQuery& q, CompileContext& ctx);
// Projection constraints for every relationship membership.
void build_relationship_objects(const PrenexQuery& q, CompileContext& ctx);
// One derived object per distinct tree / graph literal.
void build_predicate_objects(const PrenexQuery& q, CompileContext& ctx);

struct ClauseCategory {
  int cat_node = -1;
  std::vector<SelectionPredicate> selections;
};
// Adds the clause's cat node to the plan.
ClauseCategory build_clause_category(const Clause& clause, CompileContext& ctx,
                                     const CompileOptions& options = {});

// Compiles a normalized query (variables as named in q).
AlgebraPlan compile(const PrenexQuery& q, const InstanceCategory& cat,
                    const CompileOptions& options = {});

struct CompiledQuery {
  PrenexQuery prenex;   // after renaming
  Renaming renaming;
  AlgebraPlan plan;     // output_names are the original target names
};

// Safety check, prenex + DNF, canonical renaming, compile.
CompiledQuery compile_query(const CalculusQuery& q, const InstanceCategory& cat,
                            const CompileOptions& options = {});

// Human-readable per-clause diagrams for `explain`.
std::string describe_clause_diagrams(const AlgebraPlan& plan);

}  // namespace catq
