#pragma once

#include <optional>
#include <string>
#include <vector>

#include "catq/algebra.hpp"

namespace catq {

enum class PlanOp {
  scan,
  null_row,  // the one-row relation holding the null element
  map,
  select,
  project,
  divide,  // inputs: dividend, divisor[, universe]
  union_of,
  intersect,
  difference,
  cat,
  lim,
  get_parent,
  get_ancestor,
  get_sibling,
  get_reach,
  get_nhop,
};

std::string_view op_name(PlanOp op);

// Diagram arrow inside a cat node. Either a category morphism, or (`column`
// set) the projection of a multi-column input onto one of its columns.
struct PlanArrow {
  std::string morphism;
  std::string source;  // cat label
  std::string target;  // cat label
  bool column = false;

  friend bool operator==(const PlanArrow&, const PlanArrow&) = default;
};

struct PlanNode {
  int id = 0;
  PlanOp op = PlanOp::scan;
  std::vector<int> inputs;

  std::string object;                          // scan
  std::string label;                           // scan / null_row column name
  std::string morphism;                        // map
  std::optional<SelectionPredicate> predicate; // select
  std::vector<std::string> columns;            // project keep, divide by, cat labels
  std::vector<PlanArrow> arrows;               // cat
  std::string edges;                           // get_reach / get_nhop
  int hops = 0;                                // get_nhop
};

struct AlgebraPlan {
  std::vector<PlanNode> nodes;  // node i has id i; inputs always precede users
  int root = -1;
  std::vector<std::string> output_names;

  int add(PlanNode node);
  const PlanNode& node(int id) const { return nodes.at(static_cast<std::size_t>(id)); }
};

// Column names each node produces; throws CompileError naming the node when
// the plan does not type-check.
std::vector<std::vector<std::string>> plan_columns(const AlgebraPlan& plan);

// Line-oriented text form, one node per line, then the root line.
std::string to_string(const AlgebraPlan& plan);

}  // namespace catq
