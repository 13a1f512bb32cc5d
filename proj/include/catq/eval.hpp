#pragma once

#include <string>
#include <variant>
#include <vector>

#include "catq/calculus.hpp"
#include "catq/plan.hpp"

namespace catq {

// Bottom-up interpretation of a plan. Runtime failures are rethrown as
// EvalError prefixed with the offending node.
Relation evaluate(const AlgebraPlan& plan, const InstanceCategory& cat);

inline constexpr std::size_t kDefaultOracleBound = 10'000'000;

// Brute-force semantics: enumerates every assignment of the free variables
// and evaluates the matrix directly. Throws EvalError when the number of
// assignments exceeds `bound`.
Relation oracle_evaluate(const CalculusQuery& q, const InstanceCategory& cat,
                         std::size_t bound = kDefaultOracleBound);

// Same rows and column names, ignoring the objects recorded per column.
bool same_rows(const Relation& a, const Relation& b);

// Single algebra operators with concrete inputs, for the reverse direction of
// the equivalence: each one has a calculus counterpart.
namespace sim {

struct Map {
  std::string morphism;
};
struct Select {
  std::string object;
  Comparison predicate;  // over column "x"
};
// Projection of a relationship object onto some of its components.
struct Project {
  std::string relationship;
  std::vector<std::string> keep;  // component names
};
// Dividend: a relationship object whose trailing components are divided by
// the divisor relationship's components (matched positionally).
struct Divide {
  std::string dividend;
  std::string divisor;
};
struct Tree {
  TreeAxis axis = TreeAxis::parent;
  std::string d1, d2;
};
struct Reach {
  std::string s, t, edges;
};
struct NHop {
  std::string s, t, edges;
  int n = 1;
};
struct Cat {
  DiagramSpec spec;
};
struct Lim {
  DiagramSpec spec;
};

}  // namespace sim

using SimOp = std::variant<sim::Map, sim::Select, sim::Project, sim::Divide, sim::Tree, sim::Reach,
                           sim::NHop, sim::Cat, sim::Lim>;

std::string_view sim_op_name(const SimOp& op);

CalculusQuery simulate_algebra_in_calculus(const SimOp& op, const InstanceCategory& cat);
// The operator applied directly through the algebra operators.
Relation evaluate_sim_op(const SimOp& op, const InstanceCategory& cat);

}  // namespace catq
