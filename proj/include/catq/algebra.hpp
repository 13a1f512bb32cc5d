#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "catq/category.hpp"
#include "catq/relation.hpp"

namespace catq {

enum class CmpOp { eq, ne, lt, le, gt, ge };

std::string_view op_symbol(CmpOp op);
CmpOp negate(CmpOp op);  // complement: !(a < b) == (a >= b)
CmpOp mirror(CmpOp op);  // operand swap: (a < b) == (b > a)
bool holds(CmpOp op, std::strong_ordering ord);

struct AttributeTerm {
  std::string column;
  std::string attribute;
  friend bool operator==(const AttributeTerm&, const AttributeTerm&) = default;
};

using SelectTerm = std::variant<AttributeTerm, Value>;

// A(x) op B(y) or A(x) op constant.
struct Comparison {
  SelectTerm lhs;
  CmpOp op = CmpOp::eq;
  SelectTerm rhs;
};

// f(source) = target, or its negation when `equal` is false.
struct MorphismTest {
  std::string morphism;
  std::string source;
  std::string target;
  bool equal = true;
};

// Tests a pointed column for the null element.
struct NullTest {
  std::string column;
  bool is_null = true;
};

using SelectionPredicate = std::variant<Comparison, MorphismTest, NullTest>;

std::string to_string(const SelectionPredicate& pred);

struct MorphismConstraint {
  std::string morphism;
  std::string source;
  std::string target;
};

struct DiagramSpec {
  std::vector<std::string> objects;
  std::vector<MorphismConstraint> constraints;
};

// Evaluable diagram: finite element lists plus arrows between them. Built
// from a DiagramSpec by op_cat, or directly by the plan evaluator when the
// diagram objects are computed relations.
struct Diagram {
  struct Node {
    std::string label;
    std::string object;
    std::vector<ElementId> elements;
  };
  struct Arrow {
    std::string label;
    std::size_t source = 0;
    std::size_t target = 0;
    std::function<std::optional<ElementId>(const ElementId&)> apply;
  };
  std::vector<Node> objects;
  std::vector<Arrow> arrows;
};

// Leaf: members of an object as a one-column relation.
Relation op_scan(const InstanceCategory& cat, std::string_view object,
                 std::string_view column = {});
// Relationship object expanded into one column per component.
Relation op_expand(const InstanceCategory& cat, std::string_view relationship);

Relation op_map(const InstanceCategory& cat, std::string_view f, std::string_view input);
Relation op_map(const InstanceCategory& cat, std::string_view f, const Relation& input);

Relation op_select(const InstanceCategory& cat, const Relation& input,
                   const SelectionPredicate& pred);
bool evaluate_predicate(const InstanceCategory& cat, const Relation& input, Row row,
                        const SelectionPredicate& pred);

Relation op_project(const Relation& input, const std::vector<std::string>& keep);

// Tuples t over the non-`by` columns such that (t, u) is in the dividend for
// every row u of the divisor. Candidates come from the dividend, or from
// `universe` when given (whose columns must be the quotient columns).
Relation op_divide(const InstanceCategory& cat, const Relation& dividend, const Relation& divisor,
                   const std::vector<std::string>& by, const Relation* universe = nullptr);

Relation op_union(const InstanceCategory& cat, const Relation& lhs, const Relation& rhs);
Relation op_intersect(const InstanceCategory& cat, const Relation& lhs, const Relation& rhs);
Relation op_difference(const InstanceCategory& cat, const Relation& lhs, const Relation& rhs);

Diagram op_cat(const InstanceCategory& cat, const DiagramSpec& spec);
Relation op_lim(const Diagram& diagram);
// Unconstrained tuples of a diagram: the product of its objects.
Relation diagram_elements(const Diagram& diagram);

std::optional<DeweyCode> dewey_of(const InstanceCategory& cat, const ElementId& id);

Relation op_get_parent(const InstanceCategory& cat, const Relation& d1, const Relation& d2);
Relation op_get_ancestor(const InstanceCategory& cat, const Relation& d1, const Relation& d2);
Relation op_get_sibling(const InstanceCategory& cat, const Relation& d1, const Relation& d2);
Relation op_get_parent(const InstanceCategory& cat, std::string_view d1, std::string_view d2);
Relation op_get_ancestor(const InstanceCategory& cat, std::string_view d1, std::string_view d2);
Relation op_get_sibling(const InstanceCategory& cat, std::string_view d1, std::string_view d2);

// Pairs (s, t) joined by a directed path of at least one edge.
Relation op_get_reach(const InstanceCategory& cat, const Relation& s, const Relation& t,
                      std::string_view edges);
// Pairs (s, t) joined by a walk of exactly n edges.
Relation op_get_nhop(const InstanceCategory& cat, const Relation& s, const Relation& t,
                     std::string_view edges, int n);
Relation op_get_reach(const InstanceCategory& cat, std::string_view s, std::string_view t,
                      std::string_view edges);
Relation op_get_nhop(const InstanceCategory& cat, std::string_view s, std::string_view t,
                     std::string_view edges, int n);

// Path-length policy for reachability; flip here to make it reflexive.
inline constexpr bool kReachIncludesEmptyPath = false;

}  // namespace catq
