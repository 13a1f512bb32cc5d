#include "catq/algebra.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

#include "catq/errors.hpp"

namespace catq {

std::string_view op_symbol(CmpOp op) {
  switch (op) {
    case CmpOp::eq: return "=";
    case CmpOp::ne: return "!=";
    case CmpOp::lt: return "<";
    case CmpOp::le: return "<=";
    case CmpOp::gt: return ">";
    case CmpOp::ge: return ">=";
  }
  return "?";
}

CmpOp negate(CmpOp op) {
  switch (op) {
    case CmpOp::eq: return CmpOp::ne;
    case CmpOp::ne: return CmpOp::eq;
    case CmpOp::lt: return CmpOp::ge;
    case CmpOp::le: return CmpOp::gt;
    case CmpOp::gt: return CmpOp::le;
    case CmpOp::ge: return CmpOp::lt;
  }
  return op;
}

CmpOp mirror(CmpOp op) {
  switch (op) {
    case CmpOp::lt: return CmpOp::gt;
    case CmpOp::le: return CmpOp::ge;
    case CmpOp::gt: return CmpOp::lt;
    case CmpOp::ge: return CmpOp::le;
    default: return op;
  }
}

bool holds(CmpOp op, std::strong_ordering ord) {
  switch (op) {
    case CmpOp::eq: return ord == 0;
    case CmpOp::ne: return ord != 0;
    case CmpOp::lt: return ord < 0;
    case CmpOp::le: return ord <= 0;
    case CmpOp::gt: return ord > 0;
    case CmpOp::ge: return ord >= 0;
  }
  return false;
}

namespace {

std::string term_string(const SelectTerm& t) {
  if (const auto* a = std::get_if<AttributeTerm>(&t)) return a->column + "." + a->attribute;
  return std::get<Value>(t).to_literal();
}

const std::string& null_object_name() {
  static const std::string name = ElementId::null().object_name();
  return name;
}

std::string carrier_or_self(const InstanceCategory& cat, const std::string& object) {
  const auto* o = cat.find_object(object);
  return o ? o->carrier : object;
}

// Column object for the result of a set operation over two compatible columns.
std::string merged_object(const InstanceCategory& cat, const Column& a, const Column& b) {
  if (a.object == b.object) return a.object;
  if (a.object == null_object_name()) return b.object;
  if (b.object == null_object_name()) return a.object;
  return carrier_or_self(cat, a.object);
}

void check_compatible(const InstanceCategory& cat, const Relation& lhs, const Relation& rhs,
                      std::string_view op) {
  if (lhs.arity() != rhs.arity()) {
    throw EvalError(std::string(op) + ": operands are not union-compatible (arity " +
                    std::to_string(lhs.arity()) + " vs " + std::to_string(rhs.arity()) + ")");
  }
  for (std::size_t i = 0; i < lhs.arity(); ++i) {
    const auto& a = lhs.columns()[i];
    const auto& b = rhs.columns()[i];
    if (a.name != b.name) {
      throw EvalError(std::string(op) + ": column " + std::to_string(i) + " is '" + a.name +
                      "' on the left and '" + b.name + "' on the right");
    }
    if (a.object == null_object_name() || b.object == null_object_name()) continue;
    if (carrier_or_self(cat, a.object) != carrier_or_self(cat, b.object)) {
      throw EvalError(std::string(op) + ": objects '" + a.object + "' and '" + b.object +
                      "' are not union-compatible");
    }
  }
}

std::vector<Column> merged_columns(const InstanceCategory& cat, const Relation& lhs,
                                   const Relation& rhs) {
  std::vector<Column> cols = lhs.columns();
  for (std::size_t i = 0; i < cols.size(); ++i) {
    cols[i].object = merged_object(cat, lhs.columns()[i], rhs.columns()[i]);
  }
  return cols;
}

std::optional<Value> term_value(const InstanceCategory& cat, const Relation& input, Row row,
                                const SelectTerm& term) {
  if (const auto* v = std::get_if<Value>(&term)) return *v;
  const auto& a = std::get<AttributeTerm>(term);
  const auto& id = row[input.column_index(a.column)];
  if (id.is_null()) return std::nullopt;
  return cat.attribute_of(id, a.attribute);
}

}  // namespace

std::string to_string(const SelectionPredicate& pred) {
  if (const auto* c = std::get_if<Comparison>(&pred)) {
    return term_string(c->lhs) + " " + std::string(op_symbol(c->op)) + " " + term_string(c->rhs);
  }
  if (const auto* m = std::get_if<MorphismTest>(&pred)) {
    return m->morphism + "(" + m->source + ") " + (m->equal ? "=" : "!=") + " " + m->target;
  }
  const auto& n = std::get<NullTest>(pred);
  return std::string(n.is_null ? "" : "!") + "null(" + n.column + ")";
}

Relation op_scan(const InstanceCategory& cat, std::string_view object, std::string_view column) {
  const auto& obj = cat.object(object);
  RelationBuilder b({Column{std::string(column.empty() ? object : column), obj.name}});
  for (const auto& id : obj.members) b.add({id});
  return std::move(b).build();
}

Relation op_expand(const InstanceCategory& cat, std::string_view relationship) {
  const auto& obj = cat.object(relationship);
  if (obj.kind != ObjectKind::relationship) {
    throw EvalError("'" + obj.name + "' is not a relationship object");
  }
  std::vector<Column> cols;
  for (const auto& c : obj.components) cols.push_back({c.name, c.object});
  RelationBuilder b(std::move(cols));
  for (const auto& id : obj.members) {
    const auto& tuple = std::get<Tuple>(cat.element_or_throw(id).payload);
    b.add(Row(tuple.data(), tuple.size()));
  }
  return std::move(b).build();
}

Relation op_map(const InstanceCategory& cat, std::string_view f, std::string_view input) {
  const auto& m = cat.morphism(f);
  if (m.domain != input) {
    throw EvalError("map: morphism '" + m.name + "' has domain '" + m.domain + "', not '" +
                    std::string(input) + "'");
  }
  return op_map(cat, f, op_scan(cat, input));
}

Relation op_map(const InstanceCategory& cat, std::string_view f, const Relation& input) {
  const auto& m = cat.morphism(f);
  if (input.arity() != 1) throw EvalError("map expects a one-column input");
  RelationBuilder b({Column{m.codomain, m.codomain}});
  for (std::size_t i = 0; i < input.size(); ++i) b.add({cat.apply_morphism(f, input.row(i)[0])});
  return std::move(b).build();
}

bool evaluate_predicate(const InstanceCategory& cat, const Relation& input, Row row,
                        const SelectionPredicate& pred) {
  if (const auto* c = std::get_if<Comparison>(&pred)) {
    auto lhs = term_value(cat, input, row, c->lhs);
    auto rhs = term_value(cat, input, row, c->rhs);
    if (!lhs || !rhs) return false;
    return holds(c->op, compare_values(*lhs, *rhs));
  }
  if (const auto* m = std::get_if<MorphismTest>(&pred)) {
    const auto& x = row[input.column_index(m->source)];
    const auto& y = row[input.column_index(m->target)];
    if (x.is_null() || y.is_null()) return false;
    auto image = cat.try_apply(cat.morphism(m->morphism), x);
    const bool eq = image && *image == y;
    return m->equal ? eq : !eq;
  }
  const auto& n = std::get<NullTest>(pred);
  return row[input.column_index(n.column)].is_null() == n.is_null;
}

Relation op_select(const InstanceCategory& cat, const Relation& input,
                   const SelectionPredicate& pred) {
  RelationBuilder b(input.columns());
  for (std::size_t i = 0; i < input.size(); ++i) {
    if (evaluate_predicate(cat, input, input.row(i), pred)) b.add(input.row(i));
  }
  return std::move(b).build();
}

Relation op_project(const Relation& input, const std::vector<std::string>& keep) {
  if (keep.empty()) throw EvalError("project needs at least one column");
  std::vector<std::size_t> idx;
  std::vector<Column> cols;
  for (const auto& name : keep) {
    auto i = input.column_index(name);
    if (std::find(idx.begin(), idx.end(), i) != idx.end()) {
      throw EvalError("project lists column '" + name + "' twice");
    }
    idx.push_back(i);
    cols.push_back(input.columns()[i]);
  }
  RelationBuilder b(std::move(cols));
  b.reserve(input.size());
  for (std::size_t r = 0; r < input.size(); ++r) {
    auto row = input.row(r);
    for (auto i : idx) b.push(row[i]);
  }
  return std::move(b).build();
}

Relation op_divide(const InstanceCategory& cat, const Relation& dividend, const Relation& divisor,
                   const std::vector<std::string>& by, const Relation* universe) {
  if (by.empty()) throw EvalError("divide: empty 'by' list");
  if (divisor.arity() != by.size()) {
    throw EvalError("divide: divisor has " + std::to_string(divisor.arity()) +
                    " columns but 'by' names " + std::to_string(by.size()));
  }
  std::vector<std::size_t> by_idx;
  for (std::size_t i = 0; i < by.size(); ++i) {
    auto idx = dividend.column_index(by[i]);
    const auto& dc = dividend.columns()[idx];
    const auto& vc = divisor.columns()[i];
    if (dc.object != null_object_name() && vc.object != null_object_name() &&
        carrier_or_self(cat, dc.object) != carrier_or_self(cat, vc.object)) {
      throw EvalError("divide: column '" + by[i] + "' ranges over '" + dc.object +
                      "' but the divisor column ranges over '" + vc.object + "'");
    }
    by_idx.push_back(idx);
  }
  std::vector<std::size_t> rest_idx;
  std::vector<std::string> rest_names;
  for (std::size_t i = 0; i < dividend.arity(); ++i) {
    if (std::find(by_idx.begin(), by_idx.end(), i) == by_idx.end()) {
      rest_idx.push_back(i);
      rest_names.push_back(dividend.columns()[i].name);
    }
  }
  if (rest_idx.empty()) throw EvalError("divide: 'by' covers every dividend column");

  Relation candidates;
  if (universe) {
    if (universe->arity() != rest_idx.size()) throw EvalError("divide: universe has wrong arity");
    for (std::size_t i = 0; i < rest_idx.size(); ++i) {
      if (universe->columns()[i].name != rest_names[i]) {
        throw EvalError("divide: universe column '" + universe->columns()[i].name +
                        "' does not match quotient column '" + rest_names[i] + "'");
      }
    }
    candidates = *universe;
  } else {
    candidates = op_project(dividend, rest_names);
  }

  std::vector<ElementId> probe(dividend.arity());
  RelationBuilder b(candidates.columns());
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    auto t = candidates.row(c);
    for (std::size_t i = 0; i < rest_idx.size(); ++i) probe[rest_idx[i]] = t[i];
    bool all = true;
    for (std::size_t d = 0; d < divisor.size() && all; ++d) {
      auto u = divisor.row(d);
      for (std::size_t i = 0; i < by_idx.size(); ++i) probe[by_idx[i]] = u[i];
      all = dividend.contains(Row(probe.data(), probe.size()));
    }
    if (all) b.add(t);
  }
  return std::move(b).build();
}

Relation op_union(const InstanceCategory& cat, const Relation& lhs, const Relation& rhs) {
  check_compatible(cat, lhs, rhs, "union");
  RelationBuilder b(merged_columns(cat, lhs, rhs));
  b.reserve(lhs.size() + rhs.size());
  for (std::size_t i = 0; i < lhs.size(); ++i) b.add(lhs.row(i));
  for (std::size_t i = 0; i < rhs.size(); ++i) b.add(rhs.row(i));
  return std::move(b).build();
}

Relation op_intersect(const InstanceCategory& cat, const Relation& lhs, const Relation& rhs) {
  check_compatible(cat, lhs, rhs, "intersect");
  RelationBuilder b(merged_columns(cat, lhs, rhs));
  for (std::size_t i = 0; i < lhs.size(); ++i) {
    if (rhs.contains(lhs.row(i))) b.add(lhs.row(i));
  }
  return std::move(b).build();
}

Relation op_difference(const InstanceCategory& cat, const Relation& lhs, const Relation& rhs) {
  check_compatible(cat, lhs, rhs, "difference");
  RelationBuilder b(lhs.columns());
  for (std::size_t i = 0; i < lhs.size(); ++i) {
    if (!rhs.contains(lhs.row(i))) b.add(lhs.row(i));
  }
  return std::move(b).build();
}

Diagram op_cat(const InstanceCategory& cat, const DiagramSpec& spec) {
  if (spec.objects.empty()) throw EvalError("cat: a diagram needs at least one object");
  Diagram d;
  std::map<std::string, std::size_t> index;
  for (const auto& name : spec.objects) {
    if (!index.emplace(name, d.objects.size()).second) {
      throw EvalError("cat: object '" + name + "' listed twice");
    }
    const auto* obj = cat.find_object(name);
    if (!obj) throw EvalError("cat: unknown object '" + name + "'");
    d.objects.push_back({name, name, obj->members});
  }
  for (const auto& c : spec.constraints) {
    const auto* m = cat.find_morphism(c.morphism);
    if (!m) throw EvalError("cat: unknown morphism '" + c.morphism + "'");
    auto s = index.find(c.source);
    auto t = index.find(c.target);
    if (s == index.end() || t == index.end()) {
      throw EvalError("cat: constraint " + c.morphism + ": " + c.source + " -> " + c.target +
                      " names an object outside the diagram");
    }
    if (m->domain != c.source || m->codomain != c.target) {
      throw EvalError("cat: constraint " + c.morphism + ": " + c.source + " -> " + c.target +
                      " does not match the morphism's type " + m->domain + " -> " + m->codomain);
    }
    d.arrows.push_back({c.morphism, s->second, t->second,
                        [&cat, m](const ElementId& x) { return cat.try_apply(*m, x); }});
  }
  return d;
}

namespace {

struct LimState {
  std::vector<std::size_t> order;     // diagram node per partial-tuple slot
  std::vector<std::ptrdiff_t> slot;   // diagram node -> slot, -1 when unbound
  std::vector<ElementId> cells;       // flat partial tuples
  std::size_t width() const { return order.size(); }
  std::size_t rows() const { return order.empty() ? 1 : cells.size() / order.size(); }
};

}  // namespace

Relation op_lim(const Diagram& diagram) {
  const auto& nodes = diagram.objects;
  const auto& arrows = diagram.arrows;
  if (nodes.empty()) throw EvalError("lim: empty diagram");

  std::vector<ElementSet> member_sets(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    member_sets[i].insert(nodes[i].elements.begin(), nodes[i].elements.end());
  }

  LimState st;
  st.slot.assign(nodes.size(), -1);
  std::vector<bool> checked(arrows.size(), false);
  bool empty_result = false;

  while (st.width() < nodes.size() && !empty_result) {
    // greedy choice of the next object by estimated growth factor
    std::size_t best = nodes.size();
    double best_cost = 0;
    std::ptrdiff_t best_arrow = -1;
    bool best_forward = false;
    for (std::size_t u = 0; u < nodes.size(); ++u) {
      if (st.slot[u] >= 0) continue;
      double cost = static_cast<double>(nodes[u].elements.size());
      std::ptrdiff_t via = -1;
      bool forward = false;
      for (std::size_t a = 0; a < arrows.size(); ++a) {
        const auto& ar = arrows[a];
        if (ar.target == u && ar.source != u && st.slot[ar.source] >= 0) {
          // functional lookup: at most one extension per partial tuple
          if (!forward) {
            cost = std::min(cost, 1.0);
            via = static_cast<std::ptrdiff_t>(a);
            forward = true;
          }
        } else if (!forward && ar.source == u && ar.target != u && st.slot[ar.target] >= 0) {
          double fan = static_cast<double>(nodes[u].elements.size()) /
                       static_cast<double>(std::max<std::size_t>(1, nodes[ar.target].elements.size()));
          if (via < 0 || fan < cost) {
            cost = std::min(cost, fan);
            via = static_cast<std::ptrdiff_t>(a);
          }
        }
      }
      if (best == nodes.size() || cost < best_cost) {
        best = u;
        best_cost = cost;
        best_arrow = via;
        best_forward = forward;
      }
    }

    const std::size_t u = best;
    const auto& candidates_all = nodes[u].elements;
    std::vector<ElementId> next;
    const std::size_t w = st.width();
    const std::size_t rows = st.rows();
    auto emit = [&](std::size_t r, const ElementId& y) {
      next.insert(next.end(), st.cells.begin() + r * w, st.cells.begin() + (r + 1) * w);
      next.push_back(y);
    };

    if (best_arrow >= 0 && best_forward) {
      const auto& ar = arrows[best_arrow];
      const auto src_slot = static_cast<std::size_t>(st.slot[ar.source]);
      for (std::size_t r = 0; r < rows; ++r) {
        auto y = ar.apply(st.cells[r * w + src_slot]);
        if (y && member_sets[u].count(*y)) emit(r, *y);
      }
      checked[best_arrow] = true;
    } else if (best_arrow >= 0) {
      const auto& ar = arrows[best_arrow];
      const auto tgt_slot = static_cast<std::size_t>(st.slot[ar.target]);
      std::unordered_map<ElementId, std::vector<ElementId>, ElementIdHash> inverse;
      for (const auto& x : candidates_all) {
        if (auto y = ar.apply(x)) inverse[*y].push_back(x);
      }
      for (std::size_t r = 0; r < rows; ++r) {
        auto it = inverse.find(st.cells[r * w + tgt_slot]);
        if (it == inverse.end()) continue;
        for (const auto& x : it->second) emit(r, x);
      }
      checked[best_arrow] = true;
    } else {
      next.reserve(rows * (w + 1) * candidates_all.size());
      for (std::size_t r = 0; r < rows; ++r) {
        for (const auto& x : candidates_all) emit(r, x);
      }
    }
    st.slot[u] = static_cast<std::ptrdiff_t>(w);
    st.order.push_back(u);
    st.cells = std::move(next);

    // residual constraints whose ends are now both bound
    for (std::size_t a = 0; a < arrows.size(); ++a) {
      const auto& ar = arrows[a];
      if (checked[a] || st.slot[ar.source] < 0 || st.slot[ar.target] < 0) continue;
      checked[a] = true;
      const std::size_t nw = st.width();
      const auto s = static_cast<std::size_t>(st.slot[ar.source]);
      const auto t = static_cast<std::size_t>(st.slot[ar.target]);
      std::vector<ElementId> kept;
      for (std::size_t r = 0; r < st.rows(); ++r) {
        auto y = ar.apply(st.cells[r * nw + s]);
        if (y && *y == st.cells[r * nw + t]) {
          kept.insert(kept.end(), st.cells.begin() + r * nw, st.cells.begin() + (r + 1) * nw);
        }
      }
      st.cells = std::move(kept);
    }
    if (st.cells.empty()) empty_result = true;
  }

  std::vector<Column> cols;
  for (const auto& n : nodes) cols.push_back({n.label, n.object});
  RelationBuilder b(std::move(cols));
  if (empty_result) return std::move(b).build();
  const std::size_t w = st.width();
  b.reserve(st.rows());
  for (std::size_t r = 0; r < st.rows(); ++r) {
    for (std::size_t n = 0; n < nodes.size(); ++n) {
      b.push(st.cells[r * w + static_cast<std::size_t>(st.slot[n])]);
    }
  }
  return std::move(b).build();
}

Relation diagram_elements(const Diagram& diagram) {
  Diagram bare;
  bare.objects = diagram.objects;
  return op_lim(bare);
}

std::optional<DeweyCode> dewey_of(const InstanceCategory& cat, const ElementId& id) {
  const auto* el = cat.element(id);
  if (!el) return std::nullopt;
  if (const auto* v = std::get_if<Value>(&el->payload)) {
    if (v->kind() == ValueKind::dewey) return v->as_dewey();
    return std::nullopt;
  }
  if (const auto* rec = std::get_if<Record>(&el->payload)) {
    for (const auto& [name, value] : *rec) {
      if (name == "dewey" && value.kind() == ValueKind::dewey) return value.as_dewey();
    }
  }
  return std::nullopt;
}

namespace {

struct DeweyHash {
  std::size_t operator()(const std::vector<std::uint32_t>& v) const noexcept {
    std::size_t h = 1469598103934665603ull;
    for (auto c : v) h = (h ^ c) * 1099511628211ull;
    return h;
  }
};

using DeweyIndex =
    std::unordered_map<std::vector<std::uint32_t>, std::vector<ElementId>, DeweyHash>;

std::vector<std::pair<ElementId, DeweyCode>> dewey_column(const InstanceCategory& cat,
                                                          const Relation& rel,
                                                          std::string_view op) {
  if (rel.arity() != 1) throw EvalError(std::string(op) + " expects one-column inputs");
  std::vector<std::pair<ElementId, DeweyCode>> out;
  for (std::size_t i = 0; i < rel.size(); ++i) {
    const auto& id = rel.row(i)[0];
    if (id.is_null()) continue;
    auto code = dewey_of(cat, id);
    if (!code) {
      throw EvalError(std::string(op) + ": element '" + cat.key_of(id) +
                      "' carries no dewey code");
    }
    out.emplace_back(id, *code);
  }
  return out;
}

DeweyIndex index_by_code(const std::vector<std::pair<ElementId, DeweyCode>>& items) {
  DeweyIndex index;
  for (const auto& [id, code] : items) index[code.components()].push_back(id);
  return index;
}

std::vector<Column> pair_columns(const Relation& a, const Relation& b, std::string first,
                                 std::string second) {
  return {Column{std::move(first), a.columns()[0].object},
          Column{std::move(second), b.columns()[0].object}};
}

}  // namespace

Relation op_get_parent(const InstanceCategory& cat, const Relation& d1, const Relation& d2) {
  auto parents = index_by_code(dewey_column(cat, d1, "getParent"));
  auto children = dewey_column(cat, d2, "getParent");
  RelationBuilder b(pair_columns(d1, d2, "parent", "child"));
  for (const auto& [child, code] : children) {
    if (code.depth() < 2) continue;
    std::vector<std::uint32_t> up(code.components().begin(), code.components().end() - 1);
    if (auto it = parents.find(up); it != parents.end()) {
      for (const auto& p : it->second) b.add({p, child});
    }
  }
  return std::move(b).build();
}

Relation op_get_ancestor(const InstanceCategory& cat, const Relation& d1, const Relation& d2) {
  auto ancestors = index_by_code(dewey_column(cat, d1, "getAncestor"));
  auto descendants = dewey_column(cat, d2, "getAncestor");
  RelationBuilder b(pair_columns(d1, d2, "ancestor", "descendant"));
  for (const auto& [desc, code] : descendants) {
    std::vector<std::uint32_t> prefix(code.components().begin(), code.components().end());
    while (prefix.size() > 1) {
      prefix.pop_back();
      if (auto it = ancestors.find(prefix); it != ancestors.end()) {
        for (const auto& a : it->second) b.add({a, desc});
      }
    }
  }
  return std::move(b).build();
}

Relation op_get_sibling(const InstanceCategory& cat, const Relation& d1, const Relation& d2) {
  auto left = dewey_column(cat, d1, "getSibling");
  auto right = dewey_column(cat, d2, "getSibling");
  DeweyIndex by_parent;
  std::unordered_map<ElementId, std::uint32_t, ElementIdHash> last;
  for (const auto& [id, code] : right) {
    if (code.depth() < 2) continue;
    std::vector<std::uint32_t> up(code.components().begin(), code.components().end() - 1);
    by_parent[up].push_back(id);
    last[id] = code.components().back();
  }
  RelationBuilder b(pair_columns(d1, d2, "left", "right"));
  for (const auto& [id, code] : left) {
    if (code.depth() < 2) continue;
    std::vector<std::uint32_t> up(code.components().begin(), code.components().end() - 1);
    auto it = by_parent.find(up);
    if (it == by_parent.end()) continue;
    for (const auto& other : it->second) {
      if (last[other] != code.components().back()) b.add({id, other});
    }
  }
  return std::move(b).build();
}

Relation op_get_parent(const InstanceCategory& cat, std::string_view d1, std::string_view d2) {
  return op_get_parent(cat, op_scan(cat, d1), op_scan(cat, d2));
}
Relation op_get_ancestor(const InstanceCategory& cat, std::string_view d1, std::string_view d2) {
  return op_get_ancestor(cat, op_scan(cat, d1), op_scan(cat, d2));
}
Relation op_get_sibling(const InstanceCategory& cat, std::string_view d1, std::string_view d2) {
  return op_get_sibling(cat, op_scan(cat, d1), op_scan(cat, d2));
}

namespace {

struct EdgeGraph {
  std::unordered_map<ElementId, std::uint32_t, ElementIdHash> index;
  std::vector<ElementId> nodes;
  std::vector<std::vector<std::uint32_t>> out;
  std::vector<std::vector<std::uint32_t>> in;
};

EdgeGraph build_graph(const InstanceCategory& cat, std::string_view edges) {
  const auto& e = cat.object(edges);
  if (e.kind != ObjectKind::relationship || e.components.size() != 2) {
    throw EvalError("'" + e.name + "' is not a binary relationship object usable as an edge set");
  }
  const auto& src_obj = cat.object(e.components[0].object);
  const auto& dst_obj = cat.object(e.components[1].object);
  if (src_obj.carrier != dst_obj.carrier) {
    throw EvalError("edge set '" + e.name + "' connects different carriers '" + src_obj.carrier +
                    "' and '" + dst_obj.carrier + "'");
  }
  EdgeGraph g;
  const auto& carrier = cat.object(src_obj.carrier);
  for (const auto& id : carrier.members) {
    g.index.emplace(id, static_cast<std::uint32_t>(g.nodes.size()));
    g.nodes.push_back(id);
  }
  g.out.resize(g.nodes.size());
  g.in.resize(g.nodes.size());
  for (const auto& id : e.members) {
    const auto& tuple = std::get<Tuple>(cat.element_or_throw(id).payload);
    auto s = g.index.find(tuple.at(0));
    auto t = g.index.find(tuple.at(1));
    if (s == g.index.end() || t == g.index.end()) {
      throw EvalError("edge '" + cat.key_of(id) + "' of '" + e.name +
                      "' has an endpoint outside the node object '" + carrier.name + "'");
    }
    g.out[s->second].push_back(t->second);
    g.in[t->second].push_back(s->second);
  }
  return g;
}

std::vector<std::uint32_t> node_list(const EdgeGraph& g, const Relation& rel, std::string_view op) {
  if (rel.arity() != 1) throw EvalError(std::string(op) + " expects one-column node sets");
  std::vector<std::uint32_t> out;
  for (std::size_t i = 0; i < rel.size(); ++i) {
    auto it = g.index.find(rel.row(i)[0]);
    if (it != g.index.end()) out.push_back(it->second);
  }
  return out;
}

// Calls visit(start, reached) for every node reached from `start` by a walk
// whose length satisfies the mode (>= 1 when exact < 0, == exact otherwise).
// `stamp` holds per-node visit marks; `clock` makes resetting it unnecessary.
template <typename Visit>
void sweep(const std::vector<std::vector<std::uint32_t>>& adj, std::uint32_t start, int exact,
           std::vector<std::uint64_t>& stamp, std::uint64_t& clock,
           std::vector<std::uint32_t>& frontier, std::vector<std::uint32_t>& next,
           Visit&& visit) {
  frontier.assign(1, start);
  if (exact < 0) {
    // the start node counts only when a cycle leads back to it
    const auto mark = ++clock;
    for (std::size_t head = 0; head < frontier.size(); ++head) {
      for (auto w : adj[frontier[head]]) {
        if (stamp[w] == mark) continue;
        stamp[w] = mark;
        visit(start, w);
        frontier.push_back(w);
      }
    }
    return;
  }
  for (int step = 0; step < exact && !frontier.empty(); ++step) {
    const auto mark = ++clock;
    next.clear();
    for (auto v : frontier) {
      for (auto w : adj[v]) {
        if (stamp[w] == mark) continue;
        stamp[w] = mark;
        next.push_back(w);
      }
    }
    std::swap(frontier, next);
  }
  for (auto w : frontier) visit(start, w);
}

Relation graph_pairs(const InstanceCategory& cat, const Relation& s, const Relation& t,
                     std::string_view edges, int exact, std::string_view op) {
  auto g = build_graph(cat, edges);
  auto sources = node_list(g, s, op);
  auto targets = node_list(g, t, op);
  RelationBuilder b(pair_columns(s, t, "source", "target"));
  std::vector<char> in_other(g.nodes.size(), 0);
  std::vector<std::uint64_t> stamp(g.nodes.size(), 0);
  std::uint64_t clock = 0;
  std::vector<std::uint32_t> frontier, next;

  const bool forward = sources.size() <= targets.size();
  const auto& from = forward ? sources : targets;
  const auto& to = forward ? targets : sources;
  const auto& adj = forward ? g.out : g.in;
  for (auto v : to) in_other[v] = 1;
  for (auto start : from) {
    if constexpr (kReachIncludesEmptyPath) {
      if (exact < 0 && in_other[start]) b.add({g.nodes[start], g.nodes[start]});
    }
    sweep(adj, start, exact, stamp, clock, frontier, next, [&](std::uint32_t a, std::uint32_t w) {
      if (!in_other[w]) return;
      if (forward) {
        b.add({g.nodes[a], g.nodes[w]});
      } else {
        b.add({g.nodes[w], g.nodes[a]});
      }
    });
  }
  return std::move(b).build();
}

}  // namespace

Relation op_get_reach(const InstanceCategory& cat, const Relation& s, const Relation& t,
                      std::string_view edges) {
  return graph_pairs(cat, s, t, edges, -1, "getReach");
}

Relation op_get_nhop(const InstanceCategory& cat, const Relation& s, const Relation& t,
                     std::string_view edges, int n) {
  if (n < 1) throw EvalError("getnHop: hop count must be at least 1");
  return graph_pairs(cat, s, t, edges, n, "getnHop");
}

Relation op_get_reach(const InstanceCategory& cat, std::string_view s, std::string_view t,
                      std::string_view edges) {
  return op_get_reach(cat, op_scan(cat, s), op_scan(cat, t), edges);
}

Relation op_get_nhop(const InstanceCategory& cat, std::string_view s, std::string_view t,
                     std::string_view edges, int n) {
  return op_get_nhop(cat, op_scan(cat, s), op_scan(cat, t), edges, n);
}

}  // namespace catq
