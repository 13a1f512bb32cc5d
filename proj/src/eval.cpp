#include "catq/eval.hpp"

#include <map>
#include <set>

#include "catq/errors.hpp"

namespace catq {

// ---------------------------------------------------------------------------
// Plan interpreter

namespace {

class PlanEvaluator {
 public:
  PlanEvaluator(const AlgebraPlan& plan, const InstanceCategory& cat)
      : plan_(plan), cat_(cat), values_(plan.nodes.size()) {}

  Relation run() {
    plan_columns(plan_);
    std::vector<bool> needed(plan_.nodes.size(), false);
    needed[static_cast<std::size_t>(plan_.root)] = true;
    for (std::size_t i = plan_.nodes.size(); i-- > 0;) {
      if (!needed[i]) continue;
      for (int in : plan_.nodes[i].inputs) needed[static_cast<std::size_t>(in)] = true;
    }
    for (const auto& n : plan_.nodes) {
      if (!needed[static_cast<std::size_t>(n.id)] || n.op == PlanOp::cat) continue;
      try {
        values_[static_cast<std::size_t>(n.id)] = step(n);
      } catch (const Error& e) {
        throw EvalError("node %" + std::to_string(n.id) + " (" + std::string(op_name(n.op)) +
                        "): " + e.what());
      }
    }
    auto& root = *values_[static_cast<std::size_t>(plan_.root)];
    if (plan_.output_names.empty()) return root;
    auto cols = root.columns();
    for (std::size_t i = 0; i < cols.size(); ++i) cols[i].name = plan_.output_names[i];
    return root.relabeled(std::move(cols));
  }

 private:
  const AlgebraPlan& plan_;
  const InstanceCategory& cat_;
  std::vector<std::optional<Relation>> values_;

  const Relation& in(const PlanNode& n, std::size_t i) const {
    return *values_[static_cast<std::size_t>(n.inputs.at(i))];
  }

  Relation step(const PlanNode& n) {
    switch (n.op) {
      case PlanOp::scan:
        return op_scan(cat_, n.object, n.label);
      case PlanOp::null_row: {
        RelationBuilder b({Column{n.label, ElementId::null().object_name()}});
        b.add({ElementId::null()});
        return std::move(b).build();
      }
      case PlanOp::map: {
        auto r = op_map(cat_, n.morphism, in(n, 0));
        auto cols = r.columns();
        cols[0].name = n.label;
        return r.relabeled(std::move(cols));
      }
      case PlanOp::select:
        return op_select(cat_, in(n, 0), *n.predicate);
      case PlanOp::project:
        return op_project(in(n, 0), n.columns);
      case PlanOp::divide:
        return op_divide(cat_, in(n, 0), in(n, 1), n.columns,
                         n.inputs.size() > 2 ? &in(n, 2) : nullptr);
      case PlanOp::union_of:
        return op_union(cat_, in(n, 0), in(n, 1));
      case PlanOp::intersect:
        return op_intersect(cat_, in(n, 0), in(n, 1));
      case PlanOp::difference:
        return op_difference(cat_, in(n, 0), in(n, 1));
      case PlanOp::cat:
        break;
      case PlanOp::lim:
        return op_lim(diagram(plan_.node(n.inputs[0])));
      case PlanOp::get_parent:
        return op_get_parent(cat_, in(n, 0), in(n, 1));
      case PlanOp::get_ancestor:
        return op_get_ancestor(cat_, in(n, 0), in(n, 1));
      case PlanOp::get_sibling:
        return op_get_sibling(cat_, in(n, 0), in(n, 1));
      case PlanOp::get_reach:
        return op_get_reach(cat_, in(n, 0), in(n, 1), n.edges);
      case PlanOp::get_nhop:
        return op_get_nhop(cat_, in(n, 0), in(n, 1), n.edges, n.hops);
    }
    throw EvalError("cat nodes are only evaluated through lim");
  }

  // Single-column inputs contribute their elements; wider inputs become
  // objects of row ids with one projection arrow per column.
  Diagram diagram(const PlanNode& c) {
    Diagram d;
    std::vector<Symbol> row_symbol(c.inputs.size(), 0);
    for (std::size_t i = 0; i < c.inputs.size(); ++i) {
      const auto& rel = in(c, i);
      Diagram::Node node{c.columns[i], {}, {}};
      if (rel.arity() == 1) {
        node.object = rel.columns()[0].object;
        node.elements = rel.cells();
      } else {
        row_symbol[i] = intern("%" + std::to_string(c.inputs[i]) + ":" + c.columns[i]);
        node.object = c.columns[i];
        node.elements.reserve(rel.size());
        for (std::size_t r = 0; r < rel.size(); ++r) {
          node.elements.push_back(ElementId{row_symbol[i], static_cast<std::uint32_t>(r)});
        }
      }
      d.objects.push_back(std::move(node));
    }
    auto index_of = [&](const std::string& label) {
      for (std::size_t i = 0; i < c.columns.size(); ++i) {
        if (c.columns[i] == label) return i;
      }
      throw EvalError("unknown diagram label '" + label + "'");
    };
    for (const auto& a : c.arrows) {
      const auto s = index_of(a.source);
      const auto t = index_of(a.target);
      Diagram::Arrow arrow{a.morphism, s, t, {}};
      if (a.column) {
        const Relation* rel = &in(c, s);
        const auto col = rel->column_index(a.morphism);
        const auto sym = row_symbol[s];
        arrow.apply = [rel, col, sym](const ElementId& x) -> std::optional<ElementId> {
          if (x.object != sym || x.ordinal >= rel->size()) return std::nullopt;
          return rel->row(x.ordinal)[col];
        };
      } else {
        const Morphism* m = &cat_.morphism(a.morphism);
        const InstanceCategory* cat = &cat_;
        arrow.apply = [cat, m](const ElementId& x) { return cat->try_apply(*m, x); };
      }
      d.arrows.push_back(std::move(arrow));
    }
    return d;
  }
};

}  // namespace

Relation evaluate(const AlgebraPlan& plan, const InstanceCategory& cat) {
  return PlanEvaluator(plan, cat).run();
}

bool same_rows(const Relation& a, const Relation& b) {
  return a.arity() == b.arity() && a.cells() == b.cells();
}

// ---------------------------------------------------------------------------
// Oracle: direct enumeration, no algebra operators.

namespace {

class Oracle {
 public:
  explicit Oracle(const InstanceCategory& cat) : cat_(cat) {}

  std::vector<ElementId> range(const RangeExpr& r) {
    std::set<ElementId> s = range_set(r);
    return {s.begin(), s.end()};
  }

  bool holds(const FormulaPtr& f) {
    switch (f->kind) {
      case FormulaKind::truth: return true;
      case FormulaKind::falsity: return false;
      case FormulaKind::compare: {
        auto l = term(f->lhs);
        auto r = term(f->rhs);
        if (!l || !r) return false;
        return catq::holds(f->op, compare_values(*l, *r));
      }
      case FormulaKind::morph_eq: {
        auto x = lookup(f->vars[0]);
        auto y = lookup(f->vars[1]);
        if (x.is_null() || y.is_null()) return false;
        auto image = cat_.try_apply(cat_.morphism(f->name), x);
        return image && *image == y;
      }
      case FormulaKind::tree: {
        auto x = lookup(f->vars[0]);
        auto y = lookup(f->vars[1]);
        if (x.is_null() || y.is_null()) return false;
        auto a = code(x);
        auto b = code(y);
        switch (f->axis) {
          case TreeAxis::parent: return a.is_parent_of(b);
          case TreeAxis::ancestor: return a.is_ancestor_of(b);
          case TreeAxis::sibling: return a.is_sibling_of(b);
        }
        return false;
      }
      case FormulaKind::reach: {
        auto x = lookup(f->vars[0]);
        auto y = lookup(f->vars[1]);
        if (x.is_null() || y.is_null()) return false;
        return reaches(f->name, x, y);
      }
      case FormulaKind::nhop: {
        auto x = lookup(f->vars[0]);
        auto y = lookup(f->vars[1]);
        if (x.is_null() || y.is_null()) return false;
        return walks(f->name, x, y, f->hops);
      }
      case FormulaKind::is_null:
        return lookup(f->vars[0]).is_null();
      case FormulaKind::negation:
        return !holds(f->children[0]);
      case FormulaKind::conjunction:
        return holds(f->children[0]) && holds(f->children[1]);
      case FormulaKind::disjunction:
        return holds(f->children[0]) || holds(f->children[1]);
      case FormulaKind::forall:
      case FormulaKind::exists: {
        auto elems = range(f->range);
        if (f->pointed) elems.push_back(ElementId::null());
        const bool all = f->kind == FormulaKind::forall;
        for (const auto& e : elems) {
          env_.emplace_back(f->vars[0], e);
          bool h = holds(f->children[0]);
          env_.pop_back();
          if (h != all) return !all;
        }
        return all;
      }
      case FormulaKind::range_test:
      case FormulaKind::membership:
        break;
    }
    throw EvalError("oracle cannot evaluate '" + to_string(f) + "'");
  }

  std::vector<std::pair<std::string, ElementId>> env_;

 private:
  const InstanceCategory& cat_;
  std::map<std::string, std::map<ElementId, std::vector<ElementId>>> successors_;

  std::set<ElementId> range_set(const RangeExpr& r) {
    if (r.kind == RangeExpr::Kind::object) {
      const auto& m = cat_.object(r.object).members;
      return {m.begin(), m.end()};
    }
    auto a = range_set(r.operands[0]);
    auto b = range_set(r.operands[1]);
    std::set<ElementId> out;
    for (const auto& x : a) {
      const bool in_b = b.count(x) != 0;
      if (r.kind == RangeExpr::Kind::intersect_of ? in_b
          : r.kind == RangeExpr::Kind::difference_of ? !in_b
                                                     : true) {
        out.insert(x);
      }
    }
    if (r.kind == RangeExpr::Kind::union_of) out.insert(b.begin(), b.end());
    return out;
  }

  ElementId lookup(const std::string& v) const {
    for (auto it = env_.rbegin(); it != env_.rend(); ++it) {
      if (it->first == v) return it->second;
    }
    throw EvalError("unbound variable '" + v + "'");
  }

  std::optional<Value> term(const SelectTerm& t) const {
    if (const auto* v = std::get_if<Value>(&t)) return *v;
    const auto& a = std::get<AttributeTerm>(t);
    auto x = lookup(a.column);
    if (x.is_null()) return std::nullopt;
    return cat_.attribute_of(x, a.attribute);
  }

  DeweyCode code(const ElementId& x) const {
    const auto& el = cat_.element_or_throw(x);
    if (const auto* v = std::get_if<Value>(&el.payload); v && v->kind() == ValueKind::dewey) {
      return v->as_dewey();
    }
    if (const auto* rec = std::get_if<Record>(&el.payload)) {
      for (const auto& [k, v] : *rec) {
        if (k == "dewey" && v.kind() == ValueKind::dewey) return v.as_dewey();
      }
    }
    throw EvalError("element '" + el.key + "' has no dewey code");
  }

  const std::map<ElementId, std::vector<ElementId>>& graph(const std::string& edges) {
    auto it = successors_.find(edges);
    if (it != successors_.end()) return it->second;
    auto& g = successors_[edges];
    for (const auto& id : cat_.object(edges).members) {
      const auto& t = std::get<Tuple>(cat_.element_or_throw(id).payload);
      g[t.at(0)].push_back(t.at(1));
    }
    return g;
  }

  bool reaches(const std::string& edges, const ElementId& x, const ElementId& y) {
    const auto& g = graph(edges);
    std::set<ElementId> seen;
    std::vector<ElementId> stack;
    auto push_succ = [&](const ElementId& v) {
      auto it = g.find(v);
      if (it == g.end()) return;
      for (const auto& w : it->second) {
        if (seen.insert(w).second) stack.push_back(w);
      }
    };
    push_succ(x);
    while (!stack.empty()) {
      auto v = stack.back();
      stack.pop_back();
      if (v == y) return true;
      push_succ(v);
    }
    return false;
  }

  bool walks(const std::string& edges, const ElementId& x, const ElementId& y, int n) {
    const auto& g = graph(edges);
    std::set<ElementId> frontier{x};
    for (int i = 0; i < n; ++i) {
      std::set<ElementId> next;
      for (const auto& v : frontier) {
        auto it = g.find(v);
        if (it != g.end()) next.insert(it->second.begin(), it->second.end());
      }
      frontier = std::move(next);
    }
    return frontier.count(y) != 0;
  }
};

}  // namespace

Relation oracle_evaluate(const CalculusQuery& q, const InstanceCategory& cat, std::size_t bound) {
  Oracle oracle(cat);
  auto vars = free_variables(q, cat);
  std::vector<std::vector<ElementId>> domains;
  double total = 1;
  for (const auto& v : vars) {
    domains.push_back(oracle.range(v.range));
    total *= static_cast<double>(domains.back().size());
  }
  if (total > static_cast<double>(bound)) {
    throw EvalError("oracle enumeration of " + std::to_string(static_cast<long long>(total)) +
                    " assignments exceeds the bound " + std::to_string(bound));
  }

  std::vector<std::size_t> target_index;
  std::vector<Column> cols;
  for (const auto& t : q.targets) {
    bool found = false;
    for (std::size_t i = 0; i < vars.size(); ++i) {
      if (vars[i].name == t) {
        target_index.push_back(i);
        cols.push_back({t, range_carrier(vars[i].range, cat)});
        found = true;
      }
    }
    if (!found) throw EvalError("target '" + t + "' has no range");
  }
  RelationBuilder out(std::move(cols));
  if (total == 0) return std::move(out).build();

  auto var_index = [&](const std::string& name) {
    for (std::size_t i = 0; i < vars.size(); ++i) {
      if (vars[i].name == name) return i;
    }
    throw EvalError("unknown variable '" + name + "'");
  };
  struct Check {
    std::size_t rel;
    std::vector<std::size_t> comps;
  };
  std::vector<Check> checks;
  for (const auto& m : q.memberships) {
    Check c{var_index(m.var), {}};
    for (const auto& comp : m.components) c.comps.push_back(var_index(comp));
    checks.push_back(std::move(c));
  }

  std::vector<std::size_t> pos(vars.size(), 0);
  std::vector<ElementId> row(q.targets.size());
  for (;;) {
    bool ok = true;
    for (const auto& c : checks) {
      const auto& tuple = std::get<Tuple>(cat.element_or_throw(domains[c.rel][pos[c.rel]]).payload);
      for (std::size_t i = 0; i < c.comps.size() && ok; ++i) {
        ok = i < tuple.size() && tuple[i] == domains[c.comps[i]][pos[c.comps[i]]];
      }
      if (!ok) break;
    }
    if (ok) {
      oracle.env_.clear();
      for (std::size_t i = 0; i < vars.size(); ++i) {
        oracle.env_.emplace_back(vars[i].name, domains[i][pos[i]]);
      }
      if (oracle.holds(q.matrix)) {
        for (std::size_t i = 0; i < target_index.size(); ++i) {
          row[i] = domains[target_index[i]][pos[target_index[i]]];
        }
        out.add(Row(row.data(), row.size()));
      }
    }
    std::size_t k = 0;
    while (k < vars.size() && ++pos[k] == domains[k].size()) pos[k++] = 0;
    if (k == vars.size()) break;
  }
  return std::move(out).build();
}

// ---------------------------------------------------------------------------
// Simulation of single operators

std::string_view sim_op_name(const SimOp& op) {
  if (const auto* t = std::get_if<sim::Tree>(&op)) {
    switch (t->axis) {
      case TreeAxis::parent: return "getParent";
      case TreeAxis::ancestor: return "getAncestor";
      case TreeAxis::sibling: return "getSibling";
    }
  }
  static const char* names[] = {"map",      "select",  "project", "divide", "getParent",
                                "getReach", "getnHop", "cat",     "lim"};
  return names[op.index()];
}

namespace {

std::string var(std::size_t i) { return "x" + std::to_string(i + 1); }

CalculusQuery diagram_query(const DiagramSpec& spec, bool constrained) {
  CalculusQuery q;
  std::vector<FormulaPtr> parts;
  for (std::size_t i = 0; i < spec.objects.size(); ++i) {
    q.targets.push_back(var(i));
    q.ranges.push_back({var(i), RangeExpr::of(spec.objects[i])});
  }
  auto index = [&](const std::string& o) {
    for (std::size_t i = 0; i < spec.objects.size(); ++i) {
      if (spec.objects[i] == o) return i;
    }
    throw EvalError("constraint names '" + o + "' outside the diagram");
  };
  if (constrained) {
    for (const auto& c : spec.constraints) {
      parts.push_back(make_morph_eq(c.morphism, var(index(c.source)), var(index(c.target))));
    }
  }
  q.matrix = make_all(parts);
  return q;
}

// exists s in R : R_c1(s) = v1 && ... (one equation per given component)
FormulaPtr in_relationship(const CategoryObject& rel, const std::string& s,
                           const std::vector<std::string>& values) {
  std::vector<FormulaPtr> eqs;
  for (std::size_t i = 0; i < values.size(); ++i) {
    eqs.push_back(make_morph_eq(rel.components[i].projection, s, values[i]));
  }
  return make_quant(FormulaKind::exists, s, RangeExpr::of(rel.name), make_all(eqs));
}

}  // namespace

CalculusQuery simulate_algebra_in_calculus(const SimOp& op, const InstanceCategory& cat) {
  CalculusQuery q;
  if (const auto* m = std::get_if<sim::Map>(&op)) {
    const auto& f = cat.morphism(m->morphism);
    q.targets = {"y"};
    q.ranges = {{"y", RangeExpr::of(f.codomain)}};
    q.matrix = make_quant(FormulaKind::exists, "x", RangeExpr::of(f.domain),
                          make_morph_eq(f.name, "x", "y"));
  } else if (const auto* s = std::get_if<sim::Select>(&op)) {
    q.targets = {"x"};
    q.ranges = {{"x", RangeExpr::of(s->object)}};
    q.matrix = make_compare(s->predicate.lhs, s->predicate.op, s->predicate.rhs);
  } else if (const auto* p = std::get_if<sim::Project>(&op)) {
    const auto& rel = cat.object(p->relationship);
    Membership mem{"r", {}, rel.name};
    for (const auto& c : rel.components) mem.components.push_back("v_" + c.name);
    q.memberships = {mem};
    for (const auto& k : p->keep) q.targets.push_back("v_" + k);
  } else if (const auto* d = std::get_if<sim::Divide>(&op)) {
    const auto& rel = cat.object(d->dividend);
    const auto& div = cat.object(d->divisor);
    const bool tuple_divisor = div.kind == ObjectKind::relationship;
    const std::size_t m = tuple_divisor ? div.components.size() : 1;
    if (m >= rel.components.size()) throw EvalError("divisor is as wide as the dividend");
    const std::size_t k = rel.components.size() - m;
    Membership mem{"r", {}, rel.name};
    std::vector<std::string> values;
    for (std::size_t i = 0; i < rel.components.size(); ++i) {
      mem.components.push_back(i < k ? "q" + std::to_string(i + 1) : "z" + std::to_string(i - k + 1));
      if (i < k) {
        q.targets.push_back(mem.components.back());
        values.push_back(mem.components.back());
      }
    }
    q.memberships = {mem};
    for (std::size_t j = 0; j < m; ++j) values.push_back("y" + std::to_string(j + 1));
    FormulaPtr body = in_relationship(rel, "s", values);
    if (tuple_divisor) {
      std::vector<FormulaPtr> eqs;
      for (std::size_t j = 0; j < m; ++j) {
        eqs.push_back(make_morph_eq(div.components[j].projection, "d", values[k + j]));
      }
      eqs.push_back(body);
      body = make_all(eqs);
      for (std::size_t j = m; j-- > 0;) {
        body = make_quant(FormulaKind::exists, values[k + j], RangeExpr::of(div.components[j].object), body);
      }
      q.matrix = make_quant(FormulaKind::forall, "d", RangeExpr::of(div.name), body);
    } else {
      q.matrix = make_quant(FormulaKind::forall, values[k], RangeExpr::of(div.name), body);
    }
  } else if (const auto* t = std::get_if<sim::Tree>(&op)) {
    q.targets = {"x1", "x2"};
    q.ranges = {{"x1", RangeExpr::of(t->d1)}, {"x2", RangeExpr::of(t->d2)}};
    q.matrix = make_tree(t->axis, "x1", "x2");
  } else if (const auto* r = std::get_if<sim::Reach>(&op)) {
    q.targets = {"x1", "x2"};
    q.ranges = {{"x1", RangeExpr::of(r->s)}, {"x2", RangeExpr::of(r->t)}};
    q.matrix = make_reach("x1", "x2", r->edges);
  } else if (const auto* h = std::get_if<sim::NHop>(&op)) {
    q.targets = {"x1", "x2"};
    q.ranges = {{"x1", RangeExpr::of(h->s)}, {"x2", RangeExpr::of(h->t)}};
    q.matrix = make_nhop(h->n, "x1", "x2", h->edges);
  } else if (const auto* c = std::get_if<sim::Cat>(&op)) {
    q = diagram_query(c->spec, false);
  } else {
    q = diagram_query(std::get<sim::Lim>(op).spec, true);
  }
  return q;
}

Relation evaluate_sim_op(const SimOp& op, const InstanceCategory& cat) {
  if (const auto* m = std::get_if<sim::Map>(&op)) {
    const auto& f = cat.morphism(m->morphism);
    return op_map(cat, f.name, f.domain);
  }
  if (const auto* s = std::get_if<sim::Select>(&op)) {
    return op_select(cat, op_scan(cat, s->object, "x"), s->predicate);
  }
  if (const auto* p = std::get_if<sim::Project>(&op)) {
    return op_project(op_expand(cat, p->relationship), p->keep);
  }
  if (const auto* d = std::get_if<sim::Divide>(&op)) {
    auto dividend = op_expand(cat, d->dividend);
    const auto& div = cat.object(d->divisor);
    Relation divisor =
        div.kind == ObjectKind::relationship ? op_expand(cat, div.name) : op_scan(cat, div.name);
    std::vector<std::string> by;
    for (std::size_t i = dividend.arity() - divisor.arity(); i < dividend.arity(); ++i) {
      by.push_back(dividend.columns()[i].name);
    }
    return op_divide(cat, dividend, divisor, by);
  }
  if (const auto* t = std::get_if<sim::Tree>(&op)) {
    switch (t->axis) {
      case TreeAxis::parent: return op_get_parent(cat, t->d1, t->d2);
      case TreeAxis::ancestor: return op_get_ancestor(cat, t->d1, t->d2);
      case TreeAxis::sibling: return op_get_sibling(cat, t->d1, t->d2);
    }
  }
  if (const auto* r = std::get_if<sim::Reach>(&op)) return op_get_reach(cat, r->s, r->t, r->edges);
  if (const auto* h = std::get_if<sim::NHop>(&op)) return op_get_nhop(cat, h->s, h->t, h->edges, h->n);
  if (const auto* c = std::get_if<sim::Cat>(&op)) return diagram_elements(op_cat(cat, c->spec));
  return op_lim(op_cat(cat, std::get<sim::Lim>(op).spec));
}

}  // namespace catq
