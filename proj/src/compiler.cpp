#include "catq/compiler.hpp"

#include <algorithm>
#include <set>

#include "catq/errors.hpp"

namespace catq {

namespace {

bool is_predicate(const FormulaPtr& f) {
  return f->kind == FormulaKind::tree || f->kind == FormulaKind::reach ||
         f->kind == FormulaKind::nhop;
}

bool is_negated_predicate(const FormulaPtr& f) {
  return f->kind == FormulaKind::negation && is_predicate(f->children[0]);
}

const FormulaPtr& atom_of(const FormulaPtr& literal) {
  return literal->kind == FormulaKind::negation ? literal->children[0] : literal;
}

std::vector<std::string> pair_columns_of(const FormulaPtr& f) {
  if (f->kind == FormulaKind::tree) {
    switch (f->axis) {
      case TreeAxis::parent: return {"parent", "child"};
      case TreeAxis::ancestor: return {"ancestor", "descendant"};
      case TreeAxis::sibling: return {"left", "right"};
    }
  }
  return {"source", "target"};
}

int add_range(CompileContext& ctx, const RangeExpr& r, const std::string& var) {
  PlanNode n;
  if (r.kind == RangeExpr::Kind::object) {
    n.op = PlanOp::scan;
    n.object = r.object;
    n.label = var;
    return ctx.plan.add(std::move(n));
  }
  int a = add_range(ctx, r.operands[0], var);
  int b = add_range(ctx, r.operands[1], var);
  n.op = r.kind == RangeExpr::Kind::union_of       ? PlanOp::union_of
         : r.kind == RangeExpr::Kind::intersect_of ? PlanOp::intersect
                                                   : PlanOp::difference;
  n.inputs = {a, b};
  return ctx.plan.add(std::move(n));
}

CalculusQuery header_of(const PrenexQuery& q) {
  CalculusQuery c;
  c.targets = q.targets;
  c.ranges = q.ranges;
  c.memberships = q.memberships;
  return c;
}

int add_node(CompileContext& ctx, PlanOp op, std::vector<int> inputs) {
  PlanNode n;
  n.op = op;
  n.inputs = std::move(inputs);
  return ctx.plan.add(std::move(n));
}

int add_project(CompileContext& ctx, int input, std::vector<std::string> keep) {
  // a project of the project just added collapses into one
  if (const auto& in = ctx.plan.node(input);
      in.op == PlanOp::project && input + 1 == static_cast<int>(ctx.plan.nodes.size())) {
    input = in.inputs[0];
    ctx.plan.nodes.pop_back();
  }
  PlanNode n;
  n.op = PlanOp::project;
  n.inputs = {input};
  n.columns = std::move(keep);
  return ctx.plan.add(std::move(n));
}

// Lim over the given variables' ranges with the membership constraints that
// stay inside them.
int add_universe(CompileContext& ctx, const std::vector<std::string>& vars) {
  PlanNode c;
  c.op = PlanOp::cat;
  c.columns = vars;
  for (const auto& v : vars) c.inputs.push_back(ctx.range_node.at(v));
  for (const auto& a : ctx.membership_arrows) {
    if (std::count(vars.begin(), vars.end(), a.source) && std::count(vars.begin(), vars.end(), a.target)) {
      c.arrows.push_back(a);
    }
  }
  int cat = ctx.plan.add(std::move(c));
  return add_node(ctx, PlanOp::lim, {cat});
}

}  // namespace

std::vector<PlanArrow> CompileContext::predicate_arrows(const FormulaPtr& literal) const {
  const auto& label = predicate_label.at(to_string(literal));
  const auto& atom = atom_of(literal);
  auto cols = pair_columns_of(atom);
  return {PlanArrow{cols[0], label, atom->vars[0], true},
          PlanArrow{cols[1], label, atom->vars[1], true}};
}

void build_range_objects(const PrenexQuery& q, CompileContext& ctx) {
  for (const auto& fv : free_variables(header_of(q), *ctx.cat)) {
    ctx.variables.push_back(fv.name);
    ctx.range_node[fv.name] = add_range(ctx, fv.range, fv.name);
  }
  for (const auto& e : q.prefix) {
    if (ctx.range_node.count(e.var)) {
      throw CompileError("variable '" + e.var + "' is both free and quantified");
    }
    ctx.variables.push_back(e.var);
    int node = add_range(ctx, e.range, e.var);
    if (e.pointed) {
      PlanNode n;
      n.op = PlanOp::null_row;
      n.label = e.var;
      int null_node = ctx.plan.add(std::move(n));
      node = add_node(ctx, PlanOp::union_of, {node, null_node});
    }
    ctx.range_node[e.var] = node;
  }
}

void build_relationship_objects(const PrenexQuery& q, CompileContext& ctx) {
  for (const auto& m : q.memberships) {
    const auto& rel = ctx.cat->object(m.relationship);
    if (rel.kind != ObjectKind::relationship) {
      throw CompileError("'" + m.relationship + "' is not a relationship object");
    }
    if (rel.components.size() != m.components.size()) {
      throw CompileError("membership '" + m.var + "' has arity " +
                         std::to_string(m.components.size()) + " but '" + m.relationship +
                         "' has " + std::to_string(rel.components.size()));
    }
    for (std::size_t i = 0; i < m.components.size(); ++i) {
      ctx.membership_arrows.push_back({rel.components[i].projection, m.var, m.components[i], false});
    }
  }
}

void build_predicate_objects(const PrenexQuery& q, CompileContext& ctx) {
  auto add_positive = [&](const FormulaPtr& lit) {
    auto key = to_string(lit);
    if (auto it = ctx.predicate_node.find(key); it != ctx.predicate_node.end()) return it->second;
    PlanNode n;
    if (lit->kind == FormulaKind::tree) {
      n.op = lit->axis == TreeAxis::parent     ? PlanOp::get_parent
             : lit->axis == TreeAxis::ancestor ? PlanOp::get_ancestor
                                               : PlanOp::get_sibling;
    } else {
      n.op = lit->kind == FormulaKind::reach ? PlanOp::get_reach : PlanOp::get_nhop;
      n.edges = lit->name;
      n.hops = lit->hops;
    }
    n.inputs = {ctx.range_node.at(lit->vars[0]), ctx.range_node.at(lit->vars[1])};
    int node = ctx.plan.add(std::move(n));
    ctx.predicate_node[key] = node;
    return node;
  };
  for (const auto& clause : q.clauses) {
    for (const auto& lit : clause) {
      if (!is_predicate(lit) && !is_negated_predicate(lit)) continue;
      auto key = to_string(lit);
      if (ctx.predicate_label.count(key)) continue;
      if (is_predicate(lit)) {
        add_positive(lit);
      } else {
        // complement within the product of the two ranges
        const auto& atom = lit->children[0];
        int positive = add_positive(atom);
        PlanNode c;
        c.op = PlanOp::cat;
        c.columns = pair_columns_of(atom);
        c.inputs = {ctx.range_node.at(atom->vars[0]), ctx.range_node.at(atom->vars[1])};
        int product = add_node(ctx, PlanOp::lim, {ctx.plan.add(std::move(c))});
        ctx.predicate_node[key] = add_node(ctx, PlanOp::difference, {product, positive});
      }
      ctx.predicate_label[key] = "p" + std::to_string(ctx.predicate_label.size() + 1);
    }
  }
}

ClauseCategory build_clause_category(const Clause& clause, CompileContext& ctx,
                                     const CompileOptions& options) {
  PlanNode c;
  c.op = PlanOp::cat;
  c.columns = ctx.variables;
  for (const auto& v : ctx.variables) c.inputs.push_back(ctx.range_node.at(v));
  c.arrows = ctx.membership_arrows;
  auto add_predicate_column = [&](const FormulaPtr& lit) {
    auto key = to_string(lit);
    const auto& label = ctx.predicate_label.at(key);
    if (std::find(c.columns.begin(), c.columns.end(), label) == c.columns.end()) {
      c.columns.push_back(label);
      c.inputs.push_back(ctx.predicate_node.at(key));
    }
    for (auto& a : ctx.predicate_arrows(lit)) c.arrows.push_back(std::move(a));
  };
  ClauseCategory out;
  for (const auto& lit : clause) {
    switch (lit->kind) {
      case FormulaKind::compare: {
        auto op = options.flip_comparisons ? negate(lit->op) : lit->op;
        out.selections.push_back(Comparison{lit->lhs, op, lit->rhs});
        break;
      }
      case FormulaKind::morph_eq: {
        const auto* m = ctx.cat->find_morphism(lit->name);
        if (!m) throw CompileError("unknown morphism '" + lit->name + "'");
        c.arrows.push_back({lit->name, lit->vars[0], lit->vars[1], false});
        break;
      }
      case FormulaKind::tree:
      case FormulaKind::reach:
      case FormulaKind::nhop:
        add_predicate_column(lit);
        break;
      case FormulaKind::is_null:
        out.selections.push_back(NullTest{lit->vars[0], true});
        break;
      case FormulaKind::negation: {
        const auto& a = lit->children[0];
        if (is_predicate(a)) {
          add_predicate_column(lit);
        } else if (a->kind == FormulaKind::morph_eq) {
          out.selections.push_back(MorphismTest{a->name, a->vars[0], a->vars[1], false});
        } else if (a->kind == FormulaKind::is_null) {
          out.selections.push_back(NullTest{a->vars[0], false});
        } else {
          throw CompileError("unsupported negated literal '" + to_string(lit) + "'");
        }
        break;
      }
      default:
        throw CompileError("unexpected literal '" + to_string(lit) + "' in a clause");
    }
  }
  out.cat_node = ctx.plan.add(std::move(c));
  return out;
}

AlgebraPlan compile(const PrenexQuery& q, const InstanceCategory& cat,
                    const CompileOptions& options) {
  CompileContext ctx;
  ctx.cat = &cat;
  build_range_objects(q, ctx);
  build_relationship_objects(q, ctx);
  build_predicate_objects(q, ctx);

  std::vector<int> clause_results;
  for (const auto& clause : q.clauses) {
    auto cc = build_clause_category(clause, ctx, options);
    int cur = add_node(ctx, PlanOp::lim, {cc.cat_node});
    for (const auto& sel : cc.selections) {
      PlanNode n;
      n.op = PlanOp::select;
      n.inputs = {cur};
      n.predicate = sel;
      cur = ctx.plan.add(std::move(n));
    }
    if (ctx.plan.node(cc.cat_node).columns.size() != ctx.variables.size()) {
      cur = add_project(ctx, cur, ctx.variables);
    }
    clause_results.push_back(cur);
  }

  int cur;
  if (clause_results.empty()) {
    int u = add_universe(ctx, ctx.variables);
    cur = add_node(ctx, PlanOp::difference, {u, u});
  } else {
    cur = clause_results[0];
    for (std::size_t i = 1; i < clause_results.size(); ++i) {
      cur = add_node(ctx, PlanOp::union_of, {cur, clause_results[i]});
    }
  }

  // Quantifier blocks, innermost first.
  std::vector<std::string> live = ctx.variables;
  std::size_t end = q.prefix.size();
  while (end > 0) {
    auto kind = q.prefix[end - 1].kind;
    std::size_t begin = end;
    while (begin > 0 && q.prefix[begin - 1].kind == kind) --begin;
    std::vector<std::string> block;
    for (std::size_t i = begin; i < end; ++i) block.push_back(q.prefix[i].var);
    std::vector<std::string> rest;
    for (const auto& v : live) {
      if (std::find(block.begin(), block.end(), v) == block.end()) rest.push_back(v);
    }
    if (kind == FormulaKind::exists) {
      cur = add_project(ctx, cur, rest);
    } else {
      PlanNode d;
      d.op = PlanOp::cat;
      d.columns = block;
      for (const auto& v : block) d.inputs.push_back(ctx.range_node.at(v));
      int divisor = add_node(ctx, PlanOp::lim, {ctx.plan.add(std::move(d))});
      int universe = add_universe(ctx, rest);
      PlanNode n;
      n.op = PlanOp::divide;
      n.inputs = {cur, divisor, universe};
      n.columns = block;
      cur = ctx.plan.add(std::move(n));
    }
    live = std::move(rest);
    end = begin;
  }

  if (live != q.targets) cur = add_project(ctx, cur, q.targets);
  ctx.plan.root = cur;
  ctx.plan.output_names = q.targets;
  plan_columns(ctx.plan);
  return std::move(ctx.plan);
}

CompiledQuery compile_query(const CalculusQuery& q, const InstanceCategory& cat,
                            const CompileOptions& options) {
  require_safe(q, cat);
  CompiledQuery out;
  out.renaming = rename_variables(to_prenex(q, options.clause_limit));
  out.prenex = out.renaming.query;
  out.plan = compile(out.prenex, cat, options);
  out.plan.output_names = q.targets;
  return out;
}

std::string describe_clause_diagrams(const AlgebraPlan& plan) {
  std::string out;
  for (const auto& n : plan.nodes) {
    if (n.op != PlanOp::cat) continue;
    out += "diagram %" + std::to_string(n.id) + ":";
    for (std::size_t i = 0; i < n.columns.size(); ++i) {
      out += (i ? ", " : " ") + n.columns[i] + " <- %" + std::to_string(n.inputs[i]);
    }
    for (const auto& a : n.arrows) {
      out += "\n  " + std::string(a.column ? "." : "") + a.morphism + ": " + a.source + " -> " + a.target;
    }
    // selections applied to this diagram's limit
    for (const auto& m : plan.nodes) {
      if (m.op != PlanOp::lim || m.inputs[0] != n.id) continue;
      int cur = m.id;
      for (bool found = true; found;) {
        found = false;
        for (const auto& s : plan.nodes) {
          if (s.op == PlanOp::select && s.inputs[0] == cur) {
            out += "\n  where " + to_string(*s.predicate);
            cur = s.id;
            found = true;
            break;
          }
        }
      }
    }
    out += "\n";
  }
  return out;
}

}  // namespace catq
