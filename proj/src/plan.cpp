#include "catq/plan.hpp"

#include <algorithm>
#include <set>

#include "catq/errors.hpp"

namespace catq {

std::string_view op_name(PlanOp op) {
  switch (op) {
    case PlanOp::scan: return "scan";
    case PlanOp::null_row: return "null";
    case PlanOp::map: return "map";
    case PlanOp::select: return "select";
    case PlanOp::project: return "project";
    case PlanOp::divide: return "divide";
    case PlanOp::union_of: return "union";
    case PlanOp::intersect: return "intersect";
    case PlanOp::difference: return "difference";
    case PlanOp::cat: return "cat";
    case PlanOp::lim: return "lim";
    case PlanOp::get_parent: return "getParent";
    case PlanOp::get_ancestor: return "getAncestor";
    case PlanOp::get_sibling: return "getSibling";
    case PlanOp::get_reach: return "getReach";
    case PlanOp::get_nhop: return "getnHop";
  }
  return "?";
}

int AlgebraPlan::add(PlanNode node) {
  node.id = static_cast<int>(nodes.size());
  for (int in : node.inputs) {
    if (in < 0 || in >= node.id) throw CompileError("plan input %" + std::to_string(in) + " does not precede its user");
  }
  nodes.push_back(std::move(node));
  return nodes.back().id;
}

namespace {

std::vector<std::string> predicate_columns(const SelectionPredicate& p) {
  std::vector<std::string> out;
  if (const auto* c = std::get_if<Comparison>(&p)) {
    for (const auto* t : {&c->lhs, &c->rhs}) {
      if (const auto* a = std::get_if<AttributeTerm>(t)) out.push_back(a->column);
    }
  } else if (const auto* m = std::get_if<MorphismTest>(&p)) {
    out = {m->source, m->target};
  } else {
    out = {std::get<NullTest>(p).column};
  }
  return out;
}

bool has(const std::vector<std::string>& cols, const std::string& c) {
  return std::find(cols.begin(), cols.end(), c) != cols.end();
}

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + v[i];
  return out;
}

std::vector<std::string> pair_names(PlanOp op) {
  switch (op) {
    case PlanOp::get_parent: return {"parent", "child"};
    case PlanOp::get_ancestor: return {"ancestor", "descendant"};
    case PlanOp::get_sibling: return {"left", "right"};
    default: return {"source", "target"};
  }
}

}  // namespace

std::vector<std::vector<std::string>> plan_columns(const AlgebraPlan& plan) {
  std::vector<std::vector<std::string>> cols(plan.nodes.size());
  for (const auto& n : plan.nodes) {
    auto fail = [&](const std::string& msg) {
      throw CompileError("plan node %" + std::to_string(n.id) + " (" + std::string(op_name(n.op)) +
                         "): " + msg);
    };
    auto in = [&](std::size_t i) -> const std::vector<std::string>& {
      if (i >= n.inputs.size()) fail("missing input " + std::to_string(i));
      return cols[static_cast<std::size_t>(n.inputs[i])];
    };
    auto& out = cols[static_cast<std::size_t>(n.id)];
    switch (n.op) {
      case PlanOp::scan:
      case PlanOp::null_row:
        out = {n.label};
        break;
      case PlanOp::map:
        if (in(0).size() != 1) fail("map needs a one-column input");
        out = {n.label};
        break;
      case PlanOp::select:
        if (!n.predicate) fail("no predicate");
        for (const auto& c : predicate_columns(*n.predicate)) {
          if (!has(in(0), c)) fail("predicate column '" + c + "' is not an input column");
        }
        out = in(0);
        break;
      case PlanOp::project: {
        if (n.columns.empty()) fail("empty column list");
        std::set<std::string> seen;
        for (const auto& c : n.columns) {
          if (!has(in(0), c)) fail("unknown column '" + c + "'");
          if (!seen.insert(c).second) fail("column '" + c + "' listed twice");
        }
        out = n.columns;
        break;
      }
      case PlanOp::divide: {
        const auto& dividend = in(0);
        if (in(1).size() != n.columns.size()) fail("divisor arity differs from the 'by' list");
        for (const auto& c : n.columns) {
          if (!has(dividend, c)) fail("'by' column '" + c + "' is not a dividend column");
        }
        for (const auto& c : dividend) {
          if (!has(n.columns, c)) out.push_back(c);
        }
        if (out.empty()) fail("'by' covers every dividend column");
        if (n.inputs.size() > 2 && in(2) != out) fail("universe columns differ from the quotient");
        break;
      }
      case PlanOp::union_of:
      case PlanOp::intersect:
      case PlanOp::difference:
        if (in(0) != in(1)) fail("operands are not union-compatible");
        out = in(0);
        break;
      case PlanOp::cat: {
        if (n.columns.size() != n.inputs.size()) fail("one label per input required");
        if (n.columns.empty()) fail("empty diagram");
        std::set<std::string> labels(n.columns.begin(), n.columns.end());
        if (labels.size() != n.columns.size()) fail("duplicate diagram label");
        for (const auto& a : n.arrows) {
          auto s = std::find(n.columns.begin(), n.columns.end(), a.source);
          if (s == n.columns.end() || !labels.count(a.target)) {
            fail("arrow " + a.morphism + " names an unknown label");
          }
          const auto& src_cols = in(static_cast<std::size_t>(s - n.columns.begin()));
          if (a.column && !has(src_cols, a.morphism)) {
            fail("arrow ." + a.morphism + " is not a column of '" + a.source + "'");
          }
          if (!a.column && src_cols.size() != 1) {
            fail("morphism arrow " + a.morphism + " leaves a multi-column object");
          }
        }
        out = n.columns;
        break;
      }
      case PlanOp::lim:
        if (n.inputs.size() != 1 || plan.node(n.inputs[0]).op != PlanOp::cat) {
          fail("lim takes exactly one cat node");
        }
        out = in(0);
        break;
      case PlanOp::get_parent:
      case PlanOp::get_ancestor:
      case PlanOp::get_sibling:
      case PlanOp::get_reach:
      case PlanOp::get_nhop:
        if (in(0).size() != 1 || in(1).size() != 1) fail("needs two one-column inputs");
        if (n.op == PlanOp::get_nhop && n.hops < 1) fail("hop count must be at least 1");
        out = pair_names(n.op);
        break;
    }
  }
  if (plan.root < 0 || plan.root >= static_cast<int>(plan.nodes.size())) {
    throw CompileError("plan has no root");
  }
  const auto& root_cols = cols[static_cast<std::size_t>(plan.root)];
  if (!plan.output_names.empty() && plan.output_names.size() != root_cols.size()) {
    throw CompileError("plan output names do not match the root arity");
  }
  return cols;
}

std::string to_string(const AlgebraPlan& plan) {
  std::string out;
  for (const auto& n : plan.nodes) {
    std::string line = "%" + std::to_string(n.id) + " = " + std::string(op_name(n.op));
    for (int in : n.inputs) line += " %" + std::to_string(in);
    switch (n.op) {
      case PlanOp::scan: line += " " + n.object + " as " + n.label; break;
      case PlanOp::null_row: line += " as " + n.label; break;
      case PlanOp::map: line += " {" + n.morphism + " as " + n.label + "}"; break;
      case PlanOp::select: line += " {" + to_string(*n.predicate) + "}"; break;
      case PlanOp::project: line += " {" + join(n.columns) + "}"; break;
      case PlanOp::divide: line += " {by " + join(n.columns) + "}"; break;
      case PlanOp::cat: {
        line += " {" + join(n.columns);
        for (const auto& a : n.arrows) {
          line += "; " + std::string(a.column ? "." : "") + a.morphism + ": " + a.source + " -> " + a.target;
        }
        line += "}";
        break;
      }
      case PlanOp::get_reach: line += " {" + n.edges + "}"; break;
      case PlanOp::get_nhop: line += " {" + n.edges + ", " + std::to_string(n.hops) + "}"; break;
      default: break;
    }
    out += line + "\n";
  }
  out += "root %" + std::to_string(plan.root) + " -> (" + join(plan.output_names) + ")\n";
  return out;
}

}  // namespace catq
