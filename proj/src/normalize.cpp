#include "catq/normalize.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "catq/errors.hpp"

namespace catq {

namespace {

FormulaPtr nnf(const FormulaPtr& f, bool negated) {
  switch (f->kind) {
    case FormulaKind::truth:
      return negated ? make_false() : f;
    case FormulaKind::falsity:
      return negated ? make_true() : f;
    case FormulaKind::compare:
      return negated ? make_compare(f->lhs, negate(f->op), f->rhs) : f;
    case FormulaKind::negation:
      return nnf(f->children[0], !negated);
    case FormulaKind::conjunction:
    case FormulaKind::disjunction: {
      auto a = nnf(f->children[0], negated);
      auto b = nnf(f->children[1], negated);
      const bool conj = (f->kind == FormulaKind::conjunction) != negated;
      return conj ? make_and(a, b) : make_or(a, b);
    }
    case FormulaKind::forall:
    case FormulaKind::exists: {
      auto kind = f->kind;
      if (negated) kind = kind == FormulaKind::forall ? FormulaKind::exists : FormulaKind::forall;
      return make_quant(kind, f->vars[0], f->range, nnf(f->children[0], negated), f->pointed);
    }
    default:
      return negated ? make_not(f) : f;
  }
}

FormulaPtr substitute_free(const FormulaPtr& f, const std::string& from, const std::string& to) {
  auto swap = [&](const std::string& v) { return v == from ? to : v; };
  switch (f->kind) {
    case FormulaKind::truth:
    case FormulaKind::falsity:
      return f;
    case FormulaKind::compare: {
      auto sub = [&](const SelectTerm& t) -> SelectTerm {
        if (const auto* a = std::get_if<AttributeTerm>(&t)) return AttributeTerm{swap(a->column), a->attribute};
        return t;
      };
      return make_compare(sub(f->lhs), f->op, sub(f->rhs));
    }
    case FormulaKind::forall:
    case FormulaKind::exists:
      if (f->vars[0] == from) return f;
      return make_quant(f->kind, f->vars[0], f->range, substitute_free(f->children[0], from, to),
                        f->pointed);
    default: {
      auto g = std::make_shared<Formula>(*f);
      for (auto& v : g->vars) v = swap(v);
      for (auto& c : g->children) c = substitute_free(c, from, to);
      return g;
    }
  }
}

// Gives every quantifier a name distinct from all other variables.
FormulaPtr rename_apart(const FormulaPtr& f, std::set<std::string>& used) {
  if (f->is_quantifier()) {
    std::string v = f->vars[0];
    auto body = f->children[0];
    if (used.count(v)) {
      std::string fresh;
      for (int k = 2;; ++k) {
        fresh = v + "_" + std::to_string(k);
        if (!used.count(fresh)) break;
      }
      body = substitute_free(body, v, fresh);
      v = fresh;
    }
    used.insert(v);
    return make_quant(f->kind, v, f->range, rename_apart(body, used), f->pointed);
  }
  if (f->children.empty()) return f;
  auto g = std::make_shared<Formula>(*f);
  for (auto& c : g->children) c = rename_apart(c, used);
  return g;
}

FormulaPtr combine(FormulaKind op, const FormulaPtr& a, const FormulaPtr& b);

FormulaPtr hoist(const FormulaPtr& q, FormulaKind op, const FormulaPtr& other, bool q_left) {
  const auto& v = q->vars[0];
  auto body = q->children[0];
  bool pointed = q->pointed;
  const bool unsafe = !pointed && ((q->kind == FormulaKind::forall && op == FormulaKind::conjunction) ||
                                   (q->kind == FormulaKind::exists && op == FormulaKind::disjunction));
  if (unsafe) {
    pointed = true;
    body = q->kind == FormulaKind::forall
               ? combine(FormulaKind::disjunction, make_is_null(v), body)
               : combine(FormulaKind::conjunction, make_not(make_is_null(v)), body);
  }
  auto inner = q_left ? combine(op, body, other) : combine(op, other, body);
  return make_quant(q->kind, v, q->range, inner, pointed);
}

// a and b are already in prenex form.
FormulaPtr combine(FormulaKind op, const FormulaPtr& a, const FormulaPtr& b) {
  if (a->is_quantifier()) return hoist(a, op, b, true);
  if (b->is_quantifier()) return hoist(b, op, a, false);
  return op == FormulaKind::conjunction ? make_and(a, b) : make_or(a, b);
}

FormulaPtr pull(const FormulaPtr& f) {
  switch (f->kind) {
    case FormulaKind::forall:
    case FormulaKind::exists:
      return make_quant(f->kind, f->vars[0], f->range, pull(f->children[0]), f->pointed);
    case FormulaKind::conjunction:
    case FormulaKind::disjunction:
      return combine(f->kind, pull(f->children[0]), pull(f->children[1]));
    default:
      return f;
  }
}

bool complementary(const FormulaPtr& a, const FormulaPtr& b) {
  if (a->kind == FormulaKind::negation && structurally_equal(a->children[0], b)) return true;
  if (b->kind == FormulaKind::negation && structurally_equal(b->children[0], a)) return true;
  if (a->kind == FormulaKind::compare && b->kind == FormulaKind::compare) {
    return a->lhs == b->lhs && a->rhs == b->rhs && negate(a->op) == b->op;
  }
  return false;
}

// Adds `lit` to `clause`; false when the clause became contradictory.
bool add_literal(Clause& clause, const FormulaPtr& lit) {
  for (const auto& l : clause) {
    if (structurally_equal(l, lit)) return true;
    if (complementary(l, lit)) return false;
  }
  clause.push_back(lit);
  return true;
}

std::vector<Clause> dnf(const FormulaPtr& f, std::size_t limit) {
  switch (f->kind) {
    case FormulaKind::truth:
      return {Clause{}};
    case FormulaKind::falsity:
      return {};
    case FormulaKind::disjunction: {
      auto a = dnf(f->children[0], limit);
      auto b = dnf(f->children[1], limit);
      if (a.size() + b.size() > limit) {
        throw CompileError("DNF exceeds the clause limit of " + std::to_string(limit));
      }
      a.insert(a.end(), b.begin(), b.end());
      return a;
    }
    case FormulaKind::conjunction: {
      auto a = dnf(f->children[0], limit);
      auto b = dnf(f->children[1], limit);
      if (!a.empty() && b.size() > limit / a.size()) {
        throw CompileError("DNF exceeds the clause limit of " + std::to_string(limit));
      }
      std::vector<Clause> out;
      for (const auto& ca : a) {
        for (const auto& cb : b) {
          Clause c = ca;
          bool ok = true;
          for (const auto& lit : cb) {
            if (!add_literal(c, lit)) {
              ok = false;
              break;
            }
          }
          if (ok) out.push_back(std::move(c));
        }
      }
      return out;
    }
    case FormulaKind::forall:
    case FormulaKind::exists:
      throw CompileError("DNF conversion expects a quantifier-free matrix");
    default:
      return {Clause{f}};
  }
}

std::string clause_key(const Clause& c) {
  std::vector<std::string> parts;
  for (const auto& l : c) parts.push_back(to_string(l));
  std::sort(parts.begin(), parts.end());
  std::string key;
  for (const auto& p : parts) key += p + "\n";
  return key;
}

}  // namespace

FormulaPtr to_nnf(const FormulaPtr& f) { return nnf(f, false); }

std::vector<Clause> to_dnf(const FormulaPtr& matrix, std::size_t clause_limit) {
  auto clauses = dnf(to_nnf(matrix), clause_limit);
  std::vector<Clause> out;
  std::set<std::string> seen;
  for (auto& c : clauses) {
    if (seen.insert(clause_key(c)).second) out.push_back(std::move(c));
  }
  return out;
}

FormulaPtr prenex_formula(const FormulaPtr& f) { return pull(to_nnf(f)); }

PrenexQuery to_prenex(const CalculusQuery& q, std::size_t clause_limit) {
  std::set<std::string> used(q.targets.begin(), q.targets.end());
  for (const auto& r : q.ranges) used.insert(r.var);
  for (const auto& m : q.memberships) {
    used.insert(m.var);
    used.insert(m.components.begin(), m.components.end());
  }
  for (const auto& v : free_variables(q.matrix)) used.insert(v);

  auto f = prenex_formula(rename_apart(q.matrix, used));
  PrenexQuery p;
  p.targets = q.targets;
  p.ranges = q.ranges;
  p.memberships = q.memberships;
  while (f->is_quantifier()) {
    p.prefix.push_back({f->kind, f->vars[0], f->range, f->pointed});
    f = f->children[0];
  }
  p.clauses = to_dnf(f, clause_limit);
  return p;
}

FormulaPtr rename_formula(const FormulaPtr& f,
                          const std::vector<std::pair<std::string, std::string>>& mapping) {
  auto swap = [&](const std::string& v) {
    for (const auto& [from, to] : mapping) {
      if (from == v) return to;
    }
    return v;
  };
  if (f->kind == FormulaKind::truth || f->kind == FormulaKind::falsity) return f;
  auto g = std::make_shared<Formula>(*f);
  if (g->kind == FormulaKind::compare) {
    for (auto* t : {&g->lhs, &g->rhs}) {
      if (auto* a = std::get_if<AttributeTerm>(t)) a->column = swap(a->column);
    }
  }
  for (auto& v : g->vars) v = swap(v);
  for (auto& c : g->children) c = rename_formula(c, mapping);
  return g;
}

Renaming rename_variables(const PrenexQuery& q) {
  std::vector<std::pair<std::string, std::string>> mapping;
  auto note = [&](const std::string& v) {
    for (const auto& m : mapping) {
      if (m.first == v) return;
    }
    mapping.emplace_back(v, "x" + std::to_string(mapping.size() + 1));
  };
  for (const auto& r : q.ranges) note(r.var);
  for (const auto& m : q.memberships) {
    note(m.var);
    for (const auto& c : m.components) note(c);
  }
  for (const auto& e : q.prefix) note(e.var);
  for (const auto& c : q.clauses) {
    for (const auto& lit : c) {
      for (const auto& v : free_variables(lit)) note(v);
    }
  }
  for (const auto& t : q.targets) note(t);

  auto swap = [&](const std::string& v) {
    for (const auto& [from, to] : mapping) {
      if (from == v) return to;
    }
    return v;
  };
  Renaming out;
  auto& p = out.query;
  for (const auto& t : q.targets) p.targets.push_back(swap(t));
  for (const auto& r : q.ranges) p.ranges.push_back({swap(r.var), r.range});
  for (const auto& m : q.memberships) {
    Membership n{swap(m.var), {}, m.relationship};
    for (const auto& c : m.components) n.components.push_back(swap(c));
    p.memberships.push_back(std::move(n));
  }
  for (const auto& e : q.prefix) p.prefix.push_back({e.kind, swap(e.var), e.range, e.pointed});
  for (const auto& c : q.clauses) {
    Clause n;
    for (const auto& lit : c) n.push_back(rename_formula(lit, mapping));
    p.clauses.push_back(std::move(n));
  }
  out.mapping = std::move(mapping);
  return out;
}

FormulaPtr clauses_formula(const std::vector<Clause>& clauses) {
  std::vector<FormulaPtr> parts;
  for (const auto& c : clauses) parts.push_back(make_all(c));
  return make_any(parts);
}

CalculusQuery to_calculus(const PrenexQuery& q) {
  CalculusQuery out;
  out.targets = q.targets;
  out.ranges = q.ranges;
  out.memberships = q.memberships;
  auto f = clauses_formula(q.clauses);
  for (auto it = q.prefix.rbegin(); it != q.prefix.rend(); ++it) {
    f = make_quant(it->kind, it->var, it->range, f, it->pointed);
  }
  out.matrix = f;
  return out;
}

std::string to_string(const PrenexQuery& q) { return to_string(to_calculus(q)); }

std::string clauses_to_string(const std::vector<Clause>& clauses) {
  if (clauses.empty()) return "(no clauses)\n";
  std::string out;
  for (std::size_t i = 0; i < clauses.size(); ++i) {
    out += "C" + std::to_string(i + 1) + ": " + to_string(make_all(clauses[i])) + "\n";
  }
  return out;
}

}  // namespace catq
