#include "catq/testgen.hpp"

#include <algorithm>
#include <random>

#include "catq/errors.hpp"
#include "catq/io.hpp"
#include "json.hpp"

namespace catq {

namespace {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  int between(int lo, int hi) {
    if (hi <= lo) return lo;
    return std::uniform_int_distribution<int>(lo, hi)(gen_);
  }
  bool chance(double p) { return std::uniform_real_distribution<double>(0, 1)(gen_) < p; }
  template <typename T>
  const T& pick(const std::vector<T>& items) {
    return items[static_cast<std::size_t>(between(0, static_cast<int>(items.size()) - 1))];
  }
  std::uint64_t next() { return gen_(); }

 private:
  std::mt19937_64 gen_;
};

std::vector<std::string> member_keys(const ObjectData& obj) {
  if (obj.subset_of) return obj.members;
  std::vector<std::string> out;
  for (const auto& e : obj.elements) out.push_back(e.key);
  return out;
}

std::string lower_prefix(const std::string& name) {
  std::string out;
  for (char c : name) out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

int element_count(Rng& rng, const GenLimits& limits) {
  if (limits.max_elements <= 0) return 0;
  if (rng.chance(0.1)) return 0;
  return rng.between(1, limits.max_elements);
}

void add_tree(Rng& rng, ObjectData& obj, int n, GroundTruth& truth) {
  std::vector<int> parent(static_cast<std::size_t>(n), -1);
  std::vector<DeweyCode> code(static_cast<std::size_t>(n));
  std::vector<std::uint32_t> child_count(static_cast<std::size_t>(n), 0);
  std::uint32_t roots = 0;
  auto prefix = lower_prefix(obj.name);
  for (int i = 0; i < n; ++i) {
    if (i > 0 && !rng.chance(0.15)) parent[static_cast<std::size_t>(i)] = rng.between(0, i - 1);
    int p = parent[static_cast<std::size_t>(i)];
    if (p < 0) {
      code[static_cast<std::size_t>(i)] = DeweyCode({++roots});
    } else {
      code[static_cast<std::size_t>(i)] =
          code[static_cast<std::size_t>(p)].child(++child_count[static_cast<std::size_t>(p)]);
    }
    obj.elements.push_back({prefix + std::to_string(i + 1), Value(code[static_cast<std::size_t>(i)]), {}});
  }
  auto& parents = truth.tree_parent[obj.name];
  auto& ancestors = truth.tree_ancestor[obj.name];
  for (int i = 0; i < n; ++i) {
    const auto& key = obj.elements[static_cast<std::size_t>(i)].key;
    int p = parent[static_cast<std::size_t>(i)];
    if (p >= 0) parents.emplace(obj.elements[static_cast<std::size_t>(p)].key, key);
    for (; p >= 0; p = parent[static_cast<std::size_t>(p)]) {
      ancestors.emplace(obj.elements[static_cast<std::size_t>(p)].key, key);
    }
  }
}

void add_graph_truth(const CategoryData& data, const ObjectData& rel, GroundTruth& truth) {
  GroundTruth::Graph g;
  g.nodes = rel.components[0].object;
  g.keys = member_keys(*data.find_object(g.nodes));
  const std::size_t n = g.keys.size();
  g.adjacency.assign(n, std::vector<bool>(n, false));
  auto index = [&](const std::string& k) {
    return static_cast<std::size_t>(std::find(g.keys.begin(), g.keys.end(), k) - g.keys.begin());
  };
  for (const auto& e : rel.elements) g.adjacency[index(e.tuple[0])][index(e.tuple[1])] = true;
  g.closure = warshall_closure(g.adjacency);
  truth.graphs[rel.name] = std::move(g);
}

}  // namespace

std::vector<std::vector<bool>> warshall_closure(std::vector<std::vector<bool>> m) {
  const std::size_t n = m.size();
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!m[i][k]) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (m[k][j]) m[i][j] = true;
      }
    }
  }
  return m;
}

GeneratedCategory gen_category(std::uint64_t seed, const GenLimits& limits) {
  Rng rng(seed);
  GeneratedCategory out;
  auto& data = out.data;
  const int n_objects = std::max(1, rng.between(1, std::max(1, limits.max_objects)));

  enum class Shape { ints, records, tree, relationship, subset };
  for (int i = 0; i < n_objects; ++i) {
    ObjectData obj;
    obj.name = std::string(1, static_cast<char>('A' + i));
    auto prefix = lower_prefix(obj.name);

    std::vector<Shape> options = {Shape::ints, Shape::ints, Shape::records, Shape::records, Shape::tree};
    std::vector<const ObjectData*> plain;
    for (const auto& o : data.objects) {
      if (o.kind != ObjectKind::relationship) plain.push_back(&o);
    }
    if (!plain.empty()) {
      options.insert(options.end(), {Shape::relationship, Shape::relationship, Shape::subset});
    }
    Shape shape = rng.pick(options);
    const int n = element_count(rng, limits);

    switch (shape) {
      case Shape::ints:
        obj.kind = ObjectKind::attribute;
        for (int e = 0; e < n; ++e) {
          obj.elements.push_back({prefix + std::to_string(e + 1), Value(rng.between(0, 3)), {}});
        }
        break;
      case Shape::records: {
        static const std::vector<std::string> words = {"p", "q", "r"};
        for (int e = 0; e < n; ++e) {
          Record rec{{"v", Value(rng.between(0, 3))},
                     {"w", Value(rng.pick(words))},
                     {"d", Value(Decimal(rng.between(-2, 4), 2))}};
          obj.elements.push_back({prefix + std::to_string(e + 1), std::move(rec), {}});
        }
        break;
      }
      case Shape::tree:
        add_tree(rng, obj, n, out.truth);
        break;
      case Shape::relationship: {
        const ObjectData* a = rng.pick(plain);
        const ObjectData* b = rng.chance(0.6) ? a : rng.pick(plain);
        obj.kind = ObjectKind::relationship;
        obj.components = {{"src", a->name}, {"dst", b->name}};
        auto ka = member_keys(*a);
        auto kb = member_keys(*b);
        std::vector<std::pair<std::string, std::string>> all;
        for (const auto& x : ka) {
          for (const auto& y : kb) all.emplace_back(x, y);
        }
        std::vector<std::pair<std::string, std::string>> chosen;
        for (int e = 0; e < n && !all.empty(); ++e) {
          auto at = static_cast<std::size_t>(rng.between(0, static_cast<int>(all.size()) - 1));
          chosen.push_back(all[at]);
          all.erase(all.begin() + static_cast<std::ptrdiff_t>(at));
        }
        int k = 0;
        for (const auto& [x, y] : chosen) {
          ElementData ed;
          ed.key = prefix + std::to_string(++k);
          ed.tuple = {x, y};
          obj.elements.push_back(std::move(ed));
        }
        break;
      }
      case Shape::subset: {
        const ObjectData* parent = rng.pick(plain);
        obj.kind = parent->kind;
        obj.subset_of = parent->name;
        for (const auto& k : member_keys(*parent)) {
          if (rng.chance(0.5)) obj.members.push_back(k);
        }
        break;
      }
    }
    data.objects.push_back(std::move(obj));
  }

  const int n_morphisms = limits.max_morphisms <= 0 ? 0 : rng.between(0, limits.max_morphisms);
  std::vector<std::string> int_objects;
  for (const auto& o : data.objects) {
    if (o.kind == ObjectKind::attribute && !member_keys(o).empty()) int_objects.push_back(o.name);
  }
  for (int i = 0; i < n_morphisms; ++i) {
    const auto& dom = rng.pick(data.objects);
    auto dom_keys = member_keys(dom);
    std::vector<std::string> codomains;
    for (const auto& o : data.objects) {
      if (dom_keys.empty() || !member_keys(o).empty()) codomains.push_back(o.name);
    }
    std::string cod = !int_objects.empty() && rng.chance(0.5) ? rng.pick(int_objects) : rng.pick(codomains);
    auto cod_keys = member_keys(*data.find_object(cod));
    MorphismData m{"f" + std::to_string(i + 1), dom.name, cod, {}};
    for (const auto& k : dom_keys) m.pairs.emplace_back(k, rng.pick(cod_keys));
    auto& table = out.truth.morphisms[m.name];
    for (const auto& [a, b] : m.pairs) table[a] = b;
    data.morphisms.push_back(std::move(m));
  }

  for (const auto& o : data.objects) {
    if (o.kind == ObjectKind::relationship && o.components[0].object == o.components[1].object) {
      add_graph_truth(data, o, out.truth);
    }
  }
  out.cat = build_validated(data);
  return out;
}

GeneratedCategory gen_digraph(std::uint64_t seed, int nodes, double edge_probability) {
  Rng rng(seed);
  GeneratedCategory out;
  ObjectData n;
  n.name = "N";
  for (int i = 1; i <= nodes; ++i) n.elements.push_back({"n" + std::to_string(i), Value("n" + std::to_string(i)), {}});
  ObjectData e;
  e.name = "E";
  e.kind = ObjectKind::relationship;
  e.components = {{"src", "N"}, {"dst", "N"}};
  for (int i = 1; i <= nodes; ++i) {
    for (int j = 1; j <= nodes; ++j) {
      if (!rng.chance(edge_probability)) continue;
      ElementData ed;
      ed.key = "n" + std::to_string(i) + "->n" + std::to_string(j);
      ed.tuple = {"n" + std::to_string(i), "n" + std::to_string(j)};
      e.elements.push_back(std::move(ed));
    }
  }
  out.data.objects = {std::move(n), std::move(e)};
  add_graph_truth(out.data, out.data.objects[1], out.truth);
  out.cat = build_validated(out.data);
  return out;
}

GeneratedCategory gen_tree(std::uint64_t seed, int nodes) {
  Rng rng(seed);
  GeneratedCategory out;
  ObjectData t;
  t.name = "T";
  add_tree(rng, t, nodes, out.truth);
  out.data.objects.push_back(std::move(t));
  out.cat = build_validated(out.data);
  return out;
}

// ---------------------------------------------------------------------------
// Queries

QueryFeatures QueryFeatures::none() {
  QueryFeatures f;
  f.morph_eq = f.compare = f.forall = f.exists = f.tree = f.reach = f.nhop = false;
  f.relationship_targets = f.disjunction = f.negation = f.range_ops = false;
  f.max_quantifier_depth = 0;
  return f;
}

std::vector<std::string> feature_names(const QueryFeatures& f) {
  std::vector<std::string> out;
  auto add = [&](bool on, const char* name) {
    if (on) out.push_back(name);
  };
  add(f.morph_eq, "morph_eq");
  add(f.compare, "compare");
  add(f.forall && f.max_quantifier_depth > 0, "forall");
  add(f.exists && f.max_quantifier_depth > 0, "exists");
  add(f.tree, "tree");
  add(f.reach, "reach");
  add(f.nhop, "nhop");
  add(f.relationship_targets, "relationship_targets");
  add(f.disjunction, "disjunction");
  add(f.negation, "negation");
  add(f.range_ops, "range_ops");
  return out;
}

namespace {

enum class Shape { empty, ints, records, tree, relationship, other };

Shape shape_of(const InstanceCategory& cat, const std::string& object) {
  const auto& root = cat.object(cat.carrier_of(object));
  if (root.kind == ObjectKind::relationship) return Shape::relationship;
  if (root.elements.empty()) return Shape::empty;
  const auto& p = root.elements.front().payload;
  if (std::holds_alternative<Record>(p)) return Shape::records;
  if (const auto* v = std::get_if<Value>(&p)) {
    if (v->kind() == ValueKind::integer) return Shape::ints;
    if (v->kind() == ValueKind::dewey) return Shape::tree;
  }
  return Shape::other;
}

bool range_has_op(const RangeExpr& r) { return r.kind != RangeExpr::Kind::object; }

struct Var {
  std::string name;
  std::string carrier;
};

class QueryGen {
 public:
  QueryGen(std::uint64_t seed, const InstanceCategory& cat, const QueryFeatures& f)
      : rng_(seed), cat_(cat), f_(f) {
    for (const auto& o : cat.objects()) objects_.push_back(o.name);
    for (const auto& m : cat.morphisms()) morphisms_.push_back(&m);
    for (const auto& o : cat.objects()) {
      if (o.kind == ObjectKind::relationship && o.is_root() && o.components.size() == 2 &&
          cat.carrier_of(o.components[0].object) == cat.carrier_of(o.components[1].object)) {
        edge_sets_.push_back(o.name);
      }
    }
  }

  CalculusQuery generate(const std::string& focus);

 private:
  std::string fresh(const char* prefix) { return prefix + std::to_string(++counter_); }

  RangeExpr range_for(const std::string& object) {
    if (!f_.range_ops || !rng_.chance(0.2)) return RangeExpr::of(object);
    std::vector<std::string> same;
    for (const auto& o : objects_) {
      if (o != object && cat_.carrier_of(o) == cat_.carrier_of(object)) same.push_back(o);
    }
    if (same.empty()) return RangeExpr::of(object);
    static const RangeExpr::Kind kinds[] = {RangeExpr::Kind::union_of, RangeExpr::Kind::intersect_of,
                                            RangeExpr::Kind::difference_of};
    return RangeExpr::combine(kinds[rng_.between(0, 2)], RangeExpr::of(object), RangeExpr::of(rng_.pick(same)));
  }

  CmpOp random_op() { return static_cast<CmpOp>(rng_.between(0, 5)); }

  // Morphisms usable as attributes: total on the whole carrier, into integers.
  std::vector<const Morphism*> int_attributes(const std::string& carrier) {
    std::vector<const Morphism*> out;
    for (const auto* m : morphisms_) {
      if (m->identity || m->projection || m->domain != carrier) continue;
      if (shape_of(cat_, m->codomain) == Shape::ints) out.push_back(m);
    }
    return out;
  }

  std::vector<FormulaPtr> compare_atoms(const std::vector<Var>& scope) {
    static const std::vector<std::string> words = {"p", "q", "r", "z"};
    std::vector<FormulaPtr> out;
    for (const auto& x : scope) {
      auto sx = shape_of(cat_, x.carrier);
      if (sx == Shape::records) {
        out.push_back(make_compare(AttributeTerm{x.name, "v"}, random_op(), Value(rng_.between(0, 3))));
        out.push_back(make_compare(AttributeTerm{x.name, "w"}, random_op(), Value(rng_.pick(words))));
        out.push_back(make_compare(AttributeTerm{x.name, "d"}, random_op(), Value(Decimal(rng_.between(-2, 4), 2))));
        for (const auto& y : scope) {
          if (shape_of(cat_, y.carrier) != Shape::records) continue;
          out.push_back(make_compare(AttributeTerm{x.name, "v"}, random_op(), AttributeTerm{y.name, "v"}));
          out.push_back(make_compare(AttributeTerm{x.name, "d"}, random_op(), AttributeTerm{y.name, "d"}));
        }
      }
      for (const auto* m : int_attributes(x.carrier)) {
        out.push_back(make_compare(AttributeTerm{x.name, m->name}, random_op(), Value(rng_.between(0, 3))));
        for (const auto& y : scope) {
          if (shape_of(cat_, y.carrier) == Shape::records) {
            out.push_back(make_compare(AttributeTerm{x.name, m->name}, random_op(), AttributeTerm{y.name, "v"}));
          }
        }
      }
    }
    return out;
  }

  std::vector<FormulaPtr> morph_atoms(const std::vector<Var>& scope) {
    std::vector<FormulaPtr> out;
    for (const auto* m : morphisms_) {
      if (m->identity && !rng_.chance(0.2)) continue;
      const auto& dc = cat_.carrier_of(m->domain);
      const auto& cc = cat_.carrier_of(m->codomain);
      for (const auto& x : scope) {
        if (x.carrier != dc) continue;
        for (const auto& y : scope) {
          if (y.carrier == cc) out.push_back(make_morph_eq(m->name, x.name, y.name));
        }
      }
    }
    return out;
  }

  std::vector<FormulaPtr> tree_atoms(const std::vector<Var>& scope) {
    std::vector<FormulaPtr> out;
    for (const auto& x : scope) {
      if (shape_of(cat_, x.carrier) != Shape::tree) continue;
      for (const auto& y : scope) {
        if (y.carrier != x.carrier) continue;
        out.push_back(make_tree(static_cast<TreeAxis>(rng_.between(0, 2)), x.name, y.name));
      }
    }
    return out;
  }

  std::vector<FormulaPtr> graph_atoms(const std::vector<Var>& scope, bool nhop) {
    std::vector<FormulaPtr> out;
    for (const auto& e : edge_sets_) {
      const auto& node = cat_.carrier_of(cat_.object(e).components[0].object);
      for (const auto& x : scope) {
        if (x.carrier != node) continue;
        for (const auto& y : scope) {
          if (y.carrier != node) continue;
          out.push_back(nhop ? make_nhop(rng_.between(1, 3), x.name, y.name, e)
                             : make_reach(x.name, y.name, e));
        }
      }
    }
    return out;
  }

  std::vector<FormulaPtr> atoms_of(const std::string& kind, const std::vector<Var>& scope) {
    if (kind == "compare") return compare_atoms(scope);
    if (kind == "morph_eq") return morph_atoms(scope);
    if (kind == "tree") return tree_atoms(scope);
    if (kind == "reach") return graph_atoms(scope, false);
    if (kind == "nhop") return graph_atoms(scope, true);
    return {};
  }

  std::vector<std::string> atom_kinds() const {
    std::vector<std::string> out;
    if (f_.compare) out.push_back("compare");
    if (f_.morph_eq) out.push_back("morph_eq");
    if (f_.tree) out.push_back("tree");
    if (f_.reach) out.push_back("reach");
    if (f_.nhop) out.push_back("nhop");
    return out;
  }

  static bool mentions(const FormulaPtr& f, const std::string& v) {
    auto fv = free_variables(f);
    return std::find(fv.begin(), fv.end(), v) != fv.end();
  }

  FormulaPtr atom(const std::vector<Var>& scope, const std::string& prefer) {
    std::vector<std::vector<FormulaPtr>> by_kind;
    for (const auto& k : atom_kinds()) {
      auto a = atoms_of(k, scope);
      if (!a.empty()) by_kind.push_back(std::move(a));
    }
    if (by_kind.empty()) return rng_.chance(0.8) ? make_true() : make_false();
    auto pool = rng_.pick(by_kind);
    if (!prefer.empty() && rng_.chance(0.8)) {
      std::vector<FormulaPtr> preferred;
      for (const auto& a : pool) {
        if (mentions(a, prefer)) preferred.push_back(a);
      }
      if (!preferred.empty()) pool = std::move(preferred);
    }
    return rng_.pick(pool);
  }

  // Object for a new quantified variable, biased toward objects that connect
  // to variables already in scope.
  std::string linked_object(const std::vector<Var>& scope) {
    std::vector<std::string> linked;
    for (const auto& v : scope) {
      for (const auto* m : morphisms_) {
        if (m->identity) continue;
        if (cat_.carrier_of(m->domain) == v.carrier) linked.push_back(m->codomain);
        if (cat_.carrier_of(m->codomain) == v.carrier) linked.push_back(m->domain);
      }
      for (const auto& o : objects_) {
        if (cat_.carrier_of(o) == v.carrier) linked.push_back(o);
      }
    }
    if (!linked.empty() && rng_.chance(0.75)) return rng_.pick(linked);
    return rng_.pick(objects_);
  }

  FormulaPtr quantifier(int atoms, int qdepth, const std::vector<Var>& scope, FormulaKind kind) {
    auto object = linked_object(scope);
    auto var = fresh("q");
    auto range = range_for(object);
    auto inner = scope;
    inner.push_back({var, cat_.carrier_of(object)});
    auto body = formula(atoms, qdepth + 1, inner, var);
    return make_quant(kind, var, range, body);
  }

  bool can_quantify(int qdepth) const {
    return qdepth < f_.max_quantifier_depth && (f_.forall || f_.exists);
  }

  FormulaKind quantifier_kind() {
    if (f_.forall && f_.exists) return rng_.chance(0.5) ? FormulaKind::forall : FormulaKind::exists;
    return f_.forall ? FormulaKind::forall : FormulaKind::exists;
  }

  FormulaPtr formula(int atoms, int qdepth, const std::vector<Var>& scope, const std::string& prefer) {
    if (can_quantify(qdepth) && rng_.chance(0.3)) {
      return quantifier(std::min(atoms, 2), qdepth, scope, quantifier_kind());
    }
    if (atoms <= 1) {
      auto a = atom(scope, prefer);
      if (f_.negation && rng_.chance(0.2)) return make_not(a);
      return a;
    }
    int left = rng_.between(1, atoms - 1);
    auto l = formula(left, qdepth, scope, prefer);
    auto r = formula(atoms - left, qdepth, scope, prefer);
    auto f = f_.disjunction && rng_.chance(0.4) ? make_or(l, r) : make_and(l, r);
    if (f_.negation && rng_.chance(0.1)) return make_not(f);
    return f;
  }

  // Objects that make a focus construct applicable.
  std::vector<std::string> focus_objects(const std::string& focus) {
    std::vector<std::string> out;
    for (const auto& o : objects_) {
      auto s = shape_of(cat_, o);
      bool ok = false;
      if (focus == "tree") ok = s == Shape::tree;
      if (focus == "compare") ok = s == Shape::records || !int_attributes(cat_.carrier_of(o)).empty();
      if (focus == "morph_eq") {
        ok = std::any_of(morphisms_.begin(), morphisms_.end(), [&](const Morphism* m) {
          return !m->identity && cat_.carrier_of(m->domain) == cat_.carrier_of(o);
        });
      }
      if (focus == "reach" || focus == "nhop") {
        for (const auto& e : edge_sets_) {
          if (cat_.carrier_of(cat_.object(e).components[0].object) == cat_.carrier_of(o)) ok = true;
        }
      }
      if (ok && !cat_.object(o).members.empty()) out.push_back(o);
    }
    return out;
  }

  // A conjunct guaranteeing the focus construct, or null.
  FormulaPtr focus_conjunct(const std::string& focus, std::vector<Var>& scope) {
    if (focus == "forall" || focus == "exists") {
      if (f_.max_quantifier_depth < 1) return nullptr;
      return quantifier(rng_.between(1, 2), 0, scope,
                        focus == "forall" ? FormulaKind::forall : FormulaKind::exists);
    }
    if (focus == "disjunction") return make_or(atom(scope, {}), atom(scope, {}));
    if (focus == "negation") return make_not(atom(scope, {}));
    auto pool = atoms_of(focus, scope);
    if (focus == "morph_eq" && pool.empty() && f_.exists && f_.max_quantifier_depth > 0) {
      // introduce the image variable
      for (const auto& x : scope) {
        for (const auto* m : morphisms_) {
          if (m->identity || cat_.carrier_of(m->domain) != x.carrier) continue;
          auto y = fresh("q");
          return make_quant(FormulaKind::exists, y, RangeExpr::of(m->codomain),
                            make_morph_eq(m->name, x.name, y));
        }
      }
    }
    if (pool.empty()) return nullptr;
    return rng_.pick(pool);
  }

  Rng rng_;
  const InstanceCategory& cat_;
  QueryFeatures f_;
  std::vector<std::string> objects_;
  std::vector<const Morphism*> morphisms_;
  std::vector<std::string> edge_sets_;
  int counter_ = 0;
};

CalculusQuery QueryGen::generate(const std::string& focus) {
  CalculusQuery q;
  std::vector<Var> scope;

  std::vector<std::string> rels;
  for (const auto& o : cat_.objects()) {
    if (o.kind == ObjectKind::relationship) rels.push_back(o.name);
  }
  bool membership = f_.relationship_targets && !rels.empty() &&
                    (focus == "relationship_targets" || rng_.chance(0.25));
  if (membership) {
    const auto& rel = cat_.object(rng_.pick(rels));
    Membership m;
    m.var = fresh("r");
    m.relationship = rel.name;
    for (const auto& c : rel.components) {
      m.components.push_back(fresh("c"));
      scope.push_back({m.components.back(), cat_.carrier_of(c.object)});
    }
    scope.push_back({m.var, rel.carrier});
    q.memberships.push_back(m);
    std::vector<std::string> candidates = m.components;
    candidates.push_back(m.var);
    for (const auto& c : candidates) {
      if (rng_.chance(0.5)) q.targets.push_back(c);
    }
    if (q.targets.empty()) q.targets.push_back(rng_.pick(candidates));
  }

  int n_ranges = membership ? rng_.between(0, 1) : rng_.between(1, 2);
  auto preferred = focus_objects(focus);
  for (int i = 0; i < n_ranges; ++i) {
    std::string object = (i == 0 && !preferred.empty()) ? rng_.pick(preferred) : rng_.pick(objects_);
    // a second variable over the same carrier makes binary predicates usable
    if (i == 1 && !scope.empty() && rng_.chance(0.5)) {
      std::vector<std::string> same;
      for (const auto& o : objects_) {
        if (cat_.carrier_of(o) == scope.back().carrier) same.push_back(o);
      }
      object = rng_.pick(same);
    }
    RangeTerm rt{fresh("x"), range_for(object)};
    if (i == 0 && focus == "range_ops" && !range_has_op(rt.range)) {
      for (const auto& o : objects_) {
        if (o != object && cat_.carrier_of(o) == cat_.carrier_of(object)) {
          rt.range = RangeExpr::combine(RangeExpr::Kind::union_of, RangeExpr::of(object), RangeExpr::of(o));
          break;
        }
      }
    }
    scope.push_back({rt.var, cat_.carrier_of(object)});
    // most free variables are targets; the rest are implicitly existential
    if (rng_.chance(0.85) || q.targets.empty()) q.targets.push_back(rt.var);
    q.ranges.push_back(std::move(rt));
  }

  std::vector<FormulaPtr> conjuncts;
  if (rng_.chance(0.9)) conjuncts.push_back(formula(rng_.between(1, 3), 0, scope, {}));
  if (!focus.empty()) {
    auto present = query_features(CalculusQuery{q.targets, q.ranges, q.memberships, make_all(conjuncts)});
    if (!present.count(focus)) {
      if (auto c = focus_conjunct(focus, scope)) conjuncts.push_back(c);
    }
  }
  q.matrix = make_all(conjuncts);
  return q;
}

void collect_features(const FormulaPtr& f, std::set<std::string>& out) {
  switch (f->kind) {
    case FormulaKind::compare: out.insert("compare"); break;
    case FormulaKind::morph_eq: out.insert("morph_eq"); break;
    case FormulaKind::tree: out.insert("tree"); break;
    case FormulaKind::reach: out.insert("reach"); break;
    case FormulaKind::nhop: out.insert("nhop"); break;
    case FormulaKind::negation: out.insert("negation"); break;
    case FormulaKind::disjunction: out.insert("disjunction"); break;
    case FormulaKind::forall: out.insert("forall"); break;
    case FormulaKind::exists: out.insert("exists"); break;
    default: break;
  }
  if (f->is_quantifier() && range_has_op(f->range)) out.insert("range_ops");
  for (const auto& c : f->children) collect_features(c, out);
}

}  // namespace

CalculusQuery gen_query(std::uint64_t seed, const InstanceCategory& cat, const QueryFeatures& features,
                        const std::string& focus) {
  if (cat.objects().empty()) throw Error("gen_query needs a category with at least one object");
  return QueryGen(seed, cat, features).generate(focus);
}

std::set<std::string> query_features(const CalculusQuery& q) {
  std::set<std::string> out;
  collect_features(q.matrix, out);
  if (!q.memberships.empty()) out.insert("relationship_targets");
  for (const auto& r : q.ranges) {
    if (range_has_op(r.range)) out.insert("range_ops");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Shrinking

namespace {

std::size_t count_nodes(const FormulaPtr& f) {
  std::size_t n = 1;
  for (const auto& c : f->children) n += count_nodes(c);
  return n;
}

// Copy of f with the node at preorder index `target` replaced.
FormulaPtr replace_at(const FormulaPtr& f, std::size_t& index, std::size_t target, const FormulaPtr& with) {
  if (index == target) {
    ++index;
    return with;
  }
  ++index;
  if (f->children.empty()) return f;
  auto copy = std::make_shared<Formula>(*f);
  for (auto& c : copy->children) c = replace_at(c, index, target, with);
  return copy;
}

const Formula* node_at(const FormulaPtr& f, std::size_t& index, std::size_t target) {
  if (index++ == target) return f.get();
  for (const auto& c : f->children) {
    if (const auto* r = node_at(c, index, target)) return r;
  }
  return nullptr;
}

std::vector<CalculusQuery> query_candidates(const CalculusQuery& q) {
  std::vector<CalculusQuery> out;
  const std::size_t n = count_nodes(q.matrix);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t idx = 0;
    const Formula* node = node_at(q.matrix, idx, i);
    std::vector<FormulaPtr> repl;
    if (node->kind != FormulaKind::truth) repl.push_back(make_true());
    if (node->kind != FormulaKind::falsity && node->kind != FormulaKind::truth) repl.push_back(make_false());
    for (const auto& c : node->children) repl.push_back(c);
    for (const auto& r : repl) {
      CalculusQuery c = q;
      std::size_t at = 0;
      c.matrix = replace_at(q.matrix, at, i, r);
      out.push_back(std::move(c));
    }
  }
  if (q.targets.size() > 1) {
    for (std::size_t i = 0; i < q.targets.size(); ++i) {
      CalculusQuery c = q;
      c.targets.erase(c.targets.begin() + static_cast<std::ptrdiff_t>(i));
      out.push_back(std::move(c));
    }
  }
  for (std::size_t i = 0; i < q.ranges.size(); ++i) {
    CalculusQuery c = q;
    c.ranges.erase(c.ranges.begin() + static_cast<std::ptrdiff_t>(i));
    out.push_back(std::move(c));
    if (range_has_op(q.ranges[i].range)) {
      for (const auto& o : q.ranges[i].range.operands) {
        CalculusQuery d = q;
        d.ranges[i].range = o;
        out.push_back(std::move(d));
      }
    }
  }
  for (std::size_t i = 0; i < q.memberships.size(); ++i) {
    CalculusQuery c = q;
    c.memberships.erase(c.memberships.begin() + static_cast<std::ptrdiff_t>(i));
    out.push_back(std::move(c));
  }
  return out;
}

void drop_key(CategoryData& d, const std::string& root, const std::string& key) {
  // subsets of this root (transitively) and references by relationships and morphisms
  std::set<std::string> family = {root};
  for (bool grew = true; grew;) {
    grew = false;
    for (const auto& o : d.objects) {
      if (o.subset_of && family.count(*o.subset_of) && family.insert(o.name).second) grew = true;
    }
  }
  for (auto& o : d.objects) {
    if (o.subset_of && family.count(o.name)) {
      o.members.erase(std::remove(o.members.begin(), o.members.end(), key), o.members.end());
    }
    if (o.name == root) {
      o.elements.erase(std::remove_if(o.elements.begin(), o.elements.end(),
                                      [&](const ElementData& e) { return e.key == key; }),
                       o.elements.end());
    }
    if (o.kind == ObjectKind::relationship && !o.subset_of) {
      std::vector<std::string> dropped;
      auto& els = o.elements;
      for (auto it = els.begin(); it != els.end();) {
        bool hit = false;
        for (std::size_t c = 0; c < it->tuple.size() && c < o.components.size(); ++c) {
          if (family.count(o.components[c].object) && it->tuple[c] == key) hit = true;
        }
        if (hit) {
          dropped.push_back(it->key);
          it = els.erase(it);
        } else {
          ++it;
        }
      }
      for (const auto& k : dropped) drop_key(d, o.name, k);
    }
  }
  for (auto& m : d.morphisms) {
    if (family.count(m.domain)) {
      m.pairs.erase(std::remove_if(m.pairs.begin(), m.pairs.end(),
                                   [&](const auto& p) { return p.first == key; }),
                    m.pairs.end());
    }
  }
}

std::vector<CategoryData> data_candidates(const CategoryData& d) {
  std::vector<CategoryData> out;
  for (std::size_t i = 0; i < d.objects.size(); ++i) {
    CategoryData c = d;
    auto name = c.objects[i].name;
    c.objects.erase(c.objects.begin() + static_cast<std::ptrdiff_t>(i));
    c.morphisms.erase(std::remove_if(c.morphisms.begin(), c.morphisms.end(),
                                     [&](const MorphismData& m) { return m.domain == name || m.codomain == name; }),
                      c.morphisms.end());
    out.push_back(std::move(c));
  }
  for (std::size_t i = 0; i < d.morphisms.size(); ++i) {
    CategoryData c = d;
    c.morphisms.erase(c.morphisms.begin() + static_cast<std::ptrdiff_t>(i));
    out.push_back(std::move(c));
  }
  for (const auto& o : d.objects) {
    if (o.subset_of) {
      for (std::size_t k = 0; k < o.members.size(); ++k) {
        CategoryData c = d;
        auto& members = c.find_object(o.name)->members;
        members.erase(members.begin() + static_cast<std::ptrdiff_t>(k));
        out.push_back(std::move(c));
      }
      continue;
    }
    for (const auto& e : o.elements) {
      CategoryData c = d;
      drop_key(c, o.name, e.key);
      out.push_back(std::move(c));
    }
  }
  return out;
}

bool usable(const TestCase& c) {
  try {
    auto cat = build_validated(c.data);
    return check_safety(c.query, cat).empty();
  } catch (const Error&) {
    return false;
  }
}

bool fails(const TestCase& c, const FailurePredicate& pred) {
  try {
    return pred(c);
  } catch (const std::exception&) {
    return false;
  }
}

}  // namespace

TestCase shrink(TestCase current, const FailurePredicate& still_fails) {
  for (bool progress = true; progress;) {
    progress = false;
    for (auto& q : query_candidates(current.query)) {
      TestCase c{current.data, std::move(q)};
      if (usable(c) && fails(c, still_fails)) {
        current = std::move(c);
        progress = true;
        break;
      }
    }
    if (progress) continue;
    for (auto& d : data_candidates(current.data)) {
      TestCase c{std::move(d), current.query};
      if (usable(c) && fails(c, still_fails)) {
        current = std::move(c);
        progress = true;
        break;
      }
    }
  }
  return current;
}

std::string case_to_json(const TestCase& c) {
  nlohmann::ordered_json j;
  j["query"] = to_string(c.query);
  j["category"] = nlohmann::ordered_json::parse(category_data_to_json_text(c.data));
  return j.dump(2) + "\n";
}

TestCase case_from_json(std::string_view text) {
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(text);
  } catch (const nlohmann::ordered_json::parse_error& e) {
    throw LoadError(std::string("malformed case file: ") + e.what());
  }
  if (!j.is_object() || !j.contains("query") || !j["query"].is_string() || !j.contains("category")) {
    throw LoadError("case file needs \"query\" and \"category\"");
  }
  TestCase c;
  c.data = category_data_from_json_text(j["category"].dump());
  c.query = parse_query(j["query"].get<std::string>());
  return c;
}

}  // namespace catq

// ---------------------------------------------------------------------------
// Operator instances

namespace catq {

namespace {

ObjectData int_object(Rng& rng, const std::string& name, int n) {
  ObjectData o;
  o.name = name;
  auto prefix = lower_prefix(name);
  for (int i = 1; i <= n; ++i) o.elements.push_back({prefix + std::to_string(i), Value(rng.between(0, 3)), {}});
  return o;
}

ObjectData subset_of(Rng& rng, const std::string& name, const ObjectData& parent, double p) {
  ObjectData o;
  o.name = name;
  o.kind = parent.kind;
  o.subset_of = parent.name;
  for (const auto& k : member_keys(parent)) {
    if (rng.chance(p)) o.members.push_back(k);
  }
  return o;
}

// Random subset of the product of the components' keys.
ObjectData relationship(Rng& rng, const std::string& name, const std::vector<const ObjectData*>& comps,
                        double p) {
  ObjectData r;
  r.name = name;
  r.kind = ObjectKind::relationship;
  for (std::size_t i = 0; i < comps.size(); ++i) {
    r.components.push_back({std::string(1, static_cast<char>('a' + i)), comps[i]->name});
  }
  std::vector<std::vector<std::string>> tuples = {{}};
  for (const auto* c : comps) {
    std::vector<std::vector<std::string>> next;
    for (const auto& t : tuples) {
      for (const auto& k : member_keys(*c)) {
        auto u = t;
        u.push_back(k);
        next.push_back(std::move(u));
      }
    }
    tuples = std::move(next);
  }
  int n = 0;
  for (const auto& t : tuples) {
    if (!rng.chance(p)) continue;
    ElementData e;
    e.key = lower_prefix(name) + std::to_string(++n);
    e.tuple = t;
    r.elements.push_back(std::move(e));
  }
  return r;
}

// Distinct objects of a generated category, up to `k`, favouring ones joined
// by morphisms.
std::vector<std::string> diagram_objects(Rng& rng, const InstanceCategory& cat, int k) {
  std::vector<std::string> out;
  std::vector<std::string> pool;
  for (const auto& m : cat.morphisms()) {
    if (m.identity) continue;
    pool.push_back(m.domain);
    pool.push_back(m.codomain);
  }
  for (const auto& o : cat.objects()) pool.push_back(o.name);
  for (int tries = 0; tries < 20 && static_cast<int>(out.size()) < k; ++tries) {
    const auto& name = rng.pick(pool);
    if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
  }
  return out;
}

}  // namespace

const std::vector<std::string>& sim_op_kinds() {
  static const std::vector<std::string> kinds = {"map", "select", "project", "divide", "tree",
                                                 "reach", "nhop", "cat", "lim"};
  return kinds;
}

SimCase gen_sim_case(std::uint64_t seed, std::string_view kind) {
  Rng rng(seed);
  CategoryData data;
  SimOp op;
  if (kind == "map" || kind == "cat" || kind == "lim") {
    auto gen = gen_category(seed, {4, 5, 4});
    if (kind == "map") {
      std::vector<std::string> names;
      for (const auto& m : gen.cat.morphisms()) names.push_back(m.name);
      op = sim::Map{rng.pick(names)};
    } else {
      DiagramSpec spec;
      spec.objects = diagram_objects(rng, gen.cat, rng.between(1, 3));
      if (kind == "lim") {
        for (const auto& m : gen.cat.morphisms()) {
          bool inside = std::count(spec.objects.begin(), spec.objects.end(), m.domain) &&
                        std::count(spec.objects.begin(), spec.objects.end(), m.codomain);
          if (inside && !m.identity && rng.chance(0.7)) spec.constraints.push_back({m.name, m.domain, m.codomain});
        }
        op = sim::Lim{spec};
      } else {
        op = sim::Cat{spec};
      }
    }
    data = std::move(gen.data);
  } else if (kind == "select") {
    static const std::vector<std::string> words = {"p", "q", "r"};
    ObjectData r;
    r.name = "R";
    const int n = rng.between(0, 6);
    for (int i = 1; i <= n; ++i) {
      Record rec{{"v", Value(rng.between(0, 3))},
                 {"w", Value(rng.pick(words))},
                 {"d", Value(Decimal(rng.between(-2, 4), 2))}};
      r.elements.push_back({"r" + std::to_string(i), std::move(rec), {}});
    }
    data.objects.push_back(std::move(r));
    auto op_kind = static_cast<CmpOp>(rng.between(0, 5));
    Comparison c;
    switch (rng.between(0, 3)) {
      case 0: c = {AttributeTerm{"x", "v"}, op_kind, Value(rng.between(0, 3))}; break;
      case 1: c = {AttributeTerm{"x", "w"}, op_kind, Value(rng.pick(words))}; break;
      case 2: c = {Value(Decimal(rng.between(-2, 4), 2)), op_kind, AttributeTerm{"x", "d"}}; break;
      default: c = {AttributeTerm{"x", "v"}, op_kind, AttributeTerm{"x", "v"}}; break;
    }
    op = sim::Select{"R", c};
  } else if (kind == "project") {
    auto a = int_object(rng, "A", rng.between(0, 4));
    auto b = int_object(rng, "B", rng.between(0, 4));
    const int width = rng.between(2, 3);
    std::vector<const ObjectData*> comps;
    for (int i = 0; i < width; ++i) comps.push_back(rng.chance(0.5) ? &a : &b);
    auto r = relationship(rng, "R", comps, 0.3);
    std::vector<std::string> keep;
    for (const auto& c : r.components) {
      if (rng.chance(0.5)) keep.push_back(c.name);
    }
    if (keep.empty()) keep.push_back(r.components.back().name);
    std::shuffle(keep.begin(), keep.end(), std::mt19937_64(rng.next()));
    data.objects = {std::move(a), std::move(b), std::move(r)};
    op = sim::Project{"R", keep};
  } else if (kind == "divide") {
    auto a = int_object(rng, "A", rng.between(0, 4));
    auto b = int_object(rng, "B", rng.between(0, 4));
    auto c = int_object(rng, "C", rng.between(0, 3));
    if (rng.chance(0.5)) {
      auto r = relationship(rng, "R", {&a, &b}, 0.6);
      auto s = subset_of(rng, "S", b, 0.5);
      data.objects = {std::move(a), std::move(b), std::move(c), std::move(r), std::move(s)};
      op = sim::Divide{"R", "S"};
    } else {
      auto r = relationship(rng, "R", {&a, &b, &c}, 0.6);
      auto d = relationship(rng, "D", {&b, &c}, 0.3);
      data.objects = {std::move(a), std::move(b), std::move(c), std::move(r), std::move(d)};
      op = sim::Divide{"R", "D"};
    }
  } else if (kind == "tree") {
    auto gen = gen_tree(seed, rng.between(0, 12));
    data = std::move(gen.data);
    const auto& t = data.objects[0];
    auto d1 = subset_of(rng, "D1", t, 0.6);
    auto d2 = subset_of(rng, "D2", t, 0.6);
    data.objects.push_back(std::move(d1));
    data.objects.push_back(std::move(d2));
    op = sim::Tree{static_cast<TreeAxis>(rng.between(0, 2)), rng.chance(0.3) ? "T" : "D1",
                   rng.chance(0.3) ? "T" : "D2"};
  } else if (kind == "reach" || kind == "nhop") {
    auto gen = gen_digraph(seed, rng.between(0, 8), 0.2);
    data = std::move(gen.data);
    const auto& n = data.objects[0];
    auto s = subset_of(rng, "S", n, 0.5);
    auto t = subset_of(rng, "T", n, 0.5);
    data.objects.push_back(std::move(s));
    data.objects.push_back(std::move(t));
    std::string src = rng.chance(0.3) ? "N" : "S";
    std::string dst = rng.chance(0.3) ? "N" : "T";
    if (kind == "reach") {
      op = sim::Reach{src, dst, "E"};
    } else {
      op = sim::NHop{src, dst, "E", rng.between(1, 4)};
    }
  } else {
    throw Error("unknown operator kind '" + std::string(kind) + "'");
  }
  auto cat = build_validated(data);
  return SimCase{std::move(data), std::move(cat), std::move(op)};
}

}  // namespace catq
