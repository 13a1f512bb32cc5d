#include "catq/category.hpp"

#include <algorithm>
#include <set>

#include "catq/errors.hpp"

namespace catq {

ElementId ElementId::null() {
  static const Symbol symbol = intern("<null>");
  return ElementId{symbol, 0};
}

bool ElementId::is_null() const { return *this == null(); }

std::strong_ordering operator<=>(const ElementId& a, const ElementId& b) {
  if (a.object != b.object) {
    int c = symbol_name(a.object).compare(symbol_name(b.object));
    return c < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
  }
  return a.ordinal <=> b.ordinal;
}

std::string_view object_kind_name(ObjectKind kind) {
  switch (kind) {
    case ObjectKind::entity: return "entity";
    case ObjectKind::attribute: return "attribute";
    case ObjectKind::relationship: return "relationship";
  }
  return "?";
}

std::optional<ObjectKind> parse_object_kind(std::string_view text) {
  if (text == "entity") return ObjectKind::entity;
  if (text == "attribute") return ObjectKind::attribute;
  if (text == "relationship") return ObjectKind::relationship;
  return std::nullopt;
}

std::string projection_name(std::string_view relationship, std::string_view component) {
  return std::string(relationship) + "_" + std::string(component);
}

std::string identity_name(std::string_view object) { return "id_" + std::string(object); }

ObjectData* CategoryData::find_object(std::string_view name) {
  for (auto& o : objects) {
    if (o.name == name) return &o;
  }
  return nullptr;
}

const ObjectData* CategoryData::find_object(std::string_view name) const {
  return const_cast<CategoryData*>(this)->find_object(name);
}

InstanceCategory InstanceCategory::build(const CategoryData& data) {
  InstanceCategory cat;
  auto& issues = cat.build_issues_;

  for (const auto& od : data.objects) {
    if (cat.object_index_.count(od.name)) throw LoadError("duplicate object name '" + od.name + "'");
    cat.object_index_[od.name] = cat.objects_.size();
    CategoryObject obj;
    obj.name = od.name;
    obj.kind = od.kind;
    obj.carrier = od.subset_of ? std::string() : od.name;
    cat.objects_.push_back(std::move(obj));
  }

  // carriers; subset chains resolve to their root
  for (std::size_t i = 0; i < data.objects.size(); ++i) {
    const ObjectData* od = &data.objects[i];
    std::set<std::string> seen;
    while (od->subset_of) {
      if (!seen.insert(od->name).second) throw LoadError("cyclic subset_of at '" + od->name + "'");
      const ObjectData* parent = data.find_object(*od->subset_of);
      if (!parent) {
        throw LoadError("object '" + data.objects[i].name + "' is a subset of unknown object '" +
                        *od->subset_of + "'");
      }
      od = parent;
    }
    cat.objects_[i].carrier = od->name;
  }

  // root elements; sources[i][ordinal] is the data the element came from
  std::vector<std::vector<const ElementData*>> sources(data.objects.size());
  for (std::size_t i = 0; i < data.objects.size(); ++i) {
    const auto& od = data.objects[i];
    auto& obj = cat.objects_[i];
    if (!obj.is_root()) continue;
    const Symbol sym = intern(obj.name);
    cat.root_index_[sym] = i;
    for (const auto& ed : od.elements) {
      const auto ordinal = static_cast<std::uint32_t>(obj.elements.size());
      ElementId id{sym, ordinal};
      const std::string& key = ed.key;
      if (!obj.key_index.emplace(key, ordinal).second) {
        issues.push_back("object '" + obj.name + "': duplicate element key '" + key + "'");
        continue;
      }
      Element el{id, key, Value{}};
      std::visit([&](const auto& p) { el.payload = p; }, ed.payload);
      obj.elements.push_back(std::move(el));
      sources[i].push_back(&ed);
      obj.members.push_back(id);
      obj.member_set.insert(id);
    }
  }

  auto resolve = [&](std::string_view object, std::string_view key) -> std::optional<ElementId> {
    auto it = cat.object_index_.find(std::string(object));
    if (it == cat.object_index_.end()) return std::nullopt;
    const auto& carrier = cat.objects_[cat.object_index_.at(cat.objects_[it->second].carrier)];
    auto k = carrier.key_index.find(std::string(key));
    if (k == carrier.key_index.end()) return std::nullopt;
    return ElementId{intern(carrier.name), k->second};
  };

  // subset members
  for (std::size_t i = 0; i < data.objects.size(); ++i) {
    const auto& od = data.objects[i];
    auto& obj = cat.objects_[i];
    if (obj.is_root()) continue;
    if (!od.elements.empty()) {
      issues.push_back("subset object '" + obj.name + "' declares its own elements");
    }
    for (const auto& key : od.members) {
      auto id = resolve(obj.carrier, key);
      if (!id) {
        issues.push_back("subset object '" + obj.name + "': member '" + key +
                         "' is not an element of '" + obj.carrier + "'");
        continue;
      }
      if (!obj.member_set.insert(*id).second) {
        issues.push_back("subset object '" + obj.name + "': member '" + key + "' listed twice");
        continue;
      }
      obj.members.push_back(*id);
    }
  }

  auto add_morphism = [&](Morphism m) {
    if (cat.morphism_index_.count(m.name)) throw LoadError("duplicate morphism name '" + m.name + "'");
    cat.morphism_index_[m.name] = cat.morphisms_.size();
    cat.morphisms_.push_back(std::move(m));
  };

  // relationship tuples and projections
  for (std::size_t i = 0; i < data.objects.size(); ++i) {
    auto& obj = cat.objects_[i];
    if (obj.kind != ObjectKind::relationship) continue;
    const auto& root_data = *data.find_object(obj.carrier);
    for (std::size_t c = 0; c < root_data.components.size(); ++c) {
      const auto& cd = root_data.components[c];
      std::string name = cd.name.empty() ? std::to_string(c + 1) : cd.name;
      obj.components.push_back({name, cd.object, projection_name(obj.carrier, name)});
    }
    if (!obj.is_root()) continue;
    for (std::size_t e = 0; e < obj.elements.size(); ++e) {
      auto& el = obj.elements[e];
      const ElementData* ed = sources[i][e];
      Tuple tuple;
      if (ed->tuple.size() != obj.components.size()) {
        issues.push_back("relationship '" + obj.name + "': element '" + el.key + "' has arity " +
                         std::to_string(ed->tuple.size()) + ", expected " +
                         std::to_string(obj.components.size()));
      }
      for (std::size_t c = 0; c < ed->tuple.size() && c < obj.components.size(); ++c) {
        auto id = resolve(obj.components[c].object, ed->tuple[c]);
        if (!id) {
          issues.push_back("relationship '" + obj.name + "': element '" + el.key + "' component '" +
                           obj.components[c].name + "' references missing element '" +
                           ed->tuple[c] + "' of '" + obj.components[c].object + "'");
          id = ElementId{intern(obj.components[c].object), UINT32_MAX};
        }
        tuple.push_back(*id);
      }
      el.payload = std::move(tuple);
    }
  }
  for (auto& obj : cat.objects_) {
    if (obj.kind != ObjectKind::relationship || !obj.is_root()) continue;
    for (std::size_t c = 0; c < obj.components.size(); ++c) {
      Morphism m;
      m.name = obj.components[c].projection;
      m.domain = obj.name;
      m.codomain = obj.components[c].object;
      m.projection = true;
      for (const auto& el : obj.elements) {
        const auto* tuple = std::get_if<Tuple>(&el.payload);
        if (tuple && c < tuple->size() && (*tuple)[c].ordinal != UINT32_MAX) {
          m.mapping.emplace(el.id, (*tuple)[c]);
        }
      }
      add_morphism(std::move(m));
    }
  }

  for (const auto& md : data.morphisms) {
    Morphism m;
    m.name = md.name;
    m.domain = md.domain;
    m.codomain = md.codomain;
    for (const auto& [from, to] : md.pairs) {
      auto x = resolve(md.domain, from);
      auto y = resolve(md.codomain, to);
      if (!x || !y) {
        issues.push_back("morphism '" + md.name + "': pair (" + from + ", " + to +
                         ") references a missing element");
        continue;
      }
      if (!m.mapping.emplace(*x, *y).second) {
        issues.push_back("morphism '" + md.name + "': element '" + from + "' has two images");
      }
    }
    add_morphism(std::move(m));
  }

  for (const auto& obj : cat.objects_) {
    auto name = identity_name(obj.name);
    if (cat.morphism_index_.count(name)) continue;
    Morphism m;
    m.name = name;
    m.domain = obj.name;
    m.codomain = obj.name;
    m.identity = true;
    add_morphism(std::move(m));
  }
  return cat;
}

const CategoryObject* InstanceCategory::find_object(std::string_view name) const {
  auto it = object_index_.find(std::string(name));
  return it == object_index_.end() ? nullptr : &objects_[it->second];
}

const Morphism* InstanceCategory::find_morphism(std::string_view name) const {
  auto it = morphism_index_.find(std::string(name));
  return it == morphism_index_.end() ? nullptr : &morphisms_[it->second];
}

const CategoryObject& InstanceCategory::object(std::string_view name) const {
  if (auto* o = find_object(name)) return *o;
  throw EvalError("unknown object '" + std::string(name) + "'");
}

const Morphism& InstanceCategory::morphism(std::string_view name) const {
  if (auto* m = find_morphism(name)) return *m;
  throw EvalError("unknown morphism '" + std::string(name) + "'");
}

const CategoryObject* InstanceCategory::owner(const ElementId& id) const {
  auto it = root_index_.find(id.object);
  return it == root_index_.end() ? nullptr : &objects_[it->second];
}

const Element* InstanceCategory::element(const ElementId& id) const {
  const auto* root = owner(id);
  if (!root || id.ordinal >= root->elements.size()) return nullptr;
  return &root->elements[id.ordinal];
}

const Element& InstanceCategory::element_or_throw(const ElementId& id) const {
  if (const auto* e = element(id)) return *e;
  throw EvalError("element " + symbol_name(id.object) + "#" + std::to_string(id.ordinal) +
                  " is not stored in the category");
}

std::string InstanceCategory::key_of(const ElementId& id) const {
  if (id.is_null()) return "null";
  if (const auto* e = element(id)) return e->key;
  return "#" + std::to_string(id.ordinal);
}

std::optional<ElementId> InstanceCategory::find_by_key(std::string_view object,
                                                       std::string_view key) const {
  const auto* obj = find_object(object);
  if (!obj) return std::nullopt;
  const auto& root = *find_object(obj->carrier);
  auto it = root.key_index.find(std::string(key));
  if (it == root.key_index.end()) return std::nullopt;
  ElementId id{intern(root.name), it->second};
  if (!obj->contains(id)) return std::nullopt;
  return id;
}

const std::string& InstanceCategory::carrier_of(std::string_view object) const {
  return this->object(object).carrier;
}

std::optional<ElementId> InstanceCategory::try_apply(const Morphism& f, const ElementId& x) const {
  if (f.identity) {
    const auto* dom = find_object(f.domain);
    if (dom && dom->contains(x)) return x;
    return std::nullopt;
  }
  auto it = f.mapping.find(x);
  if (it == f.mapping.end()) return std::nullopt;
  return it->second;
}

ElementId InstanceCategory::apply_morphism(std::string_view f, const ElementId& x) const {
  const auto& m = morphism(f);
  const auto& dom = object(m.domain);
  if (!dom.contains(x)) {
    throw EvalError("element '" + key_of(x) + "' is not in the domain '" + m.domain +
                    "' of morphism '" + m.name + "'");
  }
  if (auto y = try_apply(m, x)) return *y;
  throw EvalError("morphism '" + m.name + "' has no image for '" + key_of(x) + "'");
}

std::optional<Value> InstanceCategory::try_attribute_of(const ElementId& x,
                                                        std::string_view attr) const {
  const auto* el = element(x);
  if (!el) return std::nullopt;
  if (const auto* rec = std::get_if<Record>(&el->payload)) {
    for (const auto& [name, value] : *rec) {
      if (name == attr) return value;
    }
  }
  const auto* m = find_morphism(attr);
  if (!m) return std::nullopt;
  auto y = try_apply(*m, x);
  if (!y) return std::nullopt;
  const auto* target = element(*y);
  if (!target) return std::nullopt;
  if (const auto* v = std::get_if<Value>(&target->payload)) return *v;
  return std::nullopt;
}

Value InstanceCategory::attribute_of(const ElementId& x, std::string_view attr) const {
  if (auto v = try_attribute_of(x, attr)) return *v;
  const auto* el = element(x);
  if (!el) throw EvalError("attribute '" + std::string(attr) + "' of an element without payload");
  if (const auto* m = find_morphism(attr)) {
    if (auto y = try_apply(*m, x)) {
      throw EvalError("attribute '" + std::string(attr) + "' of '" + el->key +
                      "' resolves to a non-atomic element '" + key_of(*y) + "'");
    }
  }
  throw EvalError("element '" + el->key + "' has no attribute '" + std::string(attr) + "'");
}

CategoryData InstanceCategory::to_data() const {
  CategoryData data;
  for (const auto& obj : objects_) {
    ObjectData od;
    od.name = obj.name;
    od.kind = obj.kind;
    if (!obj.is_root()) {
      od.subset_of = obj.carrier;
      for (const auto& id : obj.members) od.members.push_back(key_of(id));
    } else {
      for (const auto& c : obj.components) od.components.push_back({c.name, c.object});
      for (const auto& el : obj.elements) {
        ElementData ed;
        ed.key = el.key;
        if (const auto* v = std::get_if<Value>(&el.payload)) ed.payload = *v;
        if (const auto* r = std::get_if<Record>(&el.payload)) ed.payload = *r;
        if (const auto* t = std::get_if<Tuple>(&el.payload)) {
          for (const auto& id : *t) ed.tuple.push_back(key_of(id));
        }
        od.elements.push_back(std::move(ed));
      }
    }
    data.objects.push_back(std::move(od));
  }
  for (const auto& m : morphisms_) {
    if (m.identity || m.projection) continue;
    MorphismData md{m.name, m.domain, m.codomain, {}};
    if (const auto* dom = find_object(m.domain)) {
      for (const auto& x : dom->members) {
        if (auto it = m.mapping.find(x); it != m.mapping.end()) {
          md.pairs.emplace_back(key_of(x), key_of(it->second));
        }
      }
    }
    data.morphisms.push_back(std::move(md));
  }
  return data;
}

std::vector<std::string> validate_category(const InstanceCategory& cat) {
  std::vector<std::string> out = cat.build_issues_;

  for (const auto& obj : cat.objects()) {
    if (obj.kind == ObjectKind::relationship) {
      for (const auto& c : obj.components) {
        if (!cat.find_object(c.object)) {
          out.push_back("relationship '" + obj.name + "': component '" + c.name +
                        "' names unknown object '" + c.object + "'");
        }
      }
    }
    if (!obj.is_root()) {
      const auto* root = cat.find_object(obj.carrier);
      if (root && root->kind != obj.kind) {
        out.push_back("subset object '" + obj.name + "' has kind " +
                      std::string(object_kind_name(obj.kind)) + " but its carrier '" + root->name +
                      "' has kind " + std::string(object_kind_name(root->kind)));
      }
      continue;
    }
    for (const auto& el : obj.elements) {
      const bool is_tuple = std::holds_alternative<Tuple>(el.payload);
      if (obj.kind == ObjectKind::relationship && !is_tuple) {
        out.push_back("relationship '" + obj.name + "': element '" + el.key + "' is not a tuple");
      }
      if (obj.kind != ObjectKind::relationship && is_tuple) {
        out.push_back("object '" + obj.name + "': element '" + el.key + "' is a tuple");
      }
      if (const auto* rec = std::get_if<Record>(&el.payload)) {
        std::set<std::string> names;
        for (const auto& [name, value] : *rec) {
          if (!names.insert(name).second) {
            out.push_back("object '" + obj.name + "': element '" + el.key +
                          "' repeats attribute '" + name + "'");
          }
        }
      }
      if (const auto* tuple = std::get_if<Tuple>(&el.payload)) {
        for (std::size_t c = 0; c < tuple->size() && c < obj.components.size(); ++c) {
          const auto* comp = cat.find_object(obj.components[c].object);
          if (comp && (*tuple)[c].ordinal != UINT32_MAX && !comp->contains((*tuple)[c])) {
            out.push_back("relationship '" + obj.name + "': element '" + el.key + "' component '" +
                          obj.components[c].name + "' is not a member of '" + comp->name + "'");
          }
        }
      }
    }
  }

  for (const auto& m : cat.morphisms()) {
    const auto* dom = cat.find_object(m.domain);
    const auto* cod = cat.find_object(m.codomain);
    if (!dom) out.push_back("morphism '" + m.name + "': unknown domain '" + m.domain + "'");
    if (!cod) out.push_back("morphism '" + m.name + "': unknown codomain '" + m.codomain + "'");
    if (!dom || !cod || m.identity) continue;
    for (const auto& x : dom->members) {
      auto it = m.mapping.find(x);
      if (it == m.mapping.end()) {
        out.push_back("morphism '" + m.name + "' is not total: no image for element '" +
                      cat.key_of(x) + "' of '" + dom->name + "'");
      } else if (!cod->contains(it->second)) {
        out.push_back("morphism '" + m.name + "': image '" + cat.key_of(it->second) + "' of '" +
                      cat.key_of(x) + "' is not in codomain '" + cod->name + "'");
      }
    }
    // deterministic report order for stray pairs
    std::vector<ElementId> stray;
    for (const auto& [x, y] : m.mapping) {
      if (!dom->contains(x)) stray.push_back(x);
    }
    std::sort(stray.begin(), stray.end());
    for (const auto& x : stray) {
      out.push_back("morphism '" + m.name + "': element '" + cat.key_of(x) +
                    "' is mapped but not in domain '" + dom->name + "'");
    }
  }
  return out;
}

}  // namespace catq
