#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <variant>
#include <vector>

#include "catq/symbol.hpp"
#include "catq/value.hpp"

namespace catq {

// Identity of an element. `object` is the carrier (root) object that owns the
// payload; subset objects list carrier ids as their members.
struct ElementId {
  Symbol object = 0;
  std::uint32_t ordinal = 0;

  const std::string& object_name() const { return symbol_name(object); }

  // The extra element a pointed range carries besides its members.
  static ElementId null();
  bool is_null() const;

  friend bool operator==(const ElementId&, const ElementId&) = default;
};

// Canonical order: by object name text, then ordinal.
std::strong_ordering operator<=>(const ElementId& a, const ElementId& b);

struct ElementIdHash {
  std::size_t operator()(const ElementId& id) const noexcept {
    return std::hash<std::uint64_t>{}((std::uint64_t{id.object} << 32) | id.ordinal);
  }
};

using ElementSet = std::unordered_set<ElementId, ElementIdHash>;

using Record = std::vector<std::pair<std::string, Value>>;
using Tuple = std::vector<ElementId>;
using Payload = std::variant<Value, Record, Tuple>;

struct Element {
  ElementId id;
  std::string key;
  Payload payload;
};

enum class ObjectKind { entity, attribute, relationship };

std::string_view object_kind_name(ObjectKind kind);
std::optional<ObjectKind> parse_object_kind(std::string_view text);

struct Component {
  std::string name;
  std::string object;
  std::string projection;  // name of the projection morphism R -> object
};

struct CategoryObject {
  std::string name;
  ObjectKind kind = ObjectKind::entity;
  std::string carrier;               // == name for root objects
  std::vector<ElementId> members;    // insertion order
  std::vector<Element> elements;     // payload storage, root objects only
  std::vector<Component> components; // relationship objects only

  bool is_root() const { return carrier == name; }
  bool contains(const ElementId& id) const { return member_set.count(id) != 0; }
  std::size_t size() const { return members.size(); }

  ElementSet member_set;
  std::unordered_map<std::string, std::uint32_t> key_index;  // root objects only
};

struct Morphism {
  std::string name;
  std::string domain;
  std::string codomain;
  std::unordered_map<ElementId, ElementId, ElementIdHash> mapping;
  bool identity = false;    // id_<object>; mapping left empty
  bool projection = false;  // generated for a relationship component
};

// Plain, mutable description of a category. Elements and morphism pairs refer
// to elements by key; this is what the loaders, the JSON format, the test
// generators and the shrinker manipulate.
struct ElementData {
  std::string key;
  std::variant<Value, Record> payload;
  std::vector<std::string> tuple;  // component keys, relationship elements only
};

struct ComponentData {
  std::string name;
  std::string object;
};

struct ObjectData {
  std::string name;
  ObjectKind kind = ObjectKind::entity;
  std::optional<std::string> subset_of;
  std::vector<std::string> members;  // keys of carrier elements, subsets only
  std::vector<ComponentData> components;
  std::vector<ElementData> elements;
};

struct MorphismData {
  std::string name;
  std::string domain;
  std::string codomain;
  std::vector<std::pair<std::string, std::string>> pairs;
};

struct CategoryData {
  std::vector<ObjectData> objects;
  std::vector<MorphismData> morphisms;

  ObjectData* find_object(std::string_view name);
  const ObjectData* find_object(std::string_view name) const;
};

class InstanceCategory {
 public:
  InstanceCategory() = default;

  // Builds without validating; dangling references are skipped and show up
  // through validate_category. Throws LoadError only for structural problems
  // that prevent building at all (duplicate names, unknown carriers).
  static InstanceCategory build(const CategoryData& data);

  const std::vector<CategoryObject>& objects() const { return objects_; }
  const std::vector<Morphism>& morphisms() const { return morphisms_; }

  const CategoryObject* find_object(std::string_view name) const;
  const Morphism* find_morphism(std::string_view name) const;
  const CategoryObject& object(std::string_view name) const;  // throws
  const Morphism& morphism(std::string_view name) const;      // throws

  // Root object owning an element id, if any.
  const CategoryObject* owner(const ElementId& id) const;
  const Element* element(const ElementId& id) const;
  const Element& element_or_throw(const ElementId& id) const;

  // Key of an element; "#<ordinal>" for ids the category does not own.
  std::string key_of(const ElementId& id) const;
  std::optional<ElementId> find_by_key(std::string_view object, std::string_view key) const;

  // Carrier (root) object name of an object.
  const std::string& carrier_of(std::string_view object) const;

  // Total function application; throws EvalError when f is unknown or x is
  // outside its domain.
  ElementId apply_morphism(std::string_view f, const ElementId& x) const;
  // Partial variant: nullopt when x is outside the domain.
  std::optional<ElementId> try_apply(const Morphism& f, const ElementId& x) const;

  // Attribute access: record field first, then a morphism named `attr` from
  // the element into an attribute object.
  Value attribute_of(const ElementId& x, std::string_view attr) const;
  std::optional<Value> try_attribute_of(const ElementId& x, std::string_view attr) const;

  CategoryData to_data() const;

 private:
  std::vector<CategoryObject> objects_;
  std::vector<Morphism> morphisms_;
  std::unordered_map<std::string, std::size_t> object_index_;
  std::unordered_map<std::string, std::size_t> morphism_index_;
  std::unordered_map<Symbol, std::size_t> root_index_;
  std::vector<std::string> build_issues_;

  friend std::vector<std::string> validate_category(const InstanceCategory& cat);
};

std::vector<std::string> validate_category(const InstanceCategory& cat);

// "<relationship>_<component>", the projection morphism registered for each
// component of a relationship object.
std::string projection_name(std::string_view relationship, std::string_view component);
std::string identity_name(std::string_view object);

}  // namespace catq
