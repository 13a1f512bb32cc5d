#include "catq/io.hpp"

#include <algorithm>
#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "catq/errors.hpp"
#include "json.hpp"

namespace catq {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

[[noreturn]] void schema_error(const std::string& path, const std::string& what) {
  throw LoadError("JSON schema violation at " + path + ": " + what);
}

const json& member(const json& obj, const std::string& name, const std::string& path) {
  auto it = obj.find(name);
  if (it == obj.end()) schema_error(path, "missing field '" + name + "'");
  return *it;
}

std::string string_at(const json& j, const std::string& path) {
  if (!j.is_string()) schema_error(path, "expected a string");
  return j.get<std::string>();
}

const json& array_at(const json& j, const std::string& path) {
  if (!j.is_array()) schema_error(path, "expected an array");
  return j;
}

Value value_from_json(const json& j, const std::string& path) {
  if (j.is_boolean()) return Value(j.get<bool>());
  if (j.is_number_integer()) return Value(j.get<std::int64_t>());
  if (j.is_number_float()) {
    try {
      return Value(Decimal::parse(j.dump()));
    } catch (const Error& e) {
      schema_error(path, std::string("unsupported number: ") + e.what());
    }
  }
  if (j.is_string()) return Value(j.get<std::string>());
  if (j.is_object() && j.size() == 1) {
    try {
      if (j.contains("decimal")) return Value(Decimal::parse(string_at(j["decimal"], path + ".decimal")));
      if (j.contains("dewey")) return Value(DeweyCode::parse(string_at(j["dewey"], path + ".dewey")));
    } catch (const LoadError&) {
      throw;
    } catch (const Error& e) {
      schema_error(path, e.what());
    }
  }
  schema_error(path, "expected a value (number, string, boolean, {\"decimal\": ..} or {\"dewey\": ..})");
}

json value_to_json(const Value& v) {
  switch (v.kind()) {
    case ValueKind::integer: return v.as_int();
    case ValueKind::text: return v.as_text();
    case ValueKind::boolean: return v.as_bool();
    case ValueKind::decimal: return json{{"decimal", v.as_decimal().to_string()}};
    case ValueKind::dewey: return json{{"dewey", v.as_dewey().to_string()}};
  }
  return nullptr;
}

ElementData element_from_json(const json& j, const std::string& path) {
  ElementData ed;
  if (!j.is_object()) {
    // bare scalar: key is its plain rendering
    ed.payload = value_from_json(j, path);
    ed.key = std::get<Value>(ed.payload).to_string();
    return ed;
  }
  ed.key = string_at(member(j, "key", path), path + ".key");
  int forms = 0;
  if (auto it = j.find("value"); it != j.end()) {
    ed.payload = value_from_json(*it, path + ".value");
    ++forms;
  }
  if (auto it = j.find("record"); it != j.end()) {
    if (!it->is_object()) schema_error(path + ".record", "expected an object");
    Record rec;
    for (const auto& [name, v] : it->items()) {
      rec.emplace_back(name, value_from_json(v, path + ".record." + name));
    }
    ed.payload = std::move(rec);
    ++forms;
  }
  if (auto it = j.find("tuple"); it != j.end()) {
    const auto& arr = array_at(*it, path + ".tuple");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      ed.tuple.push_back(string_at(arr[i], path + ".tuple[" + std::to_string(i) + "]"));
    }
    ++forms;
  }
  if (forms > 1) schema_error(path, "element has more than one of value/record/tuple");
  if (forms == 0) ed.payload = Value(ed.key);
  return ed;
}

json element_to_json(const ElementData& ed, ObjectKind kind) {
  json j;
  j["key"] = ed.key;
  if (kind == ObjectKind::relationship) {
    j["tuple"] = ed.tuple;
  } else if (const auto* r = std::get_if<Record>(&ed.payload)) {
    json rec = json::object();
    for (const auto& [name, v] : *r) rec[name] = value_to_json(v);
    j["record"] = std::move(rec);
  } else {
    j["value"] = value_to_json(std::get<Value>(ed.payload));
  }
  return j;
}

ObjectData object_from_json(const json& j, const std::string& path) {
  if (!j.is_object()) schema_error(path, "expected an object");
  ObjectData od;
  od.name = string_at(member(j, "name", path), path + ".name");
  if (auto it = j.find("kind"); it != j.end()) {
    auto text = string_at(*it, path + ".kind");
    auto kind = parse_object_kind(text);
    if (!kind) schema_error(path + ".kind", "unknown kind '" + text + "'");
    od.kind = *kind;
  }
  if (auto it = j.find("subset_of"); it != j.end()) {
    od.subset_of = string_at(*it, path + ".subset_of");
    const auto& members = array_at(member(j, "members", path), path + ".members");
    for (std::size_t i = 0; i < members.size(); ++i) {
      const auto& m = members[i];
      auto mpath = path + ".members[" + std::to_string(i) + "]";
      od.members.push_back(m.is_string() ? m.get<std::string>() : value_from_json(m, mpath).to_string());
    }
    if (j.contains("elements")) schema_error(path, "a subset object lists members, not elements");
    return od;
  }
  if (auto it = j.find("components"); it != j.end()) {
    const auto& comps = array_at(*it, path + ".components");
    for (std::size_t i = 0; i < comps.size(); ++i) {
      auto cpath = path + ".components[" + std::to_string(i) + "]";
      if (!comps[i].is_object()) schema_error(cpath, "expected an object");
      ComponentData cd;
      cd.name = string_at(member(comps[i], "name", cpath), cpath + ".name");
      cd.object = string_at(member(comps[i], "object", cpath), cpath + ".object");
      od.components.push_back(std::move(cd));
    }
  }
  if (od.kind == ObjectKind::relationship && od.components.empty()) {
    schema_error(path, "relationship object without components");
  }
  const auto& elements = array_at(member(j, "elements", path), path + ".elements");
  for (std::size_t i = 0; i < elements.size(); ++i) {
    od.elements.push_back(element_from_json(elements[i], path + ".elements[" + std::to_string(i) + "]"));
  }
  return od;
}

MorphismData morphism_from_json(const json& j, const std::string& path) {
  if (!j.is_object()) schema_error(path, "expected an object");
  MorphismData md;
  md.name = string_at(member(j, "name", path), path + ".name");
  md.domain = string_at(member(j, "domain", path), path + ".domain");
  md.codomain = string_at(member(j, "codomain", path), path + ".codomain");
  const auto& pairs = array_at(member(j, "pairs", path), path + ".pairs");
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    auto ppath = path + ".pairs[" + std::to_string(i) + "]";
    const auto& p = pairs[i];
    if (!p.is_array() || p.size() != 2) schema_error(ppath, "expected a [from, to] pair");
    md.pairs.emplace_back(string_at(p[0], ppath + "[0]"), string_at(p[1], ppath + "[1]"));
  }
  return md;
}

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> csv_fields(const std::string& line, std::size_t line_no) {
  std::vector<std::string> out;
  std::string cur;
  std::size_t i = 0;
  bool quoted_field = false;
  while (true) {
    if (i < line.size() && line[i] == '"' && cur.empty() && !quoted_field) {
      quoted_field = true;
      ++i;
      while (true) {
        if (i >= line.size()) {
          throw LoadError("CSV line " + std::to_string(line_no) + ": unterminated quoted field");
        }
        if (line[i] == '"') {
          if (i + 1 < line.size() && line[i + 1] == '"') {
            cur += '"';
            i += 2;
            continue;
          }
          ++i;
          break;
        }
        cur += line[i++];
      }
      if (i < line.size() && line[i] != ',') {
        throw LoadError("CSV line " + std::to_string(line_no) + ": text after closing quote");
      }
      continue;
    }
    if (i >= line.size() || line[i] == ',') {
      out.push_back(std::move(cur));
      cur.clear();
      quoted_field = false;
      if (i >= line.size()) break;
      ++i;
      continue;
    }
    cur += line[i++];
  }
  return out;
}

bool is_integer_text(const std::string& s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
  }
  return s.size() < 19;
}

bool is_decimal_text(const std::string& s) {
  auto dot = s.find('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 == s.size()) return false;
  auto frac = s.substr(dot + 1);
  return is_integer_text(s.substr(0, dot)) && frac.find_first_not_of("0123456789") == std::string::npos &&
         frac.size() <= 9;
}

ValueKind infer_kind(const std::vector<std::string>& cells) {
  if (cells.empty()) return ValueKind::text;
  auto all = [&](auto pred) { return std::all_of(cells.begin(), cells.end(), pred); };
  if (all(is_integer_text)) return ValueKind::integer;
  if (all([](const std::string& s) { return is_integer_text(s) || is_decimal_text(s); })) {
    return ValueKind::decimal;
  }
  if (all([](const std::string& s) { return s == "true" || s == "false"; })) return ValueKind::boolean;
  return ValueKind::text;
}

Value typed(const std::string& cell, ValueKind kind) {
  switch (kind) {
    case ValueKind::integer: return Value(static_cast<std::int64_t>(std::stoll(cell)));
    case ValueKind::decimal: return Value(Decimal::parse(cell));
    case ValueKind::boolean: return Value(cell == "true");
    default: return Value(cell);
  }
}

std::vector<std::string> keys_of(const ObjectData& obj) {
  if (obj.subset_of) return obj.members;
  std::vector<std::string> out;
  for (const auto& e : obj.elements) out.push_back(e.key);
  return out;
}

struct XmlBuilder {
  ObjectData doc;
  std::vector<std::string> tag_order;
  std::map<std::string, std::vector<std::string>> by_tag;

  void add(const std::string& tag, const DeweyCode& code, std::string text) {
    ElementData ed;
    ed.key = code.to_string();
    ed.payload = Record{{"tag", Value(tag)}, {"dewey", Value(code)}, {"text", Value(std::move(text))}};
    doc.elements.push_back(std::move(ed));
    auto [it, fresh] = by_tag.try_emplace(tag);
    if (fresh) tag_order.push_back(tag);
    it->second.push_back(code.to_string());
  }

  void walk(const std::string& tag, const boost::property_tree::ptree& node, const DeweyCode& code) {
    std::string text = trim(node.data());
    add(tag, code, text);
    std::uint32_t index = 0;
    if (auto attrs = node.get_child_optional("<xmlattr>")) {
      for (const auto& [name, value] : *attrs) {
        add("attr_" + name, code.child(++index), trim(value.data()));
      }
    }
    for (const auto& [name, child] : node) {
      if (name.rfind("<xml", 0) == 0) continue;
      walk(name, child, code.child(++index));
    }
  }
};

std::string local_name(const std::string& tag) {
  auto colon = tag.find(':');
  return colon == std::string::npos ? tag : tag.substr(colon + 1);
}

void strip_namespaces(boost::property_tree::ptree& node) {
  boost::property_tree::ptree out;
  out.data() = node.data();
  for (auto& [name, child] : node) {
    if (name == "<xmlattr>") {
      boost::property_tree::ptree attrs;
      for (auto& [a, v] : child) {
        if (a == "xmlns" || a.rfind("xmlns:", 0) == 0) continue;
        attrs.push_back({local_name(a), v});
      }
      if (!attrs.empty()) out.push_back({name, attrs});
      continue;
    }
    if (name.rfind("<xml", 0) == 0) continue;
    strip_namespaces(child);
    out.push_back({local_name(name), child});
  }
  node.swap(out);
}

std::string cell_text(const InstanceCategory& cat, const ElementId& id) {
  return id.is_null() ? "null" : cat.key_of(id);
}

}  // namespace

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CategoryData category_data_from_json_text(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw LoadError(std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) schema_error("$", "expected an object");
  CategoryData data;
  const auto& objects = array_at(member(j, "objects", "$"), "$.objects");
  for (std::size_t i = 0; i < objects.size(); ++i) {
    data.objects.push_back(object_from_json(objects[i], "$.objects[" + std::to_string(i) + "]"));
  }
  if (j.contains("morphisms")) {
    const auto& morphisms = array_at(j["morphisms"], "$.morphisms");
    for (std::size_t i = 0; i < morphisms.size(); ++i) {
      data.morphisms.push_back(morphism_from_json(morphisms[i], "$.morphisms[" + std::to_string(i) + "]"));
    }
  }
  return data;
}

std::string category_data_to_json_text(const CategoryData& data) {
  json objects = json::array();
  for (const auto& od : data.objects) {
    json o;
    o["name"] = od.name;
    o["kind"] = std::string(object_kind_name(od.kind));
    if (od.subset_of) {
      o["subset_of"] = *od.subset_of;
      o["members"] = od.members;
    } else {
      if (!od.components.empty()) {
        json comps = json::array();
        for (const auto& c : od.components) comps.push_back(json{{"name", c.name}, {"object", c.object}});
        o["components"] = std::move(comps);
      }
      json elements = json::array();
      for (const auto& ed : od.elements) elements.push_back(element_to_json(ed, od.kind));
      o["elements"] = std::move(elements);
    }
    objects.push_back(std::move(o));
  }
  json morphisms = json::array();
  for (const auto& md : data.morphisms) {
    json pairs = json::array();
    for (const auto& [a, b] : md.pairs) pairs.push_back(json::array({a, b}));
    morphisms.push_back(json{{"name", md.name}, {"domain", md.domain}, {"codomain", md.codomain},
                             {"pairs", std::move(pairs)}});
  }
  json out;
  out["objects"] = std::move(objects);
  out["morphisms"] = std::move(morphisms);
  return out.dump(2) + "\n";
}

InstanceCategory build_validated(const CategoryData& data) {
  auto cat = InstanceCategory::build(data);
  auto issues = validate_category(cat);
  if (!issues.empty()) {
    std::string msg = "invalid category:";
    for (const auto& i : issues) msg += "\n  " + i;
    throw LoadError(msg);
  }
  return cat;
}

InstanceCategory load_category_json(const fs::path& path) {
  return build_validated(category_data_from_json_text(read_file(path)));
}

void save_category_json(const InstanceCategory& cat, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw LoadError("cannot write '" + path.string() + "'");
  out << category_data_to_json_text(cat.to_data());
}

CategoryData table_from_csv_text(std::string_view text, const std::string& object,
                                 const std::string& key_column) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (header.empty()) {
      if (line.empty()) continue;
      header = csv_fields(line, line_no);
      continue;
    }
    if (line.empty()) continue;
    auto fields = csv_fields(line, line_no);
    if (fields.size() != header.size()) {
      throw LoadError("CSV line " + std::to_string(line_no) + ": " + std::to_string(fields.size()) +
                      " fields, header has " + std::to_string(header.size()));
    }
    rows.push_back(std::move(fields));
  }
  if (header.empty()) throw LoadError("CSV for '" + object + "' has no header row");
  auto key_it = std::find(header.begin(), header.end(), key_column);
  if (key_it == header.end()) {
    throw LoadError("CSV for '" + object + "' has no key column '" + key_column + "'");
  }
  std::set<std::string> seen_cols;
  for (const auto& h : header) {
    if (h.empty() || !seen_cols.insert(h).second) {
      throw LoadError("CSV for '" + object + "': empty or repeated column name '" + h + "'");
    }
  }
  const std::size_t key_index = static_cast<std::size_t>(key_it - header.begin());

  std::vector<ValueKind> kinds;
  for (std::size_t c = 0; c < header.size(); ++c) {
    std::vector<std::string> cells;
    for (const auto& r : rows) cells.push_back(r[c]);
    kinds.push_back(infer_kind(cells));
  }

  CategoryData data;
  ObjectData table;
  table.name = object;
  std::set<std::string> keys;
  for (const auto& r : rows) {
    if (!keys.insert(r[key_index]).second) {
      throw LoadError("CSV for '" + object + "': duplicate key '" + r[key_index] + "'");
    }
    ElementData ed;
    ed.key = r[key_index];
    Record rec;
    for (std::size_t c = 0; c < header.size(); ++c) rec.emplace_back(header[c], typed(r[c], kinds[c]));
    ed.payload = std::move(rec);
    table.elements.push_back(std::move(ed));
  }
  data.objects.push_back(std::move(table));

  for (std::size_t c = 0; c < header.size(); ++c) {
    ObjectData attr;
    attr.name = object + "_" + header[c];
    attr.kind = ObjectKind::attribute;
    MorphismData m{attr.name, object, attr.name, {}};
    std::set<std::string> values;
    for (const auto& r : rows) {
      Value v = typed(r[c], kinds[c]);
      auto key = v.to_string();
      if (values.insert(key).second) attr.elements.push_back({key, v, {}});
      m.pairs.emplace_back(r[key_index], key);
    }
    data.objects.push_back(std::move(attr));
    data.morphisms.push_back(std::move(m));
  }
  return data;
}

CategoryData load_table_csv(const fs::path& path, const std::string& object,
                            const std::string& key_column) {
  return table_from_csv_text(read_file(path), object, key_column);
}

CategoryData edges_from_text(std::string_view text, const std::string& node_object,
                             const std::string& edges, const CategoryData& context) {
  const auto* nodes = context.find_object(node_object);
  if (!nodes) throw LoadError("edge list '" + edges + "': unknown node object '" + node_object + "'");
  auto node_keys = keys_of(*nodes);
  std::set<std::string> known(node_keys.begin(), node_keys.end());

  ObjectData rel;
  rel.name = edges;
  rel.kind = ObjectKind::relationship;
  rel.components = {{"src", node_object}, {"dst", node_object}};
  std::set<std::string> seen;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream fields(line);
    std::string src, dst, extra;
    if (!(fields >> src)) continue;
    if (!(fields >> dst) || (fields >> extra)) {
      throw LoadError("edge list '" + edges + "' line " + std::to_string(line_no) +
                      ": expected \"src dst\"");
    }
    for (const auto& end : {src, dst}) {
      if (!known.count(end)) {
        throw LoadError("edge list '" + edges + "' line " + std::to_string(line_no) +
                        ": dangling endpoint '" + end + "' (not in '" + node_object + "')");
      }
    }
    auto key = src + "->" + dst;
    if (!seen.insert(key).second) continue;
    ElementData ed;
    ed.key = key;
    ed.tuple = {src, dst};
    rel.elements.push_back(std::move(ed));
  }
  CategoryData data;
  data.objects.push_back(std::move(rel));
  return data;
}

CategoryData load_edges(const fs::path& path, const std::string& node_object, const std::string& edges,
                        const CategoryData& context) {
  return edges_from_text(read_file(path), node_object, edges, context);
}

CategoryData xml_from_text(std::string_view text, const std::string& doc) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    std::istringstream in{std::string(text)};
    pt::read_xml(in, tree);
  } catch (const pt::xml_parser_error& e) {
    throw LoadError(std::string("malformed XML: ") + e.what());
  }
  strip_namespaces(tree);
  XmlBuilder b;
  b.doc.name = doc;
  std::uint32_t index = 0;
  for (const auto& [name, child] : tree) {
    if (name.rfind("<xml", 0) == 0) continue;
    b.walk(name, child, DeweyCode({++index}));
  }
  if (index == 0) throw LoadError("malformed XML: no root element");
  CategoryData data;
  data.objects.push_back(std::move(b.doc));
  for (const auto& tag : b.tag_order) {
    ObjectData sub;
    sub.name = tag;
    sub.subset_of = doc;
    sub.members = b.by_tag[tag];
    data.objects.push_back(std::move(sub));
  }
  return data;
}

CategoryData load_xml(const fs::path& path, const std::string& doc) {
  return xml_from_text(read_file(path), doc);
}

void merge_into(CategoryData& into, CategoryData part) {
  for (auto& od : part.objects) {
    if (into.find_object(od.name)) throw LoadError("object '" + od.name + "' is defined twice");
    into.objects.push_back(std::move(od));
  }
  for (auto& md : part.morphisms) {
    for (const auto& existing : into.morphisms) {
      if (existing.name == md.name) throw LoadError("morphism '" + md.name + "' is defined twice");
    }
    into.morphisms.push_back(std::move(md));
  }
}

InstanceCategory load_workspace(const fs::path& config) {
  json j;
  try {
    j = json::parse(read_file(config));
  } catch (const json::parse_error& e) {
    throw LoadError("malformed workspace config: " + std::string(e.what()));
  }
  if (!j.is_object()) schema_error("$", "expected an object");
  const auto base = config.parent_path();
  const auto& sources = array_at(member(j, "sources", "$"), "$.sources");
  CategoryData data;
  for (std::size_t i = 0; i < sources.size(); ++i) {
    const auto& s = sources[i];
    auto path = "$.sources[" + std::to_string(i) + "]";
    if (!s.is_object()) schema_error(path, "expected an object");
    auto type = string_at(member(s, "type", path), path + ".type");
    auto file = base / string_at(member(s, "path", path), path + ".path");
    auto field = [&](const char* name) { return string_at(member(s, name, path), path + "." + name); };
    if (type == "json") {
      merge_into(data, category_data_from_json_text(read_file(file)));
    } else if (type == "csv") {
      merge_into(data, load_table_csv(file, field("object"), field("key")));
    } else if (type == "edges") {
      merge_into(data, load_edges(file, field("nodes"), field("name"), data));
    } else if (type == "xml") {
      merge_into(data, load_xml(file, field("name")));
    } else {
      schema_error(path + ".type", "unknown source type '" + type + "'");
    }
  }
  return build_validated(data);
}

std::string relation_to_json_lines(const Relation& rel, const InstanceCategory& cat) {
  json names = json::array();
  for (const auto& c : rel.columns()) names.push_back(c.name);
  std::string out = json{{"columns", names}}.dump() + "\n";
  for (std::size_t r = 0; r < rel.size(); ++r) {
    json row = json::array();
    for (const auto& id : rel.row(r)) {
      if (id.is_null()) {
        row.push_back(nullptr);
      } else {
        row.push_back(cat.key_of(id));
      }
    }
    out += row.dump() + "\n";
  }
  return out;
}

std::string relation_to_table(const Relation& rel, const InstanceCategory& cat) {
  std::vector<std::size_t> width;
  for (const auto& c : rel.columns()) width.push_back(c.name.size());
  std::vector<std::vector<std::string>> cells;
  for (std::size_t r = 0; r < rel.size(); ++r) {
    std::vector<std::string> line;
    auto row = rel.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) {
      line.push_back(cell_text(cat, row[c]));
      width[c] = std::max(width[c], line.back().size());
    }
    cells.push_back(std::move(line));
  }
  auto emit = [&](const std::vector<std::string>& line) {
    std::string s;
    for (std::size_t c = 0; c < line.size(); ++c) {
      if (c) s += "  ";
      s += line[c];
      if (c + 1 < line.size()) s.append(width[c] - line[c].size(), ' ');
    }
    return s + "\n";
  };
  std::vector<std::string> header;
  std::vector<std::string> rule;
  for (std::size_t c = 0; c < rel.arity(); ++c) {
    header.push_back(rel.columns()[c].name);
    rule.push_back(std::string(width[c], '-'));
  }
  std::string out = emit(header) + emit(rule);
  for (const auto& line : cells) out += emit(line);
  out += "(" + std::to_string(rel.size()) + (rel.size() == 1 ? " row" : " rows") + ")\n";
  return out;
}

}  // namespace catq
