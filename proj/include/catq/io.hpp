#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "catq/category.hpp"
#include "catq/relation.hpp"

namespace catq {

// JSON category format (see docs/formats.md). Parsing errors carry the JSON
// path of the offending value.
CategoryData category_data_from_json_text(std::string_view text);
std::string category_data_to_json_text(const CategoryData& data);

// Builds and validates; throws LoadError listing every violation.
InstanceCategory build_validated(const CategoryData& data);

InstanceCategory load_category_json(const std::filesystem::path& path);
void save_category_json(const InstanceCategory& cat, const std::filesystem::path& path);

// One entity object `object` with a record per row, plus per column an
// attribute object and a morphism, both named `<object>_<column>`.
CategoryData table_from_csv_text(std::string_view text, const std::string& object,
                                 const std::string& key_column);
CategoryData load_table_csv(const std::filesystem::path& path, const std::string& object,
                            const std::string& key_column);

// Whitespace-separated "src dst" lines over the keys of `node_object`, which
// must already exist in `context`. Produces the relationship object `edges`
// with components src and dst.
CategoryData edges_from_text(std::string_view text, const std::string& node_object,
                             const std::string& edges, const CategoryData& context);
CategoryData load_edges(const std::filesystem::path& path, const std::string& node_object,
                        const std::string& edges, const CategoryData& context);

// Entity object `doc` holding every element and attribute node as a record
// {tag, dewey, text} keyed by its dewey code, plus one subset object per tag
// (element tags by name, attributes as "attr_<name>").
CategoryData xml_from_text(std::string_view text, const std::string& doc);
CategoryData load_xml(const std::filesystem::path& path, const std::string& doc);

// Appends `part`; throws LoadError on duplicate object or morphism names.
void merge_into(CategoryData& into, CategoryData part);

// Workspace config: {"sources": [{"type": "json" | "csv" | "edges" | "xml", ...}]}
// with paths relative to the config file.
InstanceCategory load_workspace(const std::filesystem::path& config);

// Header line {"columns": [...]} then one JSON array of element keys per row.
std::string relation_to_json_lines(const Relation& rel, const InstanceCategory& cat);
std::string relation_to_table(const Relation& rel, const InstanceCategory& cat);

std::string read_file(const std::filesystem::path& path);

}  // namespace catq
