#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "catq/algebra.hpp"
#include "catq/errors.hpp"
#include "catq/io.hpp"
#include "catq/testgen.hpp"
#include "helpers.hpp"

using namespace catq;
using test::KeyRows;
using test::keys;
namespace fs = std::filesystem;

namespace {

std::string load_error(const std::function<void()>& f) {
  try {
    f();
  } catch (const LoadError& e) {
    return e.what();
  }
  return "<no error>";
}

std::vector<std::string> member_keys(const InstanceCategory& cat, std::string_view object) {
  std::vector<std::string> out;
  for (const auto& id : cat.object(object).members) out.push_back(cat.key_of(id));
  return out;
}

InstanceCategory from_csv(std::string_view text) {
  return build_validated(table_from_csv_text(text, "T", "id"));
}

InstanceCategory from_xml(std::string_view text) { return build_validated(xml_from_text(text, "doc")); }

fs::path temp_dir() {
  auto dir = fs::temp_directory_path() / ("catq_io_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                          "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST(Json, EmptyCategory) {
  auto cat = test::category(R"({"objects": []})");
  EXPECT_TRUE(cat.objects().empty());
}

TEST(Json, ElementForms) {
  auto cat = test::category(R"({"objects": [{"name": "S", "elements": [
    "bare", 7, {"key": "v", "value": {"decimal": "2.50"}}, {"key": "d", "value": {"dewey": "1.3"}},
    {"key": "r", "record": {"x": 1.5, "y": "text"}}]}]})");
  EXPECT_EQ(member_keys(cat, "S"), (std::vector<std::string>{"bare", "7", "v", "d", "r"}));
  auto r = *cat.find_by_key("S", "r");
  EXPECT_EQ(cat.attribute_of(r, "x"), Value(Decimal(3, 2)));
  EXPECT_EQ(cat.element(*cat.find_by_key("S", "d"))->payload, Payload(Value(DeweyCode::parse("1.3"))));
}

TEST(Json, NonTotalMorphismIsRejected) {
  auto msg = load_error([] {
    test::category(R"({"objects": [{"name": "A", "elements": ["a1", "a2"]}, {"name": "B", "elements": ["b"]}],
                       "morphisms": [{"name": "f", "domain": "A", "codomain": "B", "pairs": [["a1", "b"]]}]})");
  });
  EXPECT_NE(msg.find("invalid category"), std::string::npos) << msg;
  EXPECT_NE(msg.find("a2"), std::string::npos) << msg;
}

TEST(Json, SchemaErrorsCarryPath) {
  auto msg = load_error([] { category_data_from_json_text(R"({"objects": [{"name": 3}]})"); });
  EXPECT_NE(msg.find("$.objects[0]"), std::string::npos) << msg;
  EXPECT_NE(load_error([] { category_data_from_json_text("{not json"); }), "<no error>");
}

TEST(Json, RoundTripThroughFile) {
  auto cat = test::category(test::kPeople);
  auto path = temp_dir() / "people.json";
  save_category_json(cat, path);
  auto back = load_category_json(path);
  EXPECT_EQ(category_data_to_json_text(back.to_data()), category_data_to_json_text(cat.to_data()));
  auto q = op_map(back, "home", "P");
  EXPECT_EQ(keys(q, back), (KeyRows{{"paris"}, {"rome"}}));
}

TEST(Json, RoundTripOfGeneratedCategories) {
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    auto g = gen_category(seed);
    auto text = category_data_to_json_text(g.data);
    auto back = category_data_from_json_text(text);
    ASSERT_EQ(category_data_to_json_text(back), text) << "seed " << seed;
    build_validated(back);
  }
}

TEST(Csv, HeaderOnly) {
  auto cat = from_csv("id,name\n");
  EXPECT_EQ(cat.object("T").size(), 0u);
  EXPECT_TRUE(cat.find_object("T_name"));
}

TEST(Csv, RowsTypedByColumn) {
  auto cat = from_csv("id,n,d,b,s\nr1,1,1.5,true,x\nr2,2,2,false,\"a, b\"\nr3,-3,0.25,true,\"say \"\"hi\"\"\"\n");
  EXPECT_EQ(member_keys(cat, "T"), (std::vector<std::string>{"r1", "r2", "r3"}));
  auto r3 = *cat.find_by_key("T", "r3");
  EXPECT_EQ(cat.attribute_of(r3, "n"), Value(-3));
  EXPECT_EQ(cat.attribute_of(r3, "d"), Value(Decimal(1, 4)));
  EXPECT_EQ(cat.attribute_of(r3, "b"), Value(true));
  EXPECT_EQ(cat.attribute_of(r3, "s"), Value("say \"hi\""));
  EXPECT_EQ(cat.attribute_of(*cat.find_by_key("T", "r2"), "s"), Value("a, b"));
  EXPECT_EQ(keys(op_map(cat, "T_b", "T"), cat), (KeyRows{{"false"}, {"true"}}));
}

TEST(Csv, Errors) {
  EXPECT_NE(load_error([] { from_csv(""); }).find("no header"), std::string::npos);
  EXPECT_NE(load_error([] { from_csv("name\nx\n"); }).find("key column"), std::string::npos);
  EXPECT_NE(load_error([] { from_csv("id,a\nr1,1,2\n"); }).find("line 2"), std::string::npos);
  EXPECT_NE(load_error([] { from_csv("id,a\nr1,1\nr1,2\n"); }).find("duplicate key"), std::string::npos);
  EXPECT_NE(load_error([] { from_csv("id,a,a\nr1,1,2\n"); }).find("repeated column"), std::string::npos);
  EXPECT_NE(load_error([] { from_csv("id,a\nr1,\"open\n"); }).find("unterminated"), std::string::npos);
}

TEST(Csv, RandomTablesRoundTrip) {
  std::mt19937 rng(3);
  for (int round = 0; round < 100; ++round) {
    const int rows = static_cast<int>(rng() % 6);
    std::string text = "id,v,w\n";
    std::vector<std::pair<int, std::string>> expected;
    for (int r = 0; r < rows; ++r) {
      int v = static_cast<int>(rng() % 100) - 50;
      std::string w = std::string(1, static_cast<char>('a' + rng() % 3)) + (rng() % 2 ? ",\"q\"" : "");
      std::string quoted = "\"";
      for (char c : w) quoted += c == '"' ? std::string("\"\"") : std::string(1, c);
      text += "k" + std::to_string(r) + "," + std::to_string(v) + "," + quoted + "\"\n";
      expected.emplace_back(v, w);
    }
    auto cat = from_csv(text);
    ASSERT_EQ(cat.object("T").size(), static_cast<std::size_t>(rows));
    for (int r = 0; r < rows; ++r) {
      auto id = *cat.find_by_key("T", "k" + std::to_string(r));
      EXPECT_EQ(cat.attribute_of(id, "v"), Value(expected[static_cast<std::size_t>(r)].first));
      EXPECT_EQ(cat.attribute_of(id, "w"), Value(expected[static_cast<std::size_t>(r)].second));
    }
  }
}

TEST(Edges, SelfLoopDuplicateAndComments) {
  auto nodes = category_data_from_json_text(R"({"objects": [{"name": "N", "elements": ["a", "b"]}]})");
  auto part = edges_from_text("# graph\na a\na b  # trailing\n\na b\n", "N", "E", nodes);
  merge_into(nodes, part);
  auto cat = build_validated(nodes);
  EXPECT_EQ(member_keys(cat, "E"), (std::vector<std::string>{"a->a", "a->b"}));
  EXPECT_EQ(keys(op_get_reach(cat, "N", "N", "E"), cat), (KeyRows{{"a", "a"}, {"a", "b"}}));
}

TEST(Edges, Errors) {
  auto nodes = category_data_from_json_text(R"({"objects": [{"name": "N", "elements": ["a"]}]})");
  EXPECT_NE(load_error([&] { edges_from_text("a z\n", "N", "E", nodes); }).find("dangling endpoint 'z'"),
            std::string::npos);
  EXPECT_NE(load_error([&] { edges_from_text("a\n", "N", "E", nodes); }).find("line 1"), std::string::npos);
  EXPECT_NE(load_error([&] { edges_from_text("a a\n", "M", "E", nodes); }).find("unknown node object"),
            std::string::npos);
}

TEST(Xml, RepeatedChildren) {
  auto cat = from_xml("<a><b/><b/></a>");
  EXPECT_EQ(member_keys(cat, "a"), std::vector<std::string>{"1"});
  EXPECT_EQ(member_keys(cat, "b"), (std::vector<std::string>{"1.1", "1.2"}));
  EXPECT_EQ(keys(op_get_parent(cat, "a", "b"), cat), (KeyRows{{"1", "1.1"}, {"1", "1.2"}}));
  EXPECT_EQ(keys(op_get_sibling(cat, "b", "b"), cat), (KeyRows{{"1.1", "1.2"}, {"1.2", "1.1"}}));
}

TEST(Xml, SingleRoot) {
  auto cat = from_xml("<?xml version=\"1.0\"?>\n<only>  hello  </only>\n");
  EXPECT_EQ(member_keys(cat, "doc"), std::vector<std::string>{"1"});
  EXPECT_EQ(cat.attribute_of(*cat.find_by_key("doc", "1"), "text"), Value("hello"));
  EXPECT_EQ(cat.attribute_of(*cat.find_by_key("doc", "1"), "tag"), Value("only"));
}

TEST(Xml, AttributesComeBeforeChildren) {
  auto cat = from_xml(R"(<book id="7" lang="en"><title>T</title></book>)");
  EXPECT_EQ(member_keys(cat, "attr_id"), std::vector<std::string>{"1.1"});
  EXPECT_EQ(member_keys(cat, "attr_lang"), std::vector<std::string>{"1.2"});
  EXPECT_EQ(member_keys(cat, "title"), std::vector<std::string>{"1.3"});
  EXPECT_EQ(cat.attribute_of(*cat.find_by_key("doc", "1.1"), "text"), Value("7"));
}

TEST(Xml, NamespacesStripped) {
  auto cat = from_xml(R"(<x:root xmlns:x="urn:x"><x:item/></x:root>)");
  EXPECT_TRUE(cat.find_object("root"));
  EXPECT_EQ(member_keys(cat, "item"), std::vector<std::string>{"1.1"});
}

TEST(Xml, Malformed) {
  EXPECT_NE(load_error([] { from_xml("<a><b></a>"); }).find("malformed XML"), std::string::npos);
  EXPECT_NE(load_error([] { from_xml(""); }).find("malformed XML"), std::string::npos);
}

TEST(Xml, RandomTreesKeepParentsAndPreorder) {
  std::mt19937 rng(11);
  for (int round = 0; round < 100; ++round) {
    const int n = 1 + static_cast<int>(rng() % 30);
    std::vector<int> parent(static_cast<std::size_t>(n), -1);
    for (int i = 1; i < n; ++i) parent[static_cast<std::size_t>(i)] = static_cast<int>(rng() % static_cast<unsigned>(i));
    std::vector<std::vector<int>> children(static_cast<std::size_t>(n));
    for (int i = 1; i < n; ++i) children[static_cast<std::size_t>(parent[static_cast<std::size_t>(i)])].push_back(i);
    // serialize; every node carries its index as text, so preorder is recoverable
    std::vector<int> preorder;
    std::function<std::string(int)> emit = [&](int v) {
      preorder.push_back(v);
      std::string s = "<n" + std::to_string(v % 3) + ">" + std::to_string(v);
      for (int c : children[static_cast<std::size_t>(v)]) s += emit(c);
      return s + "</n" + std::to_string(v % 3) + ">";
    };
    auto cat = from_xml(emit(0));
    auto doc = member_keys(cat, "doc");
    ASSERT_EQ(doc.size(), static_cast<std::size_t>(n));
    std::vector<DeweyCode> codes;
    for (const auto& k : doc) codes.push_back(DeweyCode::parse(k));
    std::sort(codes.begin(), codes.end());
    std::map<int, std::string> code_of;
    for (std::size_t i = 0; i < codes.size(); ++i) {
      auto id = *cat.find_by_key("doc", codes[i].to_string());
      // dewey order is document order
      ASSERT_EQ(cat.attribute_of(id, "text"), Value(std::to_string(preorder[i])));
      code_of[preorder[i]] = codes[i].to_string();
    }
    KeyRows expected;
    for (int i = 1; i < n; ++i) expected.insert({code_of[parent[static_cast<std::size_t>(i)]], code_of[i]});
    ASSERT_EQ(keys(op_get_parent(cat, "doc", "doc"), cat), expected);
  }
}

TEST(Workspace, LoadsMixedSources) {
  auto cat = load_workspace(fs::path(CATQ_TEST_DATA) / "expressive" / "workspace.json");
  EXPECT_EQ(cat.object("Emp").size(), 8u);
  EXPECT_EQ(cat.attribute_of(*cat.find_by_key("Emp", "e8"), "name"), Value("Hale, Jr."));
  EXPECT_EQ(cat.object("Road").size(), 8u);
  EXPECT_EQ(cat.object("Doc").size(), 50u);
  EXPECT_TRUE(cat.find_object("book"));
}

TEST(Workspace, Errors) {
  auto dir = temp_dir();
  auto write = [&](const std::string& name, const std::string& text) {
    std::ofstream(dir / name) << text;
    return dir / name;
  };
  write("a.json", R"({"objects": [{"name": "A", "elements": ["x"]}]})");
  auto twice = write("twice.json", R"({"sources": [{"type": "json", "path": "a.json"},
                                                    {"type": "json", "path": "a.json"}]})");
  EXPECT_NE(load_error([&] { load_workspace(twice); }).find("defined twice"), std::string::npos);
  auto unknown = write("unknown.json", R"({"sources": [{"type": "toml", "path": "a.json"}]})");
  EXPECT_NE(load_error([&] { load_workspace(unknown); }).find("$.sources[0].type"), std::string::npos);
  auto missing = write("missing.json", R"({"sources": [{"type": "json", "path": "nope.json"}]})");
  EXPECT_NE(load_error([&] { load_workspace(missing); }).find("cannot open"), std::string::npos);
}

TEST(Export, JsonLinesAndTable) {
  auto cat = test::category(test::kPeople);
  auto rel = op_map(cat, "home", "P");
  EXPECT_EQ(relation_to_json_lines(rel, cat), "{\"columns\":[\"" + rel.columns()[0].name + "\"]}\n[\"paris\"]\n[\"rome\"]\n");
  auto table = relation_to_table(rel, cat);
  EXPECT_NE(table.find("(2 rows)"), std::string::npos) << table;
  EXPECT_NE(table.find("---"), std::string::npos) << table;
}
