// catquery: command-line front end for the categorical query engine.

#include <cstdlib>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "catq/bench.hpp"
#include "catq/compiler.hpp"
#include "catq/errors.hpp"
#include "catq/eval.hpp"
#include "catq/io.hpp"
#include "catq/verify.hpp"
#include "json.hpp"

using namespace catq;
using json = nlohmann::ordered_json;

namespace {

enum Exit { kOk = 0, kFailed = 1, kParse = 2, kCompile = 3, kRuntime = 4 };

std::string read_query(const std::string& path) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  return read_file(path);
}

// A workspace config ({"sources": [...]}) or a category JSON file.
InstanceCategory load_data(const std::string& path) {
  auto text = read_file(path);
  bool is_workspace = false;
  try {
    auto j = json::parse(text);
    is_workspace = j.is_object() && j.contains("sources");
  } catch (const json::parse_error&) {
  }
  if (is_workspace) return load_workspace(path);
  return build_validated(category_data_from_json_text(text));
}

void print_caret(const std::string& source, const ParseError& e) {
  std::istringstream in(source);
  std::string line;
  for (std::size_t i = 0; i < e.line() && std::getline(in, line); ++i) {
  }
  std::cerr << "error: " << e.what() << " (line " << e.line() << ", column " << e.column() << ")\n";
  std::cerr << "  " << line << "\n  " << std::string(e.column() > 0 ? e.column() - 1 : 0, ' ') << "^\n";
}

// Runs `body`, mapping engine errors to the exit-code contract.
template <typename F>
int guarded(const std::string& source, F&& body) {
  try {
    return body();
  } catch (const ParseError& e) {
    print_caret(source, e);
    return kParse;
  } catch (const SafetyError& e) {
    std::cerr << "error: unsafe query: " << e.what() << "\n";
    return kParse;
  } catch (const CompileError& e) {
    std::cerr << "error: compile: " << e.what() << "\n";
    return kCompile;
  } catch (const LoadError& e) {
    std::cerr << "error: load: " << e.what() << "\n";
    return kRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntime;
  }
}

void print_lines(const std::string& stage, const std::string& text, const std::string& format) {
  if (format != "json") {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << "\n";
    return;
  }
  json lines = json::array();
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  std::cout << json{{"stage", stage}, {"lines", lines}}.dump() << "\n";
}

std::vector<int> parse_sizes(const std::string& text) {
  std::vector<int> out;
  std::istringstream in(text);
  for (std::string part; std::getline(in, part, ',');) {
    if (!part.empty()) out.push_back(std::stoi(part));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"catquery: categorical calculus queries over multi-model data"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string format = "json";
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "table"}));

  std::string data_path, query_path, engine = "plan";
  auto* run = app.add_subcommand("run", "Evaluate a query over a workspace");
  run->add_option("workspace", data_path, "Workspace config or category JSON")->required();
  run->add_option("query", query_path, "Query file ('-' for stdin)")->required();
  run->add_option("--engine", engine, "plan (compiled algebra) or oracle (brute force)")
      ->check(CLI::IsMember({"plan", "oracle"}));

  std::string stage = "plan";
  auto* explain = app.add_subcommand("explain", "Print an intermediate form of a query");
  explain->add_option("query", query_path, "Query file ('-' for stdin)")->required();
  explain->add_option("--stage", stage, "prenex, dnf, diagram or plan")
      ->check(CLI::IsMember({"prenex", "dnf", "diagram", "plan"}));
  explain->add_option("--workspace", data_path, "Workspace config or category JSON");

  std::string emit = "plan";
  auto* compile_cmd = app.add_subcommand("compile", "Compile a query to an algebra plan");
  compile_cmd->add_option("workspace", data_path, "Workspace config or category JSON")->required();
  compile_cmd->add_option("query", query_path, "Query file ('-' for stdin)")->required();
  compile_cmd->add_option("--emit", emit, "Artifact to print")->check(CLI::IsMember({"plan"}));

  VerifyOptions vopt;
  bool fault = false, no_shrink = false;
  auto* verify = app.add_subcommand("verify", "Differential campaign: compiled plans against the oracle");
  verify->add_option("--queries", vopt.queries, "Number of random cases");
  verify->add_option("--seed", vopt.seed, "Campaign seed (CATQUERY_SEED overrides)");
  verify->add_option("--max-objects", vopt.limits.max_objects);
  verify->add_option("--max-elems", vopt.limits.max_elements);
  verify->add_option("--max-morphisms", vopt.limits.max_morphisms);
  verify->add_option("--max-depth", vopt.features.max_quantifier_depth, "Quantifier nesting depth");
  verify->add_flag("--fault-flip-comparisons", fault, "Compile every comparison complemented");
  verify->add_flag("--no-shrink", no_shrink, "Report failing cases unshrunk");

  std::string suite = "lim", sizes_text;
  int p = 3, repeats = 5;
  auto* bench = app.add_subcommand("bench", "Scaling sweeps");
  bench->add_option("--suite", suite)->check(CLI::IsMember({"lim", "reach"}));
  bench->add_option("--sizes", sizes_text, "Comma-separated sizes");
  bench->add_option("--p", p, "Objects in the lim diagram");
  bench->add_option("--repeats", repeats, "Runs per size (median reported)");

  auto* validate = app.add_subcommand("validate", "Load and validate a workspace");
  validate->add_option("workspace", data_path, "Workspace config or category JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kFailed;
  }

  if (*run) {
    std::string source;
    return guarded(source, [&] {
      auto cat = load_data(data_path);
      source = read_query(query_path);
      auto q = parse_query(source);
      Relation result;
      if (engine == "oracle") {
        require_safe(q, cat);
        result = oracle_evaluate(q, cat);
      } else {
        result = evaluate(compile_query(q, cat).plan, cat);
      }
      std::cout << (format == "json" ? relation_to_json_lines(result, cat) : relation_to_table(result, cat));
      return kOk;
    });
  }

  if (*explain) {
    std::string source;
    return guarded(source, [&] {
      source = read_query(query_path);
      auto q = parse_query(source);
      if (stage == "prenex" || stage == "dnf") {
        std::optional<InstanceCategory> cat;
        if (!data_path.empty()) {
          cat = load_data(data_path);
          require_safe(q, *cat);
        }
        auto prenex = rename_variables(to_prenex(q)).query;
        print_lines(stage, stage == "prenex" ? to_string(prenex) : clauses_to_string(prenex.clauses), format);
        return kOk;
      }
      if (data_path.empty()) {
        std::cerr << "error: --stage=" << stage << " needs --workspace\n";
        return kFailed;
      }
      auto cat = load_data(data_path);
      auto compiled = compile_query(q, cat);
      print_lines(stage, stage == "plan" ? to_string(compiled.plan) : describe_clause_diagrams(compiled.plan),
                  format);
      return kOk;
    });
  }

  if (*compile_cmd) {
    std::string source;
    return guarded(source, [&] {
      auto cat = load_data(data_path);
      source = read_query(query_path);
      print_lines("plan", to_string(compile_query(parse_query(source), cat).plan), format);
      return kOk;
    });
  }

  if (*verify) {
    if (const char* env = std::getenv("CATQUERY_SEED"); env && *env) {
      try {
        vopt.seed = std::stoull(env);
      } catch (const std::exception&) {
        std::cerr << "error: CATQUERY_SEED must be an unsigned integer\n";
        return kFailed;
      }
    }
    vopt.flip_comparisons = fault;
    vopt.shrink_failures = !no_shrink;
    auto report = run_verify(vopt);
    if (format == "json") {
      json features = json::object();
      for (const auto& [name, count] : report.feature_cases) features[name] = count;
      std::cout << json{{"seed", vopt.seed},
                        {"cases", report.cases},
                        {"mismatches", report.mismatches},
                        {"skipped", report.skipped},
                        {"features", features},
                        {"report", report.text}}
                       .dump()
                << "\n";
    } else {
      std::cout << report.text;
    }
    return report.mismatches == 0 ? kOk : kFailed;
  }

  if (*bench) {
    auto sizes = parse_sizes(sizes_text);
    const bool reach = suite == "reach";
    if (sizes.empty()) {
      sizes = reach ? std::vector<int>{1, 250, 500, 1000, 2000} : std::vector<int>{1, 10, 20, 40, 80};
    }
    auto rows = reach ? bench_reach(sizes, repeats) : bench_lim(sizes, p, repeats);
    std::vector<double> x, t;
    for (const auto& r : rows) {
      if (r.n < 2) continue;
      x.push_back(reach ? static_cast<double>(r.edges) : r.n);
      t.push_back(r.seconds);
    }
    double slope = loglog_slope(x, t);
    if (format == "json") {
      json arr = json::array();
      for (const auto& r : rows) {
        arr.push_back(json{{"n", r.n}, {"p", r.p}, {"edges", r.edges}, {"rows", r.rows}, {"seconds", r.seconds}});
      }
      std::cout << json{{"suite", suite}, {"rows", arr}, {"loglog_slope", slope}}.dump() << "\n";
    } else {
      std::cout << bench_table(rows, reach);
      std::cout << "log-log slope: " << slope << "\n";
    }
    return kOk;
  }

  if (*validate) {
    return guarded("", [&] {
      auto cat = load_data(data_path);
      std::size_t elements = 0;
      for (const auto& o : cat.objects()) elements += o.elements.size();
      std::size_t morphisms = 0;
      for (const auto& m : cat.morphisms()) morphisms += m.identity || m.projection ? 0 : 1;
      if (format == "json") {
        std::cout << json{{"valid", true},
                          {"objects", cat.objects().size()},
                          {"morphisms", morphisms},
                          {"elements", elements}}
                         .dump()
                  << "\n";
      } else {
        std::cout << "valid: " << cat.objects().size() << " objects, " << morphisms << " morphisms, "
                  << elements << " elements\n";
      }
      return kOk;
    });
  }
  return kFailed;
}
