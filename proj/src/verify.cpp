#include "catq/verify.hpp"

#include "catq/compiler.hpp"
#include "catq/errors.hpp"
#include "catq/io.hpp"

namespace catq {

std::uint64_t case_seed(std::uint64_t seed, int index) {
  // splitmix64 finalizer
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

struct OracleSkipped {};

std::optional<std::string> check(const TestCase& c, const VerifyOptions& options) {
  auto cat = build_validated(c.data);
  auto violations = check_safety(c.query, cat);
  if (!violations.empty()) return "generated query is unsafe: " + violations.front();
  Relation expected;
  try {
    expected = oracle_evaluate(c.query, cat, options.oracle_bound);
  } catch (const EvalError& e) {
    if (std::string(e.what()).find("exceeds the bound") != std::string::npos) throw OracleSkipped{};
    return std::string("oracle failed: ") + e.what();
  }
  CompileOptions co;
  co.flip_comparisons = options.flip_comparisons;
  Relation actual;
  try {
    actual = evaluate(compile_query(c.query, cat, co).plan, cat);
  } catch (const Error& e) {
    return std::string("compiled plan failed: ") + e.what();
  }
  if (same_rows(expected, actual)) return std::nullopt;
  return "results differ\noracle:\n" + relation_to_table(expected, cat) + "plan:\n" +
         relation_to_table(actual, cat);
}

}  // namespace

std::optional<std::string> differential_check(const TestCase& c, const VerifyOptions& options) {
  try {
    return check(c, options);
  } catch (const OracleSkipped&) {
    return std::nullopt;
  }
}

VerifyReport run_verify(const VerifyOptions& options) {
  VerifyReport report;
  auto features = feature_names(options.features);
  std::string log;
  for (int i = 0; i < options.queries; ++i) {
    std::string focus = features.empty() ? std::string() : features[static_cast<std::size_t>(i) % features.size()];
    // stratified: retry categories until the focus construct fits
    TestCase c;
    for (int attempt = 0; attempt < 16; ++attempt) {
      auto seed = case_seed(options.seed + static_cast<std::uint64_t>(attempt) * 0x100000001ULL, i);
      auto gen = gen_category(seed, options.limits);
      c = TestCase{gen.data, gen_query(seed ^ 0x5bd1e995ULL, gen.cat, options.features, focus)};
      if (focus.empty() || query_features(c.query).count(focus)) break;
    }
    ++report.cases;
    for (const auto& f : query_features(c.query)) ++report.feature_cases[f];

    std::optional<std::string> failure;
    try {
      failure = check(c, options);
    } catch (const OracleSkipped&) {
      ++report.skipped;
      continue;
    } catch (const Error& e) {
      failure = std::string("unexpected error: ") + e.what();
    }
    if (!failure) continue;
    ++report.mismatches;
    log += "case " + std::to_string(i) + ": MISMATCH\n";
    if (report.first_failure) continue;
    report.first_failure = i;
    TestCase minimal = c;
    if (options.shrink_failures) {
      minimal = shrink(c, [&](const TestCase& t) { return differential_check(t, options).has_value(); });
    }
    auto detail = differential_check(minimal, options).value_or(*failure);
    log += "  query: " + to_string(minimal.query) + "\n";
    log += "  data:\n" + category_data_to_json_text(minimal.data);
    log += "  " + detail + "\n";
  }

  std::string text = "verify seed=" + std::to_string(options.seed) +
                     " queries=" + std::to_string(options.queries) +
                     " max-objects=" + std::to_string(options.limits.max_objects) +
                     " max-elems=" + std::to_string(options.limits.max_elements) +
                     " max-morphisms=" + std::to_string(options.limits.max_morphisms) +
                     (options.flip_comparisons ? " fault=flip-comparisons" : "") + "\n";
  text += log;
  text += "features:";
  for (const auto& [name, count] : report.feature_cases) text += " " + name + "=" + std::to_string(count);
  text += "\n";
  text += "cases=" + std::to_string(report.cases) + " mismatches=" + std::to_string(report.mismatches) +
          " skipped=" + std::to_string(report.skipped) + "\n";
  text += report.mismatches == 0 ? "PASS\n" : "FAIL\n";
  report.text = std::move(text);
  return report;
}

}  // namespace catq
