#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "catq/eval.hpp"
#include "catq/testgen.hpp"

namespace catq {

struct VerifyOptions {
  int queries = 100;
  std::uint64_t seed = 1;
  GenLimits limits;
  QueryFeatures features;
  bool flip_comparisons = false;  // fault injection
  bool shrink_failures = true;
  std::size_t oracle_bound = kDefaultOracleBound;
};

struct VerifyReport {
  int cases = 0;
  int mismatches = 0;
  int skipped = 0;  // oracle bound exceeded
  std::map<std::string, int> feature_cases;
  std::optional<int> first_failure;
  std::string text;  // deterministic for a given seed
};

// Outcome of one differential check; empty when plan and oracle agree.
std::optional<std::string> differential_check(const TestCase& c, const VerifyOptions& options);

// Per-case seed; cases are independent of each other.
std::uint64_t case_seed(std::uint64_t seed, int index);

VerifyReport run_verify(const VerifyOptions& options);

}  // namespace catq
