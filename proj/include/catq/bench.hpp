#pragma once

#include <string>
#include <vector>

namespace catq {

struct BenchRow {
  int n = 0;           // elements per object (lim) or chain length (reach)
  int p = 0;           // objects in the diagram; 0 for reach
  std::size_t edges = 0;
  std::size_t rows = 0;  // result size
  double seconds = 0;    // median over the repeats
};

// lim over p unconnected objects of n elements each.
std::vector<BenchRow> bench_lim(const std::vector<int>& sizes, int p, int repeats);

// getReach from the head of a chain graph of n nodes to every node.
std::vector<BenchRow> bench_reach(const std::vector<int>& sizes, int repeats);

// Least-squares slope of log(seconds) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& seconds);

std::string bench_table(const std::vector<BenchRow>& rows, bool reach);

}  // namespace catq
