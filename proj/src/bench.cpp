#include "catq/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>

#include "catq/algebra.hpp"
#include "catq/io.hpp"

namespace catq {

namespace {

template <typename F>
double median_seconds(int repeats, F&& run) {
  std::vector<double> times;
  for (int r = 0; r < std::max(1, repeats); ++r) {
    auto start = std::chrono::steady_clock::now();
    run();
    times.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  }
  std::sort(times.begin(), times.end());
  return times[times.size() / 2];
}

}  // namespace

std::vector<BenchRow> bench_lim(const std::vector<int>& sizes, int p, int repeats) {
  std::vector<BenchRow> out;
  for (int n : sizes) {
    CategoryData data;
    DiagramSpec spec;
    for (int o = 0; o < p; ++o) {
      ObjectData obj;
      obj.name = "O" + std::to_string(o + 1);
      for (int e = 0; e < n; ++e) obj.elements.push_back({"e" + std::to_string(e), Value(e), {}});
      spec.objects.push_back(obj.name);
      data.objects.push_back(std::move(obj));
    }
    auto cat = build_validated(data);
    auto diagram = op_cat(cat, spec);
    BenchRow row{n, p, 0, 0, 0};
    row.seconds = median_seconds(repeats, [&] { row.rows = op_lim(diagram).size(); });
    out.push_back(row);
  }
  return out;
}

std::vector<BenchRow> bench_reach(const std::vector<int>& sizes, int repeats) {
  std::vector<BenchRow> out;
  for (int n : sizes) {
    CategoryData data;
    ObjectData nodes;
    nodes.name = "N";
    ObjectData head;
    head.name = "Head";
    head.subset_of = "N";
    head.members = {"v0"};
    ObjectData edges;
    edges.name = "E";
    edges.kind = ObjectKind::relationship;
    edges.components = {{"src", "N"}, {"dst", "N"}};
    for (int i = 0; i < n; ++i) {
      nodes.elements.push_back({"v" + std::to_string(i), Value(i), {}});
      if (i + 1 < n) {
        ElementData e;
        e.key = "e" + std::to_string(i);
        e.tuple = {"v" + std::to_string(i), "v" + std::to_string(i + 1)};
        edges.elements.push_back(std::move(e));
      }
    }
    data.objects = {std::move(nodes), std::move(head), std::move(edges)};
    auto cat = build_validated(data);
    auto s = op_scan(cat, "Head", "s");
    auto t = op_scan(cat, "N", "t");
    BenchRow row{n, 0, static_cast<std::size_t>(std::max(0, n - 1)), 0, 0};
    row.seconds = median_seconds(repeats, [&] { row.rows = op_get_reach(cat, s, t, "E").size(); });
    out.push_back(row);
  }
  return out;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& seconds) {
  const std::size_t k = std::min(x.size(), seconds.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < k; ++i) {
    double lx = std::log(x[i]);
    double ly = std::log(std::max(seconds[i], 1e-12));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  double denom = static_cast<double>(k) * sxx - sx * sx;
  return denom == 0 ? 0 : (static_cast<double>(k) * sxy - sx * sy) / denom;
}

std::string bench_table(const std::vector<BenchRow>& rows, bool reach) {
  std::string out = reach ? "      n      edges       rows     seconds\n" : "      n   p       rows     seconds\n";
  char buf[128];
  for (const auto& r : rows) {
    if (reach) {
      std::snprintf(buf, sizeof buf, "%7d %10zu %10zu %11.6f\n", r.n, r.edges, r.rows, r.seconds);
    } else {
      std::snprintf(buf, sizeof buf, "%7d %3d %10zu %11.6f\n", r.n, r.p, r.rows, r.seconds);
    }
    out += buf;
  }
  return out;
}

}  // namespace catq
