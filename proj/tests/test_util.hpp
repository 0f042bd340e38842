#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <string>
#include <unistd.h>
#include <utility>
#include <vector>

#include "dgt/rng.hpp"
#include "dgt/scan.hpp"

namespace dgt::testing {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = fs::temp_directory_path() /
            ("dgt_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

inline std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Relative path -> contents for every regular file under `root`, optionally
// skipping files whose name matches `skip`.
inline std::map<std::string, std::string> tree_contents(const fs::path& root,
                                                        const std::string& skip = "") {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    if (!skip.empty() && e.path().filename() == skip) continue;
    out[fs::relative(e.path(), root).string()] = slurp(e.path());
  }
  return out;
}

// Adjusted Rand index between two labelings of the same items.
template <typename A, typename B>
double adjusted_rand_index(const std::vector<A>& a, const std::vector<B>& b) {
  std::map<std::pair<long, long>, double> joint;
  std::map<long, double> rows;
  std::map<long, double> cols;
  for (std::size_t i = 0; i < a.size(); ++i) {
    joint[{static_cast<long>(a[i]), static_cast<long>(b[i])}] += 1;
    rows[static_cast<long>(a[i])] += 1;
    cols[static_cast<long>(b[i])] += 1;
  }
  auto c2 = [](double n) { return n * (n - 1) / 2; };
  double sum_joint = 0, sum_rows = 0, sum_cols = 0;
  for (auto& [k, v] : joint) sum_joint += c2(v);
  for (auto& [k, v] : rows) sum_rows += c2(v);
  for (auto& [k, v] : cols) sum_cols += c2(v);
  const double total = c2(static_cast<double>(a.size()));
  const double expected = sum_rows * sum_cols / total;
  const double max_index = 0.5 * (sum_rows + sum_cols);
  if (max_index == expected) return 1.0;
  return (sum_joint - expected) / (max_index - expected);
}

// Groups sorted values into clusters separated by gaps larger than `gap`.
inline std::size_t count_gap_clusters(std::vector<double> values, double gap) {
  if (values.empty()) return 0;
  std::sort(values.begin(), values.end());
  std::size_t clusters = 1;
  for (std::size_t i = 1; i < values.size(); ++i) clusters += values[i] - values[i - 1] > gap;
  return clusters;
}

inline Scan random_scan(Rng& rng, std::size_t n, double extent, bool labeled,
                        ClassId max_class = 5) {
  Scan scan;
  for (std::size_t i = 0; i < n; ++i) {
    Point p{static_cast<float>((2 * rng.uniform01() - 1) * extent),
            static_cast<float>((2 * rng.uniform01() - 1) * extent),
            static_cast<float>((2 * rng.uniform01() - 1) * extent * 0.2),
            static_cast<float>(rng.uniform01())};
    if (p.x == 0 && p.y == 0 && p.z == 0) p.x = 1;
    scan.points.push_back(p);
  }
  if (labeled) {
    auto& labels = scan.labels.emplace();
    auto& inst = scan.instance_ids.emplace();
    for (std::size_t i = 0; i < n; ++i) {
      labels.push_back(static_cast<ClassId>(rng.uniform_below(max_class + 1)));
      inst.push_back(static_cast<std::uint16_t>(rng.uniform_below(4)));
    }
  }
  return scan;
}

// Random row-stochastic values with some exact zeros.
inline std::vector<double> random_simplex_rows(Rng& rng, std::size_t rows,
                                               std::size_t cols) {
  std::vector<double> v(rows * cols);
  for (std::size_t i = 0; i < rows; ++i) {
    double sum = 0;
    for (std::size_t k = 0; k < cols; ++k) {
      double x = rng.uniform01();
      if (rng.uniform01() < 0.1) x = 0;
      v[i * cols + k] = x;
      sum += x;
    }
    if (sum == 0) {
      v[i * cols] = 1;
      sum = 1;
    }
    for (std::size_t k = 0; k < cols; ++k) v[i * cols + k] /= sum;
  }
  return v;
}

}  // namespace dgt::testing
