#include "dgt/beam_ops.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "dgt/error.hpp"
#include "dgt/rng.hpp"

namespace dgt {

namespace {

// Assigns each sorted value to its nearest centroid (centroids ascending),
// ties toward the lower index. Returns true if any assignment changed.
bool assign_sorted(const std::vector<double>& sorted,
                   const std::vector<double>& centroids,
                   std::vector<int>& cluster) {
  bool changed = false;
  std::size_t j = 0;
  const std::size_t k = centroids.size();
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double v = sorted[i];
    while (j + 1 < k &&
           std::abs(v - centroids[j + 1]) < std::abs(v - centroids[j])) {
      ++j;
    }
    if (cluster[i] != static_cast<int>(j)) {
      cluster[i] = static_cast<int>(j);
      changed = true;
    }
  }
  return changed;
}

double within_sse(const std::vector<double>& sorted,
                  const std::vector<double>& centroids,
                  const std::vector<int>& cluster) {
  double sse = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double d = sorted[i] - centroids[cluster[i]];
    sse += d * d;
  }
  return sse;
}

std::vector<double> quantile_init(const std::vector<double>& sorted, int k) {
  const std::size_t n = sorted.size();
  std::vector<double> centroids(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j) {
    centroids[j] = sorted[(2 * static_cast<std::size_t>(j) + 1) * n / (2 * k)];
  }
  if (std::adjacent_find(centroids.begin(), centroids.end(),
                         std::greater_equal<>()) == centroids.end()) {
    return centroids;
  }
  // Repeated values collapsed some quantiles; fall back to quantiles of the
  // distinct values, which are strictly increasing.
  std::vector<double> distinct;
  std::unique_copy(sorted.begin(), sorted.end(), std::back_inserter(distinct));
  const std::size_t d = distinct.size();
  for (int j = 0; j < k; ++j) {
    centroids[j] = distinct[(2 * static_cast<std::size_t>(j) + 1) * d / (2 * k)];
  }
  return centroids;
}

}  // namespace

BeamModel kmeans_label_beams(const Scan& scan, int k, int max_iters,
                             [[maybe_unused]] std::uint64_t seed) {
  if (k < 1) throw std::invalid_argument("K must be >= 1");
  if (max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
  const std::size_t n = scan.size();

  std::vector<double> phi(n);
  for (std::size_t i = 0; i < n; ++i) phi[i] = inclination_of(scan.points[i]);

  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(),
                   [&](auto a, auto b) { return phi[a] < phi[b]; });
  std::vector<double> sorted(n);
  for (std::size_t i = 0; i < n; ++i) sorted[i] = phi[order[i]];

  std::size_t distinct = n == 0 ? 0 : 1;
  for (std::size_t i = 1; i < n; ++i) distinct += sorted[i] != sorted[i - 1];
  if (distinct < static_cast<std::size_t>(k)) {
    throw DataError("insufficient beam separation: " + std::to_string(distinct) +
                    " distinct inclinations for K=" + std::to_string(k));
  }

  BeamModel model;
  std::vector<double> centroids = quantile_init(sorted, k);
  std::vector<int> cluster(n, -1);
  std::vector<double> sums(static_cast<std::size_t>(k));
  std::vector<std::size_t> counts(static_cast<std::size_t>(k));

  for (int iter = 0; iter < max_iters; ++iter) {
    const bool changed = assign_sorted(sorted, centroids, cluster);
    model.sse_history.push_back(within_sse(sorted, centroids, cluster));
    model.iterations = iter + 1;
    if (!changed && iter > 0) break;

    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      sums[cluster[i]] += sorted[i];
      ++counts[cluster[i]];
    }
    bool reseeded = false;
    for (int j = 0; j < k; ++j) {
      if (counts[j] > 0) {
        centroids[j] = sums[j] / static_cast<double>(counts[j]);
        continue;
      }
      // Empty cluster: move it onto the worst-fit value.
      std::size_t worst = 0;
      double worst_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double d = std::abs(sorted[i] - centroids[cluster[i]]);
        if (d > worst_d &&
            std::find(centroids.begin(), centroids.end(), sorted[i]) ==
                centroids.end()) {
          worst_d = d;
          worst = i;
        }
      }
      centroids[j] = sorted[worst];
      reseeded = true;
    }
    if (reseeded) std::sort(centroids.begin(), centroids.end());
  }

  model.centroids = std::move(centroids);
  model.assignments.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    model.assignments[order[i]] = static_cast<std::uint16_t>(cluster[i]);
  }
  return model;
}

std::vector<int> select_beams_even(const BeamModel& model, int target_count) {
  const int k = model.beam_count();
  if (target_count < 1 || target_count > k) {
    throw std::invalid_argument("target beam count " +
                                std::to_string(target_count) +
                                " out of range [1, " + std::to_string(k) + "]");
  }
  if (target_count == 1) return {k / 2};
  std::vector<int> kept(static_cast<std::size_t>(target_count));
  const long long span = k - 1;
  const long long steps = target_count - 1;
  for (int i = 0; i < target_count; ++i) {
    kept[i] = static_cast<int>((2 * i * span + steps) / (2 * steps));
  }
  return kept;
}

std::vector<int> select_beams_random(const BeamModel& model, int target_count,
                                     std::uint64_t seed) {
  const int k = model.beam_count();
  if (target_count < 1 || target_count > k) {
    throw std::invalid_argument("target beam count out of range");
  }
  std::vector<int> beams(static_cast<std::size_t>(k));
  std::iota(beams.begin(), beams.end(), 0);
  Rng rng(seed);
  for (int i = 0; i < target_count; ++i) {
    const auto j = i + static_cast<int>(rng.uniform_below(k - i));
    std::swap(beams[i], beams[j]);
  }
  beams.resize(static_cast<std::size_t>(target_count));
  std::sort(beams.begin(), beams.end());
  return beams;
}

BeamDiscardResult discard_beams(const Scan& scan, const BeamModel& model,
                                const std::vector<int>& kept) {
  if (model.assignments.size() != scan.size()) {
    throw std::invalid_argument("beam model does not match scan");
  }
  std::vector<char> keep(static_cast<std::size_t>(model.beam_count()), 0);
  for (int b : kept) {
    if (b < 0 || b >= model.beam_count()) {
      throw std::invalid_argument("kept beam " + std::to_string(b) +
                                  " out of range");
    }
    keep[b] = 1;
  }
  BeamDiscardResult out;
  for (std::size_t i = 0; i < scan.size(); ++i) {
    if (keep[model.assignments[i]]) {
      out.kept_index_map.push_back(static_cast<std::uint32_t>(i));
    }
  }
  out.scan = select_points(scan, out.kept_index_map);
  return out;
}

}  // namespace dgt
