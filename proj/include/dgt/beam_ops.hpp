#pragma once

#include <cstdint>
#include <vector>

#include "dgt/scan.hpp"

namespace dgt {

struct BeamModel {
  std::vector<std::uint16_t> assignments;  // per point, in [0, K)
  std::vector<double> centroids;           // ascending inclinations, radians
  int iterations = 0;
  // Within-cluster sum of squared deviations after each assignment step.
  std::vector<double> sse_history;

  int beam_count() const { return static_cast<int>(centroids.size()); }
};

// 1-D Lloyd K-means over point inclinations. Centroids start at K evenly
// spaced quantiles of the sorted inclinations; ties go to the lower beam.
// `seed` is accepted for interface stability; the procedure is
// deterministic and does not consume randomness.
// Throws DataError when the scan has fewer than K distinct inclinations.
BeamModel kmeans_label_beams(const Scan& scan, int k, int max_iters = 100,
                             std::uint64_t seed = 0);

// Keeps beams round(i * (K - 1) / (target - 1)) of the inclination-sorted
// beam list; target == 1 keeps beam K / 2. Halves round up.
std::vector<int> select_beams_even(const BeamModel& model, int target_count);

// Uniformly random subset of `target_count` beams, returned sorted.
std::vector<int> select_beams_random(const BeamModel& model, int target_count,
                                     std::uint64_t seed);

struct BeamDiscardResult {
  Scan scan;
  std::vector<std::uint32_t> kept_index_map;
};

// Keeps exactly the points whose beam is in `kept`, in input order.
BeamDiscardResult discard_beams(const Scan& scan, const BeamModel& model,
                                const std::vector<int>& kept);

}  // namespace dgt
