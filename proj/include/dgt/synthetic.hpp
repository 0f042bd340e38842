#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "dgt/scan.hpp"

namespace dgt {

// Ray-cast scene description for one emulated sensor. Points are expressed
// in the sensor frame: the ground plane lies at z = -sensor_height.
struct SyntheticSceneSpec {
  std::string name = "custom";
  int beam_count = 4;
  std::vector<double> inclinations;  // radians, strictly increasing
  int points_per_beam = 100;
  double azimuth_jitter = 0.0;        // radians, std-dev
  double xy_noise = 0.0;              // meters, std-dev of range noise in XY
  // Per-area drop probability over a range3d partition of [0, max_range).
  // Empty means no dropout.
  std::vector<double> dropout_rate_by_area;
  double max_range = 100.0;
  double sensor_height = 1.73;

  // {road, sidewalk}
  std::vector<ClassId> ground_classes = {1, 2};
  // {vehicle, pole, building}
  std::vector<ClassId> object_classes = {3, 4, 5};
  int box_count = 8;
  int cylinder_count = 6;
  double wall_min_radius = 40.0;
  double wall_max_radius = 90.0;

  std::uint64_t seed = 0;

  void validate() const;
  RadialPartition dropout_partition() const;
};

struct SyntheticScan {
  Scan scan;
  // Generating beam of every point (index into spec.inclinations).
  std::vector<std::uint16_t> beam_ids;
};

SyntheticScan generate_synthetic_scan_with_truth(const SyntheticSceneSpec& spec,
                                                 std::uint64_t scan_seed);

inline Scan generate_synthetic_scan(const SyntheticSceneSpec& spec,
                                    std::uint64_t scan_seed) {
  return generate_synthetic_scan_with_truth(spec, scan_seed).scan;
}

// Evenly spaced inclinations over [lo, hi], inclusive, in radians.
std::vector<double> linear_inclinations(int count, double lo, double hi);

// "dense64": 64 beams on an HDL-64E-like layout, no dropout, no noise.
// "sparse40": 40 beams, dropout growing with range, azimuth jitter and XY
// noise.
SyntheticSceneSpec preset(std::string_view name);
std::vector<std::string> preset_names();

}  // namespace dgt
