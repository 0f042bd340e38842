#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace dgt {

// Semantic class id. 0 is reserved for "unlabeled" everywhere, including
// rejected pseudo-labels.
using ClassId = std::uint16_t;
inline constexpr ClassId kUnlabeled = 0;

struct Point {
  float x = 0.0f;
  float y = 0.0f;
  float z = 0.0f;
  // Carried through untouched; no algorithm reads it.
  float intensity = 0.0f;

  friend bool operator==(const Point&, const Point&) = default;
};

bool is_finite(const Point& p);

struct SensorSpec {
  int beam_count = 64;
  double max_range = 100.0;

  void validate() const;
  friend bool operator==(const SensorSpec&, const SensorSpec&) = default;
};

struct Scan {
  std::vector<Point> points;
  std::optional<std::vector<ClassId>> labels;
  std::optional<std::vector<std::uint16_t>> instance_ids;
  SensorSpec sensor;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  bool has_labels() const { return labels.has_value(); }

  // Throws DataError if a per-point channel has the wrong length or a
  // coordinate is not finite.
  void validate() const;

  friend bool operator==(const Scan&, const Scan&) = default;
};

// Copies the points at `indices` (in the given order) together with their
// per-point channels.
Scan select_points(const Scan& scan, std::span<const std::uint32_t> indices);

enum class DistanceMode { kRange3d, kPlanar };

std::string_view to_string(DistanceMode mode);
DistanceMode parse_distance_mode(std::string_view text);

double distance(const Point& p, DistanceMode mode);

// m evenly spaced concentric areas over [0, r_max). Distances at or beyond
// r_max clamp into the last area.
struct RadialPartition {
  int m = 50;
  double r_max = 100.0;
  DistanceMode mode = DistanceMode::kRange3d;

  void validate() const;
  double bin_width() const { return r_max / m; }
  int area_index(const Point& p) const;
  int area_index_of_distance(double d) const;

  friend bool operator==(const RadialPartition&,
                         const RadialPartition&) = default;
};

inline int radial_area_index(const Point& p, const RadialPartition& part) {
  return part.area_index(p);
}

// Per-area point counts of one scan.
std::vector<std::uint64_t> area_histogram(const Scan& scan,
                                          const RadialPartition& part);

// atan2(z, hypot(x, y)). Throws DataError for a point at the sensor center.
double inclination_of(const Point& p);

// n uniform bins over [phi_min, phi_max]; angles outside clamp to end bins.
struct InclinationPartition {
  int n = 4;
  double phi_min = -0.5;
  double phi_max = 0.5;

  void validate() const;
  int area_index_of_angle(double phi) const;
  int area_index(const Point& p) const {
    return area_index_of_angle(inclination_of(p));
  }

  friend bool operator==(const InclinationPartition&,
                         const InclinationPartition&) = default;
};

inline int inclination_area_index(const Point& p,
                                  const InclinationPartition& part) {
  return part.area_index(p);
}

}  // namespace dgt
