#include "dgt/scan.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "dgt/error.hpp"

namespace dgt {

bool is_finite(const Point& p) {
  return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z) &&
         std::isfinite(p.intensity);
}

void SensorSpec::validate() const {
  if (beam_count < 1) throw std::invalid_argument("beam_count must be >= 1");
  if (!(max_range > 0.0) || !std::isfinite(max_range)) {
    throw std::invalid_argument("max_range must be > 0");
  }
}

void Scan::validate() const {
  if (labels && labels->size() != points.size()) {
    throw DataError("label count " + std::to_string(labels->size()) +
                    " does not match point count " +
                    std::to_string(points.size()));
  }
  if (instance_ids && instance_ids->size() != points.size()) {
    throw DataError("instance count " + std::to_string(instance_ids->size()) +
                    " does not match point count " +
                    std::to_string(points.size()));
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!is_finite(points[i])) {
      throw DataError("non-finite coordinate at point " + std::to_string(i));
    }
  }
}

Scan select_points(const Scan& scan, std::span<const std::uint32_t> indices) {
  Scan out;
  out.sensor = scan.sensor;
  out.points.reserve(indices.size());
  for (auto i : indices) out.points.push_back(scan.points[i]);
  if (scan.labels) {
    auto& labels = out.labels.emplace();
    labels.reserve(indices.size());
    for (auto i : indices) labels.push_back((*scan.labels)[i]);
  }
  if (scan.instance_ids) {
    auto& ids = out.instance_ids.emplace();
    ids.reserve(indices.size());
    for (auto i : indices) ids.push_back((*scan.instance_ids)[i]);
  }
  return out;
}

std::string_view to_string(DistanceMode mode) {
  return mode == DistanceMode::kPlanar ? "planar" : "range3d";
}

DistanceMode parse_distance_mode(std::string_view text) {
  if (text == "range3d") return DistanceMode::kRange3d;
  if (text == "planar") return DistanceMode::kPlanar;
  throw std::invalid_argument("unknown distance mode '" + std::string(text) +
                              "'");
}

double distance(const Point& p, DistanceMode mode) {
  const double x = p.x;
  const double y = p.y;
  const double z = p.z;
  if (mode == DistanceMode::kPlanar) return std::sqrt(x * x + y * y);
  return std::sqrt(x * x + y * y + z * z);
}

void RadialPartition::validate() const {
  if (m < 1) throw std::invalid_argument("area count m must be >= 1");
  if (!(r_max > 0.0) || !std::isfinite(r_max)) {
    throw std::invalid_argument("r_max must be > 0");
  }
}

int RadialPartition::area_index_of_distance(double d) const {
  const double scaled = d / bin_width();
  if (!(scaled < m)) return m - 1;
  if (scaled <= 0.0) return 0;
  return static_cast<int>(scaled);
}

int RadialPartition::area_index(const Point& p) const {
  return area_index_of_distance(distance(p, mode));
}

std::vector<std::uint64_t> area_histogram(const Scan& scan,
                                          const RadialPartition& part) {
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(part.m), 0);
  for (const auto& p : scan.points) ++counts[part.area_index(p)];
  return counts;
}

double inclination_of(const Point& p) {
  const double x = p.x;
  const double y = p.y;
  const double z = p.z;
  if (x == 0.0 && y == 0.0 && z == 0.0) {
    throw DataError("degenerate point at sensor center");
  }
  return std::atan2(z, std::sqrt(x * x + y * y));
}

void InclinationPartition::validate() const {
  if (n < 2) throw std::invalid_argument("inclination area count n must be >= 2");
  if (!(phi_min < phi_max) || !std::isfinite(phi_min) ||
      !std::isfinite(phi_max)) {
    throw std::invalid_argument("phi_min must be < phi_max");
  }
}

int InclinationPartition::area_index_of_angle(double phi) const {
  const double width = (phi_max - phi_min) / n;
  const double scaled = (phi - phi_min) / width;
  if (!(scaled > 0.0)) return 0;
  if (!(scaled < n)) return n - 1;
  return static_cast<int>(scaled);
}

}  // namespace dgt
