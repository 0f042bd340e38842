#include "dgt/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>

#include "dgt/rng.hpp"

namespace dgt {

namespace {

constexpr double kDegree = std::numbers::pi / 180.0;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct Box {
  double cx, cy;
  double cos_yaw, sin_yaw;
  double half_length, half_width;
  double z_lo, z_hi;
};

struct Cylinder {
  double cx, cy, radius;
  double z_lo, z_hi;
};

struct Scene {
  std::vector<Box> boxes;
  std::vector<Cylinder> cylinders;
  double wall_radius = 60.0;
  double wall_amplitude = 0.0;
  double wall_phase = 0.0;
  double road_yaw = 0.0;
  double road_half_width = 6.0;
};

Scene build_scene(const SyntheticSceneSpec& spec, Rng& rng) {
  Scene scene;
  const double ground = -spec.sensor_height;
  scene.wall_radius = spec.wall_min_radius +
                      (spec.wall_max_radius - spec.wall_min_radius) * rng.uniform01();
  scene.wall_amplitude = 0.08 * scene.wall_radius * rng.uniform01();
  scene.wall_phase = 2.0 * std::numbers::pi * rng.uniform01();
  scene.road_yaw = std::numbers::pi * rng.uniform01();
  scene.road_half_width = 4.0 + 4.0 * rng.uniform01();

  const double max_obj_r = std::max(6.0, scene.wall_radius * 0.6);
  for (int i = 0; i < spec.box_count; ++i) {
    const double r = 5.0 + (max_obj_r - 5.0) * rng.uniform01();
    const double theta = 2.0 * std::numbers::pi * rng.uniform01();
    const double yaw = std::numbers::pi * rng.uniform01();
    Box box;
    box.cx = r * std::cos(theta);
    box.cy = r * std::sin(theta);
    box.cos_yaw = std::cos(yaw);
    box.sin_yaw = std::sin(yaw);
    box.half_length = 0.5 * (3.5 + 1.5 * rng.uniform01());
    box.half_width = 0.5 * (1.6 + 0.4 * rng.uniform01());
    box.z_lo = ground;
    box.z_hi = ground + 1.4 + 0.4 * rng.uniform01();
    scene.boxes.push_back(box);
  }
  for (int i = 0; i < spec.cylinder_count; ++i) {
    const double r = 3.0 + (max_obj_r - 3.0) * rng.uniform01();
    const double theta = 2.0 * std::numbers::pi * rng.uniform01();
    Cylinder cyl;
    cyl.cx = r * std::cos(theta);
    cyl.cy = r * std::sin(theta);
    cyl.radius = 0.1 + 0.3 * rng.uniform01();
    cyl.z_lo = ground;
    cyl.z_hi = ground + 3.0 + 5.0 * rng.uniform01();
    scene.cylinders.push_back(cyl);
  }
  return scene;
}

// Ray parameter of the first hit with a yawed box, or +inf.
double hit_box(const Box& b, double dx, double dy, double dz) {
  // Ray origin in box frame.
  const double ox = -(b.cx * b.cos_yaw + b.cy * b.sin_yaw);
  const double oy = -(-b.cx * b.sin_yaw + b.cy * b.cos_yaw);
  const double rx = dx * b.cos_yaw + dy * b.sin_yaw;
  const double ry = -dx * b.sin_yaw + dy * b.cos_yaw;
  double t_lo = 0.0;
  double t_hi = kInf;
  auto slab = [&](double o, double d, double lo, double hi) {
    if (d == 0.0) return o >= lo && o <= hi;
    double t1 = (lo - o) / d;
    double t2 = (hi - o) / d;
    if (t1 > t2) std::swap(t1, t2);
    t_lo = std::max(t_lo, t1);
    t_hi = std::min(t_hi, t2);
    return t_lo <= t_hi;
  };
  if (!slab(ox, rx, -b.half_length, b.half_length)) return kInf;
  if (!slab(oy, ry, -b.half_width, b.half_width)) return kInf;
  if (!slab(0.0, dz, b.z_lo, b.z_hi)) return kInf;
  return t_lo > 0.0 ? t_lo : kInf;
}

double hit_cylinder(const Cylinder& c, double dx, double dy, double dz) {
  const double a = dx * dx + dy * dy;
  if (a == 0.0) return kInf;
  const double b = -2.0 * (dx * c.cx + dy * c.cy);
  const double cc = c.cx * c.cx + c.cy * c.cy - c.radius * c.radius;
  const double disc = b * b - 4.0 * a * cc;
  if (disc < 0.0) return kInf;
  const double t = (-b - std::sqrt(disc)) / (2.0 * a);
  if (t <= 0.0) return kInf;
  const double z = t * dz;
  return (z >= c.z_lo && z <= c.z_hi) ? t : kInf;
}

}  // namespace

void SyntheticSceneSpec::validate() const {
  if (beam_count < 1) throw std::invalid_argument("beam_count must be >= 1");
  if (inclinations.size() != static_cast<std::size_t>(beam_count)) {
    throw std::invalid_argument("inclinations must have beam_count entries");
  }
  for (std::size_t i = 1; i < inclinations.size(); ++i) {
    if (!(inclinations[i] > inclinations[i - 1])) {
      throw std::invalid_argument("inclinations must be strictly increasing");
    }
  }
  for (double phi : inclinations) {
    if (!(std::abs(phi) < std::numbers::pi / 2)) {
      throw std::invalid_argument("inclinations must lie in (-pi/2, pi/2)");
    }
  }
  if (points_per_beam < 0) throw std::invalid_argument("points_per_beam must be >= 0");
  if (!(azimuth_jitter >= 0.0) || !(xy_noise >= 0.0)) {
    throw std::invalid_argument("noise parameters must be >= 0");
  }
  for (double rate : dropout_rate_by_area) {
    if (!(rate >= 0.0 && rate <= 1.0)) {
      throw std::invalid_argument("dropout rates must lie in [0, 1]");
    }
  }
  if (!(sensor_height > 0.0)) throw std::invalid_argument("sensor_height must be > 0");
  if (!(wall_min_radius > 0.0 && wall_max_radius >= wall_min_radius &&
        wall_max_radius * 1.08 < max_range)) {
    throw std::invalid_argument("wall radii must satisfy 0 < min <= max < max_range");
  }
  if (ground_classes.empty() || object_classes.size() < 3) {
    throw std::invalid_argument("class palette needs 1 ground and 3 object classes");
  }
  if (box_count < 0 || cylinder_count < 0) {
    throw std::invalid_argument("object counts must be >= 0");
  }
}

RadialPartition SyntheticSceneSpec::dropout_partition() const {
  return RadialPartition{
      static_cast<int>(std::max<std::size_t>(dropout_rate_by_area.size(), 1)),
      max_range, DistanceMode::kRange3d};
}

SyntheticScan generate_synthetic_scan_with_truth(const SyntheticSceneSpec& spec,
                                                 std::uint64_t scan_seed) {
  spec.validate();
  Rng rng(derive_seed(spec.seed, scan_seed));
  const Scene scene = build_scene(spec, rng);
  const RadialPartition dropout_part = spec.dropout_partition();
  const double ground = -spec.sensor_height;
  const double road_c = std::cos(scene.road_yaw);
  const double road_s = std::sin(scene.road_yaw);

  SyntheticScan out;
  out.scan.sensor = SensorSpec{spec.beam_count, spec.max_range};
  auto& labels = out.scan.labels.emplace();
  auto& instances = out.scan.instance_ids.emplace();
  const auto total = static_cast<std::size_t>(spec.beam_count) *
                     static_cast<std::size_t>(spec.points_per_beam);
  out.scan.points.reserve(total);
  labels.reserve(total);
  instances.reserve(total);
  out.beam_ids.reserve(total);

  for (int beam = 0; beam < spec.beam_count; ++beam) {
    const double phi = spec.inclinations[beam];
    const double cos_phi = std::cos(phi);
    const double dz = std::sin(phi);
    for (int j = 0; j < spec.points_per_beam; ++j) {
      double theta = 2.0 * std::numbers::pi * j / spec.points_per_beam;
      // Draws happen unconditionally so every ray consumes the same amount
      // of the stream regardless of the configuration values.
      const double jitter = rng.normal();
      const double noise_x = rng.normal();
      const double noise_y = rng.normal();
      const double drop_draw = rng.uniform01();
      theta += spec.azimuth_jitter * jitter;
      const double dx = cos_phi * std::cos(theta);
      const double dy = cos_phi * std::sin(theta);

      const double wall = scene.wall_radius +
                          scene.wall_amplitude * std::sin(3.0 * theta + scene.wall_phase);
      double t = wall / cos_phi;
      ClassId label = spec.object_classes[2];
      std::uint16_t instance = 0;
      if (dz < 0.0) {
        const double t_ground = ground / dz;
        if (t_ground < t) {
          t = t_ground;
          const double across = -dx * road_s + dy * road_c;
          const bool on_road = std::abs(across * t) < scene.road_half_width;
          label = spec.ground_classes[on_road ? 0 : (spec.ground_classes.size() > 1 ? 1 : 0)];
        }
      }
      for (std::size_t b = 0; b < scene.boxes.size(); ++b) {
        const double tb = hit_box(scene.boxes[b], dx, dy, dz);
        if (tb < t) {
          t = tb;
          label = spec.object_classes[0];
          instance = static_cast<std::uint16_t>(1 + b);
        }
      }
      for (std::size_t c = 0; c < scene.cylinders.size(); ++c) {
        const double tc = hit_cylinder(scene.cylinders[c], dx, dy, dz);
        if (tc < t) {
          t = tc;
          label = spec.object_classes[1];
          instance = static_cast<std::uint16_t>(1 + scene.boxes.size() + c);
        }
      }

      const double x = t * dx + spec.xy_noise * noise_x;
      const double y = t * dy + spec.xy_noise * noise_y;
      const double z = t * dz;
      Point p{static_cast<float>(x), static_cast<float>(y), static_cast<float>(z),
              static_cast<float>(std::exp(-t / 60.0))};
      if (!spec.dropout_rate_by_area.empty()) {
        const double rate = spec.dropout_rate_by_area[dropout_part.area_index(p)];
        if (drop_draw < rate) continue;
      }
      out.scan.points.push_back(p);
      labels.push_back(label);
      instances.push_back(instance);
      out.beam_ids.push_back(static_cast<std::uint16_t>(beam));
    }
  }
  return out;
}

std::vector<double> linear_inclinations(int count, double lo, double hi) {
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    out[i] = count == 1 ? lo : lo + (hi - lo) * i / (count - 1);
  }
  return out;
}

SyntheticSceneSpec preset(std::string_view name) {
  SyntheticSceneSpec spec;
  spec.name = std::string(name);
  if (name == "dense64") {
    // Lower block: 32 beams over [-24.33, -8.83] deg; upper block: 32 beams
    // over [-8.33, 2.0] deg.
    spec.beam_count = 64;
    auto lower = linear_inclinations(32, -24.33 * kDegree, -8.83 * kDegree);
    auto upper = linear_inclinations(32, -8.33 * kDegree, 2.0 * kDegree);
    spec.inclinations = std::move(lower);
    spec.inclinations.insert(spec.inclinations.end(), upper.begin(), upper.end());
    spec.points_per_beam = 1800;
    spec.seed = 0x64;
    return spec;
  }
  if (name == "sparse40") {
    spec.beam_count = 40;
    spec.inclinations = linear_inclinations(40, -16.0 * kDegree, 7.0 * kDegree);
    spec.points_per_beam = 1800;
    spec.azimuth_jitter = 0.0005;
    spec.xy_noise = 0.02;
    spec.dropout_rate_by_area.resize(50);
    for (std::size_t i = 0; i < spec.dropout_rate_by_area.size(); ++i) {
      // 15% near the sensor rising to 65% at the far edge.
      spec.dropout_rate_by_area[i] = 0.15 + 0.5 * static_cast<double>(i) / 49.0;
    }
    spec.seed = 0x40;
    return spec;
  }
  throw std::invalid_argument("unknown preset '" + std::string(name) + "'");
}

std::vector<std::string> preset_names() { return {"dense64", "sparse40"}; }

}  // namespace dgt
