#include "dgt/translator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "dgt/rng.hpp"

namespace dgt {

namespace {

// Stream index for the noise substream; discards use the seed directly.
constexpr std::uint64_t kNoiseStream = 0x6e6f697365;  // "noise"

[[noreturn]] void unknown(std::string_view what, std::string_view text) {
  throw std::invalid_argument("unknown " + std::string(what) + " '" +
                              std::string(text) + "'");
}

void check_compatible(const RadialPartition& partition,
                      const TranslationRatios& ratios) {
  partition.validate();
  if (!(ratios.partition == partition) ||
      ratios.r.size() != static_cast<std::size_t>(partition.m)) {
    throw std::invalid_argument("ratios do not match the radial partition");
  }
}

// Partial Fisher-Yates: moves `count` uniformly chosen elements of `pool`
// to its front.
void choose_front(std::vector<std::uint32_t>& pool, std::size_t count, Rng& rng) {
  for (std::size_t i = 0; i < count; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.uniform_below(pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
}

}  // namespace

std::string_view to_string(Direction d) {
  return d == Direction::kSourceToTarget ? "s2t" : "t2s";
}
std::string_view to_string(Normalization n) {
  return n == Normalization::kTotals ? "totals" : "per_scan_mean";
}
std::string_view to_string(NoiseAxes a) {
  return a == NoiseAxes::kXY ? "xy" : "xyz";
}
std::string_view to_string(DiscardMode m) {
  return m == DiscardMode::kDensity ? "density" : "random_global";
}

Direction parse_direction(std::string_view text) {
  if (text == "s2t" || text == "source_to_target") return Direction::kSourceToTarget;
  if (text == "t2s" || text == "target_to_source") return Direction::kTargetToSource;
  unknown("direction", text);
}
Normalization parse_normalization(std::string_view text) {
  if (text == "totals") return Normalization::kTotals;
  if (text == "per_scan_mean") return Normalization::kPerScanMean;
  unknown("normalization", text);
}
NoiseAxes parse_noise_axes(std::string_view text) {
  if (text == "xy") return NoiseAxes::kXY;
  if (text == "xyz") return NoiseAxes::kXYZ;
  unknown("noise axes", text);
}
DiscardMode parse_discard_mode(std::string_view text) {
  if (text == "density") return DiscardMode::kDensity;
  if (text == "random_global") return DiscardMode::kRandomGlobal;
  unknown("discard mode", text);
}

TranslationRatios TranslationRatios::identity(RadialPartition partition) {
  partition.validate();
  TranslationRatios out;
  out.partition = partition;
  out.r.assign(static_cast<std::size_t>(partition.m), 1.0);
  return out;
}

bool TranslationRatios::is_identity() const {
  return std::all_of(r.begin(), r.end(), [](double v) { return v == 1.0; });
}

TranslationRatios compute_ratios(const DensityProfile& src,
                                 const DensityProfile& tgt, Direction direction,
                                 Normalization normalization) {
  if (!(src.partition == tgt.partition)) {
    throw std::invalid_argument("profile partition mismatch");
  }
  src.validate();
  tgt.validate();
  const DensityProfile& num = direction == Direction::kSourceToTarget ? tgt : src;
  const DensityProfile& den = direction == Direction::kSourceToTarget ? src : tgt;
  if (normalization == Normalization::kPerScanMean &&
      (num.scan_count == 0 || den.scan_count == 0)) {
    throw std::invalid_argument("per-scan normalization needs scan_count >= 1");
  }

  TranslationRatios out;
  out.partition = src.partition;
  out.direction = direction;
  out.normalization = normalization;
  out.r.resize(src.totals.size());
  for (std::size_t i = 0; i < out.r.size(); ++i) {
    double n = static_cast<double>(num.totals[i]);
    double d = static_cast<double>(den.totals[i]);
    if (normalization == Normalization::kPerScanMean) {
      n /= static_cast<double>(num.scan_count);
      d /= static_cast<double>(den.scan_count);
    }
    out.r[i] = d == 0.0 ? 1.0 : std::clamp(n / d, 0.0, 1.0);
  }
  return out;
}

void NoiseConfig::validate() const {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw std::invalid_argument("noise sigma must be >= 0");
  }
}

std::uint64_t TranslationPlan::total_discards() const {
  return std::accumulate(discard_counts.begin(), discard_counts.end(),
                         std::uint64_t{0});
}

TranslationPlan plan_discards(const Scan& scan, const RadialPartition& partition,
                              const TranslationRatios& ratios,
                              std::uint64_t seed) {
  check_compatible(partition, ratios);
  const auto m = static_cast<std::size_t>(partition.m);

  // Counting sort of point indices by area, preserving input order.
  std::vector<std::uint32_t> area_of(scan.size());
  TranslationPlan plan;
  plan.area_counts.assign(m, 0);
  for (std::size_t i = 0; i < scan.size(); ++i) {
    area_of[i] = static_cast<std::uint32_t>(partition.area_index(scan.points[i]));
    ++plan.area_counts[area_of[i]];
  }

  plan.discard_counts.assign(m, 0);
  for (std::size_t a = 0; a < m; ++a) {
    if (!(ratios.r[a] < 1.0)) continue;
    const double want = static_cast<double>(plan.area_counts[a]) * (1.0 - ratios.r[a]);
    const double rounded = std::nearbyint(want);  // default mode: half-to-even
    plan.discard_counts[a] = static_cast<std::uint64_t>(
        std::clamp(rounded, 0.0, static_cast<double>(plan.area_counts[a])));
  }
  if (plan.total_discards() == 0) return plan;

  std::vector<std::size_t> offsets(m + 1, 0);
  for (std::size_t a = 0; a < m; ++a) offsets[a + 1] = offsets[a] + plan.area_counts[a];
  std::vector<std::uint32_t> bucketed(scan.size());
  {
    std::vector<std::size_t> cursor(offsets.begin(), offsets.end() - 1);
    for (std::size_t i = 0; i < scan.size(); ++i) {
      bucketed[cursor[area_of[i]]++] = static_cast<std::uint32_t>(i);
    }
  }

  Rng rng(seed);
  plan.selected.reserve(plan.total_discards());
  for (std::size_t a = 0; a < m; ++a) {
    const std::size_t del = plan.discard_counts[a];
    if (del == 0) continue;
    std::vector<std::uint32_t> pool(bucketed.begin() + offsets[a],
                                    bucketed.begin() + offsets[a + 1]);
    choose_front(pool, del, rng);
    plan.selected.insert(plan.selected.end(), pool.begin(), pool.begin() + del);
  }
  std::sort(plan.selected.begin(), plan.selected.end());
  return plan;
}

TranslationResult translate_scan(const Scan& scan,
                                 const RadialPartition& partition,
                                 const TranslationRatios& ratios,
                                 const NoiseConfig& noise, DiscardMode mode,
                                 std::uint64_t seed) {
  noise.validate();
  TranslationResult result;
  result.plan = plan_discards(scan, partition, ratios, seed);

  if (mode == DiscardMode::kDensity) {
    result.discarded = result.plan.selected;
  } else {
    std::vector<std::uint32_t> pool(scan.size());
    std::iota(pool.begin(), pool.end(), 0u);
    const auto total = static_cast<std::size_t>(result.plan.total_discards());
    Rng rng(derive_seed(seed, 1));
    choose_front(pool, total, rng);
    result.discarded.assign(pool.begin(), pool.begin() + total);
    std::sort(result.discarded.begin(), result.discarded.end());
  }

  result.kept_index_map.reserve(scan.size() - result.discarded.size());
  std::size_t d = 0;
  for (std::uint32_t i = 0; i < scan.size(); ++i) {
    if (d < result.discarded.size() && result.discarded[d] == i) {
      ++d;
      continue;
    }
    result.kept_index_map.push_back(i);
  }
  result.scan = select_points(scan, result.kept_index_map);

  if (noise.enabled && noise.sigma > 0.0) {
    Rng rng(derive_seed(seed, kNoiseStream));
    const bool with_z = noise.axes == NoiseAxes::kXYZ;
    for (auto& p : result.scan.points) {
      p.x = static_cast<float>(p.x + noise.sigma * rng.normal());
      p.y = static_cast<float>(p.y + noise.sigma * rng.normal());
      if (with_z) p.z = static_cast<float>(p.z + noise.sigma * rng.normal());
    }
  }
  return result;
}

std::uint64_t count_out_of_area_discards(const Scan& input,
                                         const RadialPartition& partition,
                                         const TranslationRatios& ratios,
                                         const TranslationResult& result) {
  check_compatible(partition, ratios);
  std::vector<std::uint64_t> removed(static_cast<std::size_t>(partition.m), 0);
  for (auto i : result.discarded) {
    ++removed[partition.area_index(input.points.at(i))];
  }
  std::uint64_t violations = 0;
  for (std::size_t a = 0; a < removed.size(); ++a) {
    const std::uint64_t allowed =
        ratios.r[a] < 1.0 && a < result.plan.discard_counts.size()
            ? result.plan.discard_counts[a]
            : 0;
    if (removed[a] > allowed) violations += removed[a] - allowed;
  }
  return violations;
}

}  // namespace dgt
