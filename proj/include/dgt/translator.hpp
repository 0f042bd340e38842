#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "dgt/profile.hpp"
#include "dgt/scan.hpp"

namespace dgt {

enum class Direction { kSourceToTarget, kTargetToSource };
enum class Normalization { kTotals, kPerScanMean };
enum class NoiseAxes { kXY, kXYZ };
enum class DiscardMode { kDensity, kRandomGlobal };

std::string_view to_string(Direction d);
std::string_view to_string(Normalization n);
std::string_view to_string(NoiseAxes a);
std::string_view to_string(DiscardMode m);
Direction parse_direction(std::string_view text);
Normalization parse_normalization(std::string_view text);
NoiseAxes parse_noise_axes(std::string_view text);
DiscardMode parse_discard_mode(std::string_view text);

// Per-area keep ratios in [0, 1].
struct TranslationRatios {
  RadialPartition partition;
  std::vector<double> r;
  Direction direction = Direction::kSourceToTarget;
  Normalization normalization = Normalization::kPerScanMean;

  static TranslationRatios identity(RadialPartition partition);
  bool is_identity() const;
};

// For kSourceToTarget each r_i is target_i / source_i (totals, or totals
// divided by scan_count), clipped to [0, 1]; kTargetToSource swaps the
// roles. A zero denominator gives r_i = 1.
TranslationRatios compute_ratios(const DensityProfile& src,
                                 const DensityProfile& tgt, Direction direction,
                                 Normalization normalization =
                                     Normalization::kPerScanMean);

struct NoiseConfig {
  bool enabled = true;
  double sigma = 0.01;  // meters
  NoiseAxes axes = NoiseAxes::kXY;

  void validate() const;
};

struct TranslationPlan {
  std::vector<std::uint64_t> area_counts;    // a_i of this scan
  std::vector<std::uint64_t> discard_counts;  // Del_i
  std::vector<std::uint32_t> selected;        // sorted input indices

  std::uint64_t total_discards() const;
};

// Del_i = round-half-even(a_i * (1 - r_i)) clamped to [0, a_i] where
// r_i < 1, else 0; Del_i indices are drawn uniformly without replacement
// inside each area from Rng(seed).
TranslationPlan plan_discards(const Scan& scan, const RadialPartition& partition,
                              const TranslationRatios& ratios,
                              std::uint64_t seed);

struct TranslationResult {
  Scan scan;
  std::vector<std::uint32_t> kept_index_map;  // output index -> input index
  TranslationPlan plan;
  // Points actually removed, sorted. Equals plan.selected in density mode.
  std::vector<std::uint32_t> discarded;
};

// kDensity removes plan.selected. kRandomGlobal removes the same number of
// points drawn uniformly over the whole scan, ignoring areas. Noise, if
// enabled, is added to the surviving points afterwards.
TranslationResult translate_scan(const Scan& scan,
                                 const RadialPartition& partition,
                                 const TranslationRatios& ratios,
                                 const NoiseConfig& noise, DiscardMode mode,
                                 std::uint64_t seed);

// Counts discards that fall outside what the plan allows: points removed
// from areas with r_i = 1 plus any per-area excess over Del_i. Zero for
// every density-mode translation.
std::uint64_t count_out_of_area_discards(const Scan& input,
                                         const RadialPartition& partition,
                                         const TranslationRatios& ratios,
                                         const TranslationResult& result);

}  // namespace dgt
