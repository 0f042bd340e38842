#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dgt/scan.hpp"

namespace dgt {

// Per-area point totals of one domain, accumulated over a whole dataset.
struct DensityProfile {
  RadialPartition partition;
  std::vector<std::uint64_t> totals;
  std::uint64_t scan_count = 0;
  std::string domain_name;

  static DensityProfile empty(RadialPartition partition,
                              std::string domain_name);

  // Mean per-scan count of area i; 0 when no scans were accumulated.
  double mean_count(std::size_t area) const;
  std::uint64_t total_points() const;
  void validate() const;

  friend bool operator==(const DensityProfile&,
                         const DensityProfile&) = default;
};

// In-place accumulation, used by the streaming paths.
void add_scan(DensityProfile& profile, const Scan& scan);

DensityProfile accumulate_profile(DensityProfile profile, const Scan& scan);

// Element-wise sum. Throws std::invalid_argument on a partition or domain
// name mismatch.
DensityProfile merge_profiles(const DensityProfile& a, const DensityProfile& b);

}  // namespace dgt
