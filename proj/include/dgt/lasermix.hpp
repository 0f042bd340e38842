#pragma once

#include <cstdint>
#include <vector>

#include "dgt/pseudo_label.hpp"
#include "dgt/scan.hpp"

namespace dgt {

enum class Provenance : std::uint8_t { kSource = 0, kTarget = 1 };

struct MixResult {
  // mix1 takes source points from even inclination areas and target points
  // from odd ones; mix2 is the complement. Labels ride inside the scans.
  Scan mix1;
  Scan mix2;
  std::vector<Provenance> provenance1;
  std::vector<Provenance> provenance2;
  // Index of each mixed point in the scan it came from.
  std::vector<std::uint32_t> origin1;
  std::vector<std::uint32_t> origin2;
};

// Areas are emitted in ascending order; inside an area the contributed
// points keep their original order. Both scans must carry labels (target
// labels are pseudo-labels); throws DataError otherwise.
MixResult laser_mix(const Scan& source, const Scan& target,
                    const InclinationPartition& part);

inline constexpr double kInclinationBoundMargin = 1e-6;

// Min/max inclination over both scans, widened by kInclinationBoundMargin.
// Throws DataError when both scans are empty.
InclinationPartition default_inclination_bounds(const Scan& source,
                                                const Scan& target, int n = 4);

// Brute-force audit of a mix: recomputes every point's area and checks the
// parity pattern and per-area multiset conservation. Returns the number of
// violations (0 for a correct mix).
std::uint64_t verify_mix(const Scan& source, const Scan& target,
                         const InclinationPartition& part,
                         const MixResult& mix);

}  // namespace dgt
