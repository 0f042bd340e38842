#include "dgt/profile.hpp"

#include <numeric>
#include <stdexcept>

namespace dgt {

DensityProfile DensityProfile::empty(RadialPartition partition,
                                     std::string domain_name) {
  partition.validate();
  DensityProfile profile;
  profile.partition = partition;
  profile.totals.assign(static_cast<std::size_t>(partition.m), 0);
  profile.domain_name = std::move(domain_name);
  return profile;
}

double DensityProfile::mean_count(std::size_t area) const {
  if (scan_count == 0) return 0.0;
  return static_cast<double>(totals.at(area)) /
         static_cast<double>(scan_count);
}

std::uint64_t DensityProfile::total_points() const {
  return std::accumulate(totals.begin(), totals.end(), std::uint64_t{0});
}

void DensityProfile::validate() const {
  partition.validate();
  if (totals.size() != static_cast<std::size_t>(partition.m)) {
    throw std::invalid_argument("profile length mismatch");
  }
}

void add_scan(DensityProfile& profile, const Scan& scan) {
  const auto& part = profile.partition;
  for (const auto& p : scan.points) ++profile.totals[part.area_index(p)];
  ++profile.scan_count;
}

DensityProfile accumulate_profile(DensityProfile profile, const Scan& scan) {
  profile.validate();
  add_scan(profile, scan);
  return profile;
}

DensityProfile merge_profiles(const DensityProfile& a,
                              const DensityProfile& b) {
  if (!(a.partition == b.partition)) {
    throw std::invalid_argument("profile partition mismatch");
  }
  if (a.domain_name != b.domain_name) {
    throw std::invalid_argument("profile domain mismatch: '" + a.domain_name +
                                "' vs '" + b.domain_name + "'");
  }
  a.validate();
  b.validate();
  DensityProfile out = a;
  for (std::size_t i = 0; i < out.totals.size(); ++i) {
    out.totals[i] += b.totals[i];
  }
  out.scan_count += b.scan_count;
  return out;
}

}  // namespace dgt
