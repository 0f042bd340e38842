#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "dgt/profile.hpp"

namespace dgt {

inline constexpr std::string_view kProfileVersion = "dgt-profile-1";

// UTF-8 text: `key: value` lines (version, domain, m, r_max, mode,
// scan_count) followed by a `counts:` line of comma-separated integers.
std::string format_profile(const DensityProfile& profile);
DensityProfile parse_profile(std::string_view text);

void save_profile(const DensityProfile& profile,
                  const std::filesystem::path& path);
DensityProfile load_profile(const std::filesystem::path& path);

}  // namespace dgt
