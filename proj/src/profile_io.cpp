#include "dgt/profile_io.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "dgt/error.hpp"

namespace dgt {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

template <typename T>
T parse_number(std::string_view text, std::string_view key) {
  T value{};
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    throw FormatError("malformed profile value for '" + std::string(key) +
                      "': '" + std::string(text) + "'");
  }
  return value;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

std::string format_profile(const DensityProfile& profile) {
  profile.validate();
  if (profile.scan_count < 1) {
    throw std::invalid_argument("cannot persist a profile with no scans");
  }
  if (profile.domain_name.find_first_of("\r\n") != std::string::npos) {
    throw std::invalid_argument("domain name must be a single line");
  }
  std::ostringstream out;
  out << "version: " << kProfileVersion << '\n'
      << "domain: " << profile.domain_name << '\n'
      << "m: " << profile.partition.m << '\n'
      << "r_max: " << format_double(profile.partition.r_max) << '\n'
      << "mode: " << to_string(profile.partition.mode) << '\n'
      << "scan_count: " << profile.scan_count << '\n'
      << "counts: ";
  for (std::size_t i = 0; i < profile.totals.size(); ++i) {
    if (i) out << ',';
    out << profile.totals[i];
  }
  out << '\n';
  return out.str();
}

DensityProfile parse_profile(std::string_view text) {
  std::map<std::string, std::string, std::less<>> fields;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{}
                                         : text.substr(eol + 1);
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto colon = line.find(':');
    if (colon == std::string_view::npos) {
      throw FormatError("malformed profile line: '" + std::string(line) + "'");
    }
    auto key = std::string(trim(line.substr(0, colon)));
    if (fields.contains(key)) {
      throw FormatError("duplicate profile key '" + key + "'");
    }
    fields.emplace(std::move(key), std::string(trim(line.substr(colon + 1))));
  }

  auto require = [&](std::string_view key) -> const std::string& {
    auto it = fields.find(key);
    if (it == fields.end()) {
      throw FormatError("profile missing key '" + std::string(key) + "'");
    }
    return it->second;
  };

  const auto& version = require("version");
  if (version != kProfileVersion) {
    throw FormatError("unsupported profile version '" + version + "'");
  }

  DensityProfile profile;
  profile.domain_name = require("domain");
  profile.partition.m = parse_number<int>(require("m"), "m");
  profile.partition.r_max = parse_number<double>(require("r_max"), "r_max");
  try {
    profile.partition.mode = parse_distance_mode(require("mode"));
    profile.partition.validate();
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("invalid profile partition: ") + e.what());
  }
  profile.scan_count =
      parse_number<std::uint64_t>(require("scan_count"), "scan_count");
  if (profile.scan_count < 1) throw FormatError("profile scan_count must be >= 1");

  std::string_view counts = require("counts");
  while (!counts.empty()) {
    const auto comma = counts.find(',');
    auto item = trim(counts.substr(0, comma));
    profile.totals.push_back(parse_number<std::uint64_t>(item, "counts"));
    if (comma == std::string_view::npos) break;
    counts.remove_prefix(comma + 1);
    if (counts.empty()) throw FormatError("malformed profile counts (trailing comma)");
  }
  if (profile.totals.size() != static_cast<std::size_t>(profile.partition.m)) {
    throw FormatError("profile length mismatch: m=" +
                      std::to_string(profile.partition.m) + " but " +
                      std::to_string(profile.totals.size()) + " counts");
  }
  return profile;
}

void save_profile(const DensityProfile& profile,
                  const std::filesystem::path& path) {
  const std::string text = format_profile(profile);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

DensityProfile load_profile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_profile(buf.str());
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace dgt
