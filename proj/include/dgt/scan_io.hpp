#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "dgt/scan.hpp"

namespace dgt {

// `.bin` scans: little-endian float32 x, y, z, intensity per point.
Scan read_scan(const std::filesystem::path& path);
Scan decode_scan(std::span<const std::byte> bytes);
void write_scan(const Scan& scan, const std::filesystem::path& path);
std::vector<std::byte> encode_scan(const Scan& scan);

// `.label` files: little-endian uint32 per point, low 16 bits semantic
// class, high 16 bits instance id.
struct LabelData {
  std::vector<ClassId> semantic;
  std::vector<std::uint16_t> instance;

  std::size_t size() const { return semantic.size(); }
  friend bool operator==(const LabelData&, const LabelData&) = default;
};

LabelData read_labels(const std::filesystem::path& path);
LabelData decode_labels(std::span<const std::byte> bytes);
void write_labels(const LabelData& labels, const std::filesystem::path& path);
// Writes the scan's labels; absent instance ids are written as 0.
void write_labels(const Scan& scan, const std::filesystem::path& path);

// Pairs labels with a scan. Throws DataError on a length mismatch.
void attach_labels(Scan& scan, LabelData labels);

// Index maps (e.g. output index -> input index): little-endian uint32.
std::vector<std::uint32_t> read_index_map(const std::filesystem::path& path);
void write_index_map(std::span<const std::uint32_t> map,
                     const std::filesystem::path& path);

// Whole-file helpers shared by the binary formats.
std::vector<std::byte> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(std::span<const std::byte> bytes,
                      const std::filesystem::path& path);

}  // namespace dgt
