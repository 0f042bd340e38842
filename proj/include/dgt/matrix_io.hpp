#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "dgt/fields.hpp"

namespace dgt {

inline constexpr std::uint32_t kMatrixFormatVersion = 1;

// Flat little-endian float32 matrix preceded by three little-endian uint32
// header words: rows, cols, version.
RowMatrix decode_matrix(std::span<const std::byte> bytes);
std::vector<std::byte> encode_matrix(const RowMatrix& matrix);

RowMatrix read_matrix(const std::filesystem::path& path);
void write_matrix(const RowMatrix& matrix, const std::filesystem::path& path);

}  // namespace dgt
