#include "dgt/matrix_io.hpp"

#include <bit>
#include <cstring>
#include <string>

#include "dgt/error.hpp"
#include "dgt/scan_io.hpp"

namespace dgt {

namespace {

std::uint32_t load_le32(const std::byte* src) {
  std::uint32_t v = 0;
  for (int b = 3; b >= 0; --b) v = (v << 8) | std::to_integer<std::uint32_t>(src[b]);
  return v;
}

void store_le32(std::uint32_t v, std::byte* dst) {
  for (int b = 0; b < 4; ++b) dst[b] = static_cast<std::byte>((v >> (8 * b)) & 0xffu);
}

}  // namespace

RowMatrix decode_matrix(std::span<const std::byte> bytes) {
  if (bytes.size() < 12) throw FormatError("malformed matrix file (short header)");
  const std::uint64_t rows = load_le32(bytes.data());
  const std::uint64_t cols = load_le32(bytes.data() + 4);
  const std::uint32_t version = load_le32(bytes.data() + 8);
  if (version != kMatrixFormatVersion) {
    throw FormatError("unsupported matrix version " + std::to_string(version));
  }
  if (bytes.size() - 12 != rows * cols * 4) {
    throw FormatError("malformed matrix file (payload does not match " +
                      std::to_string(rows) + "x" + std::to_string(cols) + ")");
  }
  std::vector<double> values(rows * cols);
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = std::bit_cast<float>(load_le32(bytes.data() + 12 + 4 * i));
  }
  return RowMatrix(rows, cols, std::move(values));
}

std::vector<std::byte> encode_matrix(const RowMatrix& matrix) {
  if (matrix.rows() > UINT32_MAX || matrix.cols() > UINT32_MAX) {
    throw std::invalid_argument("matrix too large for the file format");
  }
  std::vector<std::byte> bytes(12 + matrix.rows() * matrix.cols() * 4);
  store_le32(static_cast<std::uint32_t>(matrix.rows()), bytes.data());
  store_le32(static_cast<std::uint32_t>(matrix.cols()), bytes.data() + 4);
  store_le32(kMatrixFormatVersion, bytes.data() + 8);
  const auto values = matrix.values();
  for (std::size_t i = 0; i < values.size(); ++i) {
    store_le32(std::bit_cast<std::uint32_t>(static_cast<float>(values[i])),
               bytes.data() + 12 + 4 * i);
  }
  return bytes;
}

RowMatrix read_matrix(const std::filesystem::path& path) {
  try {
    return decode_matrix(read_file_bytes(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_matrix(const RowMatrix& matrix, const std::filesystem::path& path) {
  write_file_bytes(encode_matrix(matrix), path);
}

}  // namespace dgt
