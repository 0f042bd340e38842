#include "dgt/scan_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <string>

#include "dgt/error.hpp"

namespace dgt {

namespace {

static_assert(std::endian::native == std::endian::little ||
                  std::endian::native == std::endian::big,
              "mixed-endian platforms are not supported");

std::uint32_t load_le32(const std::byte* src) {
  std::uint32_t v = 0;
  std::memcpy(&v, src, sizeof(v));
  if constexpr (std::endian::native == std::endian::big) {
    v = ((v & 0xff) << 24) | ((v & 0xff00) << 8) | ((v >> 8) & 0xff00) |
        (v >> 24);
  }
  return v;
}

void store_le32(std::uint32_t v, std::byte* dst) {
  if constexpr (std::endian::native == std::endian::big) {
    v = ((v & 0xff) << 24) | ((v & 0xff00) << 8) | ((v >> 8) & 0xff00) |
        (v >> 24);
  }
  std::memcpy(dst, &v, sizeof(v));
}

float load_f32(const std::byte* src) {
  return std::bit_cast<float>(load_le32(src));
}

void store_f32(float v, std::byte* dst) {
  store_le32(std::bit_cast<std::uint32_t>(v), dst);
}

}  // namespace

std::vector<std::byte> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  const auto size = static_cast<std::streamsize>(in.tellg());
  std::vector<std::byte> bytes(static_cast<std::size_t>(size));
  in.seekg(0);
  if (size > 0 && !in.read(reinterpret_cast<char*>(bytes.data()), size)) {
    throw IoError("failed reading '" + path.string() + "'");
  }
  return bytes;
}

void write_file_bytes(std::span<const std::byte> bytes,
                      const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

Scan decode_scan(std::span<const std::byte> bytes) {
  if (bytes.size() % 16 != 0) {
    throw FormatError("malformed scan file (size % 16 != 0)");
  }
  Scan scan;
  scan.points.resize(bytes.size() / 16);
  for (std::size_t i = 0; i < scan.points.size(); ++i) {
    const std::byte* rec = bytes.data() + 16 * i;
    scan.points[i] = Point{load_f32(rec), load_f32(rec + 4), load_f32(rec + 8),
                           load_f32(rec + 12)};
  }
  return scan;
}

Scan read_scan(const std::filesystem::path& path) {
  try {
    return decode_scan(read_file_bytes(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::vector<std::byte> encode_scan(const Scan& scan) {
  std::vector<std::byte> bytes(scan.points.size() * 16);
  for (std::size_t i = 0; i < scan.points.size(); ++i) {
    const Point& p = scan.points[i];
    std::byte* rec = bytes.data() + 16 * i;
    store_f32(p.x, rec);
    store_f32(p.y, rec + 4);
    store_f32(p.z, rec + 8);
    store_f32(p.intensity, rec + 12);
  }
  return bytes;
}

void write_scan(const Scan& scan, const std::filesystem::path& path) {
  write_file_bytes(encode_scan(scan), path);
}

LabelData decode_labels(std::span<const std::byte> bytes) {
  if (bytes.size() % 4 != 0) {
    throw FormatError("malformed label file (size % 4 != 0)");
  }
  LabelData labels;
  const std::size_t n = bytes.size() / 4;
  labels.semantic.resize(n);
  labels.instance.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint32_t rec = load_le32(bytes.data() + 4 * i);
    labels.semantic[i] = static_cast<ClassId>(rec & 0xffffu);
    labels.instance[i] = static_cast<std::uint16_t>(rec >> 16);
  }
  return labels;
}

LabelData read_labels(const std::filesystem::path& path) {
  try {
    return decode_labels(read_file_bytes(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_labels(const LabelData& labels, const std::filesystem::path& path) {
  if (labels.instance.size() != labels.semantic.size()) {
    throw std::invalid_argument("semantic/instance length mismatch");
  }
  std::vector<std::byte> bytes(labels.size() * 4);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const std::uint32_t rec =
        (static_cast<std::uint32_t>(labels.instance[i]) << 16) |
        labels.semantic[i];
    store_le32(rec, bytes.data() + 4 * i);
  }
  write_file_bytes(bytes, path);
}

void write_labels(const Scan& scan, const std::filesystem::path& path) {
  if (!scan.labels) throw std::invalid_argument("scan has no labels");
  LabelData data;
  data.semantic = *scan.labels;
  data.instance = scan.instance_ids
                      ? *scan.instance_ids
                      : std::vector<std::uint16_t>(scan.size(), 0);
  write_labels(data, path);
}

void attach_labels(Scan& scan, LabelData labels) {
  if (labels.size() != scan.size()) {
    throw DataError("label count " + std::to_string(labels.size()) +
                    " does not match point count " +
                    std::to_string(scan.size()));
  }
  scan.labels = std::move(labels.semantic);
  scan.instance_ids = std::move(labels.instance);
}

std::vector<std::uint32_t> read_index_map(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  if (bytes.size() % 4 != 0) {
    throw FormatError(path.string() + ": malformed index map (size % 4 != 0)");
  }
  std::vector<std::uint32_t> map(bytes.size() / 4);
  for (std::size_t i = 0; i < map.size(); ++i) {
    map[i] = load_le32(bytes.data() + 4 * i);
  }
  return map;
}

void write_index_map(std::span<const std::uint32_t> map,
                     const std::filesystem::path& path) {
  std::vector<std::byte> bytes(map.size() * 4);
  for (std::size_t i = 0; i < map.size(); ++i) {
    store_le32(map[i], bytes.data() + 4 * i);
  }
  write_file_bytes(bytes, path);
}

}  // namespace dgt
