#include <doctest.h>

#include <cstring>

#include "dgt/error.hpp"
#include "dgt/matrix_io.hpp"
#include "dgt/profile_io.hpp"
#include "dgt/scan_io.hpp"
#include "test_util.hpp"

using namespace dgt;
using dgt::testing::TempDir;

namespace {

std::vector<std::byte> le_floats(std::initializer_list<float> values) {
  std::vector<std::byte> out;
  for (float f : values) {
    std::uint32_t bits;
    std::memcpy(&bits, &f, 4);
    for (int b = 0; b < 4; ++b) out.push_back(static_cast<std::byte>((bits >> (8 * b)) & 0xff));
  }
  return out;
}

DensityProfile sample_profile() {
  DensityProfile p = DensityProfile::empty({50, 100.0, DistanceMode::kRange3d}, "dense64");
  for (std::size_t i = 0; i < p.totals.size(); ++i) p.totals[i] = 1000 * (50 - i) + i;
  p.scan_count = 12;
  return p;
}

}  // namespace

TEST_SUITE("scan_io") {

TEST_CASE("decode two-point scan") {
  TempDir dir;
  const auto bytes = le_floats({1, 2, 3, 0.5f, 4, 5, 6, 0.1f});
  REQUIRE(bytes.size() == 32);
  write_file_bytes(bytes, dir / "a.bin");
  const Scan scan = read_scan(dir / "a.bin");
  REQUIRE(scan.size() == 2);
  CHECK(scan.points[0] == Point{1, 2, 3, 0.5f});
  CHECK(scan.points[1] == Point{4, 5, 6, 0.1f});
}

TEST_CASE("empty and truncated scan files") {
  TempDir dir;
  write_file_bytes({}, dir / "empty.bin");
  CHECK(read_scan(dir / "empty.bin").empty());

  std::vector<std::byte> seventeen(17, std::byte{0});
  write_file_bytes(seventeen, dir / "bad.bin");
  CHECK_THROWS_AS(read_scan(dir / "bad.bin"), FormatError);
  try {
    read_scan(dir / "bad.bin");
  } catch (const FormatError& e) {
    CHECK(std::string(e.what()).find("malformed scan file (size % 16 != 0)") !=
          std::string::npos);
  }
  CHECK_THROWS_AS(read_scan(dir / "missing.bin"), IoError);
}

TEST_CASE("scan round trip is bit exact") {
  TempDir dir;
  Rng rng(99);
  Scan scan = testing::random_scan(rng, 10000, 80.0, false);
  write_scan(scan, dir / "r.bin");
  CHECK(std::filesystem::file_size(dir / "r.bin") == 16 * 10000);
  const Scan back = read_scan(dir / "r.bin");
  CHECK(back.points == scan.points);

  write_scan(Scan{}, dir / "e.bin");
  CHECK(std::filesystem::file_size(dir / "e.bin") == 0);
}

TEST_CASE("label bit layout") {
  // 0x0001000A little-endian
  const std::vector<std::byte> rec{std::byte{0x0A}, std::byte{0x00}, std::byte{0x01},
                                   std::byte{0x00}, std::byte{0}, std::byte{0},
                                   std::byte{0}, std::byte{0}};
  const LabelData labels = decode_labels(rec);
  REQUIRE(labels.size() == 2);
  CHECK(labels.semantic[0] == 10);
  CHECK(labels.instance[0] == 1);
  CHECK(labels.semantic[1] == 0);
  CHECK(labels.instance[1] == 0);
  CHECK_THROWS_AS(decode_labels(std::vector<std::byte>(6)), FormatError);
}

TEST_CASE("label round trip and pairing") {
  TempDir dir;
  Rng rng(5);
  LabelData labels;
  for (int i = 0; i < 1000; ++i) {
    labels.semantic.push_back(static_cast<ClassId>(rng.next()));
    labels.instance.push_back(static_cast<std::uint16_t>(rng.next()));
  }
  write_labels(labels, dir / "l.label");
  CHECK(read_labels(dir / "l.label") == labels);

  Scan scan = testing::random_scan(rng, 999, 10.0, false);
  CHECK_THROWS_AS(attach_labels(scan, labels), DataError);
  Scan ok = testing::random_scan(rng, 1000, 10.0, false);
  attach_labels(ok, labels);
  CHECK(*ok.labels == labels.semantic);
}

TEST_CASE("readers never crash on arbitrary bytes") {
  Rng rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<std::byte> bytes(rng.uniform_below(80));
    for (auto& b : bytes) b = static_cast<std::byte>(rng.next() & 0xff);
    auto total = [&](auto&& fn) {
      try {
        fn();
      } catch (const DataError&) {
      }
    };
    total([&] { decode_scan(bytes); });
    total([&] { decode_labels(bytes); });
    total([&] { decode_matrix(bytes); });
    std::string text(reinterpret_cast<const char*>(bytes.data()), bytes.size());
    total([&] { parse_profile(text); });
    total([&] { parse_profile("version: dgt-profile-1\n" + text); });
  }
}

TEST_CASE("profile text round trip") {
  TempDir dir;
  const DensityProfile p = sample_profile();
  save_profile(p, dir / "p.profile");
  CHECK(load_profile(dir / "p.profile") == p);

  DensityProfile odd = p;
  odd.partition = {7, 33.3, DistanceMode::kPlanar};
  odd.totals.assign(7, 3);
  odd.domain_name = "with spaces";
  save_profile(odd, dir / "q.profile");
  CHECK(load_profile(dir / "q.profile") == odd);

  const std::string text = testing::slurp(dir / "p.profile");
  CHECK(text.rfind("version: dgt-profile-1\n", 0) == 0);
  CHECK(text.find("\ncounts: ") != std::string::npos);
}

TEST_CASE("profile rejects bad input") {
  std::string text = format_profile(sample_profile());
  // Drop the last count: 49 values for m = 50.
  const std::string short_counts = text.substr(0, text.rfind(',')) + "\n";
  CHECK_THROWS_WITH_AS(parse_profile(short_counts),
                       doctest::Contains("profile length mismatch"), FormatError);

  std::string versioned = text;
  versioned.replace(versioned.find("dgt-profile-1"), 13, "dgt-profile-9");
  CHECK_THROWS_WITH_AS(parse_profile(versioned), doctest::Contains("version"), FormatError);

  std::string bad = text;
  bad.replace(bad.find("counts: ") + 8, 1, "x");
  CHECK_THROWS_AS(parse_profile(bad), FormatError);

  DensityProfile none = sample_profile();
  none.scan_count = 0;
  CHECK_THROWS_AS(format_profile(none), std::invalid_argument);
}

TEST_CASE("matrix file layout") {
  TempDir dir;
  RowMatrix m(2, 3, {0.25, 0.5, 0.25, 1, 0, 0});
  write_matrix(m, dir / "m.prob");
  const auto bytes = read_file_bytes(dir / "m.prob");
  REQUIRE(bytes.size() == 12 + 24);
  CHECK(std::to_integer<int>(bytes[0]) == 2);
  CHECK(std::to_integer<int>(bytes[4]) == 3);
  CHECK(std::to_integer<int>(bytes[8]) == 1);
  CHECK(read_matrix(dir / "m.prob") == m);

  auto wrong = bytes;
  wrong[8] = std::byte{2};
  CHECK_THROWS_AS(decode_matrix(wrong), FormatError);
  wrong = bytes;
  wrong.pop_back();
  CHECK_THROWS_AS(decode_matrix(wrong), FormatError);
}

TEST_CASE("index map round trip") {
  TempDir dir;
  const std::vector<std::uint32_t> map{0, 2, 5, 70000};
  write_index_map(map, dir / "m.idx");
  CHECK(read_index_map(dir / "m.idx") == map);
}

}
