#include <doctest.h>

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <vector>

#include "dgt/beam_ops.hpp"
#include "dgt/error.hpp"
#include "dgt/matrix_io.hpp"
#include "dgt/pipeline.hpp"
#include "dgt/profile_io.hpp"
#include "dgt/scan_io.hpp"
#include "test_util.hpp"

using namespace dgt;
namespace pl = dgt::pipeline;
using dgt::testing::TempDir;
using dgt::testing::tree_contents;
namespace fs = std::filesystem;

namespace {

pl::GenConfig gen_config(const fs::path& out, const std::string& preset, std::uint64_t count,
                         std::uint64_t seed = 7) {
  pl::GenConfig c;
  c.preset = preset;
  c.count = count;
  c.seed = seed;
  c.output = out;
  c.points_per_beam = 120;
  return c;
}

DensityProfile profile_of(const fs::path& data, const fs::path& out, const std::string& domain,
                          int threads = 0) {
  pl::ProfileConfig c;
  c.input = data;
  c.output = out;
  c.domain = domain;
  c.threads = threads;
  return pl::cmd_profile(c);
}

nlohmann::json manifest_of(const fs::path& path) {
  return nlohmann::json::parse(testing::slurp(path));
}

std::vector<std::string> csv_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

}  // namespace

TEST_SUITE("cli_pipeline") {

TEST_CASE("gen is deterministic and well formed") {
  TempDir dir;
  pl::cmd_gen(gen_config(dir / "a", "sparse40", 4));
  pl::cmd_gen(gen_config(dir / "b", "sparse40", 4));
  CHECK(tree_contents(dir / "a", pl::kManifestName) == tree_contents(dir / "b", pl::kManifestName));

  const auto layout = pl::DatasetLayout::open(dir / "a");
  REQUIRE(layout.stems.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    const Scan s = read_scan(layout.scan_path(i));
    CHECK(fs::file_size(layout.scan_path(i)) == 16 * s.size());
    CHECK(fs::file_size(*layout.label_path(i)) == 4 * s.size());
  }
  const auto m = manifest_of(dir / "a" / pl::kManifestName);
  CHECK(m["status"] == "complete");
  CHECK(m["command"] == "gen");
  CHECK(m["config"]["seed"] == 7);

  pl::cmd_gen(gen_config(dir / "c", "sparse40", 4, 8));
  CHECK(tree_contents(dir / "a", pl::kManifestName) != tree_contents(dir / "c", pl::kManifestName));
}

TEST_CASE("gen with zero scans and output protection") {
  TempDir dir;
  pl::cmd_gen(gen_config(dir / "z", "dense64", 0));
  CHECK(fs::exists(dir / "z" / pl::kManifestName));
  CHECK(pl::DatasetLayout::open(dir / "z").stems.empty());

  CHECK_THROWS_AS(pl::cmd_gen(gen_config(dir / "z", "dense64", 1)), std::invalid_argument);
  auto forced = gen_config(dir / "z", "dense64", 1);
  forced.force = true;
  pl::cmd_gen(forced);
  CHECK(pl::DatasetLayout::open(dir / "z").stems.size() == 1);
}

TEST_CASE("profile is independent of thread count") {
  TempDir dir;
  pl::cmd_gen(gen_config(dir / "d", "dense64", 9));
  const auto one = profile_of(dir / "d", dir / "p1.profile", "dense64", 1);
  const auto eight = profile_of(dir / "d", dir / "p8.profile", "dense64", 8);
  CHECK(one == eight);
  CHECK(testing::slurp(dir / "p1.profile") == testing::slurp(dir / "p8.profile"));
  CHECK(one.scan_count == 9);
  CHECK(manifest_of(dir / "p1.profile.manifest.json")["status"] == "complete");
}

TEST_CASE("single-scan profile equals its histogram") {
  TempDir dir;
  pl::cmd_gen(gen_config(dir / "d", "sparse40", 1));
  const auto prof = profile_of(dir / "d", dir / "p.profile", "s");
  const Scan s = read_scan(pl::DatasetLayout::open(dir / "d").scan_path(0));
  CHECK(prof.totals == area_histogram(s, prof.partition));
  CHECK(load_profile(dir / "p.profile") == prof);
}

TEST_CASE("profile of an empty directory fails") {
  TempDir dir;
  fs::create_directories(dir / "empty" / "velodyne");
  CHECK_THROWS_AS(profile_of(dir / "empty", dir / "p.profile", "x"), DataError);
}

TEST_CASE("matched translation is the identity") {
  TempDir dir;
  pl::cmd_gen(gen_config(dir / "d", "sparse40", 3));
  profile_of(dir / "d", dir / "p.profile", "s");
  pl::TranslateConfig c;
  c.input = dir / "d";
  c.output = dir / "t";
  c.source_profile = dir / "p.profile";
  c.target_profile = dir / "p.profile";
  c.noise_enabled = false;
  const auto stats = pl::cmd_translate(c);
  CHECK(stats.density_discarded == 0);
  CHECK(tree_contents(dir / "d" / "velodyne") == tree_contents(dir / "t" / "velodyne"));
  CHECK(tree_contents(dir / "d" / "labels") == tree_contents(dir / "t" / "labels"));
  const auto map = read_index_map(dir / "t" / "maps" / "000000.idx");
  for (std::uint32_t i = 0; i < map.size(); ++i) CHECK(map[i] == i);
}

TEST_CASE("dense to sparse translation keeps 40 beams") {
  TempDir dir;
  pl::cmd_gen(gen_config(dir / "dense", "dense64", 3));
  pl::cmd_gen(gen_config(dir / "sparse", "sparse40", 3));
  profile_of(dir / "dense", dir / "dense.profile", "dense64");
  profile_of(dir / "sparse", dir / "sparse.profile", "sparse40");
  pl::TranslateConfig c;
  c.input = dir / "dense";
  c.output = dir / "t";
  c.source_profile = dir / "dense.profile";
  c.target_profile = dir / "sparse.profile";
  c.noise_enabled = false;
  c.source_beams = 64;
  c.target_beams = 40;
  const auto stats = pl::cmd_translate(c);
  CHECK(stats.scans == 3);
  CHECK(stats.beam_discarded == 3u * 24 * 120);
  CHECK(stats.out_of_area_discards == 0);

  const auto out = pl::DatasetLayout::open(dir / "t");
  const auto in = pl::DatasetLayout::open(dir / "dense");
  for (std::size_t i = 0; i < out.stems.size(); ++i) {
    const Scan s = read_scan(out.scan_path(i));
    std::vector<double> incl;
    for (const auto& p : s.points) incl.push_back(inclination_of(p));
    CHECK(testing::count_gap_clusters(incl, 1e-3) == 40);
    CHECK(kmeans_label_beams(s, 40).beam_count() == 40);
    // maps point back into the raw input
    const Scan raw = read_scan(in.scan_path(i));
    const auto map = read_index_map(dir / "t" / "maps" / (out.stems[i] + ".idx"));
    REQUIRE(map.size() == s.size());
    for (std::size_t j = 0; j < s.size(); ++j) CHECK(s.points[j] == raw.points[map[j]]);
  }
  const auto m = manifest_of(dir / "t" / pl::kManifestName);
  CHECK(m["results"]["out_of_area_discards"] == 0);
}

TEST_CASE("translate rejects a mismatched partition") {
  TempDir dir;
  pl::cmd_gen(gen_config(dir / "d", "sparse40", 1));
  profile_of(dir / "d", dir / "p.profile", "s");
  pl::TranslateConfig c;
  c.input = dir / "d";
  c.output = dir / "t";
  c.source_profile = dir / "p.profile";
  c.target_profile = dir / "p.profile";
  c.partition = RadialPartition{40, 100.0, DistanceMode::kRange3d};
  CHECK_THROWS_WITH_AS(pl::cmd_translate(c), doctest::Contains("partition mismatch"),
                       std::invalid_argument);
}

TEST_CASE("mix writes verified pairs") {
  TempDir dir;
  pl::cmd_gen(gen_config(dir / "s", "dense64", 10));
  pl::cmd_gen(gen_config(dir / "t", "sparse40", 5));
  pl::MixConfig c;
  c.source = dir / "s";
  c.target = dir / "t";
  c.output = dir / "m";
  c.verify = true;
  c.seed = 3;
  const auto stats = pl::cmd_mix(c);
  CHECK(stats.pairs == 10);
  CHECK(stats.verify_violations == 0);
  CHECK(pl::DatasetLayout::open(dir / "m" / "mix1").stems.size() == 10);
  CHECK(!fs::exists(dir / "m" / "mix2"));

  c.output = dir / "m2";
  c.both = true;
  const auto again = pl::cmd_mix(c);
  CHECK(again.pairing == stats.pairing);
  CHECK(testing::slurp(dir / "m" / "pairs.json") == testing::slurp(dir / "m2" / "pairs.json"));
  CHECK(pl::DatasetLayout::open(dir / "m2" / "mix2").stems.size() == 10);
}

TEST_CASE("self-mix conserves each pair") {
  TempDir dir;
  pl::cmd_gen(gen_config(dir / "s", "sparse40", 2));
  pl::MixConfig c;
  c.source = dir / "s";
  c.target = dir / "s";
  c.output = dir / "m";
  c.n = 2;
  c.both = true;
  c.verify = true;
  CHECK(pl::cmd_mix(c).verify_violations == 0);
}

TEST_CASE("mix input errors") {
  TempDir dir;
  pl::cmd_gen(gen_config(dir / "s", "sparse40", 1));
  fs::create_directories(dir / "empty");
  pl::MixConfig c;
  c.source = dir / "s";
  c.target = dir / "empty";
  c.output = dir / "m";
  CHECK_THROWS_AS(pl::cmd_mix(c), DataError);
  c.target = dir / "s";
  c.n = 9;
  CHECK_THROWS_AS(pl::cmd_mix(c), std::invalid_argument);
}

TEST_CASE("mix with teacher probabilities") {
  TempDir dir;
  pl::cmd_gen(gen_config(dir / "s", "sparse40", 1));
  pl::cmd_gen(gen_config(dir / "t", "sparse40", 1, 99));
  const auto layout = pl::DatasetLayout::open(dir / "t");
  const Scan t = read_scan(layout.scan_path(0));
  RowMatrix probs(t.size(), 3);
  for (std::size_t i = 0; i < t.size(); ++i) {
    probs(i, i % 3) = i % 2 ? 0.95 : 0.5;
    probs(i, (i + 1) % 3) = 1 - probs(i, i % 3);
  }
  fs::create_directories(dir / "probs");
  write_matrix(probs, dir / "probs" / (layout.stems[0] + ".prob"));
  pl::MixConfig c;
  c.source = dir / "s";
  c.target = dir / "t";
  c.output = dir / "m";
  c.target_probs = dir / "probs";
  c.verify = true;
  CHECK(pl::cmd_mix(c).verify_violations == 0);
}

TEST_CASE("pseudolabel command") {
  TempDir dir;
  fs::create_directories(dir / "p");
  write_matrix(RowMatrix(3, 2, {0.95, 0.05, 0.5, 0.5, 0.9, 0.1}), dir / "p" / "a.prob");
  pl::PseudolabelConfig c;
  c.input = dir / "p";
  c.output = dir / "o";
  CHECK(pl::cmd_pseudolabel(c) == 1);
  const auto labels = read_labels(dir / "o" / "labels" / "a.label");
  CHECK(labels.semantic == std::vector<ClassId>{1, 0, 0});
  CHECK(fs::exists(dir / "o" / "confidence" / "a.txt"));
}

TEST_CASE("report csv") {
  DensityProfile a = DensityProfile::empty({3, 30.0, DistanceMode::kRange3d}, "a");
  a.totals = {10, 20, 0};
  a.scan_count = 2;
  const auto single = csv_lines(pl::report_csv({a}, Normalization::kPerScanMean));
  REQUIRE(single.size() == 4);
  CHECK(single[0] == "area,lo_m,hi_m,mean_count");
  CHECK(single[1] == "0,0,10,5");

  const auto pair = csv_lines(pl::report_csv({a, a}, Normalization::kPerScanMean));
  CHECK(pair[0] == "area,lo_m,hi_m,mean_count_a#1,mean_count_a#2,R_a#1_to_a#2,R_a#2_to_a#1");
  for (std::size_t i = 1; i < pair.size(); ++i) CHECK(pair[i].ends_with(",1,1"));
}

TEST_CASE("dense versus sparse report") {
  TempDir dir;
  pl::cmd_gen(gen_config(dir / "dense", "dense64", 2));
  pl::cmd_gen(gen_config(dir / "sparse", "sparse40", 2));
  const auto d = profile_of(dir / "dense", dir / "dense.profile", "dense64");
  const auto s = profile_of(dir / "sparse", dir / "sparse.profile", "sparse40");
  const auto r = compute_ratios(d, s, Direction::kSourceToTarget);
  for (int i = 1; i <= 10; ++i) {
    REQUIRE(d.totals[i] > 0);
    CHECK(r.r[i] < 1.0);
  }

  pl::ReportConfig c;
  c.profiles = {dir / "dense.profile", dir / "sparse.profile"};
  c.output = dir / "r.csv";
  const std::string summary = pl::cmd_report(c);
  CHECK(summary.find("dense64") != std::string::npos);
  CHECK(csv_lines(testing::slurp(dir / "r.csv")).size() == 51);
}

TEST_CASE("replay reproduces every command") {
  TempDir dir;
  pl::cmd_gen(gen_config(dir / "dense", "dense64", 2));
  pl::cmd_gen(gen_config(dir / "sparse", "sparse40", 2));
  profile_of(dir / "dense", dir / "dense.profile", "dense64");
  profile_of(dir / "sparse", dir / "sparse.profile", "sparse40");
  pl::TranslateConfig t;
  t.input = dir / "dense";
  t.output = dir / "t";
  t.source_profile = dir / "dense.profile";
  t.target_profile = dir / "sparse.profile";
  t.source_beams = 64;
  t.target_beams = 40;
  t.seed = 5;
  pl::cmd_translate(t);
  pl::MixConfig m;
  m.source = dir / "dense";
  m.target = dir / "sparse";
  m.output = dir / "m";
  m.both = true;
  pl::cmd_mix(m);
  pl::ReportConfig r;
  r.profiles = {dir / "dense.profile", dir / "sparse.profile"};
  r.output = dir / "r.csv";
  pl::cmd_report(r);

  for (const std::string name : {"dense", "t", "m"}) {
    CHECK(pl::replay(dir / name / pl::kManifestName, dir / (name + "_replay")) != "");
    CHECK(tree_contents(dir / name, pl::kManifestName) ==
          tree_contents(dir / (name + "_replay"), pl::kManifestName));
  }
  CHECK(pl::replay(dir / "dense.profile.manifest.json", dir / "again.profile") == "profile");
  CHECK(testing::slurp(dir / "dense.profile") == testing::slurp(dir / "again.profile"));
  CHECK(pl::replay(dir / "r.csv.manifest.json", dir / "again.csv") == "report");
  CHECK(testing::slurp(dir / "r.csv") == testing::slurp(dir / "again.csv"));

  testing::TempDir bad;
  std::ofstream(bad / "x.json") << "{\"tool\": \"other\"}";
  CHECK_THROWS_AS(pl::replay(bad / "x.json", std::nullopt), FormatError);
}

}
