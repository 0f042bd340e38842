#include "dgt/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "dgt/beam_ops.hpp"
#include "dgt/error.hpp"
#include "dgt/lasermix.hpp"
#include "dgt/matrix_io.hpp"
#include "dgt/profile_io.hpp"
#include "dgt/pseudo_label.hpp"
#include "dgt/rng.hpp"
#include "dgt/scan_io.hpp"
#include "dgt/synthetic.hpp"

namespace dgt::pipeline {

using json = nlohmann::json;

namespace {

constexpr int kManifestFormat = 1;

// Runs fn(i) for i in [0, count) on up to `threads` workers. The exception
// of the lowest failing index is rethrown so failures are reported
// deterministically.
template <typename Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
  const auto workers = static_cast<std::size_t>(
      std::clamp<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), 1,
                              std::max<std::size_t>(count, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::size_t error_index = count;
  std::exception_ptr error;
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (i < error_index) {
          error_index = i;
          error = std::current_exception();
        }
      }
    }
  };
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  pool.clear();
  if (error) std::rethrow_exception(error);
}

std::string stem_name(std::uint64_t i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%06llu", static_cast<unsigned long long>(i));
  return buf;
}

std::string path_string(const fs::path& p) {
  if (p.empty()) return {};
  return fs::absolute(p).lexically_normal().string();
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

json read_json(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_manifest(const fs::path& path, const std::string& command,
                    const json& config, const json& results, bool complete) {
  json manifest;
  manifest["tool"] = "dgt";
  manifest["format"] = kManifestFormat;
  manifest["command"] = command;
  manifest["status"] = complete ? "complete" : "running";
  manifest["config"] = config;
  if (!results.is_null()) manifest["results"] = results;
  write_text(path, manifest.dump(2) + "\n");
}

// Creates `dir`. An existing non-empty directory is an error unless `force`
// is set, in which case only the entries this tool writes are removed.
void prepare_output_dir(const fs::path& dir, bool force,
                        std::initializer_list<const char*> owned) {
  if (fs::exists(dir)) {
    if (!fs::is_directory(dir)) {
      throw std::invalid_argument("output '" + dir.string() + "' is not a directory");
    }
    if (!fs::is_empty(dir)) {
      if (!force) {
        throw std::invalid_argument("output directory '" + dir.string() +
                                    "' is not empty (pass --force to overwrite)");
      }
      for (const char* entry : owned) fs::remove_all(dir / entry);
      fs::remove(dir / kManifestName);
    }
  }
  fs::create_directories(dir);
}

json partition_json(const RadialPartition& p) {
  return {{"m", p.m}, {"r_max", p.r_max}, {"mode", std::string(to_string(p.mode))}};
}

RadialPartition partition_from_json(const json& j) {
  RadialPartition p;
  p.m = j.at("m").get<int>();
  p.r_max = j.at("r_max").get<double>();
  p.mode = parse_distance_mode(j.at("mode").get<std::string>());
  return p;
}

std::string to_string(ClassLayout layout) {
  return layout == ClassLayout::kSemanticOnly ? "semantic" : "with_unlabeled";
}

ClassLayout parse_layout(const std::string& text) {
  if (text == "semantic") return ClassLayout::kSemanticOnly;
  if (text == "with_unlabeled") return ClassLayout::kWithUnlabeled;
  throw std::invalid_argument("unknown class layout '" + text + "'");
}

std::string to_string(BeamSelect s) { return s == BeamSelect::kEven ? "even" : "random"; }

BeamSelect parse_beam_select(const std::string& text) {
  if (text == "even") return BeamSelect::kEven;
  if (text == "random") return BeamSelect::kRandom;
  throw std::invalid_argument("unknown beam selection '" + text + "'");
}

json spec_json(const SyntheticSceneSpec& s) {
  return {{"name", s.name},
          {"beam_count", s.beam_count},
          {"inclinations", s.inclinations},
          {"points_per_beam", s.points_per_beam},
          {"azimuth_jitter", s.azimuth_jitter},
          {"xy_noise", s.xy_noise},
          {"dropout_rate_by_area", s.dropout_rate_by_area},
          {"max_range", s.max_range},
          {"sensor_height", s.sensor_height},
          {"ground_classes", s.ground_classes},
          {"object_classes", s.object_classes},
          {"box_count", s.box_count},
          {"cylinder_count", s.cylinder_count},
          {"wall_min_radius", s.wall_min_radius},
          {"wall_max_radius", s.wall_max_radius},
          {"seed", s.seed}};
}

// --- config <-> json --------------------------------------------------------

json to_json(const GenConfig& c) {
  return {{"preset", c.preset},         {"count", c.count},
          {"seed", c.seed},             {"output", path_string(c.output)},
          {"points_per_beam", c.points_per_beam}, {"threads", c.threads},
          {"force", c.force}};
}

GenConfig gen_from_json(const json& j) {
  GenConfig c;
  c.preset = j.at("preset").get<std::string>();
  c.count = j.at("count").get<std::uint64_t>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.output = j.at("output").get<std::string>();
  c.points_per_beam = j.at("points_per_beam").get<int>();
  c.threads = j.at("threads").get<int>();
  c.force = j.at("force").get<bool>();
  return c;
}

json to_json(const ProfileConfig& c) {
  return {{"input", path_string(c.input)},
          {"output", path_string(c.output)},
          {"domain", c.domain},
          {"partition", partition_json(c.partition)},
          {"threads", c.threads}};
}

ProfileConfig profile_from_json(const json& j) {
  ProfileConfig c;
  c.input = j.at("input").get<std::string>();
  c.output = j.at("output").get<std::string>();
  c.domain = j.at("domain").get<std::string>();
  c.partition = partition_from_json(j.at("partition"));
  c.threads = j.at("threads").get<int>();
  return c;
}

json to_json(const TranslateConfig& c) {
  json j = {{"input", path_string(c.input)},
            {"output", path_string(c.output)},
            {"source_profile", path_string(c.source_profile)},
            {"target_profile", path_string(c.target_profile)},
            {"direction", std::string(to_string(c.direction))},
            {"normalization", std::string(to_string(c.normalization))},
            {"mode", std::string(to_string(c.mode))},
            {"noise_enabled", c.noise().enabled},
            {"noise_sigma", c.noise_sigma},
            {"noise_axes", std::string(to_string(c.noise_axes))},
            {"source_beams", c.source_beams},
            {"target_beams", c.target_beams},
            {"beam_select", to_string(c.beam_select)},
            {"kmeans_iters", c.kmeans_iters},
            {"seed", c.seed},
            {"threads", c.threads},
            {"force", c.force}};
  j["partition"] = c.partition ? partition_json(*c.partition) : json(nullptr);
  return j;
}

TranslateConfig translate_from_json(const json& j) {
  TranslateConfig c;
  c.input = j.at("input").get<std::string>();
  c.output = j.at("output").get<std::string>();
  c.source_profile = j.at("source_profile").get<std::string>();
  c.target_profile = j.at("target_profile").get<std::string>();
  c.direction = parse_direction(j.at("direction").get<std::string>());
  c.normalization = parse_normalization(j.at("normalization").get<std::string>());
  c.mode = parse_discard_mode(j.at("mode").get<std::string>());
  c.noise_enabled = j.at("noise_enabled").get<bool>();
  c.noise_sigma = j.at("noise_sigma").get<double>();
  c.noise_axes = parse_noise_axes(j.at("noise_axes").get<std::string>());
  c.source_beams = j.at("source_beams").get<int>();
  c.target_beams = j.at("target_beams").get<int>();
  c.beam_select = parse_beam_select(j.at("beam_select").get<std::string>());
  c.kmeans_iters = j.at("kmeans_iters").get<int>();
  if (!j.at("partition").is_null()) c.partition = partition_from_json(j.at("partition"));
  c.seed = j.at("seed").get<std::uint64_t>();
  c.threads = j.at("threads").get<int>();
  c.force = j.at("force").get<bool>();
  return c;
}

json to_json(const MixConfig& c) {
  json j = {{"source", path_string(c.source)},
            {"target", path_string(c.target)},
            {"output", path_string(c.output)},
            {"threshold", c.threshold},
            {"layout", to_string(c.layout)},
            {"n", c.n},
            {"pairs", c.pairs},
            {"both", c.both},
            {"verify", c.verify},
            {"seed", c.seed},
            {"threads", c.threads},
            {"force", c.force}};
  j["target_probs"] = c.target_probs ? json(path_string(*c.target_probs)) : json(nullptr);
  j["phi_min"] = c.phi_min ? json(*c.phi_min) : json(nullptr);
  j["phi_max"] = c.phi_max ? json(*c.phi_max) : json(nullptr);
  return j;
}

MixConfig mix_from_json(const json& j) {
  MixConfig c;
  c.source = j.at("source").get<std::string>();
  c.target = j.at("target").get<std::string>();
  c.output = j.at("output").get<std::string>();
  if (!j.at("target_probs").is_null()) c.target_probs = j.at("target_probs").get<std::string>();
  c.threshold = j.at("threshold").get<double>();
  c.layout = parse_layout(j.at("layout").get<std::string>());
  c.n = j.at("n").get<int>();
  if (!j.at("phi_min").is_null()) c.phi_min = j.at("phi_min").get<double>();
  if (!j.at("phi_max").is_null()) c.phi_max = j.at("phi_max").get<double>();
  c.pairs = j.at("pairs").get<std::uint64_t>();
  c.both = j.at("both").get<bool>();
  c.verify = j.at("verify").get<bool>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.threads = j.at("threads").get<int>();
  c.force = j.at("force").get<bool>();
  return c;
}

json to_json(const PseudolabelConfig& c) {
  return {{"input", path_string(c.input)},
          {"output", path_string(c.output)},
          {"threshold", c.threshold},
          {"layout", to_string(c.layout)},
          {"force", c.force}};
}

PseudolabelConfig pseudolabel_from_json(const json& j) {
  PseudolabelConfig c;
  c.input = j.at("input").get<std::string>();
  c.output = j.at("output").get<std::string>();
  c.threshold = j.at("threshold").get<double>();
  c.layout = parse_layout(j.at("layout").get<std::string>());
  c.force = j.at("force").get<bool>();
  return c;
}

json to_json(const ReportConfig& c) {
  json profiles = json::array();
  for (const auto& p : c.profiles) profiles.push_back(path_string(p));
  return {{"profiles", profiles},
          {"output", path_string(c.output)},
          {"normalization", std::string(to_string(c.normalization))}};
}

ReportConfig report_from_json(const json& j) {
  ReportConfig c;
  for (const auto& p : j.at("profiles")) c.profiles.emplace_back(p.get<std::string>());
  c.output = j.at("output").get<std::string>();
  c.normalization = parse_normalization(j.at("normalization").get<std::string>());
  return c;
}

fs::path sidecar_manifest(const fs::path& output) {
  return fs::path(output.string() + ".manifest.json");
}

Scan load_dataset_scan(const DatasetLayout& layout, std::size_t i) {
  Scan scan = read_scan(layout.scan_path(i));
  if (auto label_path = layout.label_path(i)) {
    try {
      attach_labels(scan, read_labels(*label_path));
    } catch (const FormatError&) {
      throw;
    } catch (const DataError& e) {
      throw DataError(label_path->string() + ": " + e.what());
    }
  }
  return scan;
}

void write_dataset_scan(const fs::path& root, const std::string& stem,
                        const Scan& scan) {
  write_scan(scan, root / "velodyne" / (stem + ".bin"));
  if (scan.labels) write_labels(scan, root / "labels" / (stem + ".label"));
}

}  // namespace

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv(kThreadsEnv)) {
    int value = 0;
    const std::string_view text(env);
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec == std::errc{} && ptr == text.data() + text.size() && value > 0) return value;
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

DatasetLayout DatasetLayout::open(const fs::path& root) {
  if (!fs::is_directory(root)) {
    throw IoError("dataset directory '" + root.string() + "' does not exist");
  }
  DatasetLayout layout;
  layout.scan_dir = fs::is_directory(root / "velodyne") ? root / "velodyne" : root;
  if (fs::is_directory(root / "labels")) layout.label_dir = root / "labels";
  for (const auto& entry : fs::directory_iterator(layout.scan_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".bin") {
      layout.stems.push_back(entry.path().stem().string());
    }
  }
  std::sort(layout.stems.begin(), layout.stems.end());
  return layout;
}

fs::path DatasetLayout::scan_path(std::size_t i) const {
  return scan_dir / (stems.at(i) + ".bin");
}

std::optional<fs::path> DatasetLayout::label_path(std::size_t i) const {
  if (!label_dir) return std::nullopt;
  auto path = *label_dir / (stems.at(i) + ".label");
  if (!fs::exists(path)) return std::nullopt;
  return path;
}

NoiseConfig TranslateConfig::noise() const {
  NoiseConfig cfg;
  cfg.enabled = noise_enabled.value_or(direction == Direction::kSourceToTarget);
  cfg.sigma = noise_sigma;
  cfg.axes = noise_axes;
  return cfg;
}

// --- gen ------------------------------------------------------------------

void cmd_gen(const GenConfig& config) {
  SyntheticSceneSpec spec = preset(config.preset);
  if (config.points_per_beam > 0) spec.points_per_beam = config.points_per_beam;
  spec.seed = config.seed;
  spec.validate();

  prepare_output_dir(config.output, config.force, {"velodyne", "labels"});
  fs::create_directories(config.output / "velodyne");
  fs::create_directories(config.output / "labels");
  const json cfg = to_json(config);
  const fs::path manifest = config.output / kManifestName;
  write_manifest(manifest, "gen", cfg, nullptr, false);

  std::vector<std::uint64_t> points(config.count, 0);
  parallel_for(config.count, resolve_threads(config.threads), [&](std::size_t i) {
    const Scan scan = generate_synthetic_scan(spec, i);
    write_dataset_scan(config.output, stem_name(i), scan);
    points[i] = scan.size();
  });

  json results = {{"spec", spec_json(spec)},
                  {"scan_seeds", "derive_seed(spec.seed, scan_index)"},
                  {"scans", config.count},
                  {"points", std::accumulate(points.begin(), points.end(), std::uint64_t{0})}};
  write_manifest(manifest, "gen", cfg, results, true);
}

// --- profile --------------------------------------------------------------

DensityProfile cmd_profile(const ProfileConfig& config) {
  config.partition.validate();
  const DatasetLayout layout = DatasetLayout::open(config.input);
  if (layout.stems.empty()) {
    throw DataError("no scans found in '" + config.input.string() + "'");
  }
  if (config.output.has_parent_path()) fs::create_directories(config.output.parent_path());
  const json cfg = to_json(config);
  const fs::path manifest = sidecar_manifest(config.output);
  write_manifest(manifest, "profile", cfg, nullptr, false);

  const std::size_t n = layout.stems.size();
  const auto chunks = static_cast<std::size_t>(
      std::min<std::size_t>(static_cast<std::size_t>(resolve_threads(config.threads)), n));
  std::vector<DensityProfile> partial(
      chunks, DensityProfile::empty(config.partition, config.domain));
  parallel_for(chunks, static_cast<int>(chunks), [&](std::size_t c) {
    const std::size_t begin = c * n / chunks;
    const std::size_t end = (c + 1) * n / chunks;
    for (std::size_t i = begin; i < end; ++i) {
      add_scan(partial[c], read_scan(layout.scan_path(i)));
    }
  });
  DensityProfile profile = partial.front();
  for (std::size_t c = 1; c < chunks; ++c) profile = merge_profiles(profile, partial[c]);

  save_profile(profile, config.output);
  write_manifest(manifest, "profile", cfg,
                 {{"scans", profile.scan_count}, {"points", profile.total_points()}},
                 true);
  return profile;
}

// --- translate ------------------------------------------------------------

TranslateStats cmd_translate(const TranslateConfig& config) {
  if (config.kmeans_iters < 1) throw std::invalid_argument("kmeans iterations must be >= 1");
  if (config.target_beams < 0 || config.source_beams < 0) {
    throw std::invalid_argument("beam counts must be >= 0");
  }
  const NoiseConfig noise = config.noise();
  noise.validate();
  const DensityProfile src = load_profile(config.source_profile);
  const DensityProfile tgt = load_profile(config.target_profile);
  if (!(src.partition == tgt.partition)) {
    throw std::invalid_argument("profile partition mismatch between '" +
                                config.source_profile.string() + "' and '" +
                                config.target_profile.string() + "'");
  }
  if (config.partition && !(*config.partition == src.partition)) {
    throw std::invalid_argument("profile partition mismatch vs config");
  }
  const RadialPartition partition = src.partition;
  const TranslationRatios ratios =
      compute_ratios(src, tgt, config.direction, config.normalization);

  const DatasetLayout layout = DatasetLayout::open(config.input);
  prepare_output_dir(config.output, config.force, {"velodyne", "labels", "maps"});
  for (const char* sub : {"velodyne", "labels", "maps"}) {
    fs::create_directories(config.output / sub);
  }
  const json cfg = to_json(config);
  const fs::path manifest = config.output / kManifestName;
  write_manifest(manifest, "translate", cfg, nullptr, false);

  const bool beam_discard = config.target_beams > 0 && config.source_beams > 0 &&
                            config.target_beams < config.source_beams;
  struct PerScan {
    std::uint64_t input = 0;
    std::uint64_t beam_discarded = 0;
    std::vector<std::uint64_t> area_counts;
    std::vector<std::uint64_t> discard_counts;
    std::uint64_t discarded = 0;
    std::uint64_t violations = 0;
  };
  std::vector<PerScan> per_scan(layout.stems.size());

  parallel_for(layout.stems.size(), resolve_threads(config.threads), [&](std::size_t i) {
    const std::uint64_t scan_seed = derive_seed(config.seed, i);
    Scan scan = load_dataset_scan(layout, i);
    PerScan& stats = per_scan[i];
    stats.input = scan.size();

    std::vector<std::uint32_t> beam_map;
    if (beam_discard) {
      const BeamModel model =
          kmeans_label_beams(scan, config.source_beams, config.kmeans_iters, scan_seed);
      const std::vector<int> kept =
          config.beam_select == BeamSelect::kEven
              ? select_beams_even(model, config.target_beams)
              : select_beams_random(model, config.target_beams, derive_seed(scan_seed, 2));
      BeamDiscardResult reduced = discard_beams(scan, model, kept);
      stats.beam_discarded = scan.size() - reduced.scan.size();
      scan = std::move(reduced.scan);
      beam_map = std::move(reduced.kept_index_map);
    }

    TranslationResult result =
        translate_scan(scan, partition, ratios, noise, config.mode, scan_seed);
    stats.area_counts = result.plan.area_counts;
    stats.discard_counts = result.plan.discard_counts;
    stats.discarded = result.discarded.size();
    stats.violations = count_out_of_area_discards(scan, partition, ratios, result);

    std::vector<std::uint32_t> map = std::move(result.kept_index_map);
    if (beam_discard) {
      for (auto& idx : map) idx = beam_map[idx];
    }
    const std::string& stem = layout.stems[i];
    write_dataset_scan(config.output, stem, result.scan);
    write_index_map(map, config.output / "maps" / (stem + ".idx"));
  });

  TranslateStats stats;
  stats.scans = per_scan.size();
  stats.area_input.assign(static_cast<std::size_t>(partition.m), 0);
  stats.area_discarded.assign(static_cast<std::size_t>(partition.m), 0);
  stats.ratios = ratios.r;
  for (const auto& s : per_scan) {
    stats.input_points += s.input;
    stats.beam_discarded += s.beam_discarded;
    stats.density_discarded += s.discarded;
    stats.out_of_area_discards += s.violations;
    for (std::size_t a = 0; a < s.area_counts.size(); ++a) {
      stats.area_input[a] += s.area_counts[a];
      stats.area_discarded[a] += s.discard_counts[a];
    }
  }
  json results = {{"scans", stats.scans},
                  {"input_points", stats.input_points},
                  {"beam_discard", beam_discard},
                  {"beam_discarded", stats.beam_discarded},
                  {"density_discarded", stats.density_discarded},
                  {"out_of_area_discards", stats.out_of_area_discards},
                  {"ratios", stats.ratios},
                  {"area_input", stats.area_input},
                  {"area_discarded", stats.area_discarded}};
  write_manifest(manifest, "translate", cfg, results, true);
  return stats;
}

// --- mix ------------------------------------------------------------------

namespace {

void write_provenance(const std::vector<Provenance>& prov, const fs::path& path) {
  std::vector<std::byte> bytes(prov.size());
  for (std::size_t i = 0; i < prov.size(); ++i) {
    bytes[i] = static_cast<std::byte>(prov[i]);
  }
  write_file_bytes(bytes, path);
}

}  // namespace

MixStats cmd_mix(const MixConfig& config) {
  if (config.n < 2 || config.n > 8) {
    throw std::invalid_argument("inclination area count n must lie in [2, 8]");
  }
  if (config.phi_min.has_value() != config.phi_max.has_value()) {
    throw std::invalid_argument("--phi-min and --phi-max must be given together");
  }
  if (!(config.threshold >= 0.0 && config.threshold <= 1.0)) {
    throw std::invalid_argument("threshold must lie in [0, 1]");
  }
  const DatasetLayout src = DatasetLayout::open(config.source);
  const DatasetLayout tgt = DatasetLayout::open(config.target);
  if (src.stems.empty()) throw DataError("empty input directory '" + config.source.string() + "'");
  if (tgt.stems.empty()) throw DataError("empty input directory '" + config.target.string() + "'");

  prepare_output_dir(config.output, config.force, {"mix1", "mix2", "pairs.json"});
  std::vector<const char*> mixes = {"mix1"};
  if (config.both) mixes.push_back("mix2");
  for (const char* mix : mixes) {
    for (const char* sub : {"velodyne", "labels", "provenance"}) {
      fs::create_directories(config.output / mix / sub);
    }
  }

  // Pair i takes source scan i (cycling) and target scan perm[i % T].
  const std::uint64_t pair_count = config.pairs > 0 ? config.pairs : src.stems.size();
  std::vector<std::size_t> perm(tgt.stems.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng(config.seed);
  for (std::size_t i = perm.size(); i > 1; --i) {
    std::swap(perm[i - 1], perm[rng.uniform_below(i)]);
  }
  MixStats stats;
  stats.pairs = pair_count;
  json pairing = json::array();
  for (std::uint64_t i = 0; i < pair_count; ++i) {
    const auto& s = src.stems[i % src.stems.size()];
    const auto& t = tgt.stems[perm[i % perm.size()]];
    stats.pairing.emplace_back(s, t);
    pairing.push_back({{"pair", stem_name(i)}, {"source", s}, {"target", t}});
  }
  const json cfg = to_json(config);
  const fs::path manifest = config.output / kManifestName;
  write_text(config.output / "pairs.json", pairing.dump(2) + "\n");
  write_manifest(manifest, "mix", cfg, {{"pairing", pairing}}, false);

  std::vector<std::uint64_t> violations(pair_count, 0);
  parallel_for(pair_count, resolve_threads(config.threads), [&](std::size_t i) {
    const std::size_t si = i % src.stems.size();
    const std::size_t ti = perm[i % perm.size()];
    Scan source = load_dataset_scan(src, si);
    if (!source.has_labels()) {
      throw DataError("unlabeled input scan '" + src.scan_path(si).string() + "'");
    }
    Scan target = read_scan(tgt.scan_path(ti));
    if (config.target_probs) {
      const fs::path prob_path = *config.target_probs / (tgt.stems[ti] + ".prob");
      const ProbabilityField probs(read_matrix(prob_path), config.layout);
      if (probs.rows() != target.size()) {
        throw DataError(prob_path.string() + ": " + std::to_string(probs.rows()) +
                        " probability rows for " + std::to_string(target.size()) +
                        " points");
      }
      target.labels = generate_pseudo_labels(probs, config.threshold).classes;
    } else if (auto label_path = tgt.label_path(ti)) {
      attach_labels(target, read_labels(*label_path));
    } else {
      throw DataError("unlabeled input scan '" + tgt.scan_path(ti).string() + "'");
    }

    const InclinationPartition part =
        config.phi_min ? InclinationPartition{config.n, *config.phi_min, *config.phi_max}
                       : default_inclination_bounds(source, target, config.n);
    part.validate();
    const MixResult mix = laser_mix(source, target, part);
    const std::string stem = stem_name(i);
    write_dataset_scan(config.output / "mix1", stem, mix.mix1);
    write_provenance(mix.provenance1, config.output / "mix1" / "provenance" / (stem + ".prov"));
    if (config.both) {
      write_dataset_scan(config.output / "mix2", stem, mix.mix2);
      write_provenance(mix.provenance2,
                       config.output / "mix2" / "provenance" / (stem + ".prov"));
    }
    if (config.verify) violations[i] = verify_mix(source, target, part, mix);
  });

  stats.verify_violations =
      std::accumulate(violations.begin(), violations.end(), std::uint64_t{0});
  json results = {{"pairing", pairing}, {"pairs", pair_count}};
  if (config.verify) results["verify_violations"] = stats.verify_violations;
  write_manifest(manifest, "mix", cfg, results, true);
  if (stats.verify_violations > 0) {
    throw DataError("mix verification failed with " +
                    std::to_string(stats.verify_violations) + " violations");
  }
  return stats;
}

// --- pseudolabel ----------------------------------------------------------

std::uint64_t cmd_pseudolabel(const PseudolabelConfig& config) {
  if (!(config.threshold >= 0.0 && config.threshold <= 1.0)) {
    throw std::invalid_argument("threshold must lie in [0, 1]");
  }
  if (!fs::is_directory(config.input)) {
    throw IoError("probability directory '" + config.input.string() + "' does not exist");
  }
  std::vector<std::string> stems;
  for (const auto& entry : fs::directory_iterator(config.input)) {
    if (entry.is_regular_file() && entry.path().extension() == ".prob") {
      stems.push_back(entry.path().stem().string());
    }
  }
  std::sort(stems.begin(), stems.end());

  prepare_output_dir(config.output, config.force, {"labels", "confidence"});
  fs::create_directories(config.output / "labels");
  fs::create_directories(config.output / "confidence");
  const json cfg = to_json(config);
  const fs::path manifest = config.output / kManifestName;
  write_manifest(manifest, "pseudolabel", cfg, nullptr, false);

  std::uint64_t accepted = 0;
  std::uint64_t total = 0;
  for (const auto& stem : stems) {
    const ProbabilityField probs(read_matrix(config.input / (stem + ".prob")), config.layout);
    const PseudoLabels pseudo = generate_pseudo_labels(probs, config.threshold);
    LabelData labels;
    labels.semantic = pseudo.classes;
    labels.instance.assign(pseudo.size(), 0);
    write_labels(labels, config.output / "labels" / (stem + ".label"));
    std::string text;
    for (double c : pseudo.confidence) {
      text += format_double(c);
      text += '\n';
    }
    write_text(config.output / "confidence" / (stem + ".txt"), text);
    total += pseudo.size();
    accepted += static_cast<std::uint64_t>(std::count_if(
        pseudo.classes.begin(), pseudo.classes.end(), [](ClassId k) { return k != kUnlabeled; }));
  }
  write_manifest(manifest, "pseudolabel", cfg,
                 {{"files", stems.size()}, {"points", total}, {"accepted", accepted}}, true);
  return stems.size();
}

// --- report ---------------------------------------------------------------

std::string report_csv(const std::vector<DensityProfile>& profiles,
                       Normalization normalization) {
  if (profiles.empty()) throw std::invalid_argument("report needs at least one profile");
  for (const auto& p : profiles) {
    if (!(p.partition == profiles.front().partition)) {
      throw std::invalid_argument("profile partition mismatch");
    }
  }
  // Column names; repeated domain names get a numeric suffix.
  std::vector<std::string> names;
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    std::string name = profiles[i].domain_name;
    if (std::count_if(profiles.begin(), profiles.end(), [&](const DensityProfile& p) {
          return p.domain_name == name;
        }) > 1) {
      name += "#" + std::to_string(i + 1);
    }
    names.push_back(name);
  }
  struct RatioColumn {
    std::string name;
    TranslationRatios ratios;
  };
  std::vector<RatioColumn> ratio_columns;
  for (std::size_t a = 0; a < profiles.size(); ++a) {
    for (std::size_t b = a + 1; b < profiles.size(); ++b) {
      ratio_columns.push_back({"R_" + names[a] + "_to_" + names[b],
                               compute_ratios(profiles[a], profiles[b],
                                              Direction::kSourceToTarget, normalization)});
      ratio_columns.push_back({"R_" + names[b] + "_to_" + names[a],
                               compute_ratios(profiles[a], profiles[b],
                                              Direction::kTargetToSource, normalization)});
    }
  }

  const RadialPartition& part = profiles.front().partition;
  std::ostringstream out;
  out << "area,lo_m,hi_m";
  if (profiles.size() == 1) {
    out << ",mean_count";
  } else {
    for (const auto& name : names) out << ",mean_count_" << name;
  }
  for (const auto& col : ratio_columns) out << ',' << col.name;
  out << '\n';
  for (int a = 0; a < part.m; ++a) {
    out << a << ',' << format_double(part.bin_width() * a) << ','
        << format_double(part.bin_width() * (a + 1));
    for (const auto& p : profiles) out << ',' << format_double(p.mean_count(a));
    for (const auto& col : ratio_columns) out << ',' << format_double(col.ratios.r[a]);
    out << '\n';
  }
  return out.str();
}

std::string cmd_report(const ReportConfig& config) {
  std::vector<DensityProfile> profiles;
  for (const auto& path : config.profiles) profiles.push_back(load_profile(path));
  if (profiles.empty() || profiles.size() > 3) {
    throw std::invalid_argument("report takes between 1 and 3 profiles");
  }
  const std::string csv = report_csv(profiles, config.normalization);
  if (config.output.has_parent_path()) fs::create_directories(config.output.parent_path());
  const json cfg = to_json(config);
  const fs::path manifest = sidecar_manifest(config.output);
  write_manifest(manifest, "report", cfg, nullptr, false);
  write_text(config.output, csv);

  std::ostringstream summary;
  const RadialPartition& part = profiles.front().partition;
  summary << "partition: m=" << part.m << " r_max=" << format_double(part.r_max)
          << " mode=" << to_string(part.mode) << '\n';
  for (const auto& p : profiles) {
    const double per_scan = static_cast<double>(p.total_points()) /
                            static_cast<double>(std::max<std::uint64_t>(p.scan_count, 1));
    // Densest area and the last area that still holds points.
    const auto peak = static_cast<int>(
        std::max_element(p.totals.begin(), p.totals.end()) - p.totals.begin());
    int last = part.m - 1;
    while (last > 0 && p.totals[last] == 0) --last;
    summary << p.domain_name << ": scans=" << p.scan_count
            << " mean_points_per_scan=" << format_double(per_scan)
            << " densest_area=" << peak << " last_populated_area=" << last << '\n';
  }
  for (std::size_t a = 0; a < profiles.size(); ++a) {
    for (std::size_t b = 0; b < profiles.size(); ++b) {
      if (a == b) continue;
      const auto r = compute_ratios(profiles[a], profiles[b], Direction::kSourceToTarget,
                                    config.normalization);
      const auto below = std::count_if(r.r.begin(), r.r.end(), [](double v) { return v < 1.0; });
      const double mean = std::accumulate(r.r.begin(), r.r.end(), 0.0) / part.m;
      summary << "R " << profiles[a].domain_name << " -> " << profiles[b].domain_name
              << ": areas_below_1=" << below << " mean_r=" << format_double(mean) << '\n';
    }
  }
  write_manifest(manifest, "report", cfg, {{"rows", part.m}}, true);
  return summary.str();
}

// --- replay ---------------------------------------------------------------

std::string replay(const fs::path& manifest_path, const std::optional<fs::path>& output) {
  const json manifest = read_json(manifest_path);
  if (manifest.value("tool", "") != "dgt" || manifest.value("format", 0) != kManifestFormat) {
    throw FormatError(manifest_path.string() + ": not a dgt manifest");
  }
  const std::string command = manifest.at("command").get<std::string>();
  const json& cfg = manifest.at("config");
  try {
    if (command == "gen") {
      auto c = gen_from_json(cfg);
      if (output) c.output = *output;
      cmd_gen(c);
    } else if (command == "profile") {
      auto c = profile_from_json(cfg);
      if (output) c.output = *output;
      cmd_profile(c);
    } else if (command == "translate") {
      auto c = translate_from_json(cfg);
      if (output) c.output = *output;
      cmd_translate(c);
    } else if (command == "mix") {
      auto c = mix_from_json(cfg);
      if (output) c.output = *output;
      cmd_mix(c);
    } else if (command == "pseudolabel") {
      auto c = pseudolabel_from_json(cfg);
      if (output) c.output = *output;
      cmd_pseudolabel(c);
    } else if (command == "report") {
      auto c = report_from_json(cfg);
      if (output) c.output = *output;
      cmd_report(c);
    } else {
      throw FormatError(manifest_path.string() + ": unknown command '" + command + "'");
    }
  } catch (const json::exception& e) {
    throw FormatError(manifest_path.string() + ": " + e.what());
  }
  return command;
}

}  // namespace dgt::pipeline
