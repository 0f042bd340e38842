#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dgt/fields.hpp"
#include "dgt/profile.hpp"
#include "dgt/translator.hpp"

namespace dgt::pipeline {

namespace fs = std::filesystem;

inline constexpr const char* kManifestName = "manifest.json";
inline constexpr const char* kThreadsEnv = "DGT_THREADS";

// Thread count from `requested` (> 0), else $DGT_THREADS, else the number
// of hardware threads.
int resolve_threads(int requested);

// A dataset directory holds `velodyne/*.bin` and optionally
// `labels/*.label` with matching stems. A directory without a `velodyne/`
// subdirectory is read as a flat directory of `.bin` files.
struct DatasetLayout {
  fs::path scan_dir;
  std::optional<fs::path> label_dir;
  std::vector<std::string> stems;  // sorted

  static DatasetLayout open(const fs::path& root);
  fs::path scan_path(std::size_t i) const;
  std::optional<fs::path> label_path(std::size_t i) const;
};

struct GenConfig {
  std::string preset = "dense64";
  std::uint64_t count = 0;
  std::uint64_t seed = 0;
  fs::path output;
  // Overrides the preset's points per beam when > 0.
  int points_per_beam = 0;
  int threads = 0;
  bool force = false;
};

struct ProfileConfig {
  fs::path input;
  fs::path output;  // .profile file; manifest goes to <output>.manifest.json
  std::string domain;
  RadialPartition partition;
  int threads = 0;
};

enum class BeamSelect { kEven, kRandom };

struct TranslateConfig {
  fs::path input;
  fs::path output;
  fs::path source_profile;
  fs::path target_profile;
  Direction direction = Direction::kSourceToTarget;
  Normalization normalization = Normalization::kPerScanMean;
  DiscardMode mode = DiscardMode::kDensity;
  // Unset: on for s2t, off for t2s.
  std::optional<bool> noise_enabled;
  double noise_sigma = 0.01;
  NoiseAxes noise_axes = NoiseAxes::kXY;
  // Beam discard runs only when 0 < target_beams < source_beams.
  int source_beams = 0;
  int target_beams = 0;
  BeamSelect beam_select = BeamSelect::kEven;
  int kmeans_iters = 100;
  // When set, must equal the profiles' partition.
  std::optional<RadialPartition> partition;
  std::uint64_t seed = 0;
  int threads = 0;
  bool force = false;

  NoiseConfig noise() const;
};

struct TranslateStats {
  std::uint64_t scans = 0;
  std::uint64_t input_points = 0;
  std::uint64_t beam_discarded = 0;
  std::uint64_t density_discarded = 0;
  std::uint64_t out_of_area_discards = 0;
  std::vector<std::uint64_t> area_input;      // after beam discard
  std::vector<std::uint64_t> area_discarded;  // planned Del_i totals
  std::vector<double> ratios;
};

struct MixConfig {
  fs::path source;
  fs::path target;
  fs::path output;
  // Teacher probabilities (`<stem>.prob`) for target scans; when set,
  // target labels come from confidence-thresholded pseudo-labels.
  std::optional<fs::path> target_probs;
  double threshold = 0.9;
  ClassLayout layout = ClassLayout::kSemanticOnly;
  int n = 4;
  std::optional<double> phi_min;
  std::optional<double> phi_max;
  std::uint64_t pairs = 0;  // 0: one pair per source scan
  bool both = false;
  bool verify = false;
  std::uint64_t seed = 0;
  int threads = 0;
  bool force = false;
};

struct MixStats {
  std::uint64_t pairs = 0;
  std::uint64_t verify_violations = 0;
  std::vector<std::pair<std::string, std::string>> pairing;
};

struct PseudolabelConfig {
  fs::path input;  // directory of `.prob` matrices
  fs::path output;
  double threshold = 0.9;
  ClassLayout layout = ClassLayout::kSemanticOnly;
  bool force = false;
};

struct ReportConfig {
  std::vector<fs::path> profiles;
  fs::path output;  // CSV; manifest goes to <output>.manifest.json
  Normalization normalization = Normalization::kPerScanMean;
};

void cmd_gen(const GenConfig& config);
DensityProfile cmd_profile(const ProfileConfig& config);
TranslateStats cmd_translate(const TranslateConfig& config);
MixStats cmd_mix(const MixConfig& config);
std::uint64_t cmd_pseudolabel(const PseudolabelConfig& config);
// Writes the CSV and returns the text summary.
std::string cmd_report(const ReportConfig& config);

// Builds the report CSV for already-loaded profiles.
std::string report_csv(const std::vector<DensityProfile>& profiles,
                       Normalization normalization);

// Re-runs the command recorded in a manifest, optionally redirecting its
// output. Returns the command name.
std::string replay(const fs::path& manifest, const std::optional<fs::path>& output);

}  // namespace dgt::pipeline
