// dgt: density-guided LiDAR scan translation and scan mixing.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 data error.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "dgt/error.hpp"
#include "dgt/pipeline.hpp"
#include "dgt/synthetic.hpp"

namespace {

namespace fs = std::filesystem;
namespace pl = dgt::pipeline;

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

struct PartitionFlags {
  int m = 50;
  double r_max = 100.0;
  std::string mode = "range3d";

  void add(CLI::App* cmd) {
    cmd->add_option("--m", m, "Number of radial areas")->check(CLI::PositiveNumber);
    cmd->add_option("--r-max", r_max, "Radial extent in meters")->check(CLI::PositiveNumber);
    cmd->add_option("--distance", mode, "Area distance: range3d or planar")
        ->check(CLI::IsMember({"range3d", "planar"}));
  }
  dgt::RadialPartition get() const {
    return {m, r_max, dgt::parse_distance_mode(mode)};
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Density-guided LiDAR scan translation, scan mixing and profiling"};
  app.require_subcommand(1);

  // gen
  pl::GenConfig gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic dataset from a preset");
  gen_cmd->add_option("--preset", gen.preset, "Preset name")
      ->check(CLI::IsMember(dgt::preset_names()))
      ->required();
  gen_cmd->add_option("--count", gen.count, "Number of scans")->required();
  gen_cmd->add_option("--seed", gen.seed, "Base seed");
  gen_cmd->add_option("--out,-o", gen.output, "Output dataset directory")->required();
  gen_cmd->add_option("--points-per-beam", gen.points_per_beam,
                      "Override the preset's azimuth samples per beam");
  gen_cmd->add_option("--threads", gen.threads, "Worker threads (default: $DGT_THREADS or all cores)");
  gen_cmd->add_flag("--force", gen.force, "Overwrite a non-empty output directory");

  // profile
  pl::ProfileConfig prof;
  PartitionFlags prof_part;
  auto* prof_cmd = app.add_subcommand("profile", "Accumulate a per-area density profile");
  prof_cmd->add_option("--input,-i", prof.input, "Dataset directory")->required();
  prof_cmd->add_option("--out,-o", prof.output, "Output .profile file")->required();
  prof_cmd->add_option("--domain", prof.domain, "Domain name")->required();
  prof_part.add(prof_cmd);
  prof_cmd->add_option("--threads", prof.threads, "Worker threads");

  // translate
  pl::TranslateConfig tr;
  std::string tr_direction = "s2t";
  std::string tr_norm = "per_scan_mean";
  std::string tr_mode = "density";
  std::string tr_noise;
  std::string tr_axes = "xy";
  std::string tr_select = "even";
  PartitionFlags tr_part;
  auto* tr_cmd = app.add_subcommand("translate", "Translate a dataset toward another domain's density");
  tr_cmd->add_option("--input,-i", tr.input, "Dataset directory to translate")->required();
  tr_cmd->add_option("--out,-o", tr.output, "Output dataset directory")->required();
  tr_cmd->add_option("--source-profile", tr.source_profile, "Source domain .profile")->required();
  tr_cmd->add_option("--target-profile", tr.target_profile, "Target domain .profile")->required();
  tr_cmd->add_option("--direction", tr_direction, "s2t or t2s")
      ->check(CLI::IsMember({"s2t", "t2s"}));
  tr_cmd->add_option("--normalization", tr_norm, "per_scan_mean or totals")
      ->check(CLI::IsMember({"per_scan_mean", "totals"}));
  tr_cmd->add_option("--mode", tr_mode, "density or random_global")
      ->check(CLI::IsMember({"density", "random_global"}));
  tr_cmd->add_option("--noise", tr_noise, "on or off (default: on for s2t, off for t2s)")
      ->check(CLI::IsMember({"on", "off"}));
  tr_cmd->add_option("--noise-sigma", tr.noise_sigma, "Noise std-dev in meters")
      ->check(CLI::NonNegativeNumber);
  tr_cmd->add_option("--noise-axes", tr_axes, "xy or xyz")->check(CLI::IsMember({"xy", "xyz"}));
  tr_cmd->add_option("--source-beams", tr.source_beams, "Beam count of the input scans");
  tr_cmd->add_option("--target-beams", tr.target_beams, "Beam count to keep");
  tr_cmd->add_option("--beam-select", tr_select, "even or random")
      ->check(CLI::IsMember({"even", "random"}));
  tr_cmd->add_option("--kmeans-iters", tr.kmeans_iters, "Maximum Lloyd iterations");
  auto* tr_m = tr_cmd->add_option("--m", tr_part.m, "Expected radial area count");
  auto* tr_r = tr_cmd->add_option("--r-max", tr_part.r_max, "Expected radial extent");
  auto* tr_d = tr_cmd->add_option("--distance", tr_part.mode, "Expected distance mode")
                   ->check(CLI::IsMember({"range3d", "planar"}));
  tr_cmd->add_option("--seed", tr.seed, "Base seed");
  tr_cmd->add_option("--threads", tr.threads, "Worker threads");
  tr_cmd->add_flag("--force", tr.force, "Overwrite a non-empty output directory");

  // mix
  pl::MixConfig mix;
  std::string mix_probs;
  std::string mix_layout = "semantic";
  std::optional<double> phi_min;
  std::optional<double> phi_max;
  auto* mix_cmd = app.add_subcommand("mix", "Intertwine inclination areas of paired scans");
  mix_cmd->add_option("--source", mix.source, "Labeled source dataset")->required();
  mix_cmd->add_option("--target", mix.target, "Target dataset (labels or --target-probs)")->required();
  mix_cmd->add_option("--out,-o", mix.output, "Output directory")->required();
  mix_cmd->add_option("--target-probs", mix_probs, "Directory of teacher .prob matrices");
  mix_cmd->add_option("--th", mix.threshold, "Pseudo-label confidence threshold");
  mix_cmd->add_option("--layout", mix_layout, "Probability columns: semantic or with_unlabeled")
      ->check(CLI::IsMember({"semantic", "with_unlabeled"}));
  mix_cmd->add_option("--n", mix.n, "Inclination areas (2-8)");
  mix_cmd->add_option("--phi-min", phi_min, "Lower inclination bound (radians)");
  mix_cmd->add_option("--phi-max", phi_max, "Upper inclination bound (radians)");
  mix_cmd->add_option("--pairs", mix.pairs, "Number of pairs (default: one per source scan)");
  mix_cmd->add_flag("--both", mix.both, "Also write the complementary mix");
  mix_cmd->add_flag("--verify", mix.verify, "Brute-force check conservation and parity");
  mix_cmd->add_option("--seed", mix.seed, "Pairing seed");
  mix_cmd->add_option("--threads", mix.threads, "Worker threads");
  mix_cmd->add_flag("--force", mix.force, "Overwrite a non-empty output directory");

  // pseudolabel
  pl::PseudolabelConfig pseudo;
  std::string pseudo_layout = "semantic";
  auto* ps_cmd = app.add_subcommand("pseudolabel", "Threshold teacher probabilities into labels");
  ps_cmd->add_option("--probs", pseudo.input, "Directory of .prob matrices")->required();
  ps_cmd->add_option("--out,-o", pseudo.output, "Output directory")->required();
  ps_cmd->add_option("--th", pseudo.threshold, "Confidence threshold");
  ps_cmd->add_option("--layout", pseudo_layout, "semantic or with_unlabeled")
      ->check(CLI::IsMember({"semantic", "with_unlabeled"}));
  ps_cmd->add_flag("--force", pseudo.force, "Overwrite a non-empty output directory");

  // report
  pl::ReportConfig report;
  std::vector<std::string> report_profiles;
  std::string report_norm = "per_scan_mean";
  auto* rep_cmd = app.add_subcommand("report", "Per-area density CSV and ratio summary");
  rep_cmd->add_option("--profile,-p", report_profiles, "Profile files (1-3)")->required();
  rep_cmd->add_option("--out,-o", report.output, "Output CSV")->required();
  rep_cmd->add_option("--normalization", report_norm, "per_scan_mean or totals")
      ->check(CLI::IsMember({"per_scan_mean", "totals"}));

  // replay
  std::string replay_manifest;
  std::string replay_out;
  auto* rp_cmd = app.add_subcommand("replay", "Re-run a command from its manifest");
  rp_cmd->add_option("--manifest", replay_manifest, "Manifest file")->required();
  rp_cmd->add_option("--out,-o", replay_out, "Redirect the output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*gen_cmd) {
      pl::cmd_gen(gen);
    } else if (*prof_cmd) {
      prof.partition = prof_part.get();
      const auto profile = pl::cmd_profile(prof);
      std::cout << "profiled " << profile.scan_count << " scans, "
                << profile.total_points() << " points\n";
    } else if (*tr_cmd) {
      tr.direction = dgt::parse_direction(tr_direction);
      tr.normalization = dgt::parse_normalization(tr_norm);
      tr.mode = dgt::parse_discard_mode(tr_mode);
      if (!tr_noise.empty()) tr.noise_enabled = tr_noise == "on";
      tr.noise_axes = dgt::parse_noise_axes(tr_axes);
      tr.beam_select = tr_select == "random" ? pl::BeamSelect::kRandom : pl::BeamSelect::kEven;
      if (tr_m->count() || tr_r->count() || tr_d->count()) tr.partition = tr_part.get();
      const auto stats = pl::cmd_translate(tr);
      std::cout << "translated " << stats.scans << " scans: " << stats.input_points
                << " points in, " << stats.beam_discarded << " beam discards, "
                << stats.density_discarded << " density discards, "
                << stats.out_of_area_discards << " out-of-area discards\n";
    } else if (*mix_cmd) {
      if (!mix_probs.empty()) mix.target_probs = mix_probs;
      mix.layout = mix_layout == "semantic" ? dgt::ClassLayout::kSemanticOnly
                                            : dgt::ClassLayout::kWithUnlabeled;
      mix.phi_min = phi_min;
      mix.phi_max = phi_max;
      const auto stats = pl::cmd_mix(mix);
      std::cout << "mixed " << stats.pairs << " pairs";
      if (mix.verify) std::cout << ", verify violations: " << stats.verify_violations;
      std::cout << '\n';
    } else if (*ps_cmd) {
      pseudo.layout = pseudo_layout == "semantic" ? dgt::ClassLayout::kSemanticOnly
                                                  : dgt::ClassLayout::kWithUnlabeled;
      const auto files = pl::cmd_pseudolabel(pseudo);
      std::cout << "pseudo-labeled " << files << " files\n";
    } else if (*rep_cmd) {
      for (const auto& p : report_profiles) report.profiles.emplace_back(p);
      report.normalization = dgt::parse_normalization(report_norm);
      std::cout << pl::cmd_report(report);
    } else if (*rp_cmd) {
      std::optional<fs::path> out;
      if (!replay_out.empty()) out = replay_out;
      const auto command = pl::replay(replay_manifest, out);
      std::cout << "replayed " << command << '\n';
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const dgt::DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return 0;
}
