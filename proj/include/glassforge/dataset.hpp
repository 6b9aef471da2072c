// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "glassforge/optics.hpp"
#include "glassforge/renderer.hpp"
#include "glassforge/rng.hpp"
#include "glassforge/scene.hpp"

namespace glassforge {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double sample(SplitMix64& rng) const { return rng.uniform(lo, hi); }
};

/// Sampling ranges of the glass and scene parameters.
struct ParamRanges {
  Interval ior{1.25, 1.75};
  Interval roughness{0.0, 0.05};
  Interval thickness{0.0, 0.05};  // meters
  Interval metallic{0.0, 0.1};
  double base_color_min = 0.85;
  Interval exposure_log2{-1.0, 1.0};
  Interval glass_tilt_deg{-10.0, 10.0};

  void validate() const;
};

/// Draw order is fixed (ior, roughness, thickness, metallic, base color
/// r/g/b) so changing one interval leaves every other draw untouched.
GlassMaterial sample_material(SplitMix64& rng, const ParamRanges& ranges);

struct AssetPools {
  std::filesystem::path hdr_dir;
  std::filesystem::path srgb_dir;
  std::vector<std::filesystem::path> hdr_pool;
  std::vector<std::filesystem::path> srgb_pool;

  /// Recursively lists image files (.hdr .pic .png .jpg .jpeg), sorted.
  static AssetPools scan(const std::filesystem::path& hdr_dir,
                         const std::filesystem::path& srgb_dir);
};

/// Which pool feeds each layer. The transmission scene is drawn from the
/// sRGB pool unless transmission_hdr_probability > 0; the reflection source
/// is an HDR envmap with probability reflection_hdr_probability and a planar
/// sRGB image otherwise.
struct MixingRule {
  double reflection_hdr_probability = 0.5;
  double transmission_hdr_probability = 0.0;
};

struct SourceChoice {
  std::filesystem::path transmission;
  bool transmission_from_hdr = false;
  std::filesystem::path reflection;
  ReflectionMode reflection_mode = ReflectionMode::plane;
};

SourceChoice choose_sources(SplitMix64& rng, const AssetPools& pools, const MixingRule& rule);

/// Scale so the mean luminance is 0.18, then by 2^log2_exposure.
double exposure_scale(const LinearImage& img, double log2_exposure);

struct DatasetConfig {
  std::size_t count = 0;
  std::uint64_t master_seed = 0;
  ParamRanges ranges;
  std::filesystem::path hdr_dir;
  std::filesystem::path srgb_dir;
  MixingRule mixing;
  SceneConfig scene_template;
  RenderSettings render;
  std::filesystem::path output_dir = "dataset";
  int jobs = 0;
  bool record_timing = false;
  bool write_raw = false;
};

/// Resolves a relative asset path against GLASSFORGE_ASSET_ROOT when that
/// variable is set, otherwise against base_dir.
std::filesystem::path resolve_asset_path(const std::filesystem::path& path,
                                         const std::filesystem::path& base_dir);

DatasetConfig dataset_config_from_json(const nlohmann::json& j,
                                       const std::filesystem::path& base_dir);
nlohmann::json to_json(const DatasetConfig& config);

struct ManifestRecord {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  std::string scene_digest;
  GlassMaterial material;
  std::string transmission_source;
  std::string reflection_source;
  ReflectionMode reflection_mode = ReflectionMode::plane;
  std::string blended_path;
  std::string transmission_path;
  std::string reflection_path;
  double miss_fraction = 0.0;
  double max_shift_px = 0.0;
  double mean_reflection = 0.0;
  std::optional<double> render_ms;
};

nlohmann::json to_json(const ManifestRecord& record);
ManifestRecord manifest_record_from_json(const nlohmann::json& j);

struct DatasetResult {
  std::filesystem::path manifest;
  std::size_t requested = 0;
  std::size_t produced = 0;
  std::size_t failed = 0;

  /// More than 1% of the requested samples failed.
  bool partial_failure() const { return failed * 100 > requested; }
};

/// Everything needed to render sample `index`, before any file is read.
struct SamplePlan {
  std::uint64_t seed = 0;
  SourceChoice sources;
  GlassMaterial material;
  double glass_tilt_deg = 0.0;
  double transmission_log2_exposure = 0.0;
  double reflection_log2_exposure = 0.0;
};

SamplePlan plan_sample(const DatasetConfig& config, const AssetPools& pools, std::size_t index);

/// Renders config.count samples in parallel and writes the PNG triplets plus
/// manifest.jsonl (a header line, then one record per produced sample in
/// index order). Failed samples are logged to stderr and skipped.
DatasetResult generate_dataset(const DatasetConfig& config);

/// Five equal IoR bins over the default [1.25, 1.75] range.
std::vector<Interval> default_ior_bins();

/// Renders the same scenes once per IoR bin, each into output_dir/ior_bin_<k>.
std::vector<DatasetResult> build_ior_sweep(const DatasetConfig& config,
                                           const std::vector<Interval>& bins);

std::vector<ManifestRecord> read_manifest(const std::filesystem::path& manifest);

/// FNV-1a 64 of the text, as 16 lowercase hex digits.
std::string digest_hex(std::string_view text);

}  // namespace glassforge
