// SPDX-License-Identifier: Apache-2.0
#include "glassforge/dataset.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include "glassforge/image_io.hpp"
#include "glassforge/parallel.hpp"

namespace glassforge {

namespace fs = std::filesystem;

namespace {

void check_interval(const Interval& iv, double lo, double hi, const char* name) {
  if (!(iv.lo <= iv.hi)) throw Error(std::string("ranges.") + name + ": lower bound above upper");
  if (iv.lo < lo || iv.hi > hi)
    throw Error(std::string("ranges.") + name + " must lie within [" + std::to_string(lo) + ", " +
                std::to_string(hi) + "]");
}

Interval interval_from_json(const nlohmann::json& j, const Interval& fallback) {
  if (j.is_null()) return fallback;
  if (!j.is_array() || j.size() != 2) throw Error("interval must be a two-element array");
  return {j[0].get<double>(), j[1].get<double>()};
}

nlohmann::json interval_json(const Interval& iv) { return nlohmann::json::array({iv.lo, iv.hi}); }

bool is_image_file(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg" || ext == ".hdr" || ext == ".pic";
}

std::vector<fs::path> list_images(const fs::path& dir) {
  std::vector<fs::path> out;
  if (dir.empty() || !fs::is_directory(dir)) return out;
  for (const auto& entry : fs::recursive_directory_iterator(dir))
    if (entry.is_regular_file() && is_image_file(entry.path())) out.push_back(entry.path());
  std::sort(out.begin(), out.end());
  return out;
}

std::string pool_relative(const fs::path& p, const fs::path& root, const char* pool) {
  return std::string(pool) + "/" + p.lexically_relative(root).generic_string();
}

std::string frame_name(std::size_t index, const char* layer) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%06zu_%s", index, layer);
  return buf;
}

const char* mode_name(ReflectionMode m) { return m == ReflectionMode::envmap ? "envmap" : "plane"; }

nlohmann::json material_json(const GlassMaterial& m) {
  return {{"ior", m.ior},
          {"roughness", m.roughness},
          {"thickness", m.thickness},
          {"metallic", m.metallic},
          {"base_color", {m.base_color[0], m.base_color[1], m.base_color[2]}}};
}

}  // namespace

void ParamRanges::validate() const {
  check_interval(ior, 1.0, 1e9, "ior");
  check_interval(roughness, 0.0, 1.0, "roughness");
  check_interval(thickness, 0.0, 1e9, "thickness");
  check_interval(metallic, 0.0, 1.0, "metallic");
  check_interval(exposure_log2, -1e9, 1e9, "exposure_log2");
  check_interval(glass_tilt_deg, -89.0, 89.0, "glass_tilt_deg");
  if (!(base_color_min > 0.0 && base_color_min <= 1.0))
    throw Error("ranges.base_color_min must be in (0, 1]");
}

GlassMaterial sample_material(SplitMix64& rng, const ParamRanges& r) {
  GlassMaterial m;
  m.ior = r.ior.sample(rng);
  m.roughness = r.roughness.sample(rng);
  m.thickness = r.thickness.sample(rng);
  m.metallic = r.metallic.sample(rng);
  for (int c = 0; c < 3; ++c) m.base_color[c] = rng.uniform(r.base_color_min, 1.0);
  return m;
}

AssetPools AssetPools::scan(const fs::path& hdr_dir, const fs::path& srgb_dir) {
  AssetPools pools;
  pools.hdr_dir = hdr_dir;
  pools.srgb_dir = srgb_dir;
  pools.hdr_pool = list_images(hdr_dir);
  pools.srgb_pool = list_images(srgb_dir);
  return pools;
}

SourceChoice choose_sources(SplitMix64& rng, const AssetPools& pools, const MixingRule& rule) {
  auto pick = [&rng](const std::vector<fs::path>& pool) {
    const auto i = std::min(pool.size() - 1, std::size_t(rng.uniform() * double(pool.size())));
    return pool[i];
  };
  // Both draws always happen so the stream position does not depend on pool contents.
  const double t_coin = rng.uniform();
  const double r_coin = rng.uniform();
  SourceChoice c;
  c.transmission_from_hdr =
      (t_coin < rule.transmission_hdr_probability && !pools.hdr_pool.empty()) ||
      pools.srgb_pool.empty();
  const bool reflect_hdr =
      (r_coin < rule.reflection_hdr_probability && !pools.hdr_pool.empty()) ||
      pools.srgb_pool.empty();
  if (pools.hdr_pool.empty() && pools.srgb_pool.empty()) throw Error("asset pools are empty");
  c.transmission = pick(c.transmission_from_hdr ? pools.hdr_pool : pools.srgb_pool);
  c.reflection_mode = reflect_hdr ? ReflectionMode::envmap : ReflectionMode::plane;
  c.reflection = pick(reflect_hdr ? pools.hdr_pool : pools.srgb_pool);
  return c;
}

double exposure_scale(const LinearImage& img, double log2_exposure) {
  const double lum = mean_luminance(img);
  const double anchor = lum > 0.0 ? 0.18 / lum : 1.0;
  return anchor * std::exp2(log2_exposure);
}

fs::path resolve_asset_path(const fs::path& path, const fs::path& base_dir) {
  if (path.empty() || path.is_absolute()) return path;
  if (const char* root = std::getenv("GLASSFORGE_ASSET_ROOT"); root && *root)
    return fs::path(root) / path;
  return base_dir / path;
}

DatasetConfig dataset_config_from_json(const nlohmann::json& j, const fs::path& base_dir) {
  DatasetConfig c;
  c.count = j.value("count", std::size_t(0));
  c.master_seed = j.value("master_seed", std::uint64_t(0));
  if (j.contains("ranges")) {
    const auto& r = j.at("ranges");
    auto get = [&r](const char* key, const Interval& fb) {
      return interval_from_json(r.contains(key) ? r.at(key) : nlohmann::json(), fb);
    };
    c.ranges.ior = get("ior", c.ranges.ior);
    c.ranges.roughness = get("roughness", c.ranges.roughness);
    c.ranges.thickness = get("thickness", c.ranges.thickness);
    c.ranges.metallic = get("metallic", c.ranges.metallic);
    c.ranges.exposure_log2 = get("exposure_log2", c.ranges.exposure_log2);
    c.ranges.glass_tilt_deg = get("glass_tilt_deg", c.ranges.glass_tilt_deg);
    c.ranges.base_color_min = r.value("base_color_min", c.ranges.base_color_min);
  }
  if (j.contains("pools")) {
    const auto& p = j.at("pools");
    c.hdr_dir = resolve_asset_path(p.value("hdr_dir", std::string()), base_dir);
    c.srgb_dir = resolve_asset_path(p.value("srgb_dir", std::string()), base_dir);
  }
  if (j.contains("mixing")) {
    const auto& m = j.at("mixing");
    c.mixing.reflection_hdr_probability =
        m.value("reflection_hdr_probability", c.mixing.reflection_hdr_probability);
    c.mixing.transmission_hdr_probability =
        m.value("transmission_hdr_probability", c.mixing.transmission_hdr_probability);
  }
  if (j.contains("scene")) c.scene_template = scene_config_from_json(j.at("scene"), base_dir, false);
  if (j.contains("render")) {
    const auto& r = j.at("render");
    c.render.spp = r.value("spp", c.render.spp);
    c.render.max_order = r.value("max_order", c.render.max_order);
    c.render.max_miss_fraction = r.value("max_miss_fraction", c.render.max_miss_fraction);
    c.render.refraction_mode =
        parse_refraction_mode(r.value("refraction_mode", std::string("aligned")));
  }
  if (j.contains("output_dir")) {
    fs::path out = j.at("output_dir").get<std::string>();
    c.output_dir = out.is_relative() ? base_dir / out : out;
  }
  c.jobs = j.value("jobs", c.jobs);
  c.record_timing = j.value("record_timing", c.record_timing);
  c.write_raw = j.value("write_raw", c.write_raw);
  return c;
}

nlohmann::json to_json(const DatasetConfig& c) {
  nlohmann::json scene = to_json(c.scene_template);
  return {{"count", c.count},
          {"master_seed", c.master_seed},
          {"ranges",
           {{"ior", interval_json(c.ranges.ior)},
            {"roughness", interval_json(c.ranges.roughness)},
            {"thickness", interval_json(c.ranges.thickness)},
            {"metallic", interval_json(c.ranges.metallic)},
            {"exposure_log2", interval_json(c.ranges.exposure_log2)},
            {"glass_tilt_deg", interval_json(c.ranges.glass_tilt_deg)},
            {"base_color_min", c.ranges.base_color_min}}},
          {"pools", {{"hdr_dir", c.hdr_dir.string()}, {"srgb_dir", c.srgb_dir.string()}}},
          {"mixing",
           {{"reflection_hdr_probability", c.mixing.reflection_hdr_probability},
            {"transmission_hdr_probability", c.mixing.transmission_hdr_probability}}},
          {"scene", scene},
          {"render",
           {{"spp", c.render.spp},
            {"max_order", c.render.max_order},
            {"max_miss_fraction", c.render.max_miss_fraction},
            {"refraction_mode", std::string(to_string(c.render.refraction_mode))}}},
          {"output_dir", c.output_dir.string()},
          {"jobs", c.jobs},
          {"record_timing", c.record_timing},
          {"write_raw", c.write_raw}};
}

nlohmann::json to_json(const ManifestRecord& r) {
  return {{"index", r.index},
          {"seed", r.seed},
          {"scene_digest", r.scene_digest},
          {"material", material_json(r.material)},
          {"sources",
           {{"transmission", r.transmission_source},
            {"reflection", r.reflection_source},
            {"reflection_mode", mode_name(r.reflection_mode)}}},
          {"outputs",
           {{"B", r.blended_path}, {"T", r.transmission_path}, {"R", r.reflection_path}}},
          {"miss_fraction", r.miss_fraction},
          {"max_shift_px", r.max_shift_px},
          {"mean_reflection", r.mean_reflection},
          {"render_ms", r.render_ms ? nlohmann::json(*r.render_ms) : nlohmann::json()}};
}

ManifestRecord manifest_record_from_json(const nlohmann::json& j) {
  ManifestRecord r;
  r.index = j.at("index").get<std::size_t>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.scene_digest = j.at("scene_digest").get<std::string>();
  const auto& m = j.at("material");
  r.material.ior = m.at("ior").get<double>();
  r.material.roughness = m.at("roughness").get<double>();
  r.material.thickness = m.at("thickness").get<double>();
  r.material.metallic = m.at("metallic").get<double>();
  const auto bc = m.at("base_color").get<std::vector<double>>();
  r.material.base_color = Rgbd(bc.at(0), bc.at(1), bc.at(2));
  const auto& s = j.at("sources");
  r.transmission_source = s.at("transmission").get<std::string>();
  r.reflection_source = s.at("reflection").get<std::string>();
  r.reflection_mode = s.at("reflection_mode").get<std::string>() == "envmap"
                          ? ReflectionMode::envmap
                          : ReflectionMode::plane;
  const auto& o = j.at("outputs");
  r.blended_path = o.at("B").get<std::string>();
  r.transmission_path = o.at("T").get<std::string>();
  r.reflection_path = o.at("R").get<std::string>();
  r.miss_fraction = j.at("miss_fraction").get<double>();
  r.max_shift_px = j.at("max_shift_px").get<double>();
  r.mean_reflection = j.at("mean_reflection").get<double>();
  if (!j.at("render_ms").is_null()) r.render_ms = j.at("render_ms").get<double>();
  return r;
}

std::string digest_hex(std::string_view text) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

SamplePlan plan_sample(const DatasetConfig& config, const AssetPools& pools, std::size_t index) {
  SamplePlan p;
  p.seed = derive_seed(config.master_seed, index);
  SplitMix64 rng(p.seed);
  p.sources = choose_sources(rng, pools, config.mixing);
  p.material = sample_material(rng, config.ranges);
  p.glass_tilt_deg = config.ranges.glass_tilt_deg.sample(rng);
  p.transmission_log2_exposure = config.ranges.exposure_log2.sample(rng);
  p.reflection_log2_exposure = config.ranges.exposure_log2.sample(rng);
  return p;
}

DatasetResult generate_dataset(const DatasetConfig& config) {
  config.ranges.validate();
  const AssetPools pools = AssetPools::scan(config.hdr_dir, config.srgb_dir);
  if (config.count > 0 && pools.hdr_pool.empty() && pools.srgb_pool.empty())
    throw Error("dataset: no images found in '" + config.hdr_dir.string() + "' or '" +
                config.srgb_dir.string() + "'");

  const fs::path images_dir = config.output_dir / "images";
  fs::create_directories(images_dir);

  std::vector<std::optional<ManifestRecord>> records(config.count);
  std::vector<std::string> failures(config.count);

  parallel_for(config.count, config.jobs, [&](std::size_t i) {
    const auto start = std::chrono::steady_clock::now();
    try {
      const SamplePlan plan = plan_sample(config, pools, i);
      SceneConfig sc = config.scene_template;
      sc.glass.tilt_deg = plan.glass_tilt_deg;

      auto background = std::make_shared<LinearImage>(load_image(plan.sources.transmission));
      background->array() *=
          float(exposure_scale(*background, plan.transmission_log2_exposure));
      sc.background.texture = background;
      sc.background.image =
          pool_relative(plan.sources.transmission,
                        plan.sources.transmission_from_hdr ? pools.hdr_dir : pools.srgb_dir,
                        plan.sources.transmission_from_hdr ? "hdr" : "srgb");

      const bool env = plan.sources.reflection_mode == ReflectionMode::envmap;
      auto reflection = std::make_shared<const LinearImage>(load_image(plan.sources.reflection));
      sc.reflection.mode = plan.sources.reflection_mode;
      sc.reflection.exposure = exposure_scale(*reflection, plan.reflection_log2_exposure);
      sc.reflection.texture = reflection;
      sc.reflection.image = pool_relative(plan.sources.reflection,
                                          env ? pools.hdr_dir : pools.srgb_dir,
                                          env ? "hdr" : "srgb");

      const Scene scene = solve_geometry(sc);
      RenderSettings settings = config.render;
      settings.seed = plan.seed;
      settings.jobs = 1;
      const RenderTriple triple = render_triple(scene, plan.material, settings);

      ManifestRecord rec;
      rec.index = i;
      rec.seed = plan.seed;
      rec.scene_digest = digest_hex(to_json(sc).dump());
      rec.material = plan.material;
      rec.transmission_source = sc.background.image;
      rec.reflection_source = sc.reflection.image;
      rec.reflection_mode = sc.reflection.mode;
      rec.blended_path = "images/" + frame_name(i, "B") + ".png";
      rec.transmission_path = "images/" + frame_name(i, "T") + ".png";
      rec.reflection_path = "images/" + frame_name(i, "R") + ".png";
      write_png(config.output_dir / rec.blended_path, srgb_encode(triple.blended));
      write_png(config.output_dir / rec.transmission_path, srgb_encode(triple.transmission));
      write_png(config.output_dir / rec.reflection_path, srgb_encode(triple.reflection));
      if (config.write_raw) {
        write_raw(images_dir / (frame_name(i, "B") + ".bin"), triple.blended);
        write_raw(images_dir / (frame_name(i, "T") + ".bin"), triple.transmission);
        write_raw(images_dir / (frame_name(i, "R") + ".bin"), triple.reflection);
      }
      rec.miss_fraction = triple.miss_fraction;
      rec.max_shift_px = triple.max_shift_px;
      rec.mean_reflection = mean_value(triple.reflection);
      if (config.record_timing)
        rec.render_ms = std::chrono::duration<double, std::milli>(
                            std::chrono::steady_clock::now() - start)
                            .count();
      records[i] = std::move(rec);
    } catch (const std::exception& e) {
      failures[i] = e.what();
    }
  });

  DatasetResult result;
  result.requested = config.count;
  result.manifest = config.output_dir / "manifest.jsonl";
  std::ofstream out(result.manifest, std::ios::binary);
  if (!out) throw Error("cannot write " + result.manifest.string());
  const nlohmann::json header = {{"format", "glassforge-manifest"},
                                 {"version", 1},
                                 {"count", config.count},
                                 {"master_seed", config.master_seed}};
  out << header.dump() << '\n';
  for (std::size_t i = 0; i < config.count; ++i) {
    if (records[i]) {
      out << to_json(*records[i]).dump() << '\n';
      ++result.produced;
    } else {
      ++result.failed;
      std::cerr << "glassforge: sample " << i << " skipped: " << failures[i] << '\n';
    }
  }
  return result;
}

std::vector<Interval> default_ior_bins() {
  std::vector<Interval> bins;
  for (int k = 0; k < 5; ++k) bins.push_back({1.25 + 0.1 * k, 1.25 + 0.1 * (k + 1)});
  return bins;
}

std::vector<DatasetResult> build_ior_sweep(const DatasetConfig& config,
                                           const std::vector<Interval>& bins) {
  if (bins.empty()) throw Error("sweep-ior: at least one IoR bin is required");
  for (std::size_t k = 0; k < bins.size(); ++k) {
    if (!(bins[k].lo <= bins[k].hi) || bins[k].lo < 1.0)
      throw Error("sweep-ior: bin " + std::to_string(k) + " is not a valid IoR interval");
    if (k > 0 && (bins[k].lo < bins[k - 1].lo || bins[k].hi < bins[k - 1].hi))
      throw Error("sweep-ior: bins must be ordered by increasing IoR");
  }
  std::vector<DatasetResult> results;
  for (std::size_t k = 0; k < bins.size(); ++k) {
    DatasetConfig bin = config;
    bin.ranges.ior = bins[k];
    bin.output_dir = config.output_dir / ("ior_bin_" + std::to_string(k));
    results.push_back(generate_dataset(bin));
  }
  return results;
}

std::vector<ManifestRecord> read_manifest(const fs::path& manifest) {
  std::ifstream in(manifest);
  if (!in) throw Error("cannot open manifest " + manifest.string());
  std::vector<ManifestRecord> out;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line);
    if (header) {
      header = false;
      if (j.value("format", std::string()) != "glassforge-manifest")
        throw Error("manifest " + manifest.string() + " has no glassforge header");
      continue;
    }
    out.push_back(manifest_record_from_json(j));
  }
  return out;
}

}  // namespace glassforge
