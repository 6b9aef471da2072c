// SPDX-License-Identifier: Apache-2.0
// glassforge command-line entry point.
//
// Exit codes: 0 success, 1 usage error, 2 validation failure, 3 partial
// dataset failure (more than 1% of samples skipped).

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "glassforge/alphablend.hpp"
#include "glassforge/dataset.hpp"
#include "glassforge/image_io.hpp"
#include "glassforge/metrics.hpp"
#include "glassforge/renderer.hpp"
#include "glassforge/tiler.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace glassforge;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitValidation = 2;
constexpr int kExitPartial = 3;

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

/// Inline JSON when the text starts with '{', otherwise a path to a file.
json json_argument(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\n");
  if (first != std::string::npos && text[first] == '{') {
    try {
      return json::parse(text);
    } catch (const json::parse_error& e) {
      throw Error(std::string("invalid JSON argument: ") + e.what());
    }
  }
  return read_json_file(text);
}

GlassMaterial material_from_json(const json& j) {
  GlassMaterial m;
  m.ior = j.value("ior", m.ior);
  m.roughness = j.value("roughness", m.roughness);
  m.thickness = j.value("thickness", m.thickness);
  m.metallic = j.value("metallic", m.metallic);
  if (j.contains("base_color")) {
    const auto bc = j.at("base_color").get<std::vector<double>>();
    if (bc.size() != 3) throw Error("material.base_color must have three entries");
    m.base_color = Rgbd(bc[0], bc[1], bc[2]);
  }
  m.validate();
  return m;
}

json material_json(const GlassMaterial& m) {
  return {{"ior", m.ior},
          {"roughness", m.roughness},
          {"thickness", m.thickness},
          {"metallic", m.metallic},
          {"base_color", {m.base_color[0], m.base_color[1], m.base_color[2]}}};
}

SrgbImage load_srgb(const fs::path& path) {
  switch (detect_format(path)) {
    case ImageFormat::png:
      return read_png(path);
    case ImageFormat::jpeg:
      return read_jpeg(path);
    default:
      throw Error(path.string() + ": expected an 8-bit PNG or JPEG image");
  }
}

LinearImage to_unit(const SrgbImage& img) {
  LinearImage out(img.width(), img.height());
  out.array() = img.array().cast<float>() / 255.0f;
  return out;
}

SrgbImage from_unit(const LinearImage& img) {
  SrgbImage out(img.width(), img.height());
  out.array() = (img.array().max(0.0f).min(1.0f) * 255.0f).round().cast<std::uint8_t>();
  return out;
}

bool is_8bit_image(const fs::path& p) {
  std::string ext = p.extension().string();
  for (char& c : ext) c = char(std::tolower(static_cast<unsigned char>(c)));
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

void emit(bool as_json, const json& summary, const std::string& text) {
  if (as_json)
    std::cout << summary.dump(2) << '\n';
  else
    std::cout << text;
}

// ---- render / validate -----------------------------------------------------

struct SceneArgs {
  std::string config;
  std::string material;
  std::optional<int> spp;
  std::optional<int> max_order;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> refraction_mode;
  std::optional<double> max_miss_fraction;
  int jobs = 0;
};

void add_scene_options(CLI::App* cmd, SceneArgs& a) {
  cmd->add_option("--config", a.config, "Scene JSON (camera, glass, background, reflection; "
                                        "optional material and render blocks)")
      ->required();
  cmd->add_option("--material", a.material,
                  "Glass material as inline JSON or a JSON file; overrides the config's material");
  cmd->add_option("--spp", a.spp, "Samples per pixel for the reflected layer");
  cmd->add_option("--max-order", a.max_order, "Highest ghost order rendered");
  cmd->add_option("--seed", a.seed, "Render seed");
  cmd->add_option("--refraction-mode", a.refraction_mode, "aligned | exact");
  cmd->add_option("--max-miss-fraction", a.max_miss_fraction,
                  "Fail when more than this fraction of lookups miss the sources");
  cmd->add_option("--jobs", a.jobs, "Worker threads (0 = all cores)");
}

struct LoadedScene {
  SceneConfig config;
  GlassMaterial material;
  RenderSettings settings;
};

LoadedScene load_scene(const SceneArgs& a) {
  const fs::path path(a.config);
  const json j = read_json_file(path);
  LoadedScene s;
  s.config = scene_config_from_json(j, path.parent_path(), true);
  if (j.contains("material")) s.material = material_from_json(j.at("material"));
  if (!a.material.empty()) s.material = material_from_json(json_argument(a.material));
  if (j.contains("render")) {
    const json& r = j.at("render");
    s.settings.spp = r.value("spp", s.settings.spp);
    s.settings.max_order = r.value("max_order", s.settings.max_order);
    s.settings.seed = r.value("seed", s.settings.seed);
    s.settings.max_miss_fraction = r.value("max_miss_fraction", s.settings.max_miss_fraction);
    if (r.contains("refraction_mode"))
      s.settings.refraction_mode = parse_refraction_mode(r.at("refraction_mode").get<std::string>());
  }
  if (a.spp) s.settings.spp = *a.spp;
  if (a.max_order) s.settings.max_order = *a.max_order;
  if (a.seed) s.settings.seed = *a.seed;
  if (a.refraction_mode) s.settings.refraction_mode = parse_refraction_mode(*a.refraction_mode);
  if (a.max_miss_fraction) s.settings.max_miss_fraction = *a.max_miss_fraction;
  s.settings.jobs = a.jobs;
  return s;
}

int run_render(const SceneArgs& a, const std::string& out_dir, bool raw, bool as_json) {
  const LoadedScene s = load_scene(a);
  const Scene scene = solve_geometry(s.config);
  const auto start = std::chrono::steady_clock::now();
  const RenderTriple t = render_triple(scene, s.material, s.settings);
  const double ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

  const fs::path out(out_dir);
  fs::create_directories(out);
  write_png(out / "B.png", srgb_encode(t.blended));
  write_png(out / "T.png", srgb_encode(t.transmission));
  write_png(out / "R.png", srgb_encode(t.reflection));
  if (raw) {
    write_raw(out / "B.bin", t.blended);
    write_raw(out / "T.bin", t.transmission);
    write_raw(out / "R.bin", t.reflection);
  }
  const json summary = {{"width", scene.camera.width},
                        {"height", scene.camera.height},
                        {"material", material_json(s.material)},
                        {"spp", s.settings.spp},
                        {"seed", s.settings.seed},
                        {"refraction_mode", std::string(to_string(s.settings.refraction_mode))},
                        {"miss_fraction", t.miss_fraction},
                        {"max_shift_px", t.max_shift_px},
                        {"mean_reflection", mean_value(t.reflection)},
                        {"render_ms", ms},
                        {"outputs", {{"B", (out / "B.png").string()},
                                     {"T", (out / "T.png").string()},
                                     {"R", (out / "R.png").string()}}}};
  char line[160];
  std::snprintf(line, sizeof(line), "rendered %dx%d in %.1f ms, mean(R) %.6f -> %s\n",
                scene.camera.width, scene.camera.height, ms, mean_value(t.reflection),
                out.string().c_str());
  emit(as_json, summary, line);
  return 0;
}

int run_validate(const SceneArgs& a, double tolerance_px, bool as_json) {
  const LoadedScene s = load_scene(a);
  const Scene scene = solve_geometry(s.config);
  const double w = scene.camera.width, h = scene.camera.height;
  const double center = transmitted_shift_px(scene, s.material, w / 2, h / 2);
  const double worst = validate_alignment(scene, s.material);
  const bool ok = worst <= tolerance_px;
  const json summary = {{"material", material_json(s.material)},
                        {"center_shift_px", center},
                        {"max_shift_px", worst},
                        {"tolerance_px", tolerance_px},
                        {"aligned", ok}};
  char line[200];
  std::snprintf(line, sizeof(line),
                "exact-refraction shift: center %.4f px, worst corner %.4f px (tolerance %.4f) %s\n",
                center, worst, tolerance_px, ok ? "ok" : "EXCEEDED");
  emit(as_json, summary, line);
  return ok ? 0 : kExitValidation;
}

// ---- dataset / sweep -------------------------------------------------------

struct DatasetArgs {
  std::string config;
  std::optional<std::size_t> count;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::optional<std::string> out;
  std::optional<int> spp;
  bool record_timing = false;
  bool raw = false;
};

void add_dataset_options(CLI::App* cmd, DatasetArgs& a) {
  cmd->add_option("--config", a.config, "Dataset JSON")->required();
  cmd->add_option("--count", a.count, "Number of samples");
  cmd->add_option("--seed", a.seed, "Master seed");
  cmd->add_option("--jobs", a.jobs, "Worker threads (0 = all cores)");
  cmd->add_option("--out", a.out, "Output directory");
  cmd->add_option("--spp", a.spp, "Samples per pixel");
  cmd->add_flag("--record-timing", a.record_timing, "Store render_ms in the manifest");
  cmd->add_flag("--raw", a.raw, "Also write float32 .bin dumps of B, T and R");
}

DatasetConfig load_dataset(const DatasetArgs& a) {
  const fs::path path(a.config);
  DatasetConfig c = dataset_config_from_json(read_json_file(path), path.parent_path());
  if (a.count) c.count = *a.count;
  if (a.seed) c.master_seed = *a.seed;
  if (a.jobs) c.jobs = *a.jobs;
  if (a.out) c.output_dir = *a.out;
  if (a.spp) c.render.spp = *a.spp;
  if (a.record_timing) c.record_timing = true;
  if (a.raw) c.write_raw = true;
  return c;
}

json result_json(const DatasetResult& r) {
  return {{"manifest", r.manifest.string()},
          {"requested", r.requested},
          {"produced", r.produced},
          {"failed", r.failed}};
}

int run_dataset(const DatasetArgs& a, bool as_json) {
  const DatasetResult r = generate_dataset(load_dataset(a));
  emit(as_json, result_json(r),
       std::to_string(r.produced) + "/" + std::to_string(r.requested) + " samples written, " +
           std::to_string(r.failed) + " failed; manifest " + r.manifest.string() + "\n");
  return r.partial_failure() ? kExitPartial : 0;
}

int run_sweep(const DatasetArgs& a, const std::vector<double>& edges, bool as_json) {
  std::vector<Interval> bins = default_ior_bins();
  if (!edges.empty()) {
    if (edges.size() < 2) throw Error("sweep-ior: --edges needs at least two values");
    bins.clear();
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) bins.push_back({edges[i], edges[i + 1]});
  }
  const auto results = build_ior_sweep(load_dataset(a), bins);
  json summary = json::array();
  std::string text;
  bool partial = false;
  for (std::size_t k = 0; k < results.size(); ++k) {
    double mean = 0;
    const auto records = read_manifest(results[k].manifest);
    for (const auto& rec : records) mean += rec.mean_reflection;
    if (!records.empty()) mean /= double(records.size());
    json entry = result_json(results[k]);
    entry["ior"] = {bins[k].lo, bins[k].hi};
    entry["mean_reflection"] = mean;
    summary.push_back(entry);
    char line[160];
    std::snprintf(line, sizeof(line), "bin %zu ior [%.3f, %.3f]: %zu samples, mean(R) %.6f\n", k,
                  bins[k].lo, bins[k].hi, results[k].produced, mean);
    text += line;
    partial = partial || results[k].partial_failure();
  }
  emit(as_json, json{{"bins", summary}}, text);
  return partial ? kExitPartial : 0;
}

// ---- blend -----------------------------------------------------------------

struct BlendArgs {
  std::string transmission;
  std::string reflection;
  std::string out;
  std::optional<double> alpha;
  std::optional<double> beta;
  std::optional<double> sigma;
  std::string space = "srgb";
  bool random = false;
  std::uint64_t seed = 0;
};

int run_blend(const BlendArgs& a, bool as_json) {
  BlendParams p;
  if (a.random) {
    SplitMix64 rng(a.seed);
    p = sample_blend_params(rng);
  }
  if (a.alpha) p.alpha = *a.alpha;
  if (a.beta) p.beta = *a.beta;
  if (a.sigma) p.blur_sigma = *a.sigma;
  const SrgbImage b =
      alpha_blend(load_srgb(a.transmission), load_srgb(a.reflection), p, parse_blend_space(a.space));
  write_png(a.out, b);
  const json summary = {{"alpha", p.alpha},   {"beta", p.beta}, {"blur_sigma", p.blur_sigma},
                        {"space", a.space},   {"output", a.out}};
  char line[200];
  std::snprintf(line, sizeof(line), "alpha %.4f beta %.4f sigma %.4f (%s) -> %s\n", p.alpha,
                p.beta, p.blur_sigma, a.space.c_str(), a.out.c_str());
  emit(as_json, summary, line);
  return 0;
}

// ---- eval ------------------------------------------------------------------

int run_eval(const std::string& pred_dir, const std::string& gt_dir, const std::string& window,
             const std::string& report, bool as_json) {
  SsimSettings settings;
  settings.window = parse_ssim_window(window);
  if (!fs::is_directory(pred_dir)) throw Error("eval: " + pred_dir + " is not a directory");
  if (!fs::is_directory(gt_dir)) throw Error("eval: " + gt_dir + " is not a directory");
  std::vector<fs::path> names;
  for (const auto& e : fs::directory_iterator(pred_dir))
    if (e.is_regular_file() && is_8bit_image(e.path())) names.push_back(e.path().filename());
  std::sort(names.begin(), names.end());
  if (names.empty()) throw Error("eval: no PNG or JPEG images in " + pred_dir);

  json images = json::array();
  double sum_psnr = 0, sum_ssim = 0, sum_ms = 0;
  std::size_t ms_count = 0;
  for (const fs::path& name : names) {
    const fs::path gt_path = fs::path(gt_dir) / name;
    if (!fs::exists(gt_path)) throw Error("eval: no ground truth for " + name.string());
    const SrgbImage pred = load_srgb(fs::path(pred_dir) / name);
    const SrgbImage gt = load_srgb(gt_path);
    const double p = psnr(pred, gt);
    const double s = ssim(pred, gt, settings);
    json entry = {{"name", name.string()}, {"psnr", p}, {"ssim", s}, {"lpips", nullptr}};
    if (std::min(pred.width(), pred.height()) >= kMsSsimMinSize) {
      const double m = ms_ssim(pred, gt);
      entry["msssim"] = m;
      sum_ms += m;
      ++ms_count;
    } else {
      entry["msssim"] = nullptr;
    }
    sum_psnr += p;
    sum_ssim += s;
    images.push_back(entry);
  }
  const double n = double(names.size());
  const json summary = {
      {"ssim_window", std::string(to_string(settings.window))},
      {"count", names.size()},
      {"images", images},
      {"mean",
       {{"psnr", sum_psnr / n},
        {"ssim", sum_ssim / n},
        {"msssim", ms_count ? json(sum_ms / double(ms_count)) : json()},
        {"lpips", nullptr},
        {"loss", composite_loss_from(sum_psnr / n, sum_ssim / n)}}}};
  if (!report.empty()) {
    std::ofstream out(report);
    if (!out) throw Error("cannot write " + report);
    out << summary.dump(2) << '\n';
  }
  char line[200];
  std::snprintf(line, sizeof(line), "%zu images: PSNR %.4f dB, SSIM %.6f (%s)\n", names.size(),
                sum_psnr / n, sum_ssim / n, std::string(to_string(settings.window)).c_str());
  emit(as_json, summary, line);
  return 0;
}

// ---- tile / stitch ---------------------------------------------------------

std::string tile_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "tile_%04zu.png", i);
  return buf;
}

int run_tile(const std::string& input, const std::string& out_dir, int tile, int overlap,
             bool as_json) {
  const LinearImage img = to_unit(load_srgb(input));
  const TilePlan plan = plan_tiles(img.width(), img.height(), tile, overlap);
  const auto tiles = split(img, plan);
  fs::create_directories(out_dir);
  for (std::size_t i = 0; i < tiles.size(); ++i)
    write_png(fs::path(out_dir) / tile_name(i), from_unit(tiles[i]));
  json plan_json = to_json(plan);
  std::ofstream(fs::path(out_dir) / "plan.json") << plan_json.dump(2) << '\n';
  emit(as_json, plan_json,
       std::to_string(tiles.size()) + " tiles of " + std::to_string(tile) + " px -> " + out_dir +
           "\n");
  return 0;
}

int run_stitch(const std::string& dir, const std::string& out, bool as_json) {
  const TilePlan plan = tile_plan_from_json(read_json_file(fs::path(dir) / "plan.json"));
  std::vector<LinearImage> tiles;
  for (std::size_t i = 0; i < plan.tile_count(); ++i)
    tiles.push_back(to_unit(load_srgb(fs::path(dir) / tile_name(i))));
  write_png(out, from_unit(stitch(tiles, plan)));
  emit(as_json, {{"output", out}, {"width", plan.source_width}, {"height", plan.source_height}},
       "stitched " + std::to_string(tiles.size()) + " tiles -> " + out + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"glassforge: physically based glass-reflection data synthesis"};
  app.require_subcommand(1);
  bool as_json = false;
  app.add_flag("--json", as_json, "Print a single JSON summary on stdout");

  SceneArgs render_args;
  std::string render_out = "render";
  bool render_raw = false;
  auto* render = app.add_subcommand("render", "Render one B/T/R triplet from a scene config");
  add_scene_options(render, render_args);
  render->add_option("--out", render_out, "Output directory for B.png, T.png, R.png");
  render->add_flag("--raw", render_raw, "Also write float32 .bin dumps");
  render->add_flag("--json", as_json, "Print a single JSON summary on stdout");

  SceneArgs validate_args;
  double tolerance_px = 0.5;
  auto* validate = app.add_subcommand(
      "validate", "Report the exact-refraction pixel shift that aligned mode ignores");
  add_scene_options(validate, validate_args);
  validate->add_option("--tolerance-px", tolerance_px,
                       "Exit 2 when the worst corner shift exceeds this many pixels");
  validate->add_flag("--json", as_json, "Print a single JSON summary on stdout");

  DatasetArgs dataset_args;
  auto* dataset = app.add_subcommand("dataset", "Generate a randomized triplet dataset");
  add_dataset_options(dataset, dataset_args);
  dataset->add_flag("--json", as_json, "Print a single JSON summary on stdout");

  DatasetArgs sweep_args;
  std::vector<double> edges;
  auto* sweep = app.add_subcommand("sweep-ior", "Render the same scenes once per IoR bin");
  add_dataset_options(sweep, sweep_args);
  sweep->add_option("--edges", edges, "Bin edges, e.g. 1.25 1.35 1.45 (default: five bins "
                                      "over [1.25, 1.75])");
  sweep->add_flag("--json", as_json, "Print a single JSON summary on stdout");

  BlendArgs blend_args;
  auto* blend = app.add_subcommand("blend", "Alpha-blend a transmission and reflection image");
  blend->add_option("--transmission,-t", blend_args.transmission, "Transmission image")->required();
  blend->add_option("--reflection,-r", blend_args.reflection, "Reflection image")->required();
  blend->add_option("--out,-o", blend_args.out, "Output PNG")->required();
  blend->add_option("--alpha", blend_args.alpha, "Transmission weight in [0, 1]");
  blend->add_option("--beta", blend_args.beta, "Reflection weight in [0, 1]");
  blend->add_option("--sigma", blend_args.sigma, "Gaussian blur of R in pixels");
  blend->add_option("--space", blend_args.space, "srgb | linear")->capture_default_str();
  blend->add_flag("--random", blend_args.random,
                  "Draw unspecified parameters from the default ranges");
  blend->add_option("--seed", blend_args.seed, "Seed for --random");
  blend->add_flag("--json", as_json, "Print a single JSON summary on stdout");

  std::string pred_dir, gt_dir, window = "uniform7", report;
  auto* eval = app.add_subcommand("eval", "PSNR / SSIM / MS-SSIM over matching file names");
  eval->add_option("--pred", pred_dir, "Directory of predictions")->required();
  eval->add_option("--gt", gt_dir, "Directory of ground-truth images")->required();
  eval->add_option("--window", window, "SSIM window: uniform7 | gaussian11")
      ->capture_default_str();
  eval->add_option("--report", report, "Write the JSON report to this file");
  eval->add_flag("--json", as_json, "Print a single JSON summary on stdout");

  std::string tile_in, tile_out = "tiles";
  int tile_size = kTrainingTileSize, overlap = kDefaultMinOverlap;
  auto* tile = app.add_subcommand("tile", "Split an image into overlapping tiles");
  tile->add_option("--in", tile_in, "Input PNG or JPEG")->required();
  tile->add_option("--out", tile_out, "Output directory (tiles and plan.json)")
      ->capture_default_str();
  tile->add_option("--tile-size", tile_size, "Tile edge in pixels")->capture_default_str();
  tile->add_option("--overlap", overlap, "Minimum overlap in pixels")->capture_default_str();
  tile->add_flag("--json", as_json, "Print a single JSON summary on stdout");

  std::string stitch_dir, stitch_out;
  auto* stitch_cmd = app.add_subcommand("stitch", "Blend tiles written by `tile` back together");
  stitch_cmd->add_option("--dir", stitch_dir, "Directory written by `tile`")->required();
  stitch_cmd->add_option("--out", stitch_out, "Output PNG")->required();
  stitch_cmd->add_flag("--json", as_json, "Print a single JSON summary on stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*render) return run_render(render_args, render_out, render_raw, as_json);
    if (*validate) return run_validate(validate_args, tolerance_px, as_json);
    if (*dataset) return run_dataset(dataset_args, as_json);
    if (*sweep) return run_sweep(sweep_args, edges, as_json);
    if (*blend) return run_blend(blend_args, as_json);
    if (*eval) return run_eval(pred_dir, gt_dir, window, report, as_json);
    if (*tile) return run_tile(tile_in, tile_out, tile_size, overlap, as_json);
    if (*stitch_cmd) return run_stitch(stitch_dir, stitch_out, as_json);
  } catch (const std::exception& e) {
    std::cerr << "glassforge: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitUsage;
}
