// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "glassforge/dataset.hpp"
#include "support.hpp"

using namespace glassforge;
namespace fs = std::filesystem;

namespace {

fs::path work_dir() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / "glassforge_test_dataset";
    fs::remove_all(d);
    testing::write_asset_pools(d / "assets");
    return d;
  }();
  return dir;
}

DatasetConfig small_config(const fs::path& out, std::size_t count) {
  DatasetConfig c;
  c.count = count;
  c.master_seed = 77;
  c.hdr_dir = work_dir() / "assets" / "hdr";
  c.srgb_dir = work_dir() / "assets" / "srgb";
  c.scene_template = testing::basic_config(24);
  c.scene_template.background.texture.reset();
  c.scene_template.reflection.texture.reset();
  c.render.spp = 4;
  c.output_dir = out;
  c.jobs = 2;
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double ks_uniform(std::vector<double> xs, double lo, double hi) {
  std::sort(xs.begin(), xs.end());
  const double n = double(xs.size());
  double d = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = (xs[i] - lo) / (hi - lo);
    d = std::max({d, std::abs(f - double(i) / n), std::abs(f - double(i + 1) / n)});
  }
  return d;
}

}  // namespace

TEST_CASE("degenerate intervals are honored exactly") {
  ParamRanges r;
  r.ior = {1.5, 1.5};
  r.thickness = {0.01, 0.01};
  SplitMix64 rng(3);
  for (int i = 0; i < 100; ++i) {
    const GlassMaterial m = sample_material(rng, r);
    CHECK(m.ior == 1.5);
    CHECK(m.thickness == 0.01);
  }
  r.ior = {1.6, 1.4};
  CHECK_THROWS_AS(r.validate(), Error);
}

TEST_CASE("sampled parameters are uniform over their intervals") {
  const DatasetConfig c = small_config(work_dir() / "unused", 0);
  const AssetPools pools = AssetPools::scan(c.hdr_dir, c.srgb_dir);
  std::vector<double> ior, rough, tilt;
  std::size_t envmaps = 0;
  const std::size_t n = 10000;
  for (std::size_t i = 0; i < n; ++i) {
    const SamplePlan p = plan_sample(c, pools, i);
    ior.push_back(p.material.ior);
    rough.push_back(p.material.roughness);
    tilt.push_back(p.glass_tilt_deg);
    envmaps += p.sources.reflection_mode == ReflectionMode::envmap;
    CHECK((p.material.base_color >= 0.85).all());
  }
  CHECK(ks_uniform(ior, 1.25, 1.75) < 0.02);
  CHECK(ks_uniform(rough, 0.0, 0.05) < 0.02);
  CHECK(ks_uniform(tilt, -10, 10) < 0.02);
  const double sigma = std::sqrt(0.25 / double(n));
  CHECK(std::abs(double(envmaps) / double(n) - 0.5) < 3 * sigma);
}

TEST_CASE("plan_sample depends only on the master seed and index") {
  DatasetConfig c = small_config(work_dir() / "unused", 0);
  const AssetPools pools = AssetPools::scan(c.hdr_dir, c.srgb_dir);
  const SamplePlan a = plan_sample(c, pools, 5);
  const SamplePlan b = plan_sample(c, pools, 5);
  CHECK(a.seed == b.seed);
  CHECK(a.material.ior == b.material.ior);
  CHECK(a.sources.reflection == b.sources.reflection);
  CHECK(plan_sample(c, pools, 6).seed != a.seed);
  c.master_seed = 78;
  CHECK(plan_sample(c, pools, 5).seed != a.seed);
}

TEST_CASE("exposure_scale anchors mean luminance at 0.18") {
  const LinearImage img = testing::smooth_random(20, 20, 4);
  LinearImage scaled = img;
  scaled.array() *= float(exposure_scale(img, 0.0));
  CHECK(mean_luminance(scaled) == doctest::Approx(0.18).epsilon(1e-5));
  CHECK(exposure_scale(img, 1.0) == doctest::Approx(2 * exposure_scale(img, 0.0)));
  CHECK(exposure_scale(LinearImage(4, 4, 0.0f), 0.0) == 1.0);
}

TEST_CASE("count 0 writes a header-only manifest") {
  const fs::path out = work_dir() / "empty";
  const DatasetResult r = generate_dataset(small_config(out, 0));
  CHECK(r.produced == 0);
  const std::string text = slurp(r.manifest);
  CHECK(std::count(text.begin(), text.end(), '\n') == 1);
  CHECK(nlohmann::json::parse(text)["format"] == "glassforge-manifest");
  CHECK(read_manifest(r.manifest).empty());
}

TEST_CASE("dataset generation is byte-reproducible and complete") {
  const DatasetResult a = generate_dataset(small_config(work_dir() / "run_a", 3));
  DatasetConfig cb = small_config(work_dir() / "run_b", 3);
  cb.jobs = 1;
  const DatasetResult b = generate_dataset(cb);
  REQUIRE(a.produced == 3);
  REQUIRE(b.produced == 3);
  CHECK_FALSE(a.partial_failure());
  CHECK(slurp(a.manifest) == slurp(b.manifest));

  const auto records = read_manifest(a.manifest);
  REQUIRE(records.size() == 3);
  for (std::size_t i = 0; i < records.size(); ++i) {
    const ManifestRecord& r = records[i];
    CHECK(r.index == i);
    CHECK(r.scene_digest.size() == 16);
    CHECK_FALSE(r.render_ms.has_value());
    for (const std::string& rel : {r.blended_path, r.transmission_path, r.reflection_path}) {
      REQUIRE(fs::exists(work_dir() / "run_a" / rel));
      CHECK(slurp(work_dir() / "run_a" / rel) == slurp(work_dir() / "run_b" / rel));
    }
    CHECK(r.material.ior >= 1.25);
    CHECK(r.material.ior <= 1.75);
    CHECK(r.mean_reflection > 0.0);
  }
}

TEST_CASE("missing pools are an error") {
  DatasetConfig c = small_config(work_dir() / "none", 1);
  c.hdr_dir = work_dir() / "nope";
  c.srgb_dir = work_dir() / "nope";
  CHECK_THROWS_WITH_AS(generate_dataset(c), doctest::Contains("no images"), Error);
}

TEST_CASE("ior sweep reflection grows bin by bin") {
  DatasetConfig c = small_config(work_dir() / "sweep", 2);
  const auto results = build_ior_sweep(c, default_ior_bins());
  REQUIRE(results.size() == 5);
  double prev = -1;
  for (std::size_t k = 0; k < 5; ++k) {
    const auto records = read_manifest(results[k].manifest);
    REQUIRE(records.size() == 2);
    double mean = 0;
    for (const auto& r : records) mean += r.mean_reflection / 2;
    CHECK(mean > prev);
    prev = mean;
  }
  std::vector<Interval> unordered = {{1.5, 1.6}, {1.3, 1.4}};
  CHECK_THROWS_AS(build_ior_sweep(c, unordered), Error);
}

TEST_CASE("dataset config JSON") {
  const nlohmann::json j = nlohmann::json::parse(R"({
    "count": 4, "master_seed": 9,
    "ranges": {"ior": [1.3, 1.4], "base_color_min": 0.9},
    "pools": {"hdr_dir": "hdr", "srgb_dir": "srgb"},
    "render": {"spp": 8, "refraction_mode": "exact"},
    "output_dir": "out"
  })");
  const DatasetConfig c = dataset_config_from_json(j, "/base");
  CHECK(c.count == 4);
  CHECK(c.ranges.ior.hi == 1.4);
  CHECK(c.ranges.roughness.hi == 0.05);
  CHECK(c.ranges.base_color_min == 0.9);
  CHECK(c.render.spp == 8);
  CHECK(c.render.refraction_mode == RefractionMode::exact);
  CHECK(c.output_dir == fs::path("/base/out"));
  CHECK(to_json(dataset_config_from_json(to_json(c), "/base")) == to_json(c));
  CHECK(digest_hex("") == "cbf29ce484222325");
}
