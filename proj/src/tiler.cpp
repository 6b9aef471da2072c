// SPDX-License-Identifier: Apache-2.0
#include "glassforge/tiler.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace glassforge {

namespace {

// weights[i][p]: normalized weight of tile i at coordinate p.
std::vector<std::vector<double>> axis_weights(const std::vector<int>& origins, int tile,
                                              int length) {
  const std::size_t n = origins.size();
  std::vector<std::vector<double>> w(n, std::vector<double>(std::size_t(length), 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    const int o = origins[i];
    const int left_band = i > 0 ? origins[i - 1] + tile - o : 0;
    const int right_band = i + 1 < n ? o + tile - origins[i + 1] : 0;
    for (int p = o; p < o + tile; ++p) {
      double v = 1.0;
      if (left_band > 0 && p < o + left_band) v = std::min(v, double(p - o + 1) / (left_band + 1));
      if (right_band > 0 && p >= o + tile - right_band)
        v = std::min(v, double(o + tile - p) / (right_band + 1));
      w[i][std::size_t(p)] = v;
    }
  }
  for (int p = 0; p < length; ++p) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += w[i][std::size_t(p)];
    for (std::size_t i = 0; i < n; ++i) w[i][std::size_t(p)] /= sum;
  }
  return w;
}

}  // namespace

std::vector<int> plan_axis(int length, int tile, int min_overlap) {
  if (length <= tile) return {0};
  const int stride = tile - min_overlap;
  const int n = int(std::ceil(double(length - tile) / double(stride))) + 1;
  std::vector<int> origins(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    origins[std::size_t(i)] = int(std::lround(double(i) * double(length - tile) / double(n - 1)));
  origins.back() = length - tile;
  return origins;
}

TilePlan plan_tiles(int width, int height, int tile_size, int min_overlap) {
  if (width < 1 || height < 1) throw Error("plan_tiles: image size must be at least 1x1");
  if (tile_size < 1 || min_overlap < 0 || min_overlap >= tile_size)
    throw Error("plan_tiles: need tile_size >= 1 and 0 <= min_overlap < tile_size");
  TilePlan plan;
  plan.tile_size = tile_size;
  plan.min_overlap = min_overlap;
  plan.source_width = width;
  plan.source_height = height;
  plan.working_width = width;
  plan.working_height = height;
  const int shorter = std::min(width, height);
  if (shorter < tile_size) {
    const double scale = double(tile_size) / double(shorter);
    if (width <= height) {
      plan.working_width = tile_size;
      plan.working_height = std::max(tile_size, int(std::lround(height * scale)));
    } else {
      plan.working_height = tile_size;
      plan.working_width = std::max(tile_size, int(std::lround(width * scale)));
    }
  }
  plan.origins_x = plan_axis(plan.working_width, tile_size, min_overlap);
  plan.origins_y = plan_axis(plan.working_height, tile_size, min_overlap);
  return plan;
}

double TilePlan::axis_weight_x(std::size_t i, int x) const {
  return axis_weights(origins_x, tile_size, working_width).at(i).at(std::size_t(x));
}

double TilePlan::axis_weight_y(std::size_t j, int y) const {
  return axis_weights(origins_y, tile_size, working_height).at(j).at(std::size_t(y));
}

std::vector<LinearImage> split(const LinearImage& img, const TilePlan& plan) {
  if (img.width() != plan.source_width || img.height() != plan.source_height)
    throw Error("split: image is " + std::to_string(img.width()) + "x" +
                std::to_string(img.height()) + " but the plan expects " +
                std::to_string(plan.source_width) + "x" + std::to_string(plan.source_height));
  const LinearImage working =
      plan.resampled() ? resample_lanczos(img, plan.working_width, plan.working_height) : img;
  const int t = plan.tile_size;
  std::vector<LinearImage> tiles;
  tiles.reserve(plan.tile_count());
  for (int oy : plan.origins_y)
    for (int ox : plan.origins_x) {
      LinearImage tile(t, t);
      tile.array() = working.array().block(oy, 3 * ox, t, 3 * t);
      tiles.push_back(std::move(tile));
    }
  return tiles;
}

LinearImage stitch(const std::vector<LinearImage>& tiles, const TilePlan& plan) {
  if (tiles.size() != plan.tile_count())
    throw Error("stitch: expected " + std::to_string(plan.tile_count()) + " tiles, got " +
                std::to_string(tiles.size()));
  const int t = plan.tile_size;
  for (const LinearImage& tile : tiles)
    if (tile.width() != t || tile.height() != t)
      throw Error("stitch: every tile must be " + std::to_string(t) + "x" + std::to_string(t));

  const auto wx = axis_weights(plan.origins_x, t, plan.working_width);
  const auto wy = axis_weights(plan.origins_y, t, plan.working_height);
  Image<double> acc(plan.working_width, plan.working_height);
  std::size_t index = 0;
  for (std::size_t j = 0; j < plan.origins_y.size(); ++j)
    for (std::size_t i = 0; i < plan.origins_x.size(); ++i) {
      const LinearImage& tile = tiles[index++];
      const int ox = plan.origins_x[i];
      const int oy = plan.origins_y[j];
      for (int y = 0; y < t; ++y) {
        const double wyv = wy[j][std::size_t(oy + y)];
        for (int x = 0; x < t; ++x) {
          const double w = wyv * wx[i][std::size_t(ox + x)];
          acc.pixel(ox + x, oy + y) += w * tile.pixel(x, y).cast<double>();
        }
      }
    }
  LinearImage working(plan.working_width, plan.working_height);
  working.array() = acc.array().cast<float>();
  if (!plan.resampled()) return working;
  return resample_lanczos(working, plan.source_width, plan.source_height);
}

nlohmann::json to_json(const TilePlan& p) {
  return {{"tile_size", p.tile_size},         {"min_overlap", p.min_overlap},
          {"source_width", p.source_width},   {"source_height", p.source_height},
          {"working_width", p.working_width}, {"working_height", p.working_height},
          {"origins_x", p.origins_x},         {"origins_y", p.origins_y},
          {"blend", "linear_ramp"}};
}

TilePlan tile_plan_from_json(const nlohmann::json& j) {
  TilePlan p;
  p.tile_size = j.at("tile_size").get<int>();
  p.min_overlap = j.at("min_overlap").get<int>();
  p.source_width = j.at("source_width").get<int>();
  p.source_height = j.at("source_height").get<int>();
  p.working_width = j.at("working_width").get<int>();
  p.working_height = j.at("working_height").get<int>();
  p.origins_x = j.at("origins_x").get<std::vector<int>>();
  p.origins_y = j.at("origins_y").get<std::vector<int>>();
  return p;
}

}  // namespace glassforge
