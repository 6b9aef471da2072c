// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include <json.hpp>

#include "glassforge/image.hpp"

namespace glassforge {

inline constexpr int kTrainingTileSize = 608;
inline constexpr int kDefaultMinOverlap = 96;

/// Overlapping tile layout over the working image. When the source's
/// shorter side is below tile_size, the working image is the source scaled
/// (aspect preserved) so the shorter side equals tile_size.
struct TilePlan {
  int tile_size = kTrainingTileSize;
  int min_overlap = kDefaultMinOverlap;
  int source_width = 0;
  int source_height = 0;
  int working_width = 0;
  int working_height = 0;
  std::vector<int> origins_x;
  std::vector<int> origins_y;

  bool resampled() const {
    return working_width != source_width || working_height != source_height;
  }
  std::size_t tile_count() const { return origins_x.size() * origins_y.size(); }

  /// Normalized blend weight of the tile at axis index `i` for working
  /// coordinate `pos`. Raw weights ramp linearly across each overlap band
  /// and are divided by their per-pixel sum.
  double axis_weight_x(std::size_t i, int x) const;
  double axis_weight_y(std::size_t j, int y) const;
};

/// Origins along one axis of length `length` (>= tile).
std::vector<int> plan_axis(int length, int tile, int min_overlap);

TilePlan plan_tiles(int width, int height, int tile_size = kTrainingTileSize,
                    int min_overlap = kDefaultMinOverlap);

/// Tiles in row-major order (y origins outer, x origins inner).
std::vector<LinearImage> split(const LinearImage& img, const TilePlan& plan);
LinearImage stitch(const std::vector<LinearImage>& tiles, const TilePlan& plan);

nlohmann::json to_json(const TilePlan& plan);
TilePlan tile_plan_from_json(const nlohmann::json& j);

}  // namespace glassforge
