#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "atlas/ingest.hpp"
#include "atlas/sparse.hpp"

namespace atlas {

inline constexpr int kMaxTileLevel = 24;
inline constexpr int kDefaultTargetPerTile = 100;
inline constexpr int kDefaultLevelCount = 3;

struct TileKey {
  int level = 0;
  std::uint32_t ix = 0;
  std::uint32_t iy = 0;

  TileKey parent() const { return {level - 1, ix / 2, iy / 2}; }
  /// Z-order position within the level; siblings are contiguous.
  std::uint64_t morton() const;
  bool valid() const;

  bool operator==(const TileKey&) const = default;
};

struct Rect {
  double x0, y0, x1, y1;  // half-open [x0, x1) x [y0, y1)

  double center_x() const { return (x0 + x1) / 2; }
  double center_y() const { return (y0 + y1) / 2; }
  bool operator==(const Rect&) const = default;
};

struct TilePayload {
  TileKey key;
  std::uint64_t count = 0;
  double sum_x = 0.0;
  double sum_y = 0.0;
  std::vector<std::uint32_t> points;  // ascending point indices

  double centroid_x() const { return sum_x / static_cast<double>(count); }
  double centroid_y() const { return sum_y / static_cast<double>(count); }
};

/// Occupied tiles of one depth, in ascending Morton order. Empty tiles are
/// not stored.
struct TileLevel {
  int level = 0;
  std::vector<TilePayload> tiles;

  const TilePayload* find(std::uint32_t ix, std::uint32_t iy) const;
  std::uint64_t total_count() const;
};

/// Binary parent-by-child incidence matrix between two adjacent levels.
/// Rows follow `parents` (Morton order), columns follow the child level's
/// tile order.
struct AggregationMatrix {
  int level = 0;  // child level
  std::vector<TileKey> parents;
  CsrMatrix<std::uint8_t> entries;
};

TileKey point_to_tile(double x, double y, const RootBounds& bounds, int level);
inline TileKey point_to_tile(const PointRecord& p, const RootBounds& bounds, int level) {
  return point_to_tile(p.x, p.y, bounds, level);
}

Rect tile_bounds(const TileKey& key, const RootBounds& bounds);

TileLevel build_leaf_level(std::span<const PointRecord> points, const RootBounds& bounds, int level);

AggregationMatrix aggregation_matrix(const TileLevel& child);

/// Parent level as matrix * child payloads: counts, centroid sums, and point
/// lists are summed over each parent's children.
TileLevel aggregate_level(const TileLevel& child, const AggregationMatrix& matrix);

/// Depths to summarize, finest first.
std::vector<int> choose_levels(std::uint64_t n_points,
                               std::uint64_t target_points_per_tile = kDefaultTargetPerTile,
                               int n_levels = kDefaultLevelCount);

}  // namespace atlas
