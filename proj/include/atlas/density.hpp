#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "atlas/ingest.hpp"

namespace atlas {

inline constexpr std::size_t kDefaultGridSize = 200;

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Point2&) const = default;
};

struct Bandwidth {
  double hx = 1.0;
  double hy = 1.0;

  bool operator==(const Bandwidth&) const = default;
};

struct GridExtent {
  double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;

  static GridExtent from_bounds(const RootBounds& bounds) {
    return {bounds.xmin(), bounds.xmax(), bounds.ymin(), bounds.ymax()};
  }
  bool operator==(const GridExtent&) const = default;
};

/// KDE samples at cell centers. values is row-major with y as the row:
/// values[iy * nx + ix].
struct DensityGrid {
  std::size_t nx = 0;
  std::size_t ny = 0;
  GridExtent extent;
  std::vector<double> values;

  double cell_width() const { return (extent.x1 - extent.x0) / static_cast<double>(nx); }
  double cell_height() const { return (extent.y1 - extent.y0) / static_cast<double>(ny); }
  double center_x(std::size_t ix) const { return extent.x0 + (static_cast<double>(ix) + 0.5) * cell_width(); }
  double center_y(std::size_t iy) const { return extent.y0 + (static_cast<double>(iy) + 0.5) * cell_height(); }
  double at(std::size_t ix, std::size_t iy) const { return values[iy * nx + ix]; }
  double max_value() const;
  /// Riemann sum of density times cell area.
  double mass() const;

  bool operator==(const DensityGrid&) const = default;
};

/// (n (d + 2) / 4)^(-1 / (d + 4)) with d = 2, times the per-axis sample
/// standard deviation. Throws for n < 2 or a zero-variance axis.
Bandwidth silverman_bandwidth(std::span<const Point2> points);

/// Gaussian product-kernel density at every cell center. Evaluated as a
/// separable kernel product (one dense matrix multiply per point block).
DensityGrid kde_grid(std::span<const Point2> points, const Bandwidth& bandwidth, std::size_t nx,
                     std::size_t ny, const GridExtent& extent);

std::vector<Point2> positions(std::span<const PointRecord> points);

struct SliceGrid {
  std::size_t count = 0;
  DensityGrid grid;

  bool operator==(const SliceGrid&) const = default;
};

struct GroupDensity {
  Bandwidth bandwidth;
  SliceGrid overall;

  bool operator==(const GroupDensity&) const = default;
};

/// Every density grid of a dataset on one shared extent.
struct DensitySet {
  Bandwidth bandwidth;
  SliceGrid overall;
  /// Present only when the data carries group tags; untagged points fall in
  /// group "".
  std::map<std::string, GroupDensity> groups;
  /// slices[group][time]. Group "" holds the time slices of untagged data.
  std::map<std::string, std::map<std::string, SliceGrid>> slices;

  std::size_t grid_count() const;
  bool operator==(const DensitySet&) const = default;
};

struct SliceOptions {
  std::size_t nx = kDefaultGridSize;
  std::size_t ny = kDefaultGridSize;
  GridExtent extent;
  bool by_group = true;
  bool by_time = true;
  std::optional<Bandwidth> bandwidth;  // overrides Silverman everywhere
};

/// Overall grid, one per group, and one per (group, time). Time slices reuse
/// their group's bandwidth. Slices or groups too small for a bandwidth get
/// an all-zero grid and a diagnostic.
DensitySet kde_slices(std::span<const PointRecord> points, const SliceOptions& options,
                      std::vector<std::string>* diagnostics = nullptr);

}  // namespace atlas
