#pragma once

#include <span>
#include <vector>

#include "atlas/density.hpp"

namespace atlas {

/// Closed loop, first vertex repeated at the end. Regions above the
/// threshold lie to the left, so outer boundaries run counterclockwise and
/// holes clockwise.
using Ring = std::vector<Point2>;

struct ContourPolygon {
  double threshold = 0.0;
  std::vector<Ring> rings;
  /// Share of the grid's mass in cells above the threshold.
  double probability_mass = 0.0;

  bool operator==(const ContourPolygon&) const = default;
};

inline constexpr double kDefaultQuantiles[] = {0.20, 0.35, 0.50, 0.65, 0.80, 0.95};

/// Marching squares over the cell-center samples. The lattice is framed by
/// zero samples on the extent boundary, so isolines leaving the data close
/// along the grid edge. Thresholds with nothing above them yield no polygon.
std::vector<ContourPolygon> extract_contours(const DensityGrid& grid, std::span<const double> thresholds);

/// Quantiles of the positive grid values (values under 1e-12 * max count as
/// zero). Empty for an all-zero grid.
std::vector<double> default_thresholds(const DensityGrid& grid,
                                       std::span<const double> quantiles = kDefaultQuantiles);

double signed_area(const Ring& ring);
Point2 area_centroid(const Ring& ring);
bool point_in_ring(const Point2& p, const Ring& ring);

}  // namespace atlas
