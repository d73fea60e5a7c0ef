#include "atlas/labels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace atlas {

std::vector<AutoLabel> auto_labels(const ContourPolygon& band, const SummaryLevel& level,
                                   const RootBounds& bounds, std::size_t max_labels,
                                   std::vector<std::string>* diagnostics) {
  struct Candidate {
    double area;
    std::size_t ring;
  };
  std::vector<Candidate> outer;
  for (std::size_t r = 0; r < band.rings.size(); ++r) {
    const double area = signed_area(band.rings[r]);
    if (area > 0.0) outer.push_back({area, r});
  }
  std::stable_sort(outer.begin(), outer.end(),
                   [](const Candidate& a, const Candidate& b) { return a.area > b.area; });
  if (outer.size() > max_labels) outer.resize(max_labels);

  const double tile_width = std::ldexp(bounds.side, -level.level);
  const double reach = 2.0 * tile_width;
  std::set<std::size_t> used;
  std::vector<AutoLabel> labels;

  for (const auto& candidate : outer) {
    const Point2 center = area_centroid(band.rings[candidate.ring]);
    std::size_t best = level.tiles.size();
    double best_d2 = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < level.tiles.size(); ++t) {
      const Rect r = tile_bounds(level.tiles[t].key, bounds);
      const double dx = r.center_x() - center.x;
      const double dy = r.center_y() - center.y;
      const double d2 = dx * dx + dy * dy;
      if (d2 < best_d2) {
        best_d2 = d2;
        best = t;
      }
    }
    if (best == level.tiles.size() || std::sqrt(best_d2) > reach) {
      if (diagnostics) {
        diagnostics->push_back("no occupied tile near contour centroid (" + format_double(center.x) + ", " +
                               format_double(center.y) + "); label skipped");
      }
      continue;
    }
    if (!used.insert(best).second) continue;
    const auto& summary = level.tiles[best];
    labels.push_back({center, summary.key, summary.keywords, summary.exemplars});
  }
  return labels;
}

}  // namespace atlas
