#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "atlas/contour.hpp"
#include "atlas/summarizer.hpp"

namespace atlas {

inline constexpr std::size_t kDefaultMaxLabels = 12;

struct AutoLabel {
  Point2 position;
  TileKey tile;
  std::vector<Keyword> keywords;
  std::vector<std::uint32_t> exemplars;

  bool operator==(const AutoLabel&) const = default;
};

/// One label per outer ring of `band` (largest first, at most max_labels):
/// placed at the ring's area centroid and carrying the summary of the
/// occupied tile whose center is nearest. A tile labels at most one ring;
/// rings with no tile center within two tile widths are skipped.
std::vector<AutoLabel> auto_labels(const ContourPolygon& band, const SummaryLevel& level,
                                   const RootBounds& bounds, std::size_t max_labels = kDefaultMaxLabels,
                                   std::vector<std::string>* diagnostics = nullptr);

}  // namespace atlas
