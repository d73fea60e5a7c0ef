#include "atlas/tiling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace atlas {

namespace {

std::uint64_t spread_bits(std::uint32_t v) {
  std::uint64_t x = v;
  x = (x | (x << 16)) & 0x0000FFFF0000FFFFull;
  x = (x | (x << 8)) & 0x00FF00FF00FF00FFull;
  x = (x | (x << 4)) & 0x0F0F0F0F0F0F0F0Full;
  x = (x | (x << 2)) & 0x3333333333333333ull;
  x = (x | (x << 1)) & 0x5555555555555555ull;
  return x;
}

void check_level(int level) {
  if (level < 0 || level > kMaxTileLevel) {
    throw std::invalid_argument("tile level " + std::to_string(level) + " outside [0, " +
                                std::to_string(kMaxTileLevel) + "]");
  }
}

std::uint32_t cell_index(double value, double lo, double side, int level) {
  // The unit fraction is scaled by an exact power of two, so the index at
  // level L-1 is always the index at level L halved.
  double u = (value - lo) / side;
  u = std::min(u, std::nextafter(1.0, 0.0));
  const auto cells = std::uint64_t{1} << level;
  const auto i = static_cast<std::uint64_t>(std::floor(std::ldexp(u, level)));
  return static_cast<std::uint32_t>(std::min(i, cells - 1));
}

}  // namespace

std::uint64_t TileKey::morton() const { return spread_bits(ix) | (spread_bits(iy) << 1); }

bool TileKey::valid() const {
  if (level < 0 || level > kMaxTileLevel) return false;
  const auto cells = std::uint64_t{1} << level;
  return ix < cells && iy < cells;
}

const TilePayload* TileLevel::find(std::uint32_t ix, std::uint32_t iy) const {
  const TileKey probe{level, ix, iy};
  const auto code = probe.morton();
  auto it = std::lower_bound(tiles.begin(), tiles.end(), code,
                             [](const TilePayload& t, std::uint64_t c) { return t.key.morton() < c; });
  if (it == tiles.end() || !(it->key == probe)) return nullptr;
  return &*it;
}

std::uint64_t TileLevel::total_count() const {
  std::uint64_t total = 0;
  for (const auto& t : tiles) total += t.count;
  return total;
}

TileKey point_to_tile(double x, double y, const RootBounds& bounds, int level) {
  check_level(level);
  if (!bounds.contains(x, y)) {
    throw std::out_of_range("point (" + format_double(x) + ", " + format_double(y) +
                            ") outside root bounds");
  }
  return {level, cell_index(x, bounds.xmin(), bounds.side, level),
          cell_index(y, bounds.ymin(), bounds.side, level)};
}

Rect tile_bounds(const TileKey& key, const RootBounds& bounds) {
  const double step = std::ldexp(bounds.side, -key.level);
  const double x0 = bounds.xmin();
  const double y0 = bounds.ymin();
  return {x0 + key.ix * step, y0 + key.iy * step, x0 + (key.ix + 1.0) * step,
          y0 + (key.iy + 1.0) * step};
}

TileLevel build_leaf_level(std::span<const PointRecord> points, const RootBounds& bounds, int level) {
  check_level(level);
  struct Assigned {
    std::uint64_t code;
    std::uint32_t index;
    TileKey key;
  };
  std::vector<Assigned> assigned;
  assigned.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const TileKey key = point_to_tile(points[i], bounds, level);
    assigned.push_back({key.morton(), static_cast<std::uint32_t>(i), key});
  }
  std::sort(assigned.begin(), assigned.end(), [](const Assigned& a, const Assigned& b) {
    return a.code != b.code ? a.code < b.code : a.index < b.index;
  });

  TileLevel out;
  out.level = level;
  for (std::size_t i = 0; i < assigned.size();) {
    TilePayload tile;
    tile.key = assigned[i].key;
    std::size_t j = i;
    for (; j < assigned.size() && assigned[j].code == assigned[i].code; ++j) {
      const auto& p = points[assigned[j].index];
      tile.sum_x += p.x;
      tile.sum_y += p.y;
      tile.points.push_back(assigned[j].index);
    }
    tile.count = tile.points.size();
    out.tiles.push_back(std::move(tile));
    i = j;
  }
  return out;
}

AggregationMatrix aggregation_matrix(const TileLevel& child) {
  if (child.level < 1) throw std::invalid_argument("cannot aggregate above the root level");
  AggregationMatrix m;
  m.level = child.level;

  std::vector<CsrMatrix<std::uint8_t>::Triplet> triplets;
  triplets.reserve(child.tiles.size());
  // Children are in Morton order, so each parent's children are contiguous.
  for (std::size_t c = 0; c < child.tiles.size(); ++c) {
    const TileKey parent = child.tiles[c].key.parent();
    if (m.parents.empty() || !(m.parents.back() == parent)) m.parents.push_back(parent);
    triplets.push_back({static_cast<std::uint32_t>(m.parents.size() - 1),
                        static_cast<std::uint32_t>(c), 1});
  }
  m.entries = CsrMatrix<std::uint8_t>::from_triplets(m.parents.size(), child.tiles.size(),
                                                     std::move(triplets));
  return m;
}

TileLevel aggregate_level(const TileLevel& child, const AggregationMatrix& matrix) {
  if (matrix.level != child.level) {
    throw std::invalid_argument("aggregation matrix is for level " + std::to_string(matrix.level) +
                                ", child level is " + std::to_string(child.level));
  }
  if (matrix.entries.cols() != child.tiles.size()) {
    throw std::invalid_argument("aggregation matrix does not match child tile count");
  }

  std::vector<std::uint64_t> counts(child.tiles.size());
  std::vector<double> sums(child.tiles.size() * 2);
  for (std::size_t c = 0; c < child.tiles.size(); ++c) {
    counts[c] = child.tiles[c].count;
    sums[2 * c] = child.tiles[c].sum_x;
    sums[2 * c + 1] = child.tiles[c].sum_y;
  }
  const auto parent_counts = multiply_dense<std::uint8_t, std::uint64_t>(matrix.entries, counts, 1);
  const auto parent_sums = multiply_dense<std::uint8_t, double>(matrix.entries, sums, 2);

  TileLevel out;
  out.level = child.level - 1;
  out.tiles.resize(matrix.parents.size());
  for (std::size_t r = 0; r < matrix.parents.size(); ++r) {
    auto& tile = out.tiles[r];
    tile.key = matrix.parents[r];
    tile.count = parent_counts[r];
    tile.sum_x = parent_sums[2 * r];
    tile.sum_y = parent_sums[2 * r + 1];
    for (auto c : matrix.entries.row_cols(r)) {
      const auto& src = child.tiles[c].points;
      const auto mid = tile.points.size();
      tile.points.insert(tile.points.end(), src.begin(), src.end());
      std::inplace_merge(tile.points.begin(), tile.points.begin() + static_cast<std::ptrdiff_t>(mid),
                         tile.points.end());
    }
  }
  return out;
}

std::vector<int> choose_levels(std::uint64_t n_points, std::uint64_t target_points_per_tile,
                               int n_levels) {
  if (n_points == 0 || target_points_per_tile == 0 || n_levels <= 0) {
    throw std::invalid_argument("choose_levels arguments must be positive");
  }
  // Smallest depth whose 4^depth tiles average at most the target.
  int finest = 0;
  long double capacity = static_cast<long double>(target_points_per_tile);
  while (capacity < static_cast<long double>(n_points) && finest < kMaxTileLevel) {
    capacity *= 4;
    ++finest;
  }
  finest = std::max(finest, 1);

  std::vector<int> levels;
  for (int i = 0; i < n_levels; ++i) {
    const int depth = std::max(1, finest - 2 * i);
    if (levels.empty() || levels.back() != depth) levels.push_back(depth);
  }
  return levels;
}

}  // namespace atlas
