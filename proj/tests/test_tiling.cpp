#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "atlas/tiling.hpp"
#include "test_support.hpp"

using namespace atlas;

namespace {

const RootBounds kUnit{0.5, 0.5, 1.0, 0.0};

double rel_diff(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0 ? 0 : std::abs(a - b) / scale;
}

}  // namespace

TEST_CASE("point to tile on the unit square") {
  CHECK(point_to_tile(0.1, 0.1, kUnit, 1) == TileKey{1, 0, 0});
  CHECK(point_to_tile(0.6, 0.7, kUnit, 2) == TileKey{2, 2, 2});
  CHECK(point_to_tile(0.999, 0.3, kUnit, 0) == TileKey{0, 0, 0});
  CHECK(point_to_tile(0.5, 0.5, kUnit, 1) == TileKey{1, 1, 1});
}

TEST_CASE("points outside the root are an error") {
  CHECK_THROWS_AS(point_to_tile(1.0, 0.5, kUnit, 3), std::out_of_range);
  CHECK_THROWS_AS(point_to_tile(-0.1, 0.5, kUnit, 3), std::out_of_range);
  CHECK_THROWS(point_to_tile(0.5, 0.5, kUnit, kMaxTileLevel + 1));
}

TEST_CASE("tile bounds") {
  CHECK(tile_bounds({0, 0, 0}, kUnit) == Rect{0, 0, 1, 1});
  CHECK(tile_bounds({1, 1, 0}, kUnit) == Rect{0.5, 0, 1, 0.5});
}

TEST_CASE("property: children partition their parent") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-100, 100);
  for (int trial = 0; trial < 500; ++trial) {
    const RootBounds b{u(rng), u(rng), std::abs(u(rng)) + 0.5, 0.0};
    const int level = trial % 12;
    std::uniform_int_distribution<std::uint32_t> cell(0, (1u << level) - 1);
    const TileKey key{level, cell(rng), cell(rng)};
    const Rect r = tile_bounds(key, b);
    const Rect c00 = tile_bounds({level + 1, 2 * key.ix, 2 * key.iy}, b);
    const Rect c10 = tile_bounds({level + 1, 2 * key.ix + 1, 2 * key.iy}, b);
    const Rect c01 = tile_bounds({level + 1, 2 * key.ix, 2 * key.iy + 1}, b);
    const Rect c11 = tile_bounds({level + 1, 2 * key.ix + 1, 2 * key.iy + 1}, b);
    // Shared edges coincide exactly, so the half-open children tile the parent.
    CHECK(c00.x0 == r.x0);
    CHECK(c00.y0 == r.y0);
    CHECK(c11.x1 == r.x1);
    CHECK(c11.y1 == r.y1);
    CHECK(c00.x1 == c10.x0);
    CHECK(c00.y1 == c01.y0);
    CHECK(c01.x1 == c11.x0);
    CHECK(c10.y1 == c11.y0);
    CHECK(c10.x1 == r.x1);
    CHECK(c01.y1 == r.y1);
    for (const auto& c : {c00, c10, c01, c11}) CHECK(c.x0 < c.x1);

    // Points sampled inside the parent land in exactly one child, which is
    // also what point_to_tile reports.
    std::uniform_real_distribution<double> px(r.x0, r.x1), py(r.y0, r.y1);
    for (int s = 0; s < 8; ++s) {
      const double x = px(rng), y = py(rng);
      if (!b.contains(x, y)) continue;
      int hits = 0;
      for (const auto& c : {c00, c10, c01, c11}) hits += (x >= c.x0 && x < c.x1 && y >= c.y0 && y < c.y1);
      CHECK(hits == 1);
      CHECK(point_to_tile(x, y, b, level + 1).parent() == point_to_tile(x, y, b, level));
    }
  }
}

TEST_CASE("leaf level of four quadrant centers") {
  std::vector<PointRecord> pts{{0.25, 0.25}, {0.75, 0.25}, {0.25, 0.75}, {0.75, 0.75}};
  auto leaf = build_leaf_level(pts, kUnit, 1);
  REQUIRE(leaf.tiles.size() == 4);
  for (const auto& t : leaf.tiles) CHECK(t.count == 1);
  // Morton order: (0,0), (1,0), (0,1), (1,1).
  CHECK(leaf.tiles[1].key == TileKey{1, 1, 0});
  CHECK(leaf.tiles[2].key == TileKey{1, 0, 1});
  CHECK(leaf.find(1, 1)->points == std::vector<std::uint32_t>{3});
  CHECK(leaf.find(2, 2) == nullptr);
}

TEST_CASE("leaf counts are conserved") {
  auto pts = testing::uniform_points(1000, 9);
  auto b = infer_bounds(pts, 0.01);
  for (int level : {0, 3, 7, 12}) CHECK(build_leaf_level(pts, b, level).total_count() == 1000);
}

TEST_CASE("identical points share one tile at every level") {
  std::vector<PointRecord> pts(50, PointRecord{2.5, -1.0});
  auto b = infer_bounds(pts, 0.01);
  clamp_into(pts, b);
  for (int level = 0; level <= 10; ++level) CHECK(build_leaf_level(pts, b, level).tiles.size() == 1);
}

TEST_CASE("aggregate sums siblings") {
  TileLevel child;
  child.level = 2;
  child.tiles.push_back({{2, 0, 0}, 3, 0.3, 0.3, {0, 1, 4}});
  child.tiles.push_back({{2, 1, 1}, 5, 1.5, 1.5, {2, 3, 5, 6, 7}});
  auto parent = aggregate_level(child, aggregation_matrix(child));
  REQUIRE(parent.tiles.size() == 1);
  CHECK(parent.tiles[0].key == TileKey{1, 0, 0});
  CHECK(parent.tiles[0].count == 8);
  CHECK(parent.tiles[0].points == std::vector<std::uint32_t>{0, 1, 2, 3, 4, 5, 6, 7});
  CHECK(parent.tiles[0].sum_x == doctest::Approx(1.8));
}

TEST_CASE("a single child passes through unchanged") {
  TileLevel child;
  child.level = 3;
  child.tiles.push_back({{3, 5, 6}, 2, 1.25, -0.5, {4, 9}});
  auto parent = aggregate_level(child, aggregation_matrix(child));
  REQUIRE(parent.tiles.size() == 1);
  CHECK(parent.tiles[0].key == TileKey{2, 2, 3});
  CHECK(parent.tiles[0].count == 2);
  CHECK(parent.tiles[0].sum_x == 1.25);
  CHECK(parent.tiles[0].sum_y == -0.5);
  CHECK(parent.tiles[0].points == child.tiles[0].points);
}

TEST_CASE("aggregation rejects a matrix for another level") {
  auto pts = testing::uniform_points(100, 1);
  auto b = infer_bounds(pts, 0.01);
  auto l3 = build_leaf_level(pts, b, 3);
  auto l4 = build_leaf_level(pts, b, 4);
  CHECK_THROWS_AS(aggregate_level(l3, aggregation_matrix(l4)), std::invalid_argument);
}

TEST_CASE("aggregation matrix columns hold a single one") {
  auto pts = testing::uniform_points(3000, 17);
  auto b = infer_bounds(pts, 0.01);
  auto leaf = build_leaf_level(pts, b, 5);
  auto m = aggregation_matrix(leaf);
  const auto sums = m.entries.column_sums();
  REQUIRE(sums.size() == leaf.tiles.size());
  for (std::size_t c = 0; c < sums.size(); ++c) {
    CHECK(sums[c] == 1);
    // The nonzero sits in the row of the child's halved key.
    bool found = false;
    for (std::size_t r = 0; r < m.parents.size(); ++r) {
      if (m.entries.at(r, c) == 1) found = (m.parents[r] == leaf.tiles[c].key.parent());
    }
    CHECK(found);
  }
}

TEST_CASE("oracle: matrix aggregation equals recomputation from raw points") {
  auto pts = testing::uniform_points(10000, 2024, -3.0, 7.0);
  auto b = infer_bounds(pts, 0.01);
  clamp_into(pts, b);

  auto level = build_leaf_level(pts, b, 6);
  for (int depth = 5; depth >= 1; --depth) {
    level = aggregate_level(level, aggregation_matrix(level));
    REQUIRE(level.level == depth);

    // Oracle payloads from a quadrant-by-quadrant descent per point.
    struct Acc {
      std::uint64_t count = 0;
      long double sx = 0, sy = 0;
      std::vector<std::uint32_t> points;
    };
    std::map<std::pair<std::uint32_t, std::uint32_t>, Acc> oracle;
    for (std::uint32_t i = 0; i < pts.size(); ++i) {
      auto& acc = oracle[testing::descend_to_tile(pts[i].x, pts[i].y, b, depth)];
      ++acc.count;
      acc.sx += pts[i].x;
      acc.sy += pts[i].y;
      acc.points.push_back(i);
    }
    REQUIRE(level.tiles.size() == oracle.size());
    std::uint64_t total = 0;
    for (const auto& t : level.tiles) {
      auto it = oracle.find({t.key.ix, t.key.iy});
      REQUIRE(it != oracle.end());
      CHECK(t.count == it->second.count);
      CHECK(t.points == it->second.points);
      const double ox = static_cast<double>(it->second.sx / it->second.count);
      const double oy = static_cast<double>(it->second.sy / it->second.count);
      CHECK(rel_diff(t.centroid_x(), ox) <= 1e-12);
      CHECK(rel_diff(t.centroid_y(), oy) <= 1e-12);
      total += t.count;
    }
    CHECK(total == pts.size());
    for (std::size_t i = 1; i < level.tiles.size(); ++i) {
      CHECK(level.tiles[i - 1].key.morton() < level.tiles[i].key.morton());
    }
  }
}

TEST_CASE("choose levels") {
  CHECK(choose_levels(1'800'000, 100, 3) == std::vector<int>{8, 6, 4});
  CHECK(choose_levels(10, 100, 3) == std::vector<int>{1});
  CHECK(choose_levels(102'400, 100, 3) == std::vector<int>{5, 3, 1});
  CHECK(choose_levels(102'401, 100, 3) == std::vector<int>{6, 4, 2});
  CHECK(choose_levels(2000, 100, 3) == std::vector<int>{3, 1});
}

TEST_CASE("morton order keeps siblings contiguous") {
  for (std::uint32_t ix = 0; ix < 16; ++ix) {
    for (std::uint32_t iy = 0; iy < 16; ++iy) {
      const TileKey k{4, ix, iy};
      CHECK((k.morton() >> 2) == k.parent().morton());
      CHECK(k.valid());
    }
  }
  CHECK_FALSE(TileKey{2, 4, 0}.valid());
}
