#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "atlas/contour.hpp"
#include "atlas/density.hpp"
#include "test_support.hpp"

using namespace atlas;

namespace {

DensityGrid gaussian_bump_grid(double cx, double cy, double h, std::size_t n, const GridExtent& e) {
  return kde_grid(std::vector<Point2>{{cx, cy}}, {h, h}, n, n, e);
}

double gaussian_value(double r, double h) {
  return std::exp(-r * r / (2 * h * h)) / (2 * std::numbers::pi * h * h);
}

bool ring_inside(const Ring& inner, const Ring& outer) {
  for (std::size_t i = 0; i + 1 < inner.size(); ++i) {
    if (!point_in_ring(inner[i], outer)) return false;
  }
  return true;
}

void check_nested(const std::vector<ContourPolygon>& polys) {
  for (std::size_t k = 1; k < polys.size(); ++k) {
    for (const auto& ring : polys[k].rings) {
      bool contained = false;
      for (const auto& outer : polys[k - 1].rings) contained = contained || ring_inside(ring, outer);
      CHECK(contained);
    }
  }
}

}  // namespace

TEST_CASE("all-zero grid has no contours or thresholds") {
  DensityGrid grid{10, 10, {0, 1, 0, 1}, std::vector<double>(100, 0.0)};
  CHECK(extract_contours(grid, std::vector<double>{1e-6, 1.0}).empty());
  CHECK(default_thresholds(grid).empty());
}

TEST_CASE("threshold above the maximum yields nothing") {
  auto grid = gaussian_bump_grid(0.5, 0.5, 0.1, 40, {0, 1, 0, 1});
  CHECK(extract_contours(grid, std::vector<double>{grid.max_value() * 2}).empty());
}

TEST_CASE("thresholds must be positive and ascending") {
  auto grid = gaussian_bump_grid(0.5, 0.5, 0.1, 20, {0, 1, 0, 1});
  CHECK_THROWS(extract_contours(grid, std::vector<double>{0.0}));
  CHECK_THROWS(extract_contours(grid, std::vector<double>{2.0, 1.0}));
}

TEST_CASE("isotropic Gaussian isolines are circles") {
  const double h = 0.12;
  const std::size_t n = 100;
  const GridExtent e{0, 1, 0, 1};
  auto grid = gaussian_bump_grid(0.5, 0.5, h, n, e);
  const double diag = std::hypot(grid.cell_width(), grid.cell_height());
  for (double r : {0.05, 0.1, 0.2, 0.3}) {
    const double tau = gaussian_value(r, h);
    auto polys = extract_contours(grid, std::vector<double>{tau});
    REQUIRE(polys.size() == 1);
    REQUIRE(polys[0].rings.size() == 1);
    const auto& ring = polys[0].rings[0];
    CHECK(ring.front() == ring.back());
    CHECK(ring.size() > 8);
    for (const auto& v : ring) CHECK(std::abs(std::hypot(v.x - 0.5, v.y - 0.5) - r) <= 1.5 * diag);
    CHECK(signed_area(ring) > 0);
    CHECK(signed_area(ring) == doctest::Approx(std::numbers::pi * r * r).epsilon(0.02));
    const auto c = area_centroid(ring);
    CHECK(std::abs(c.x - 0.5) < 1e-9);
    CHECK(std::abs(c.y - 0.5) < 1e-9);
  }
}

TEST_CASE("two separated bumps give two rings") {
  const std::vector<Point2> pts{{0.2, 0.3}, {0.8, 0.7}};
  auto grid = kde_grid(pts, {0.05, 0.05}, 80, 80, {0, 1, 0, 1});
  auto polys = extract_contours(grid, std::vector<double>{grid.max_value() * 0.1});
  REQUIRE(polys.size() == 1);
  REQUIRE(polys[0].rings.size() == 2);
  CHECK_FALSE(ring_inside(polys[0].rings[0], polys[0].rings[1]));
  CHECK_FALSE(ring_inside(polys[0].rings[1], polys[0].rings[0]));
}

TEST_CASE("a ring around a hole runs clockwise") {
  // Ring-shaped density: points on a circle.
  std::vector<Point2> pts;
  for (int i = 0; i < 200; ++i) {
    const double a = 2 * std::numbers::pi * i / 200;
    pts.push_back({0.5 + 0.3 * std::cos(a), 0.5 + 0.3 * std::sin(a)});
  }
  auto grid = kde_grid(pts, {0.03, 0.03}, 120, 120, {0, 1, 0, 1});
  auto polys = extract_contours(grid, std::vector<double>{grid.max_value() * 0.5});
  REQUIRE(polys.size() == 1);
  REQUIRE(polys[0].rings.size() == 2);
  int outer = 0, hole = 0;
  for (const auto& r : polys[0].rings) (signed_area(r) > 0 ? outer : hole)++;
  CHECK(outer == 1);
  CHECK(hole == 1);
  CHECK(point_in_ring({0.5, 0.82}, polys[0].rings[0]) != point_in_ring({0.5, 0.82}, polys[0].rings[1]));
}

TEST_CASE("density touching the extent edge still closes") {
  auto grid = gaussian_bump_grid(0.0, 0.5, 0.1, 50, {0, 1, 0, 1});
  auto polys = extract_contours(grid, std::vector<double>{grid.max_value() * 0.5});
  REQUIRE(polys.size() == 1);
  REQUIRE(polys[0].rings.size() == 1);
  for (const auto& v : polys[0].rings[0]) {
    CHECK(v.x >= 0.0);
    CHECK(v.x <= 1.0);
  }
  CHECK(polys[0].probability_mass > 0);
  CHECK(polys[0].probability_mass < 1);
}

TEST_CASE("constant grid thresholds") {
  DensityGrid grid{10, 10, {0, 1, 0, 1}, std::vector<double>(100, 2.5)};
  auto levels = default_thresholds(grid);
  REQUIRE(levels.size() == 6);
  for (double t : levels) CHECK(t == 2.5);
  CHECK(extract_contours(grid, levels).empty());
}

TEST_CASE("single bump thresholds increase strictly") {
  auto grid = gaussian_bump_grid(0.4, 0.6, 0.1, 60, {0, 1, 0, 1});
  auto levels = default_thresholds(grid);
  REQUIRE(levels.size() == 6);
  for (std::size_t i = 1; i < levels.size(); ++i) CHECK(levels[i] > levels[i - 1]);
  CHECK(levels.back() <= grid.max_value());
}

TEST_CASE("property: thresholds scale with the grid") {
  auto pts = positions(testing::uniform_points(80, 14));
  auto grid = kde_grid(pts, silverman_bandwidth(pts), 40, 40, {-0.2, 1.2, -0.2, 1.2});
  auto base = default_thresholds(grid);
  for (double s : {0.5, 3.0, 1e6}) {
    auto scaled = grid;
    for (auto& v : scaled.values) v *= s;
    auto levels = default_thresholds(scaled);
    REQUIRE(levels.size() == base.size());
    for (std::size_t i = 0; i < levels.size(); ++i) CHECK(levels[i] == doctest::Approx(base[i] * s).epsilon(1e-12));
  }
}

TEST_CASE("property: higher thresholds nest inside lower ones") {
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    auto pts = testing::clustered_corpus({{0.3, 0.3, 0.05 + 0.01 * static_cast<double>(seed % 4)},
                                          {0.7, 0.65, 0.08},
                                          {0.25, 0.8, 0.04}},
                                         60 + 10 * seed, 3, 1, seed);
    auto b = infer_bounds(pts, 0.01);
    auto p2 = positions(pts);
    auto grid = kde_grid(p2, silverman_bandwidth(p2), 80, 80, GridExtent::from_bounds(b));
    auto polys = extract_contours(grid, default_thresholds(grid));
    REQUIRE(polys.size() >= 2);
    check_nested(polys);
    for (std::size_t k = 1; k < polys.size(); ++k) CHECK(polys[k].probability_mass <= polys[k - 1].probability_mass);
    for (const auto& poly : polys) {
      for (const auto& ring : poly.rings) {
        CHECK(ring.front() == ring.back());
        for (const auto& v : ring) {
          CHECK(v.x >= b.xmin());
          CHECK(v.x <= b.xmax());
          CHECK(v.y >= b.ymin());
          CHECK(v.y <= b.ymax());
        }
      }
    }
  }
}

TEST_CASE("property: reflecting the input reflects the contours") {
  auto pts = positions(testing::clustered_corpus({{-0.4, 0.1, 0.15}, {0.35, -0.2, 0.1}}, 150, 3, 1, 5));
  std::vector<Point2> mirrored;
  for (auto p : pts) mirrored.push_back({-p.x, p.y});
  const GridExtent e{-1, 1, -1, 1};
  const Bandwidth bw = silverman_bandwidth(pts);
  auto g1 = kde_grid(pts, bw, 64, 64, e);
  auto g2 = kde_grid(mirrored, bw, 64, 64, e);
  for (std::size_t iy = 0; iy < 64; ++iy) {
    for (std::size_t ix = 0; ix < 64; ++ix) {
      const double a = g1.at(ix, iy), b = g2.at(63 - ix, iy);
      CHECK(std::abs(a - b) <= 1e-9 * std::max(a, b));
    }
  }
  const auto levels = default_thresholds(g1);
  auto c1 = extract_contours(g1, levels);
  auto c2 = extract_contours(g2, levels);
  REQUIRE(c1.size() == c2.size());
  for (std::size_t k = 0; k < c1.size(); ++k) {
    REQUIRE(c1[k].rings.size() == c2[k].rings.size());
    struct Shape {
      double area, cx, cy;
    };
    auto shapes = [](const ContourPolygon& p, double flip) {
      std::vector<Shape> out;
      for (const auto& r : p.rings) {
        const auto c = area_centroid(r);
        out.push_back({std::abs(signed_area(r)), flip * c.x, c.y});
      }
      std::sort(out.begin(), out.end(), [](const Shape& a, const Shape& b) { return a.area < b.area; });
      return out;
    };
    const auto s1 = shapes(c1[k], 1.0), s2 = shapes(c2[k], -1.0);
    for (std::size_t i = 0; i < s1.size(); ++i) {
      CHECK(s1[i].area == doctest::Approx(s2[i].area).epsilon(1e-9));
      CHECK(std::abs(s1[i].cx - s2[i].cx) <= 1e-9);
      CHECK(std::abs(s1[i].cy - s2[i].cy) <= 1e-9);
    }
  }
}

TEST_CASE("polygon helpers") {
  const Ring square{{0, 0}, {2, 0}, {2, 2}, {0, 2}, {0, 0}};
  CHECK(signed_area(square) == 4.0);
  CHECK(area_centroid(square) == Point2{1, 1});
  CHECK(point_in_ring({1, 1}, square));
  CHECK_FALSE(point_in_ring({3, 1}, square));
  Ring cw(square.rbegin(), square.rend());
  CHECK(signed_area(cw) == -4.0);
}
