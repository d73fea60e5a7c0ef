#include "atlas/contour.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace atlas {

namespace {

constexpr std::uint32_t kNone = UINT32_MAX;

// Cell-center samples padded with a zero frame whose samples sit exactly on
// the extent boundary.
class Lattice {
 public:
  explicit Lattice(const DensityGrid& grid) : w_(grid.nx + 2), h_(grid.ny + 2) {
    xs_.resize(w_);
    ys_.resize(h_);
    xs_.front() = grid.extent.x0;
    xs_.back() = grid.extent.x1;
    ys_.front() = grid.extent.y0;
    ys_.back() = grid.extent.y1;
    for (std::size_t i = 0; i < grid.nx; ++i) xs_[i + 1] = grid.center_x(i);
    for (std::size_t j = 0; j < grid.ny; ++j) ys_[j + 1] = grid.center_y(j);
    values_.assign(w_ * h_, 0.0);
    for (std::size_t j = 0; j < grid.ny; ++j) {
      for (std::size_t i = 0; i < grid.nx; ++i) values_[(j + 1) * w_ + i + 1] = grid.at(i, j);
    }
  }

  std::size_t width() const { return w_; }
  std::size_t height() const { return h_; }
  double value(std::size_t i, std::size_t j) const { return values_[j * w_ + i]; }

  // Edge ids: horizontal edges (i,j)-(i+1,j) first, then vertical (i,j)-(i,j+1).
  std::uint32_t h_edge(std::size_t i, std::size_t j) const {
    return static_cast<std::uint32_t>(j * (w_ - 1) + i);
  }
  std::uint32_t v_edge(std::size_t i, std::size_t j) const {
    return static_cast<std::uint32_t>(h_ * (w_ - 1) + j * w_ + i);
  }
  std::size_t edge_count() const { return h_ * (w_ - 1) + (h_ - 1) * w_; }

  Point2 crossing(std::uint32_t edge, double threshold) const {
    std::size_t i0, j0, i1, j1;
    const std::size_t n_h = h_ * (w_ - 1);
    if (edge < n_h) {
      j0 = j1 = edge / (w_ - 1);
      i0 = edge % (w_ - 1);
      i1 = i0 + 1;
    } else {
      const std::size_t e = edge - n_h;
      j0 = e / w_;
      i0 = i1 = e % w_;
      j1 = j0 + 1;
    }
    const double a = value(i0, j0);
    const double b = value(i1, j1);
    const double t = (threshold - a) / (b - a);
    return {xs_[i0] + t * (xs_[i1] - xs_[i0]), ys_[j0] + t * (ys_[j1] - ys_[j0])};
  }

 private:
  std::size_t w_, h_;
  std::vector<double> xs_, ys_, values_;
};

std::vector<Ring> trace_rings(const Lattice& lat, double threshold) {
  std::vector<std::uint32_t> next(lat.edge_count(), kNone);
  const auto link = [&](std::uint32_t from, std::uint32_t to) {
    if (next[from] != kNone) throw std::logic_error("contour edge used twice");
    next[from] = to;
  };

  for (std::size_t j = 0; j + 1 < lat.height(); ++j) {
    for (std::size_t i = 0; i + 1 < lat.width(); ++i) {
      const double v[4] = {lat.value(i, j), lat.value(i + 1, j), lat.value(i + 1, j + 1),
                           lat.value(i, j + 1)};
      const bool in[4] = {v[0] > threshold, v[1] > threshold, v[2] > threshold, v[3] > threshold};
      if (in[0] == in[1] && in[1] == in[2] && in[2] == in[3]) continue;

      // Cell sides counterclockwise: bottom, right, top, left. Side k runs
      // from corner k to corner k+1.
      const std::uint32_t sides[4] = {lat.h_edge(i, j), lat.v_edge(i + 1, j), lat.h_edge(i, j + 1),
                                      lat.v_edge(i, j)};
      std::uint32_t edges[4] = {};
      bool exits[4] = {};  // inside -> outside along the CCW walk
      int n = 0;
      for (int k = 0; k < 4; ++k) {
        if (in[k] != in[(k + 1) % 4]) {
          edges[n] = sides[k];
          exits[n] = in[k];
          ++n;
        }
      }
      if (n == 2) {
        if (exits[0]) link(edges[0], edges[1]);
        else link(edges[1], edges[0]);
      } else {
        // Saddle: an inside center joins the two inside corners.
        const bool center_in = (v[0] + v[1] + v[2] + v[3]) / 4.0 > threshold;
        for (int k = 0; k < 4; ++k) {
          if (exits[k]) link(edges[k], edges[(k + (center_in ? 1 : 3)) % 4]);
        }
      }
    }
  }

  std::vector<Ring> rings;
  std::vector<char> seen(next.size(), 0);
  for (std::uint32_t start = 0; start < next.size(); ++start) {
    if (next[start] == kNone || seen[start]) continue;
    Ring ring;
    std::uint32_t e = start;
    do {
      if (e == kNone || seen[e]) throw std::logic_error("open contour");
      seen[e] = 1;
      ring.push_back(lat.crossing(e, threshold));
      e = next[e];
    } while (e != start);
    ring.push_back(ring.front());
    rings.push_back(std::move(ring));
  }
  return rings;
}

}  // namespace

std::vector<ContourPolygon> extract_contours(const DensityGrid& grid, std::span<const double> thresholds) {
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    if (!(thresholds[i] > 0.0)) throw std::invalid_argument("contour thresholds must be positive");
    if (i > 0 && thresholds[i] < thresholds[i - 1]) {
      throw std::invalid_argument("contour thresholds must be ascending");
    }
  }
  double total = 0.0;
  for (double v : grid.values) total += v;

  const Lattice lattice(grid);
  std::vector<ContourPolygon> out;
  for (double threshold : thresholds) {
    auto rings = trace_rings(lattice, threshold);
    if (rings.empty()) continue;
    double above = 0.0;
    for (double v : grid.values) {
      if (v > threshold) above += v;
    }
    out.push_back({threshold, std::move(rings), total > 0.0 ? above / total : 0.0});
  }
  return out;
}

std::vector<double> default_thresholds(const DensityGrid& grid, std::span<const double> quantiles) {
  const double max = grid.max_value();
  if (!(max > 0.0)) return {};
  const double floor = 1e-12 * max;
  std::vector<double> positive;
  for (double v : grid.values) {
    if (v >= floor) positive.push_back(v);
  }
  std::sort(positive.begin(), positive.end());

  std::vector<double> levels;
  levels.reserve(quantiles.size());
  const double last = static_cast<double>(positive.size() - 1);
  for (double q : quantiles) {
    const double pos = q * last;
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, positive.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    levels.push_back(positive[lo] + frac * (positive[hi] - positive[lo]));
  }
  return levels;
}

double signed_area(const Ring& ring) {
  double twice = 0.0;
  for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
    twice += ring[i].x * ring[i + 1].y - ring[i + 1].x * ring[i].y;
  }
  return twice / 2.0;
}

Point2 area_centroid(const Ring& ring) {
  if (ring.empty()) throw std::invalid_argument("empty ring");
  // Shoelace about the first vertex to limit cancellation.
  const Point2 o = ring.front();
  double a2 = 0.0, cx = 0.0, cy = 0.0;
  for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
    const double x0 = ring[i].x - o.x, y0 = ring[i].y - o.y;
    const double x1 = ring[i + 1].x - o.x, y1 = ring[i + 1].y - o.y;
    const double cross = x0 * y1 - x1 * y0;
    a2 += cross;
    cx += (x0 + x1) * cross;
    cy += (y0 + y1) * cross;
  }
  if (a2 == 0.0) return o;
  return {o.x + cx / (3.0 * a2), o.y + cy / (3.0 * a2)};
}

bool point_in_ring(const Point2& p, const Ring& ring) {
  bool inside = false;
  for (std::size_t i = 0, j = ring.size() - 1; i < ring.size(); j = i++) {
    const auto& a = ring[i];
    const auto& b = ring[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x) inside = !inside;
    }
  }
  return inside;
}

}  // namespace atlas
