#include "atlas/density.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>

namespace atlas {

double DensityGrid::max_value() const {
  return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
}

double DensityGrid::mass() const {
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum * cell_width() * cell_height();
}

namespace {

double sample_std(std::span<const Point2> points, double Point2::*axis) {
  const double n = static_cast<double>(points.size());
  double mean = 0.0;
  for (const auto& p : points) mean += p.*axis;
  mean /= n;
  double ss = 0.0;
  for (const auto& p : points) {
    const double d = p.*axis - mean;
    ss += d * d;
  }
  return std::sqrt(ss / (n - 1.0));
}

DensityGrid zero_grid(std::size_t nx, std::size_t ny, const GridExtent& extent) {
  return {nx, ny, extent, std::vector<double>(nx * ny, 0.0)};
}

// Rows of one kernel factor: exp(-(c_i - p)^2 / (2 h^2)) for every center.
template <class Matrix>
void fill_factor(Matrix& m, std::span<const Point2> block, double Point2::*axis, double origin,
                 double step, double h) {
  const double inv = 1.0 / (2.0 * h * h);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    const double p = block[static_cast<std::size_t>(r)].*axis;
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const double d = origin + (static_cast<double>(c) + 0.5) * step - p;
      m(r, c) = std::exp(-d * d * inv);
    }
  }
}

}  // namespace

Bandwidth silverman_bandwidth(std::span<const Point2> points) {
  const std::size_t n = points.size();
  if (n < 2) {
    throw std::invalid_argument("Silverman bandwidth needs at least 2 points; pass --bandwidth hx,hy");
  }
  constexpr double d = 2.0;
  const double factor = std::pow(static_cast<double>(n) * (d + 2.0) / 4.0, -1.0 / (d + 4.0));
  const double sx = sample_std(points, &Point2::x);
  const double sy = sample_std(points, &Point2::y);
  if (!(sx > 0.0) || !(sy > 0.0)) {
    throw std::invalid_argument("zero coordinate variance; pass --bandwidth hx,hy");
  }
  return {factor * sx, factor * sy};
}

DensityGrid kde_grid(std::span<const Point2> points, const Bandwidth& bandwidth, std::size_t nx,
                     std::size_t ny, const GridExtent& extent) {
  if (nx < 2 || ny < 2) throw std::invalid_argument("grid needs at least 2x2 cells");
  if (!(extent.x1 > extent.x0) || !(extent.y1 > extent.y0)) {
    throw std::invalid_argument("grid extent is empty");
  }
  if (!(bandwidth.hx > 0.0) || !(bandwidth.hy > 0.0)) {
    throw std::invalid_argument("bandwidth must be positive");
  }
  DensityGrid grid = zero_grid(nx, ny, extent);
  if (points.empty()) return grid;

  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const auto cols = static_cast<Eigen::Index>(nx);
  const auto rows = static_cast<Eigen::Index>(ny);
  Eigen::Map<RowMajor> acc(grid.values.data(), rows, cols);

  // exp(-(dx^2/2hx^2 + dy^2/2hy^2)) = exp(-dx^2/2hx^2) * exp(-dy^2/2hy^2), so
  // the grid is Ky^T * Kx summed over point blocks.
  constexpr std::size_t kBlock = 2048;
  Eigen::MatrixXd kx, ky;
  for (std::size_t start = 0; start < points.size(); start += kBlock) {
    const auto block = points.subspan(start, std::min(kBlock, points.size() - start));
    const auto b = static_cast<Eigen::Index>(block.size());
    kx.resize(b, cols);
    ky.resize(b, rows);
    fill_factor(kx, block, &Point2::x, extent.x0, grid.cell_width(), bandwidth.hx);
    fill_factor(ky, block, &Point2::y, extent.y0, grid.cell_height(), bandwidth.hy);
    acc.noalias() += ky.transpose() * kx;
  }
  const double norm =
      1.0 / (static_cast<double>(points.size()) * 2.0 * std::numbers::pi * bandwidth.hx * bandwidth.hy);
  acc *= norm;
  return grid;
}

std::vector<Point2> positions(std::span<const PointRecord> points) {
  std::vector<Point2> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back({p.x, p.y});
  return out;
}

std::size_t DensitySet::grid_count() const {
  std::size_t n = 1 + groups.size();
  for (const auto& [group, times] : slices) n += times.size();
  return n;
}

DensitySet kde_slices(std::span<const PointRecord> points, const SliceOptions& options,
                      std::vector<std::string>* diagnostics) {
  const auto note = [&](std::string message) {
    if (diagnostics) diagnostics->push_back(std::move(message));
  };
  const auto all = positions(points);

  DensitySet set;
  set.bandwidth = options.bandwidth ? *options.bandwidth : silverman_bandwidth(all);
  set.overall = {points.size(), kde_grid(all, set.bandwidth, options.nx, options.ny, options.extent)};

  const bool has_groups =
      options.by_group && std::any_of(points.begin(), points.end(), [](const auto& p) { return p.group.has_value(); });
  const bool has_times =
      options.by_time && std::any_of(points.begin(), points.end(), [](const auto& p) { return p.time.has_value(); });

  const auto group_of = [&](const PointRecord& p) {
    return has_groups ? p.group.value_or(std::string()) : std::string();
  };

  std::map<std::string, Bandwidth> group_bandwidth;
  if (has_groups) {
    std::map<std::string, std::vector<Point2>> members;
    for (const auto& p : points) members[group_of(p)].push_back({p.x, p.y});
    for (auto& [name, pts] : members) {
      GroupDensity gd;
      gd.overall.count = pts.size();
      try {
        gd.bandwidth = options.bandwidth ? *options.bandwidth : silverman_bandwidth(pts);
        gd.overall.grid = kde_grid(pts, gd.bandwidth, options.nx, options.ny, options.extent);
      } catch (const std::invalid_argument& e) {
        note("group '" + name + "': " + e.what() + "; grid left at zero");
        gd.bandwidth = set.bandwidth;
        gd.overall.grid = zero_grid(options.nx, options.ny, options.extent);
      }
      group_bandwidth[name] = gd.bandwidth;
      set.groups.emplace(name, std::move(gd));
    }
  }

  if (has_times) {
    std::map<std::string, std::map<std::string, std::vector<Point2>>> members;
    std::size_t untimed = 0;
    for (const auto& p : points) {
      if (!p.time) {
        ++untimed;
        continue;
      }
      members[group_of(p)][*p.time].push_back({p.x, p.y});
    }
    if (untimed > 0) note(std::to_string(untimed) + " points without a time tag are left out of time slices");
    for (auto& [group, times] : members) {
      const Bandwidth bw = has_groups ? group_bandwidth.at(group) : set.bandwidth;
      for (auto& [time, pts] : times) {
        SliceGrid slice;
        slice.count = pts.size();
        if (pts.size() < 2) {
          note("slice '" + group + "'/'" + time + "' has fewer than 2 points; grid left at zero");
          slice.grid = zero_grid(options.nx, options.ny, options.extent);
        } else {
          slice.grid = kde_grid(pts, bw, options.nx, options.ny, options.extent);
        }
        set.slices[group].emplace(time, std::move(slice));
      }
    }
  }
  return set;
}

}  // namespace atlas
